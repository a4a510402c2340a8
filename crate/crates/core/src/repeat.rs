//! Selection efficiency under repeated scoring.
//!
//! Two systems forecast the same sequence of matches. Per match, a fair
//! coin (or a configured mixing probability) decides which side of a
//! candidate pair is the true generating distribution; the *perfect*
//! system issues that distribution, the *imperfect* system issues the
//! other one. After n matches, each scoring rule selects the system with
//! the lower mean score. The quantity of interest is the probability
//! that a rule selects the perfect system, as a function of n.

use crate::error::{Error, Result};
use crate::preference::{ForecastPair, TIE_TOLERANCE};
use crate::score::{ByRule, ForecastVector, OutcomeIndex, ScoringRule};
use crate::seeding::substream;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Which side of the pair generated a trial's outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generating {
    Alpha,
    Beta,
}

/// A rule's verdict after n trials. Ties carry half weight when
/// aggregated into a selection probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selected {
    Perfect,
    Imperfect,
    Tie,
}

/// Verdicts of all three rules on one replicate.
pub type SelectionOutcome = ByRule<Selected>;

/// One point on a selection curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub p_perfect: f64,
    /// Binomial standard error; zero for exact enumeration.
    pub std_err: f64,
}

/// Selection probability against sequence length, for one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionCurve {
    pub rule: ScoringRule,
    pub points: Vec<CurvePoint>,
}

/// Configuration for the Monte Carlo sweep.
#[derive(Debug, Clone)]
pub struct Exp1Config {
    pub pair: ForecastPair,
    /// Strictly increasing sequence lengths to evaluate.
    pub n_grid: Vec<usize>,
    /// Replicates per grid point.
    pub replicates: usize,
    pub master_seed: u64,
    /// Probability that a trial's generating side is alpha.
    pub mixing_prob: f64,
}

impl Exp1Config {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("n_grid is empty".into()));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::InvalidConfig("sequence length must be at least 1".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("n_grid must be strictly increasing".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("need at least one replicate".into()));
        }
        if !(0.0..=1.0).contains(&self.mixing_prob) {
            return Err(Error::InvalidConfig(format!(
                "mixing_prob {} outside [0, 1]",
                self.mixing_prob
            )));
        }
        Ok(())
    }
}

/// Draw one trial: pick the generating side, then draw an outcome from
/// that side's distribution.
pub fn draw_trial(
    pair: &ForecastPair,
    mixing_prob: f64,
    rng: &mut impl Rng,
) -> (Generating, OutcomeIndex) {
    let generating = if rng.random::<f64>() < mixing_prob {
        Generating::Alpha
    } else {
        Generating::Beta
    };
    let dist = match generating {
        Generating::Alpha => pair.alpha(),
        Generating::Beta => pair.beta(),
    };
    (generating, dist.sample_outcome(rng))
}

fn side_dists(pair: &ForecastPair, generating: Generating) -> (&ForecastVector, &ForecastVector) {
    match generating {
        Generating::Alpha => (pair.alpha(), pair.beta()),
        Generating::Beta => (pair.beta(), pair.alpha()),
    }
}

/// Compare mean scores; differences inside the tie tolerance, or two
/// infinite means, count as a tie.
fn verdict(perfect_total: f64, imperfect_total: f64, n: usize) -> Selected {
    let mp = perfect_total / n as f64;
    let mi = imperfect_total / n as f64;
    if mp.is_infinite() && mi.is_infinite() {
        return Selected::Tie;
    }
    let d = mi - mp;
    if d.abs() <= TIE_TOLERANCE {
        Selected::Tie
    } else if d > 0.0 {
        Selected::Perfect
    } else {
        Selected::Imperfect
    }
}

fn select_from_iter(
    pair: &ForecastPair,
    trials: impl Iterator<Item = (Generating, OutcomeIndex)>,
) -> Result<SelectionOutcome> {
    let mut perf = ByRule::<f64>::default();
    let mut imp = ByRule::<f64>::default();
    let mut count = 0usize;
    for (generating, y) in trials {
        let (perf_dist, imp_dist) = side_dists(pair, generating);
        for rule in ScoringRule::ALL {
            *perf.get_mut(rule) += rule.score(perf_dist, y)?.value();
            *imp.get_mut(rule) += rule.score(imp_dist, y)?.value();
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyInput("selection needs at least one trial"));
    }
    Ok(ByRule::from_fn(|rule| {
        verdict(*perf.get(rule), *imp.get(rule), count)
    }))
}

/// Run the selection on an explicit trial sequence.
pub fn selection_from_trials(
    pair: &ForecastPair,
    trials: &[(Generating, OutcomeIndex)],
) -> Result<SelectionOutcome> {
    select_from_iter(pair, trials.iter().copied())
}

/// Draw n trials and select. Infallible on a valid pair because every
/// drawn outcome lies inside the pair's category range.
pub fn run_replicate(
    pair: &ForecastPair,
    n: usize,
    mixing_prob: f64,
    rng: &mut impl Rng,
) -> SelectionOutcome {
    select_from_iter(pair, (0..n).map(|_| draw_trial(pair, mixing_prob, rng)))
        .expect("drawn trials are always scoreable")
}

const EXP1_TAG: u64 = 0x5250_5431; // "RPT1"

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    perfect: u64,
    tie: u64,
}

impl Tally {
    fn add(self, other: Tally) -> Tally {
        Tally {
            perfect: self.perfect + other.perfect,
            tie: self.tie + other.tie,
        }
    }

    fn of(sel: Selected) -> Tally {
        match sel {
            Selected::Perfect => Tally { perfect: 1, tie: 0 },
            Selected::Tie => Tally { perfect: 0, tie: 1 },
            Selected::Imperfect => Tally::default(),
        }
    }
}

/// Monte Carlo estimate of the selection probability curves.
///
/// Each (n, replicate) cell runs on its own RNG substream, so the result
/// is bit-identical across thread counts. Ties contribute half a win;
/// the standard error is the binomial one at the estimated probability.
pub fn selection_probability_mc(cfg: &Exp1Config) -> Result<ByRule<SelectionCurve>> {
    cfg.validate()?;
    let mut curves = ByRule::from_fn(|rule| SelectionCurve {
        rule,
        points: Vec::with_capacity(cfg.n_grid.len()),
    });
    for &n in &cfg.n_grid {
        let tallies = (0..cfg.replicates)
            .into_par_iter()
            .map(|rep| {
                let mut rng: ChaCha12Rng =
                    substream(cfg.master_seed, &[EXP1_TAG, n as u64, rep as u64]);
                let sel = run_replicate(&cfg.pair, n, cfg.mixing_prob, &mut rng);
                sel.map(|_, &s| Tally::of(s))
            })
            .reduce(ByRule::<Tally>::default, |a, b| {
                ByRule::from_fn(|rule| a.get(rule).add(*b.get(rule)))
            });
        let reps = cfg.replicates as f64;
        for rule in ScoringRule::ALL {
            let t = tallies.get(rule);
            let p = (t.perfect as f64 + 0.5 * t.tie as f64) / reps;
            let std_err = (p * (1.0 - p) / reps).sqrt();
            curves.get_mut(rule).points.push(CurvePoint { n, p_perfect: p, std_err });
        }
    }
    Ok(curves)
}

/// State-count ceiling for exact enumeration.
pub const ENUMERATION_STATE_LIMIT: u128 = 1_000_000;

/// Above this sequence length the enumeration works in log space; below
/// it, products of exactly representable binomials keep small cases
/// bit-tight.
const DIRECT_PROB_MAX_N: usize = 40;

#[derive(Debug, Clone, Copy)]
struct TrialCategory {
    prob: f64,
    perf: [f64; 3],
    imp: [f64; 3],
}

fn live_categories(pair: &ForecastPair, mixing_prob: f64) -> Vec<TrialCategory> {
    let mut cats = Vec::new();
    for (generating, mix) in [(Generating::Alpha, mixing_prob), (Generating::Beta, 1.0 - mixing_prob)] {
        let (perf_dist, imp_dist) = side_dists(pair, generating);
        for y in 0..pair.categories() {
            let p = mix * perf_dist.probs()[y];
            if p > 0.0 {
                let yi = OutcomeIndex::new(y);
                let score3 = |dist: &ForecastVector| {
                    let mut out = [0.0; 3];
                    for (slot, rule) in out.iter_mut().zip(ScoringRule::ALL) {
                        *slot = rule.score(dist, yi).expect("category in range").value();
                    }
                    out
                };
                cats.push(TrialCategory { prob: p, perf: score3(perf_dist), imp: score3(imp_dist) });
            }
        }
    }
    cats
}

/// C(n + k - 1, k - 1): number of count vectors the enumeration visits.
fn composition_count(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for j in 1..k {
        acc = acc.saturating_mul(n + j) / j;
    }
    acc
}

/// Per-rule perfect-selection weight of one count vector: 1 for a win,
/// 0.5 for a tie, 0 for a loss. Zero counts are skipped so infinite
/// per-trial scores never multiply zero.
fn leaf_weights(cats: &[TrialCategory], counts: &[u64], n: usize) -> [f64; 3] {
    let mut w = [0.0; 3];
    for (ri, slot) in w.iter_mut().enumerate() {
        let mut perf_total = 0.0;
        let mut imp_total = 0.0;
        for (cat, &c) in cats.iter().zip(counts) {
            if c == 0 {
                continue;
            }
            perf_total += c as f64 * cat.perf[ri];
            imp_total += c as f64 * cat.imp[ri];
        }
        *slot = match verdict(perf_total, imp_total, n) {
            Selected::Perfect => 1.0,
            Selected::Tie => 0.5,
            Selected::Imperfect => 0.0,
        };
    }
    w
}

/// Exact multiplicative enumeration for small n. The running value is a
/// product of binomial coefficients (all below 2^53 at this scale) and
/// outcome probabilities.
fn enumerate_direct(cats: &[TrialCategory], n: usize) -> [f64; 3] {
    fn binom(n: u64, k: u64) -> f64 {
        let mut acc = 1.0f64;
        for j in 1..=k {
            acc = acc * (n - k + j) as f64 / j as f64;
        }
        acc
    }

    fn recurse(
        cats: &[TrialCategory],
        idx: usize,
        n_left: u64,
        acc: f64,
        counts: &mut [u64],
        n: usize,
        mass: &mut [f64; 3],
    ) {
        if idx == cats.len() - 1 {
            counts[idx] = n_left;
            let prob = acc * cats[idx].prob.powi(n_left as i32);
            let w = leaf_weights(cats, counts, n);
            for (m, wi) in mass.iter_mut().zip(w) {
                *m += prob * wi;
            }
            return;
        }
        for c in 0..=n_left {
            counts[idx] = c;
            let next = acc * binom(n_left, c) * cats[idx].prob.powi(c as i32);
            recurse(cats, idx + 1, n_left - c, next, counts, n, mass);
        }
    }

    let mut mass = [0.0; 3];
    let mut counts = vec![0u64; cats.len()];
    recurse(cats, 0, n as u64, 1.0, &mut counts, n, &mut mass);
    mass
}

/// Log-space enumeration for longer sequences, where the multinomial
/// coefficients overflow f64.
fn enumerate_log(cats: &[TrialCategory], n: usize) -> [f64; 3] {
    let mut ln_fact = vec![0.0f64; n + 1];
    for j in 1..=n {
        ln_fact[j] = ln_fact[j - 1] + (j as f64).ln();
    }
    let ln_p: Vec<f64> = cats.iter().map(|c| c.prob.ln()).collect();

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        cats: &[TrialCategory],
        ln_p: &[f64],
        ln_fact: &[f64],
        idx: usize,
        n_left: u64,
        acc: f64,
        counts: &mut [u64],
        n: usize,
        mass: &mut [f64; 3],
    ) {
        if idx == cats.len() - 1 {
            counts[idx] = n_left;
            let core = acc + n_left as f64 * ln_p[idx] - ln_fact[n_left as usize];
            let prob = (ln_fact[n] + core).exp();
            let w = leaf_weights(cats, counts, n);
            for (m, wi) in mass.iter_mut().zip(w) {
                *m += prob * wi;
            }
            return;
        }
        for c in 0..=n_left {
            counts[idx] = c;
            let next = acc + c as f64 * ln_p[idx] - ln_fact[c as usize];
            recurse(cats, ln_p, ln_fact, idx + 1, n_left - c, next, counts, n, mass);
        }
    }

    let mut mass = [0.0; 3];
    let mut counts = vec![0u64; cats.len()];
    recurse(cats, &ln_p, &ln_fact, 0, n as u64, 0.0, &mut counts, n, &mut mass);
    mass
}

/// Exact selection probabilities after n trials, by full enumeration of
/// the multinomial over live (generating side, outcome) categories.
///
/// Categories with zero probability are excluded up front, which keeps
/// the state space small for sparse pairs. The state count is capped at
/// [`ENUMERATION_STATE_LIMIT`].
pub fn selection_probability_exact(
    pair: &ForecastPair,
    n: usize,
    mixing_prob: f64,
) -> Result<ByRule<f64>> {
    if n == 0 {
        return Err(Error::InvalidConfig("sequence length must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&mixing_prob) {
        return Err(Error::InvalidConfig(format!(
            "mixing_prob {mixing_prob} outside [0, 1]"
        )));
    }
    let cats = live_categories(pair, mixing_prob);
    debug_assert!(!cats.is_empty());
    let states = composition_count(n as u128, cats.len() as u128);
    if states > ENUMERATION_STATE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            states,
            limit: ENUMERATION_STATE_LIMIT,
        });
    }
    let mass = if n <= DIRECT_PROB_MAX_N {
        enumerate_direct(&cats, n)
    } else {
        // Log-space probabilities carry ~1e-12 of relative rounding, so
        // the summed mass can poke marginally past 1.
        enumerate_log(&cats, n).map(|m| m.clamp(0.0, 1.0))
    };
    Ok(ByRule {
        ignorance: mass[0],
        rps: mass[1],
        brier: mass[2],
    })
}
