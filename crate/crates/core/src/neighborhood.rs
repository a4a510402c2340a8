//! Selection efficiency when the imperfect forecast is nearly right.
//!
//! Instead of a fixed candidate pair, each trial draws a "perfect"
//! forecast from a pool, draws the outcome from it, then picks an
//! "imperfect" forecast uniformly from the pool members within epsilon
//! distance delta of the perfect one. Over n such matches, each rule
//! again selects the system with the lower mean score; shrinking delta
//! probes how well the rules separate systems that barely differ.

use crate::error::{Error, Result};
use crate::odds::CandidateSet;
use crate::preference::TIE_TOLERANCE;
use crate::score::{ByRule, ForecastVector, OutcomeIndex, ScoringRule};
use crate::seeding::substream;
use rand::Rng;
use rayon::prelude::*;
use std::fmt;

/// Mean absolute difference between two three-outcome forecasts.
/// Ranges from 0 (identical) to 2/3 (opposite corners of the simplex).
pub fn epsilon_distance(a: &ForecastVector, b: &ForecastVector) -> Result<f64> {
    if a.categories() != 3 || b.categories() != 3 {
        return Err(Error::DimensionMismatch {
            left: a.categories(),
            right: b.categories(),
        });
    }
    let d: f64 = a
        .probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(d / 3.0)
}

/// One trial's cast: the generating forecast, its near neighbour, the
/// realised outcome, and how far apart the two forecasts were.
#[derive(Debug, Clone)]
pub struct PairedForecast {
    pub perfect: ForecastVector,
    pub imperfect: ForecastVector,
    pub outcome: OutcomeIndex,
    pub epsilon: f64,
}

/// Pairwise differences between rules' selection indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    IgnoranceVsRps,
    IgnoranceVsBrier,
    BrierVsRps,
}

impl Comparison {
    pub const ALL: [Comparison; 3] = [
        Comparison::IgnoranceVsRps,
        Comparison::IgnoranceVsBrier,
        Comparison::BrierVsRps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Comparison::IgnoranceVsRps => "ignorance-rps",
            Comparison::IgnoranceVsBrier => "ignorance-brier",
            Comparison::BrierVsRps => "brier-rps",
        }
    }

    fn sides(self) -> (ScoringRule, ScoringRule) {
        match self {
            Comparison::IgnoranceVsRps => (ScoringRule::Ignorance, ScoringRule::Rps),
            Comparison::IgnoranceVsBrier => (ScoringRule::Ignorance, ScoringRule::Brier),
            Comparison::BrierVsRps => (ScoringRule::Brier, ScoringRule::Rps),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Proportion of trials in which a rule selected the perfect system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionPoint {
    pub n: usize,
    pub rule: ScoringRule,
    pub proportion: f64,
}

/// Mean paired difference of selection indicators, with a bootstrap
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferencePoint {
    pub n: usize,
    pub comparison: Comparison,
    pub point: f64,
    pub lo95: f64,
    pub hi95: f64,
}

/// Results for one delta.
#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub delta: f64,
    pub proportions: Vec<ProportionPoint>,
    pub differences: Vec<DifferencePoint>,
}

/// Configuration for one neighbourhood sweep.
#[derive(Debug, Clone)]
pub struct Exp2Config<'a> {
    pub candidates: &'a CandidateSet,
    /// Neighbourhood radius in epsilon distance.
    pub delta: f64,
    /// Strictly increasing sequence lengths.
    pub n_grid: Vec<usize>,
    /// Independent trials per sequence length.
    pub trials: usize,
    /// Bootstrap resamples for the difference intervals.
    pub bootstrap_resamples: usize,
    pub master_seed: u64,
}

impl Exp2Config<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.candidates.len() < 2 {
            return Err(Error::InvalidConfig(
                "need at least two candidate forecasts".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta {} outside (0, 1)",
                self.delta
            )));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::InvalidConfig(
                "n_grid must be non-empty with positive lengths".into(),
            ));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("n_grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("need at least one trial".into()));
        }
        if self.bootstrap_resamples < 100 {
            return Err(Error::InvalidConfig(
                "bootstrap needs at least 100 resamples".into(),
            ));
        }
        Ok(())
    }
}

/// Give up on a trial after this many fresh perfect-forecast draws whose
/// neighbourhood turned out empty.
pub const PAIRING_RETRY_BUDGET: usize = 1000;

/// Rejection-sampling attempts before falling back to a full scan of
/// the pool.
const REJECTION_ATTEMPTS: usize = 2048;

fn neighbourhood_draw(
    candidates: &CandidateSet,
    perfect: &ForecastVector,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<Option<usize>> {
    let len = candidates.len();
    let admissible = |f: &ForecastVector| -> Result<bool> {
        Ok(f != perfect && epsilon_distance(f, perfect)? < delta)
    };
    // Uniform proposals with accept/reject reach a uniform draw from the
    // neighbourhood quickly when it is not tiny relative to the pool.
    if len > REJECTION_ATTEMPTS {
        for _ in 0..REJECTION_ATTEMPTS {
            let j = rng.random_range(0..len);
            if admissible(&candidates.members()[j].forecast)? {
                return Ok(Some(j));
            }
        }
    }
    // Small pool, or the rejection budget ran dry: enumerate the
    // neighbourhood and pick uniformly (still a uniform draw overall).
    let mut hood = Vec::new();
    for (j, c) in candidates.members().iter().enumerate() {
        if admissible(&c.forecast)? {
            hood.push(j);
        }
    }
    if hood.is_empty() {
        return Ok(None);
    }
    Ok(Some(hood[rng.random_range(0..hood.len())]))
}

/// Draw one trial: a perfect forecast uniformly from the pool, an
/// outcome from it, and an imperfect forecast uniformly from the pool
/// members (other than value-equal ones) within delta. A perfect draw
/// with an empty neighbourhood is redrawn, up to the retry budget.
pub fn draw_pair(
    candidates: &CandidateSet,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<PairedForecast> {
    for _ in 0..PAIRING_RETRY_BUDGET {
        let i = rng.random_range(0..candidates.len());
        let perfect = &candidates.members()[i].forecast;
        let outcome = perfect.sample_outcome(rng);
        if let Some(j) = neighbourhood_draw(candidates, perfect, delta, rng)? {
            let imperfect = candidates.members()[j].forecast.clone();
            let epsilon = epsilon_distance(perfect, &imperfect)?;
            return Ok(PairedForecast {
                perfect: perfect.clone(),
                imperfect,
                outcome,
                epsilon,
            });
        }
    }
    Err(Error::PairingInfeasible {
        delta,
        retries: PAIRING_RETRY_BUDGET,
    })
}

/// Sample pairings without scoring them, for inspection of what a given
/// delta actually pairs together.
pub fn pairing_preview(
    candidates: &CandidateSet,
    delta: f64,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<PairedForecast>> {
    (0..count).map(|_| draw_pair(candidates, delta, rng)).collect()
}

/// Selection indicator codes per trial: 0 = imperfect chosen, 1 = tie,
/// 2 = perfect chosen. Stored small and integral so sums are exact.
fn trial_codes(
    candidates: &CandidateSet,
    delta: f64,
    n: usize,
    rng: &mut impl Rng,
) -> Result<ByRule<u8>> {
    let mut perf = ByRule::<f64>::default();
    let mut imp = ByRule::<f64>::default();
    for _ in 0..n {
        let pair = draw_pair(candidates, delta, rng)?;
        for rule in ScoringRule::ALL {
            *perf.get_mut(rule) += rule.score(&pair.perfect, pair.outcome)?.value();
            *imp.get_mut(rule) += rule.score(&pair.imperfect, pair.outcome)?.value();
        }
    }
    Ok(ByRule::from_fn(|rule| {
        let mp = *perf.get(rule) / n as f64;
        let mi = *imp.get(rule) / n as f64;
        if mp.is_infinite() && mi.is_infinite() {
            return 1;
        }
        let d = mi - mp;
        if d.abs() <= TIE_TOLERANCE {
            1
        } else if d > 0.0 {
            2
        } else {
            0
        }
    }))
}

const EXP2_TAG: u64 = 0x4E42_4844; // "NBHD"
const BOOT_TAG: u64 = 0x4254_5354; // "BTST"

fn percentile(sorted: &[f64], q: f64) -> f64 {
    // Linear interpolation between order statistics.
    let last = sorted.len() - 1;
    let pos = q * last as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Run the sweep for one delta.
///
/// Per (n, trial) cell the RNG substream is keyed by (delta, n, trial),
/// so results are bit-identical across thread counts. The bootstrap
/// resamples trial indices once per replicate and applies the same
/// indices to all three paired differences.
pub fn run_exp2(cfg: &Exp2Config) -> Result<ComparisonResult> {
    cfg.validate()?;
    let delta_bits = cfg.delta.to_bits();
    let mut proportions = Vec::new();
    let mut differences = Vec::new();
    for &n in &cfg.n_grid {
        let codes: Vec<ByRule<u8>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = substream(
                    cfg.master_seed,
                    &[EXP2_TAG, delta_bits, n as u64, t as u64],
                );
                trial_codes(cfg.candidates, cfg.delta, n, &mut rng)
            })
            .collect::<Result<_>>()?;

        let trials = cfg.trials as f64;
        for rule in ScoringRule::ALL {
            let total: u64 = codes.iter().map(|c| *c.get(rule) as u64).sum();
            proportions.push(ProportionPoint {
                n,
                rule,
                proportion: total as f64 / 2.0 / trials,
            });
        }

        // Paired per-trial differences of selection indicators.
        let diff_series: Vec<[f64; 3]> = codes
            .iter()
            .map(|c| {
                let mut row = [0.0; 3];
                for (slot, cmp) in row.iter_mut().zip(Comparison::ALL) {
                    let (a, b) = cmp.sides();
                    *slot = (*c.get(a) as f64 - *c.get(b) as f64) / 2.0;
                }
                row
            })
            .collect();
        let point: [f64; 3] = {
            let mut sums = [0.0; 3];
            for row in &diff_series {
                for (s, v) in sums.iter_mut().zip(row) {
                    *s += v;
                }
            }
            sums.map(|s| s / trials)
        };
        let mut rng = substream(cfg.master_seed, &[BOOT_TAG, delta_bits, n as u64]);
        let mut resampled: [Vec<f64>; 3] = [
            Vec::with_capacity(cfg.bootstrap_resamples),
            Vec::with_capacity(cfg.bootstrap_resamples),
            Vec::with_capacity(cfg.bootstrap_resamples),
        ];
        for _ in 0..cfg.bootstrap_resamples {
            let mut sums = [0.0; 3];
            for _ in 0..cfg.trials {
                let t = rng.random_range(0..cfg.trials);
                for (s, v) in sums.iter_mut().zip(&diff_series[t]) {
                    *s += v;
                }
            }
            for (bucket, s) in resampled.iter_mut().zip(sums) {
                bucket.push(s / trials);
            }
        }
        for (ci, cmp) in Comparison::ALL.into_iter().enumerate() {
            let mut means = resampled[ci].clone();
            means.sort_by(|a, b| a.partial_cmp(b).expect("bootstrap means are finite"));
            differences.push(DifferencePoint {
                n,
                comparison: cmp,
                point: point[ci],
                lo95: percentile(&means, 0.025),
                hi95: percentile(&means, 0.975),
            });
        }
    }
    Ok(ComparisonResult {
        delta: cfg.delta,
        proportions,
        differences,
    })
}
