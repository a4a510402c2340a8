//! Forecast vectors, outcomes, and the three scoring rules.
//!
//! All rules are negatively oriented: lower is better, and a point-mass
//! forecast on the realised outcome scores zero. The ranked probability
//! score compares *cumulative* distributions, so it sees the ordering of
//! the categories; the Brier score does not. The ignorance score depends
//! only on the probability placed on the realised outcome and is infinite
//! when that probability is zero.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// How far the probabilities may drift from summing to one before the
/// vector is rejected outright. Inside the band they are renormalised.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector over R >= 2 ordered categories.
///
/// Construction validates entries (finite, non-negative) and the sum, so
/// every value of this type is a usable distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastVector {
    probs: Vec<f64>,
}

impl ForecastVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidForecast(format!(
                "need at least 2 categories, got {}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidForecast(format!(
                    "entry {i} is {p}, expected a finite non-negative probability"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidForecast(format!(
                "probabilities sum to {sum}, outside 1 +/- {PROB_SUM_TOLERANCE}"
            )));
        }
        let mut probs = probs;
        if sum != 1.0 {
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(Self { probs })
    }

    /// Convenience constructor for the three-outcome home/draw/away case.
    pub fn from_triple(home: f64, draw: f64, away: f64) -> Result<Self> {
        Self::new(vec![home, draw, away])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn categories(&self) -> usize {
        self.probs.len()
    }

    /// Probability assigned to outcome `y`, bounds-checked.
    pub fn prob_of(&self, y: OutcomeIndex) -> Result<f64> {
        self.probs
            .get(y.index())
            .copied()
            .ok_or(Error::OutcomeOutOfRange {
                index: y.index(),
                categories: self.categories(),
            })
    }

    /// Draw one outcome from this distribution by inverse CDF.
    ///
    /// Categories with zero probability are never selected, even when
    /// rounding leaves the cumulative sum fractionally short of one.
    pub fn sample_outcome(&self, rng: &mut impl Rng) -> OutcomeIndex {
        let u: f64 = rng.random();
        let mut cum = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                last_positive = i;
                cum += p;
                if u < cum {
                    return OutcomeIndex::new(i);
                }
            }
        }
        OutcomeIndex::new(last_positive)
    }
}

impl fmt::Display for ForecastVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Zero-based index of a realised outcome category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomeIndex(usize);

impl OutcomeIndex {
    /// First category (home win in the football case).
    pub const HOME: OutcomeIndex = OutcomeIndex(0);
    /// Middle category of a three-way market.
    pub const DRAW: OutcomeIndex = OutcomeIndex(1);
    /// Last category of a three-way market.
    pub const AWAY: OutcomeIndex = OutcomeIndex(2);

    pub fn new(index: usize) -> Self {
        OutcomeIndex(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// A realised score: non-negative, possibly infinite, never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Score(f64);

impl Score {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidForecast(format!(
                "score must be non-negative and not NaN, got {value}"
            )));
        }
        // Normalise -0.0 so displayed scores never carry a stray sign.
        Ok(Score(value + 0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    fn unchecked(value: f64) -> Self {
        debug_assert!(!value.is_nan() && value >= -0.0);
        Score(value + 0.0)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// The three scoring rules under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoringRule {
    Ignorance,
    Rps,
    Brier,
}

impl ScoringRule {
    /// All rules, in the fixed reporting order used throughout.
    pub const ALL: [ScoringRule; 3] = [ScoringRule::Ignorance, ScoringRule::Rps, ScoringRule::Brier];

    pub fn name(self) -> &'static str {
        match self {
            ScoringRule::Ignorance => "ignorance",
            ScoringRule::Rps => "rps",
            ScoringRule::Brier => "brier",
        }
    }

    /// Score a single forecast against a realised outcome.
    pub fn score(self, f: &ForecastVector, y: OutcomeIndex) -> Result<Score> {
        match self {
            ScoringRule::Ignorance => ignorance(f, y),
            ScoringRule::Rps => rps(f, y),
            ScoringRule::Brier => brier(f, y),
        }
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ignorance" | "ign" => Ok(ScoringRule::Ignorance),
            "rps" => Ok(ScoringRule::Rps),
            "brier" => Ok(ScoringRule::Brier),
            other => Err(Error::InvalidConfig(format!(
                "unknown scoring rule {other:?}, expected ignorance, rps, or brier"
            ))),
        }
    }
}

/// One slot per scoring rule; keeps per-rule results shaped and ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByRule<T> {
    pub ignorance: T,
    pub rps: T,
    pub brier: T,
}

impl<T> ByRule<T> {
    pub fn from_fn(mut f: impl FnMut(ScoringRule) -> T) -> Self {
        ByRule {
            ignorance: f(ScoringRule::Ignorance),
            rps: f(ScoringRule::Rps),
            brier: f(ScoringRule::Brier),
        }
    }

    pub fn get(&self, rule: ScoringRule) -> &T {
        match rule {
            ScoringRule::Ignorance => &self.ignorance,
            ScoringRule::Rps => &self.rps,
            ScoringRule::Brier => &self.brier,
        }
    }

    pub fn get_mut(&mut self, rule: ScoringRule) -> &mut T {
        match rule {
            ScoringRule::Ignorance => &mut self.ignorance,
            ScoringRule::Rps => &mut self.rps,
            ScoringRule::Brier => &mut self.brier,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(ScoringRule, &T) -> U) -> ByRule<U> {
        ByRule {
            ignorance: f(ScoringRule::Ignorance, &self.ignorance),
            rps: f(ScoringRule::Rps, &self.rps),
            brier: f(ScoringRule::Brier, &self.brier),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ScoringRule, &T)> {
        ScoringRule::ALL.iter().map(move |&r| (r, self.get(r)))
    }
}

fn check_outcome(f: &ForecastVector, y: OutcomeIndex) -> Result<()> {
    if y.index() >= f.categories() {
        return Err(Error::OutcomeOutOfRange {
            index: y.index(),
            categories: f.categories(),
        });
    }
    Ok(())
}

/// Brier score: squared error against the outcome indicator vector.
/// Bounded by [0, 2]; blind to category ordering.
pub fn brier(f: &ForecastVector, y: OutcomeIndex) -> Result<Score> {
    check_outcome(f, y)?;
    let mut total = 0.0;
    for (i, &p) in f.probs().iter().enumerate() {
        let o = if i == y.index() { 1.0 } else { 0.0 };
        total += (p - o) * (p - o);
    }
    Ok(Score::unchecked(total))
}

/// Ranked probability score: squared error between cumulative forecast
/// and cumulative outcome indicator, over the first R-1 categories.
/// Bounded by [0, R-1]; moving probability further from the realised
/// outcome costs more.
pub fn rps(f: &ForecastVector, y: OutcomeIndex) -> Result<Score> {
    check_outcome(f, y)?;
    let mut cum_p = 0.0;
    let mut cum_o = 0.0;
    let mut total = 0.0;
    let r = f.categories();
    for (i, &p) in f.probs().iter().take(r - 1).enumerate() {
        cum_p += p;
        if i == y.index() {
            cum_o = 1.0;
        }
        let d = cum_p - cum_o;
        total += d * d;
    }
    Ok(Score::unchecked(total))
}

/// Ignorance score: -log2 of the probability placed on the realised
/// outcome. Local (ignores the rest of the vector) and unbounded: a
/// zero-probability outcome scores positive infinity.
pub fn ignorance(f: &ForecastVector, y: OutcomeIndex) -> Result<Score> {
    check_outcome(f, y)?;
    let p = f.probs()[y.index()];
    if p == 0.0 {
        return Ok(Score::unchecked(f64::INFINITY));
    }
    Ok(Score::unchecked(-p.log2()))
}

/// Mean score of a forecast sequence against its outcome sequence.
/// A single infinite ignorance score makes the mean infinite.
pub fn mean_score(
    rule: ScoringRule,
    forecasts: &[ForecastVector],
    outcomes: &[OutcomeIndex],
) -> Result<Score> {
    if forecasts.is_empty() {
        return Err(Error::EmptyInput("mean_score needs at least one forecast"));
    }
    if forecasts.len() != outcomes.len() {
        return Err(Error::LengthMismatch {
            forecasts: forecasts.len(),
            outcomes: outcomes.len(),
        });
    }
    let mut total = 0.0;
    for (f, &y) in forecasts.iter().zip(outcomes) {
        total += rule.score(f, y)?.value();
    }
    Ok(Score::unchecked(total / forecasts.len() as f64))
}

/// Expectation of `rule`'s score for forecast `f` when outcomes are
/// drawn from `truth`. Outcomes with zero truth probability contribute
/// nothing, even where the conditional score is infinite.
pub fn expected_score(rule: ScoringRule, f: &ForecastVector, truth: &ForecastVector) -> Result<Score> {
    if f.categories() != truth.categories() {
        return Err(Error::DimensionMismatch {
            left: f.categories(),
            right: truth.categories(),
        });
    }
    let mut total = 0.0;
    for (i, &t) in truth.probs().iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        total += t * rule.score(f, OutcomeIndex::new(i))?.value();
    }
    Ok(Score::unchecked(total))
}

/// Information gain of forecast system a over system b, in multiplicative
/// terms: 2^(mean_ign_b - mean_ign_a). One means no advantage; two means
/// a concentrates twice the probability on what happens, on average.
pub fn info_gain(mean_ign_a: Score, mean_ign_b: Score) -> Result<f64> {
    if !mean_ign_a.is_finite() || !mean_ign_b.is_finite() {
        return Err(Error::UndefinedGain);
    }
    Ok((mean_ign_b.value() - mean_ign_a.value()).exp2())
}
