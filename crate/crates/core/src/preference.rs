//! Which rule prefers which forecast, as a function of the true
//! distribution.
//!
//! For a fixed pair of candidate forecasts, each scoring rule partitions
//! the simplex of possible truths into a region where it expects the
//! first forecast to score lower, a region where it expects the second,
//! and a boundary. The three rules need not agree; the colour of a truth
//! point records the full pattern of agreement.

use crate::error::{Error, Result};
use crate::score::{expected_score, ByRule, ForecastVector, ScoringRule};
use crate::seeding::substream;
use rand::Rng;
use rayon::prelude::*;
use std::fmt;

/// Expected scores closer than this count as a tie. Comparisons at the
/// region boundaries are numerically meaningless below this resolution.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Two competing forecasts for the same categories.
///
/// The two must differ as vectors; a pair that agrees everywhere has no
/// preference structure to map.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastPair {
    alpha: ForecastVector,
    beta: ForecastVector,
    label: String,
}

impl ForecastPair {
    pub fn new(alpha: ForecastVector, beta: ForecastVector, label: impl Into<String>) -> Result<Self> {
        if alpha.categories() != beta.categories() {
            return Err(Error::InvalidPair(format!(
                "alpha has {} categories, beta has {}",
                alpha.categories(),
                beta.categories()
            )));
        }
        if alpha == beta {
            return Err(Error::InvalidPair("alpha and beta are identical".into()));
        }
        Ok(Self { alpha, beta, label: label.into() })
    }

    pub fn alpha(&self) -> &ForecastVector {
        &self.alpha
    }

    pub fn beta(&self) -> &ForecastVector {
        &self.beta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn categories(&self) -> usize {
        self.alpha.categories()
    }
}

/// Which side of a pair a rule expects to score lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preference {
    Alpha,
    Beta,
    Tie,
}

impl Preference {
    pub fn symbol(self) -> &'static str {
        match self {
            Preference::Alpha => "alpha",
            Preference::Beta => "beta",
            Preference::Tie => "tie",
        }
    }
}

/// The preferences of all three rules at one truth point.
pub type PreferenceTriple = ByRule<Preference>;

/// Expected-score preference of `rule` between the pair's forecasts when
/// outcomes are drawn from `truth`.
pub fn preferred(rule: ScoringRule, pair: &ForecastPair, truth: &ForecastVector) -> Result<Preference> {
    let ea = expected_score(rule, pair.alpha(), truth)?.value();
    let eb = expected_score(rule, pair.beta(), truth)?.value();
    if ea.is_infinite() && eb.is_infinite() {
        return Ok(Preference::Tie);
    }
    if (ea - eb).abs() <= TIE_TOLERANCE {
        return Ok(Preference::Tie);
    }
    Ok(if ea < eb { Preference::Alpha } else { Preference::Beta })
}

/// The eight agreement patterns of (ignorance, rps, brier) preferences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionColor {
    /// ignorance: alpha; rps: beta; brier: beta
    Green,
    /// ignorance: beta; rps: alpha; brier: beta
    Blue,
    /// ignorance: beta; rps: beta; brier: alpha
    Red,
    /// ignorance: alpha; rps: alpha; brier: beta
    Turquoise,
    /// ignorance: alpha; rps: beta; brier: alpha
    Brown,
    /// ignorance: beta; rps: alpha; brier: alpha
    Purple,
    /// all three: beta
    Yellow,
    /// all three: alpha
    Black,
}

impl RegionColor {
    pub const ALL: [RegionColor; 8] = [
        RegionColor::Green,
        RegionColor::Blue,
        RegionColor::Red,
        RegionColor::Turquoise,
        RegionColor::Brown,
        RegionColor::Purple,
        RegionColor::Yellow,
        RegionColor::Black,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionColor::Green => "green",
            RegionColor::Blue => "blue",
            RegionColor::Red => "red",
            RegionColor::Turquoise => "turquoise",
            RegionColor::Brown => "brown",
            RegionColor::Purple => "purple",
            RegionColor::Yellow => "yellow",
            RegionColor::Black => "black",
        }
    }

    /// Colour for a triple with no ties; `None` if any rule is on a
    /// boundary.
    pub fn from_triple(triple: &PreferenceTriple) -> Option<RegionColor> {
        use Preference::{Alpha, Beta};
        match (triple.ignorance, triple.rps, triple.brier) {
            (Alpha, Beta, Beta) => Some(RegionColor::Green),
            (Beta, Alpha, Beta) => Some(RegionColor::Blue),
            (Beta, Beta, Alpha) => Some(RegionColor::Red),
            (Alpha, Alpha, Beta) => Some(RegionColor::Turquoise),
            (Alpha, Beta, Alpha) => Some(RegionColor::Brown),
            (Beta, Alpha, Alpha) => Some(RegionColor::Purple),
            (Beta, Beta, Beta) => Some(RegionColor::Yellow),
            (Alpha, Alpha, Alpha) => Some(RegionColor::Black),
            _ => None,
        }
    }
}

impl fmt::Display for RegionColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Colour of a tie-free triple; errors if any rule sits on a boundary.
pub fn classify_color(triple: &PreferenceTriple) -> Result<RegionColor> {
    RegionColor::from_triple(triple).ok_or(Error::TieUnclassifiable)
}

/// One sampled truth point with its preference pattern.
#[derive(Debug, Clone)]
pub struct RegionSample {
    pub truth: ForecastVector,
    pub triple: PreferenceTriple,
    /// `None` when some rule tied at this point.
    pub color: Option<RegionColor>,
}

/// Uniform draw from the three-outcome probability simplex.
///
/// Exponential spacings: three independent Exp(1) variates, normalised.
pub fn sample_simplex(rng: &mut impl Rng) -> ForecastVector {
    loop {
        let mut e = [0.0f64; 3];
        for v in &mut e {
            // random() is in [0, 1); flip so the log argument is in (0, 1].
            *v = -(1.0 - rng.random::<f64>()).ln();
        }
        let sum = e[0] + e[1] + e[2];
        if sum > 0.0 {
            if let Ok(f) = ForecastVector::new(vec![e[0] / sum, e[1] / sum, e[2] / sum]) {
                return f;
            }
        }
        // All three variates zero, or a rounding failure: draw again.
    }
}

const REGION_TAG: u64 = 0x5247_4E53; // "RGNS"

/// Classify `m` uniformly sampled truth points for a pair of forecasts.
///
/// Sample i is generated from its own substream of `master_seed`, so the
/// output is identical for any thread count, and element order is by
/// sample index.
pub fn region_scan(pair: &ForecastPair, m: usize, master_seed: u64) -> Result<Vec<RegionSample>> {
    if m == 0 {
        return Err(Error::InvalidConfig("region scan needs at least one sample".into()));
    }
    if pair.categories() != 3 {
        return Err(Error::InvalidConfig(format!(
            "region scan maps the three-outcome simplex, pair has {} categories",
            pair.categories()
        )));
    }
    (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(master_seed, &[REGION_TAG, i as u64]);
            let truth = sample_simplex(&mut rng);
            let triple = PreferenceTriple {
                ignorance: preferred(ScoringRule::Ignorance, pair, &truth)?,
                rps: preferred(ScoringRule::Rps, pair, &truth)?,
                brier: preferred(ScoringRule::Brier, pair, &truth)?,
            };
            let color = RegionColor::from_triple(&triple);
            Ok(RegionSample { truth, triple, color })
        })
        .collect()
}
