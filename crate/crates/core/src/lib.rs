//! Proper scoring rules for ordinal forecasts, and two experiments on
//! how efficiently each rule identifies the better of two forecast
//! systems from finite score records.
//!
//! The library covers:
//!
//! * the Brier, ranked probability, and ignorance scores over general
//!   R-category forecasts ([`score`]);
//! * expected-score preference regions on the three-outcome simplex for
//!   a pair of candidate forecasts ([`preference`], [`fixtures`]);
//! * selection-probability curves under repeated scoring of a fixed
//!   pair, by Monte Carlo or exact enumeration ([`repeat`]);
//! * bookmaker-odds ingestion and synthetic forecast pools ([`odds`]);
//! * the near-neighbour variant in which the competing forecast lies
//!   within a small epsilon distance of the true one ([`neighborhood`]).
//!
//! All randomised entry points take a master seed and derive one RNG
//! substream per work unit ([`seeding`]), so results are reproducible
//! bit for bit regardless of thread count.

pub mod error;
pub mod fixtures;
pub mod neighborhood;
pub mod odds;
pub mod preference;
pub mod repeat;
pub mod score;
pub mod seeding;

pub use error::{Error, Result};
pub use score::{
    brier, expected_score, ignorance, info_gain, mean_score, rps, ByRule, ForecastVector,
    OutcomeIndex, Score, ScoringRule,
};
