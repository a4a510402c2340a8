//! Built-in candidate forecast pairs used by the CLI and the test suite.
//!
//! Five hand-picked matchups, each exercising a different kind of
//! disagreement between the rules: a near-certain favourite, a clear vs
//! hedged favourite, a draw-shaped vs home-shaped forecast, a pure
//! ordering swap in the tail, and a pair split only by tail placement.

use crate::error::Result;
use crate::preference::ForecastPair;
use crate::score::ForecastVector;

fn pair(label: &str, alpha: [f64; 3], beta: [f64; 3]) -> Result<ForecastPair> {
    ForecastPair::new(
        ForecastVector::new(alpha.to_vec())?,
        ForecastVector::new(beta.to_vec())?,
        label,
    )
}

/// The five built-in pairs, in label order `match1` .. `match5`.
pub fn builtin_pairs() -> Vec<ForecastPair> {
    vec![
        pair("match1", [1.0, 0.0, 0.0], [0.9, 0.1, 0.0]).unwrap(),
        pair("match2", [0.8, 0.1, 0.1], [0.5, 0.25, 0.25]).unwrap(),
        pair("match3", [0.35, 0.3, 0.35], [0.6, 0.3, 0.1]).unwrap(),
        pair("match4", [0.6, 0.25, 0.15], [0.6, 0.15, 0.25]).unwrap(),
        pair("match5", [0.57, 0.33, 0.1], [0.6, 0.2, 0.2]).unwrap(),
    ]
}

/// Look up a built-in pair by its label.
pub fn builtin_pair(label: &str) -> Option<ForecastPair> {
    builtin_pairs().into_iter().find(|p| p.label() == label)
}
