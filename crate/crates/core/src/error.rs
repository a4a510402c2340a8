use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid forecast: {0}")]
    InvalidForecast(String),

    #[error("outcome index {index} out of range for {categories} categories")]
    OutcomeOutOfRange { index: usize, categories: usize },

    #[error("dimension mismatch: {left} categories vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("mismatched lengths: {forecasts} forecasts vs {outcomes} outcomes")]
    LengthMismatch { forecasts: usize, outcomes: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("information gain undefined: mean ignorance is infinite")]
    UndefinedGain,

    #[error("invalid forecast pair: {0}")]
    InvalidPair(String),

    #[error("preference triple contains a tie and has no colour")]
    TieUnclassifiable,

    #[error("exact enumeration needs {states} states, over the limit of {limit}")]
    EnumerationTooLarge { states: u128, limit: u128 },

    #[error("invalid odds: {0}")]
    InvalidOdds(String),

    #[error("odds ingestion failed: {0}")]
    Ingestion(String),

    #[error("no admissible imperfect forecast within delta={delta} after {retries} redraws")]
    PairingInfeasible { delta: f64, retries: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
