use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stakes must be strictly positive (alpha={alpha}, beta={beta})")]
    NonPositiveStake { alpha: f64, beta: f64 },

    #[error("belief {0} is outside [0, 1]")]
    InvalidBelief(f64),

    #[error("invalid wealth set: {0}")]
    InvalidWealthSet(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid general gamble: {0}")]
    InvalidGamble(String),

    #[error("invalid utility: {0}")]
    InvalidUtility(String),

    #[error("risk-aversion parameter k={0} must be >= 1")]
    InvalidK(f64),

    #[error("kink slope iota={0} must lie in (0, 1]")]
    InvalidIota(f64),

    #[error("utility is degenerate at wealth {wealth}: indifference denominator {denominator}")]
    DegenerateUtility { wealth: f64, denominator: f64 },

    #[error("wealth {wealth} does not satisfy the conditions of region {region}")]
    RegionMismatch { region: String, wealth: f64 },

    #[error("gambles have different state sets or sign partitions")]
    PartitionMismatch,

    #[error(
        "search exhausted at {limit} without a certificate (best belief margin {best_margin:e})"
    )]
    SearchExhausted { limit: f64, best_margin: f64 },

    #[error("interval width {width} must be below beta - beta_hat = {bound}")]
    IntervalTooWide { width: f64, bound: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveStake { .. } => "non_positive_stake",
            Error::InvalidBelief(_) => "invalid_belief",
            Error::InvalidWealthSet(_) => "invalid_wealth_set",
            Error::InvalidScenario(_) => "invalid_scenario",
            Error::InvalidGamble(_) => "invalid_gamble",
            Error::InvalidUtility(_) => "invalid_utility",
            Error::InvalidK(_) => "invalid_k",
            Error::InvalidIota(_) => "invalid_iota",
            Error::DegenerateUtility { .. } => "degenerate_utility",
            Error::RegionMismatch { .. } => "region_mismatch",
            Error::PartitionMismatch => "partition_mismatch",
            Error::SearchExhausted { .. } => "search_exhausted",
            Error::IntervalTooWide { .. } => "interval_too_wide",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::NumericFailure(_) => "numeric_failure",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
