use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis mismatch: operator acts on N={left}, state on N={right}")]
    BasisMismatch { left: usize, right: usize },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("negative rate {rate:e} for channel `{channel}` at t={t}")]
    NegativeRate { channel: String, rate: f64, t: f64 },

    #[error("{steps} integration steps requested, limit is {limit}")]
    StepOverflow { steps: f64, limit: usize },

    #[error("positivity lost at t={t}: an eigenvalue fell below {floor:e}")]
    PositivityViolation { t: f64, floor: f64 },

    #[error("no supplied energy: pump work is zero")]
    NoSuppliedEnergy,

    #[error("no integration windows given")]
    EmptyWindow,

    #[error("window [{start}, {end}] is not inside the sampled range [{lo}, {hi}]")]
    WindowOutOfRange { start: f64, end: f64, lo: f64, hi: f64 },

    #[error("sample times are not strictly increasing at index {index}")]
    NonMonotoneTimes { index: usize },

    #[error("grid too coarse: spacing {spacing:e} exceeds {limit:e}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("no interior maximum in the sampled pulse")]
    NoInteriorMaximum,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-positive value {value:e} at index {index} cannot enter a log-log fit")]
    NonPositivePeak { index: usize, value: f64 },

    #[error("curves do not overlap in time")]
    DisjointRanges,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cycle {k}: {source}")]
    Cycle {
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for this error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::BasisMismatch { .. } => "basis_mismatch",
            Error::InvalidState(_) => "invalid_state",
            Error::NegativeRate { .. } => "negative_rate",
            Error::StepOverflow { .. } => "step_overflow",
            Error::PositivityViolation { .. } => "positivity_violation",
            Error::NoSuppliedEnergy => "no_supplied_energy",
            Error::EmptyWindow => "empty_window",
            Error::WindowOutOfRange { .. } => "window_out_of_range",
            Error::NonMonotoneTimes { .. } => "non_monotone_times",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::NoInteriorMaximum => "no_interior_maximum",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::NonPositivePeak { .. } => "non_positive_peak",
            Error::DisjointRanges => "disjoint_ranges",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Cycle { .. } => "cycle_failed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
