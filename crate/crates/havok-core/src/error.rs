//! Error type shared by all analysis stages.

use core::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong during decomposition or analysis.
///
/// Variants carry enough context to report which precondition failed
/// without holding references into the offending data.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The series is too short for the requested embedding (`q < p`).
    SeriesTooShort { needed: usize, got: usize },
    /// A NaN or infinity showed up where finite data is required.
    NonFinite { context: &'static str },
    /// The SVD iteration did not converge.
    ConvergenceFailure { rows: usize, cols: usize },
    /// A fixed truncation rank outside `[2, m]`.
    InvalidRank { rank: usize, max: usize },
    /// The regression matrix lost all directions under the pseudo-inverse cutoff.
    RankDeficient,
    /// Not enough snapshots to fit the requested model order.
    ShortSeries { needed: usize, got: usize },
    /// Simulated state norm exceeded the divergence guard.
    Divergence { index: usize, norm: f64 },
    /// A column of the reference data is constant.
    ZeroVariance { column: usize },
    /// The forcing series is identically zero, so no threshold exists.
    AllZeroForcing,
    /// All samples are equal; no histogram or moments can be formed.
    DegenerateVariance,
    /// Correlation requested against a constant input.
    ConstantInput,
    /// The spectrum carries no non-DC power.
    ZeroPower,
    /// Input shorter than the transform minimum.
    TooShort { needed: usize, got: usize },
    /// Filter band edges are not `0 < low < high < fs/2`.
    InvalidBand { low: f64, high: f64, nyquist: f64 },
    /// Fewer than two R peaks were found.
    NoBeats,
    /// A run of missing HRV windows exceeds the interpolation limit.
    GapTooLong { gap_minutes: usize, max_minutes: usize },
    /// A requested analysis window falls outside the series.
    WindowOutOfRange { start: f64, end: f64 },
    /// Configured synthetic bursts overlap or leave the signal span.
    OverlapError,
    /// Shapes of two matrices disagree.
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SeriesTooShort { needed, got } => {
                write!(f, "series too short: need at least {needed} snapshots, got {got}")
            }
            Error::NonFinite { context } => write!(f, "non-finite value in {context}"),
            Error::ConvergenceFailure { rows, cols } => {
                write!(f, "SVD failed to converge on a {rows}x{cols} matrix")
            }
            Error::InvalidRank { rank, max } => {
                write!(f, "rank {rank} outside the valid range [2, {max}]")
            }
            Error::RankDeficient => write!(f, "regression matrix is rank deficient"),
            Error::ShortSeries { needed, got } => {
                write!(f, "need at least {needed} snapshots to fit, got {got}")
            }
            Error::Divergence { index, norm } => {
                write!(f, "simulation diverged at step {index} (state norm {norm:e})")
            }
            Error::ZeroVariance { column } => {
                write!(f, "column {column} of the reference data is constant")
            }
            Error::AllZeroForcing => write!(f, "forcing series is identically zero"),
            Error::DegenerateVariance => write!(f, "all samples are identical"),
            Error::ConstantInput => write!(f, "correlation input is constant"),
            Error::ZeroPower => write!(f, "spectrum has no non-DC power"),
            Error::TooShort { needed, got } => {
                write!(f, "input too short: need {needed} samples, got {got}")
            }
            Error::InvalidBand { low, high, nyquist } => {
                write!(f, "invalid band {low}-{high} Hz for Nyquist {nyquist} Hz")
            }
            Error::NoBeats => write!(f, "fewer than two R peaks detected"),
            Error::GapTooLong { gap_minutes, max_minutes } => {
                write!(f, "missing-window gap of {gap_minutes} min exceeds limit of {max_minutes} min")
            }
            Error::WindowOutOfRange { start, end } => {
                write!(f, "window [{start}, {end}) is outside the series")
            }
            Error::OverlapError => write!(f, "burst intervals overlap or leave the signal span"),
            Error::ShapeMismatch { expected, got } => {
                write!(
                    f,
                    "shape mismatch: expected {}x{}, got {}x{}",
                    expected.0, expected.1, got.0, got.1
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
