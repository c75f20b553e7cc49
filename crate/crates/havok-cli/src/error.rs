//! Stage-tagged errors with process exit codes: 2 input, 3 numeric,
//! 4 insufficient data.

use havok_core::Error as CoreError;

#[derive(Debug, Clone)]
pub struct CliError {
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn input(stage: &str, message: impl Into<String>) -> Self {
        Self { stage: stage.into(), message: message.into(), exit_code: 2 }
    }

    pub fn insufficient(stage: &str, message: impl Into<String>) -> Self {
        Self { stage: stage.into(), message: message.into(), exit_code: 4 }
    }

    pub fn from_core(stage: &str, err: CoreError) -> Self {
        let exit_code = match &err {
            CoreError::SeriesTooShort { .. }
            | CoreError::ShortSeries { .. }
            | CoreError::TooShort { .. }
            | CoreError::NoBeats
            | CoreError::GapTooLong { .. } => 4,
            CoreError::NonFinite { .. }
            | CoreError::InvalidBand { .. }
            | CoreError::InvalidRank { .. }
            | CoreError::WindowOutOfRange { .. }
            | CoreError::OverlapError
            | CoreError::ShapeMismatch { .. } => 2,
            CoreError::ConvergenceFailure { .. }
            | CoreError::RankDeficient
            | CoreError::Divergence { .. }
            | CoreError::ZeroVariance { .. }
            | CoreError::AllZeroForcing
            | CoreError::DegenerateVariance
            | CoreError::ConstantInput
            | CoreError::ZeroPower => 3,
        };
        Self { stage: stage.into(), message: err.to_string(), exit_code }
    }

    /// Machine-readable form printed to stderr on abort.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "stage": self.stage,
            "error": self.message,
            "exit_code": self.exit_code,
        })
        .to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage, self.message)
    }
}

impl std::error::Error for CliError {}

/// Shorthand for converting IO failures at a named stage.
pub fn io_err(stage: &str, path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::input(stage, format!("{}: {e}", path.display()))
}
