use epsfac_core::Error;
use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ADMISSIBILITY: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;
pub const EXIT_PRECISION: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read input: {0}")]
    Io(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{}", schema_text(*line, *column, msg))]
    Schema { line: usize, column: usize, msg: String },
    #[error("command `{command}` cannot run a `{mode}` problem")]
    ModeMismatch { command: String, mode: String },
    #[error("{context}: {source}")]
    Core { context: String, source: Error },
}

fn schema_text(line: usize, column: usize, msg: &str) -> String {
    if line == 0 {
        format!("schema error: {msg}")
    } else {
        format!("schema error at line {line}, column {column}: {msg}")
    }
}

impl CliError {
    pub fn core(context: impl Into<String>, source: Error) -> Self {
        CliError::Core { context: context.into(), source }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Syntax { .. } => "parse",
            CliError::Schema { .. } | CliError::ModeMismatch { .. } => "schema",
            CliError::Core { source, .. } => match source {
                Error::Parse { .. } => "parse",
                e if e.is_precision() || matches!(e, Error::NonConvergent(_)) => "precision",
                e if is_admissibility(e) => "admissibility",
                _ => "input",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "precision" => EXIT_PRECISION,
            "admissibility" => EXIT_ADMISSIBILITY,
            _ => EXIT_INPUT,
        }
    }

    /// `(line, column)` of a file-level diagnostic, or the character
    /// position inside a field for expression errors.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            CliError::Syntax { line, column, .. } | CliError::Schema { line, column, .. } if *line > 0 => {
                Some((*line, *column))
            }
            _ => None,
        }
    }

    pub fn position(&self) -> Option<usize> {
        match self {
            CliError::Core { source: Error::Parse { pos, .. }, .. } => Some(*pos),
            _ => None,
        }
    }
}

fn is_admissibility(e: &Error) -> bool {
    matches!(
        e,
        Error::AdmissibilityViolation(_)
            | Error::ReductionMismatch
            | Error::NotAUnit(_)
            | Error::NormalizationRequired(_)
            | Error::InvalidRamification(_)
            | Error::InvalidLatticePair(_)
            | Error::NonFreeQuotient(_)
            | Error::NonRationalPoint(_)
    )
}
