//! Batch front end for `epsfac`: problem files in, reports out.

pub mod error;
pub mod problem;
pub mod report;
pub mod run;

pub use error::CliError;
pub use problem::{parse_input, parse_str, Mode, ProblemFile};
pub use report::{emit_report, Format, Report, Verdict};
pub use run::{check_command, run, Options};
