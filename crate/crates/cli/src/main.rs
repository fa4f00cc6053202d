use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epsfac_cli::error::EXIT_CHECK_FAILED;
use epsfac_cli::{check_command, emit_report, parse_input, run, CliError, Format, Mode, Options};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "epsfac", version, about = "Exact de Rham epsilon lines and their checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Working truncation order for series (overrides the file).
    #[arg(long, global = true, value_name = "N")]
    truncation: Option<i64>,
    /// Seed for randomized checks (overrides the file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing on success; only the exit code reports the outcome.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Epsilon lines of a formal connection on the punctured disk.
    Local { file: PathBuf },
    /// Product formula on the projective line.
    GlobalCheck { file: PathBuf },
    /// Crystal isomorphisms, cocycle and twist identity over a nilpotent base.
    CrystalCheck { file: PathBuf },
    /// Relative determinants of a chain of lattices.
    LatticeDet { file: PathBuf },
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: ErrorBody<'a>,
    verdict: &'static str,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, file) = match &cli.command {
        Command::Local { file } => (Mode::DiskEpsilon, file),
        Command::GlobalCheck { file } => (Mode::GlobalCheck, file),
        Command::CrystalCheck { file } => (Mode::CrystalCheck, file),
        Command::LatticeDet { file } => (Mode::LatticeDet, file),
    };
    let opts = Options { truncation: cli.truncation, seed: cli.seed };
    let result = parse_input(file).and_then(|p| {
        check_command(mode, &p)?;
        run(&p, opts)
    });
    let mut out = std::io::stdout().lock();
    match result {
        Ok(report) => {
            if !cli.quiet {
                let fmt = if cli.json { Format::Json } else { Format::Text };
                let _ = out.write_all(&emit_report(&report, fmt));
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED as u8)
            }
        }
        Err(e) => {
            report_error(&e, cli.json, &mut out);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report_error(e: &CliError, json: bool, out: &mut impl Write) {
    if json {
        let loc = e.location();
        let doc = ErrorDoc {
            error: ErrorBody {
                kind: e.kind(),
                message: e.to_string(),
                line: loc.map(|l| l.0),
                column: loc.map(|l| l.1),
                position: e.position(),
            },
            verdict: "error",
        };
        let mut v = serde_json::to_vec_pretty(&doc).expect("error documents serialize");
        v.push(b'\n');
        let _ = out.write_all(&v);
    }
    eprintln!("epsfac: {e}");
}
