use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use heatkernel_cli::{parse, run, CliError, Config, Mode, Overrides, Result, Tolerance};

/// Heat-kernel coefficients, simplex integrals and torus checks from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "heatkernel", version)]
struct Args {
    /// JSON configuration file (optional for `--mode symbols`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the mode in the configuration.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Relative tolerance for oracle comparisons.
    #[arg(long, value_parser = parse_tolerance)]
    tolerance: Option<Tolerance>,
    /// Write the JSON report here and print the text summary to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomly drawn inputs.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_tolerance(s: &str) -> std::result::Result<Tolerance, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Tolerance::new(x)
}

fn load(path: &Path) -> Result<Config> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

fn execute(args: &Args) -> Result<()> {
    let config = match &args.config {
        Some(path) => load(path)?,
        None if args.mode == Some(Mode::Symbols) => parse(r#"{"version": 1}"#)?,
        None => return Err(CliError::schema("$", "--config is required for this mode")),
    };
    let overrides = Overrides { mode: args.mode, tolerance: args.tolerance, seed: args.seed };
    let report = run(&config, &overrides)?;
    match args.out.as_ref().or(config.output.as_ref()) {
        Some(path) => {
            std::fs::write(path, report.to_json())
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            print!("{}", report.to_text());
        }
        None => {
            print!("{}", report.to_json());
            eprint!("{}", report.to_text());
        }
    }
    match report.failed() {
        0 => Ok(()),
        failed => Err(CliError::OracleMismatch { failed, total: report.checks.len() }),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
