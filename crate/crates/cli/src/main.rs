use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rateless_dmt_cli::commands::{run_codes, run_dmt, run_simulate, CliError, Report};
use rateless_dmt_cli::config::{verify_options, CodesJob, DmtJob, Mode, RawConfig, SimulateJob, KEYS};
use rateless_dmt_cli::verify::run_checks_with;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "rateless-dmt", version, about = "Diversity-multiplexing tradeoff experiments for rateless codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact DMT curves: rateless, conventional and both parallel baselines.
    Dmt(Flags),
    /// Monte Carlo of the rateless protocol over an SNR grid.
    Simulate(Flags),
    /// Search or load a permutation code and run rateless trials with it.
    Codes(Flags),
    /// Run the verification suite; exits 1 if any check fails.
    Verify(Flags),
}

/// Flags override the same keys in `--config`.
#[derive(Args, Default)]
struct Flags {
    /// Key-value config file (`key = value` per line).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Comma-separated SNRs in dB.
    #[arg(long = "eta-db", allow_hyphen_values = true)]
    eta_db: Option<String>,
    /// Transmit antennas.
    #[arg(long = "M")]
    m: Option<String>,
    /// Receive antennas.
    #[arg(long = "N")]
    n: Option<String>,
    /// Blocks per codeword.
    #[arg(long = "L")]
    l: Option<String>,
    /// Channel uses per block.
    #[arg(long = "T")]
    t: Option<String>,
    /// Per-level multiplexing gain (decimal or p/q).
    #[arg(long = "r-n")]
    r_n: Option<String>,
    /// Fixed rate in bits per channel use.
    #[arg(long = "R")]
    rate: Option<String>,
    /// Bits per permutation codeword.
    #[arg(long)]
    bits: Option<String>,
    /// Search evaluations or `exhaustive`.
    #[arg(long)]
    budget: Option<String>,
    /// Codebook file to load.
    #[arg(long)]
    codebook: Option<String>,
    /// Curve points per rateless segment.
    #[arg(long = "per-segment")]
    per_segment: Option<String>,
    /// Add exact rational columns to curve output.
    #[arg(long)]
    exact: bool,
    /// Multiplier on every verification tolerance.
    #[arg(long = "tolerance-scale")]
    tolerance_scale: Option<String>,
    /// Comma-separated check numbers to run.
    #[arg(long)]
    only: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = [
            ("out", &self.out),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("eta_db_list", &self.eta_db),
            ("M", &self.m),
            ("N", &self.n),
            ("L", &self.l),
            ("T", &self.t),
            ("r_n", &self.r_n),
            ("R", &self.rate),
            ("bits", &self.bits),
            ("budget", &self.budget),
            ("codebook", &self.codebook),
            ("per_segment", &self.per_segment),
            ("tolerance_scale", &self.tolerance_scale),
            ("only", &self.only),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
        if self.exact {
            v.push(("exact", "true".into()));
        }
        v
    }
}

fn merged(mode: Mode, flags: &Flags) -> Result<RawConfig, CliError> {
    let mut raw = match &flags.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for (key, value) in flags.pairs() {
        if key != "out" && !mode.keys().contains(&key) {
            eprintln!("warning: `{key}` is not used by `{}`", mode.as_str());
        }
        raw.set(key, value);
    }
    debug_assert!(raw.keys().all(|k| KEYS.iter().any(|(known, _)| *known == k)));
    Ok(raw)
}

fn report(r: Report) {
    println!("{}", r.summary);
    for f in r.files {
        println!("wrote {}", f.display());
    }
}

fn run(mode: Mode, flags: &Flags) -> Result<ExitCode, CliError> {
    let raw = merged(mode, flags)?;
    let out = raw.out_dir();
    match mode {
        Mode::Dmt => report(run_dmt(&DmtJob::from_raw(&raw)?, &out)?),
        Mode::Simulate => report(run_simulate(&SimulateJob::from_raw(&raw)?, &out)?),
        Mode::Codes => report(run_codes(&CodesJob::from_raw(&raw)?, &out)?),
        Mode::Verify => {
            let opts = verify_options(&raw)?;
            let checks = run_checks_with(&opts, |c| println!("{c}"));
            let failed: Vec<String> =
                checks.iter().filter(|c| !c.passed()).map(|c| format!("[{}] {}", c.id, c.name)).collect();
            println!("{}/{} checks passed", checks.len() - failed.len(), checks.len());
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join("; "));
                return Ok(ExitCode::from(EXIT_VERIFY_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, flags) = match &cli.command {
        Command::Dmt(f) => (Mode::Dmt, f),
        Command::Simulate(f) => (Mode::Simulate, f),
        Command::Codes(f) => (Mode::Codes, f),
        Command::Verify(f) => (Mode::Verify, f),
    };
    let start = Instant::now();
    let code = match run(mode, flags) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    eprintln!("{} finished in {:.2} s", mode.as_str(), start.elapsed().as_secs_f64());
    code
}
