//! The `dmt`, `simulate` and `codes` commands. Each writes its files into
//! the output directory, every file starting with `#` lines that record the
//! tool version, the command, the resolved configuration and the seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rateless_dmt::channel::{
    effective_rate, estimate_outage_profile, run_rateless_experiment, write_results_csv, ExperimentRecord, SnrPoint,
};
use rateless_dmt::dmt::{default_grid, parallel_dmt_curves, rateless_dmt_curve, write_curves_csv};
use rateless_dmt::numfmt::{fmt12, format_rational};
use rateless_dmt::permutation::{
    read_codebook, run_rateless_code_trials, search_permutation_code, write_codebook, write_trials_csv,
    PermutationCode, RateTarget, SearchOptions, EXHAUSTIVE_MAX_BLOCKS, EXHAUSTIVE_MAX_POINTS,
};
use thiserror::Error;

use crate::config::{Budget, CodeSource, CodesJob, ConfigError, DmtJob, Mode, RateChoice, SimulateJob};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CURVES_FILE: &str = "dmt_curves.csv";
pub const SIMULATE_FILE: &str = "simulate.csv";
pub const CODEBOOK_FILE: &str = "codebook.txt";
pub const TRIALS_FILE: &str = "code_trials.csv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] rateless_dmt::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Codebook { path: PathBuf, source: rateless_dmt::Error },
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Metadata lines placed at the top of every emitted file.
pub fn header(mode: Mode, echo: &[(&'static str, String)], seed: Option<u64>) -> String {
    let config = echo.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
    let seed = match seed {
        Some(s) => s.to_string(),
        None => "none (exact evaluation)".into(),
    };
    format!("# rateless-dmt {VERSION}\n# command: {}\n# config: {config}\n# seed: {seed}\n", mode.as_str())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(path)
}

fn snr_grid(db: &[f64]) -> Result<Vec<SnrPoint>> {
    Ok(db.iter().map(|&d| SnrPoint::from_db(d)).collect::<rateless_dmt::Result<_>>()?)
}

/// What a command produced: files written and a short human summary.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Curve file contents for a job, without touching the filesystem.
pub fn dmt_output(job: &DmtJob) -> Result<(String, String)> {
    let grid = default_grid(&job.cfg, job.per_segment);
    let cmp = rateless_dmt_curve(&job.cfg, &grid)?;
    let (identical, iid) = parallel_dmt_curves(&job.cfg, &grid)?;

    let mut out = header(Mode::Dmt, &job.echo(), None).into_bytes();
    writeln!(
        out,
        "# rateless rows with l = {} lie past r_n = min(M,N): d = 0 and r is clamped to min(M,N)",
        job.cfg.blocks() + 1
    )
    .unwrap();
    write_curves_csv(&mut out, &[&cmp.rateless, &cmp.conventional, &identical, &iid], job.exact).unwrap();

    let starts = cmp.rateless.segment_starts();
    let breaks: Vec<String> = starts.iter().skip(1).map(|(_, r)| format_rational(r)).collect();
    let summary = format!(
        "rateless curve: {} segments, breaks at r_n = {{{}}}; {} grid points",
        starts.len() - 1,
        breaks.join(", "),
        grid.len()
    );
    Ok((String::from_utf8(out).expect("ascii output"), summary))
}

pub fn run_dmt(job: &DmtJob, out_dir: &Path) -> Result<Report> {
    let (text, summary) = dmt_output(job)?;
    let path = write_file(out_dir, CURVES_FILE, text.as_bytes())?;
    Ok(Report { files: vec![path], summary })
}

pub fn simulate_records(job: &SimulateJob) -> Result<Vec<ExperimentRecord>> {
    let etas = snr_grid(&job.eta_db)?;
    match &job.rate {
        RateChoice::Multiplexing(_) => {
            let r_n = job.rate.r_n_f64().expect("multiplexing rate");
            Ok(run_rateless_experiment(&job.cfg, r_n, &etas, job.trials, job.seed)?)
        }
        RateChoice::Fixed(rate) => etas
            .iter()
            .map(|eta| {
                let profile = estimate_outage_profile(&job.cfg, eta, *rate, job.trials, job.seed)?;
                let effective = effective_rate(*rate, job.cfg.blocks(), &profile, Some(eta));
                Ok(ExperimentRecord { eta: *eta, rate: *rate, profile, effective })
            })
            .collect(),
    }
}

pub fn simulate_output(job: &SimulateJob) -> Result<(String, String)> {
    let records = simulate_records(job)?;
    let mut out = header(Mode::Simulate, &job.echo(), Some(job.seed)).into_bytes();
    write_results_csv(&mut out, &records, job.seed).unwrap();
    let summary = records
        .iter()
        .map(|r| {
            let r_hat = r.effective.r_hat.map(fmt12).unwrap_or_else(|| "-".into());
            format!(
                "{} dB: p(L) = {}, R_bar = {}, r_hat = {}",
                fmt12(r.eta.db()),
                fmt12(*r.profile.p_hat.last().unwrap()),
                fmt12(r.effective.r_bar),
                r_hat
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok((String::from_utf8(out).expect("ascii output"), summary))
}

pub fn run_simulate(job: &SimulateJob, out_dir: &Path) -> Result<Report> {
    let (text, summary) = simulate_output(job)?;
    let path = write_file(out_dir, SIMULATE_FILE, text.as_bytes())?;
    Ok(Report { files: vec![path], summary })
}

/// Leading `#` lines of a codebook file; kept when the codebook is rewritten
/// so a load followed by a save reproduces the file.
fn leading_comments(text: &str) -> String {
    text.lines().take_while(|l| l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

/// Obtains the code and the exact text of its codebook file.
pub fn obtain_code(job: &CodesJob) -> Result<(PermutationCode, String, String)> {
    match &job.source {
        CodeSource::Search { blocks, bits, budget } => {
            let feasible = (1usize << bits) <= EXHAUSTIVE_MAX_POINTS && *blocks <= EXHAUSTIVE_MAX_BLOCKS;
            if *budget == Budget::Exhaustive && !feasible {
                return Err(ConfigError::Invalid {
                    key: "budget".into(),
                    value: "exhaustive".into(),
                    reason: format!(
                        "exhaustive search needs 2^bits <= {EXHAUSTIVE_MAX_POINTS} and L <= {EXHAUSTIVE_MAX_BLOCKS}"
                    ),
                }
                .into());
            }
            let opts = SearchOptions {
                budget: match budget {
                    Budget::Exhaustive => u64::MAX,
                    Budget::Evaluations(n) => *n,
                },
                seed: job.seed,
                ..SearchOptions::default()
            };
            let found = search_permutation_code(*blocks, *bits, &opts)?;
            let how = if found.exhaustive { "exhaustive" } else { "randomized" };
            let note = format!("{how} search, {} evaluations", found.evaluations);
            let text = header(Mode::Codes, &job.echo(), Some(job.seed)) + &write_codebook(&found.code);
            Ok((found.code, text, note))
        }
        CodeSource::Load { path, blocks, bits } => {
            let original = fs::read_to_string(path).map_err(io_err(path))?;
            let code = read_codebook(&original).map_err(|source| CliError::Codebook { path: path.clone(), source })?;
            if let Some(l) = blocks.filter(|l| *l != code.blocks()) {
                return Err(mismatch("L", l, code.blocks()));
            }
            if let Some(b) = bits.filter(|b| *b != code.bits()) {
                return Err(mismatch("bits", b, code.bits()));
            }
            let text = leading_comments(&original) + &write_codebook(&code);
            Ok((code, text, format!("loaded from {}", path.display())))
        }
    }
}

fn mismatch(key: &str, given: impl ToString, actual: impl ToString) -> CliError {
    ConfigError::Invalid {
        key: key.into(),
        value: given.to_string(),
        reason: format!("the codebook has {}", actual.to_string()),
    }
    .into()
}

pub struct CodesOutput {
    pub codebook: String,
    pub trials_csv: String,
    pub summary: String,
}

pub fn codes_output(job: &CodesJob) -> Result<CodesOutput> {
    let (code, codebook, note) = obtain_code(job)?;
    let etas = snr_grid(&job.eta_db)?;
    let target = job.rate.as_ref().map(|r| match r {
        RateChoice::Multiplexing(_) => RateTarget::Multiplexing(r.r_n_f64().unwrap()),
        RateChoice::Fixed(x) => RateTarget::Fixed(*x),
    });
    let records = run_rateless_code_trials(&code, target, &etas, job.trials, job.seed)?;

    let evidence = code.evidence();
    let pd: Vec<String> = evidence.min_product_distance.iter().map(|d| fmt12(*d)).collect();
    let mut out = header(Mode::Codes, &job.echo(), Some(job.seed)).into_bytes();
    writeln!(out, "# code: L={} bits={} ({note})", code.blocks(), code.bits()).unwrap();
    writeln!(out, "# min product distance by prefix: {}", pd.join(",")).unwrap();
    write_trials_csv(&mut out, &records, job.seed).unwrap();

    let mut summary = format!(
        "code: L = {}, bits = {}, {note}\nmin product distance by prefix: {}",
        code.blocks(),
        code.bits(),
        pd.join(", ")
    );
    for r in &records {
        summary.push_str(&format!(
            "\n{} dB: P_e = {} (outage {})",
            fmt12(r.eta.db()),
            fmt12(r.decomposition.p_e),
            fmt12(r.decomposition.outage)
        ));
    }
    Ok(CodesOutput { codebook, trials_csv: String::from_utf8(out).expect("ascii output"), summary })
}

pub fn run_codes(job: &CodesJob, out_dir: &Path) -> Result<Report> {
    let out = codes_output(job)?;
    let a = write_file(out_dir, CODEBOOK_FILE, out.codebook.as_bytes())?;
    let b = write_file(out_dir, TRIALS_FILE, out.trials_csv.as_bytes())?;
    Ok(Report { files: vec![a, b], summary: out.summary })
}
