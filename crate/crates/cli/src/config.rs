//! Experiment configuration.
//!
//! A config file is flat `key = value` text; `#` starts a comment line.
//! Command-line flags are applied on top of the file, so a flag always wins
//! over the same key in the file. Every value is validated before dispatch
//! and errors name the offending key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rateless_dmt::dmt::{AntennaConfig, RatelessConfig, Rational, DEFAULT_POINTS_PER_SEGMENT};
use rateless_dmt::numfmt::{format_rational, parse_rational, rational_to_f64};
use rateless_dmt::permutation::MAX_BITS;
use thiserror::Error;

use crate::verify::{VerifyOptions, CRITERIA};

/// Seed used when none is configured, so every command is reproducible out
/// of the box.
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_BUDGET: u64 = 2_000_000;
pub const SIMULATE_ETA_DB: &str = "10,20,30,40,50,60,70,80";
pub const CODES_ETA_DB: &str = "20,30,40";

/// Recognized keys and what they mean.
pub const KEYS: &[(&str, &str)] = &[
    ("M", "transmit antennas"),
    ("N", "receive antennas"),
    ("L", "blocks per codeword"),
    ("T", "channel uses per block (metadata only; the stopping rule does not depend on it)"),
    ("r_n", "per-level multiplexing gain, decimal or p/q"),
    ("R", "fixed rate in bits per channel use (alternative to r_n)"),
    ("eta_db_list", "comma-separated SNR grid in dB"),
    ("trials", "Monte Carlo trials per SNR"),
    ("seed", "random seed"),
    ("bits", "bits per codeword of a permutation code, 1..=8"),
    ("budget", "search evaluations, or `exhaustive`"),
    ("codebook", "codebook file to load instead of searching"),
    ("per_segment", "curve points per rateless segment"),
    ("exact", "add exact rational columns to curve output (true/false)"),
    ("tolerance_scale", "multiplier applied to every verification tolerance"),
    ("only", "comma-separated verification checks to run"),
    ("out", "output directory"),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid value {value:?} for `{key}`: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("{origin}:{line}: unknown key `{key}`")]
    Unknown { origin: String, line: usize, key: String },
    #[error("{origin}:{line}: expected `key = value`")]
    Syntax { origin: String, line: usize },
    #[error("{origin}:{line}: `{key}` is set twice")]
    Duplicate { origin: String, line: usize, key: String },
    #[error("`{0}` and `{1}` cannot both be set")]
    Conflict(String, String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ConfigError {
    fn invalid(key: &str, value: &str, reason: impl fmt::Display) -> Self {
        Self::Invalid { key: key.into(), value: value.into(), reason: reason.to_string() }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Untyped key-value pairs after merging the file and the flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { origin: origin.into(), line: i + 1 });
            };
            let (key, value) = (key.trim(), value.trim());
            if !known(key) {
                return Err(ConfigError::Unknown { origin: origin.into(), line: i + 1, key: key.into() });
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Duplicate { origin: origin.into(), line: i + 1, key: key.into() });
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets `key`, replacing any value from the file.
    ///
    /// # Panics
    ///
    /// If `key` is not one of [`KEYS`].
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        assert!(known(key), "unknown key {key}");
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key).map(|v| v.parse::<T>().map_err(|e| ConfigError::invalid(key, v, e))).transpose()
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| ConfigError::Missing(key.into()))
    }

    fn positive_u32(&self, key: &str, default: Option<u32>) -> Result<u32> {
        let v = match default {
            Some(d) => self.parsed(key)?.unwrap_or(d),
            None => self.required(key)?,
        };
        if v == 0 {
            return Err(ConfigError::invalid(key, "0", "must be at least 1"));
        }
        Ok(v)
    }

    fn trials(&self) -> Result<u64> {
        let n = self.parsed::<u64>("trials")?.unwrap_or(DEFAULT_TRIALS);
        if n == 0 {
            return Err(ConfigError::invalid("trials", "0", "must be at least 1"));
        }
        Ok(n)
    }

    fn seed(&self) -> Result<u64> {
        Ok(self.parsed("seed")?.unwrap_or(DEFAULT_SEED))
    }

    fn eta_db(&self, default: &str) -> Result<Vec<f64>> {
        let text = self.get("eta_db_list").unwrap_or(default);
        let list: Vec<f64> = text
            .split(',')
            .map(|s| {
                let s = s.trim();
                match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    Ok(_) => Err(ConfigError::invalid("eta_db_list", s, "must be finite")),
                    Err(e) => Err(ConfigError::invalid("eta_db_list", s, e)),
                }
            })
            .collect::<Result<_>>()?;
        if list.is_empty() {
            return Err(ConfigError::invalid("eta_db_list", text, "empty grid"));
        }
        Ok(list)
    }

    fn rate(&self) -> Result<Option<RateChoice>> {
        match (self.get("r_n"), self.get("R")) {
            (Some(_), Some(_)) => Err(ConfigError::Conflict("r_n".into(), "R".into())),
            (Some(v), None) => {
                let q = parse_rational(v).map_err(|e| ConfigError::invalid("r_n", v, e))?;
                if q < Rational::from_integer(0.into()) {
                    return Err(ConfigError::invalid("r_n", v, "must be nonnegative"));
                }
                Ok(Some(RateChoice::Multiplexing(q)))
            }
            (None, Some(v)) => {
                let r: f64 = v.parse().map_err(|e| ConfigError::invalid("R", v, e))?;
                if !(r.is_finite() && r >= 0.0) {
                    return Err(ConfigError::invalid("R", v, "must be a nonnegative number"));
                }
                Ok(Some(RateChoice::Fixed(r)))
            }
            (None, None) => Ok(None),
        }
    }

    fn rateless(&self) -> Result<RatelessConfig> {
        let m = self.positive_u32("M", None)?;
        let n = self.positive_u32("N", None)?;
        let l = self.positive_u32("L", None)?;
        let t = self.positive_u32("T", Some(1))?;
        let antennas = AntennaConfig::new(m, n).map_err(|e| ConfigError::invalid("M", &m.to_string(), e))?;
        RatelessConfig::new(antennas, l, t).map_err(|e| ConfigError::invalid("L", &l.to_string(), e))
    }

    fn bits(&self) -> Result<Option<u32>> {
        let Some(bits) = self.parsed::<u32>("bits")? else { return Ok(None) };
        if !(1..=MAX_BITS).contains(&bits) {
            return Err(ConfigError::invalid("bits", &bits.to_string(), format!("must be in 1..={MAX_BITS}")));
        }
        Ok(Some(bits))
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or("out"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateChoice {
    /// `R = r_n log2(eta)`.
    Multiplexing(Rational),
    /// `R` in bits per channel use at every SNR.
    Fixed(f64),
}

impl fmt::Display for RateChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateChoice::Multiplexing(q) => write!(f, "r_n={}", format_rational(q)),
            RateChoice::Fixed(r) => write!(f, "R={r}"),
        }
    }
}

impl RateChoice {
    pub fn r_n_f64(&self) -> Option<f64> {
        match self {
            RateChoice::Multiplexing(q) => Some(rational_to_f64(q)),
            RateChoice::Fixed(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dmt,
    Simulate,
    Codes,
    Verify,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Dmt => "dmt",
            Mode::Simulate => "simulate",
            Mode::Codes => "codes",
            Mode::Verify => "verify",
        }
    }

    /// Keys the mode reads; anything else is ignored.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            Mode::Dmt => &["M", "N", "L", "T", "per_segment", "exact", "out"],
            Mode::Simulate => &["M", "N", "L", "T", "r_n", "R", "eta_db_list", "trials", "seed", "out"],
            Mode::Codes => &["L", "bits", "budget", "codebook", "r_n", "R", "eta_db_list", "trials", "seed", "out"],
            Mode::Verify => &["seed", "trials", "tolerance_scale", "only"],
        }
    }
}

fn rateless_echo(cfg: &RatelessConfig) -> Vec<(&'static str, String)> {
    vec![
        ("M", cfg.antennas.tx().to_string()),
        ("N", cfg.antennas.rx().to_string()),
        ("L", cfg.blocks().to_string()),
        ("T", cfg.block_len().to_string()),
    ]
}

fn list_echo(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmtJob {
    pub cfg: RatelessConfig,
    pub per_segment: usize,
    pub exact: bool,
}

impl DmtJob {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let cfg = raw.rateless()?;
        let per_segment = raw.parsed::<usize>("per_segment")?.unwrap_or(DEFAULT_POINTS_PER_SEGMENT);
        if per_segment == 0 {
            return Err(ConfigError::invalid("per_segment", "0", "must be at least 1"));
        }
        let exact = raw.parsed::<bool>("exact")?.unwrap_or(false);
        Ok(Self { cfg, per_segment, exact })
    }

    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut e = rateless_echo(&self.cfg);
        e.push(("per_segment", self.per_segment.to_string()));
        e.push(("exact", self.exact.to_string()));
        e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateJob {
    pub cfg: RatelessConfig,
    pub rate: RateChoice,
    pub eta_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl SimulateJob {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let cfg = raw.rateless()?;
        let rate = raw.rate()?.ok_or_else(|| ConfigError::Missing("r_n".into()))?;
        Ok(Self { cfg, rate, eta_db: raw.eta_db(SIMULATE_ETA_DB)?, trials: raw.trials()?, seed: raw.seed()? })
    }

    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut e = rateless_echo(&self.cfg);
        e.push(match &self.rate {
            RateChoice::Multiplexing(q) => ("r_n", format_rational(q)),
            RateChoice::Fixed(r) => ("R", r.to_string()),
        });
        e.push(("eta_db_list", list_echo(&self.eta_db)));
        e.push(("trials", self.trials.to_string()));
        e.push(("seed", self.seed.to_string()));
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Require an exhaustive search.
    Exhaustive,
    Evaluations(u64),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Exhaustive => f.write_str("exhaustive"),
            Budget::Evaluations(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    Search { blocks: usize, bits: u32, budget: Budget },
    Load { path: PathBuf, blocks: Option<usize>, bits: Option<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodesJob {
    pub source: CodeSource,
    pub rate: Option<RateChoice>,
    pub eta_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl CodesJob {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let bits = raw.bits()?;
        let blocks = raw.parsed::<usize>("L")?;
        if blocks == Some(0) {
            return Err(ConfigError::invalid("L", "0", "must be at least 1"));
        }
        let source = match raw.get("codebook") {
            Some(path) => CodeSource::Load { path: path.into(), blocks, bits },
            None => {
                let budget = match raw.get("budget") {
                    None => Budget::Evaluations(DEFAULT_BUDGET),
                    Some("exhaustive") => Budget::Exhaustive,
                    Some(v) => match v.parse::<u64>() {
                        Ok(0) => return Err(ConfigError::invalid("budget", v, "must be at least 1")),
                        Ok(n) => Budget::Evaluations(n),
                        Err(e) => return Err(ConfigError::invalid("budget", v, e)),
                    },
                };
                CodeSource::Search {
                    blocks: blocks.ok_or_else(|| ConfigError::Missing("L".into()))?,
                    bits: bits.ok_or_else(|| ConfigError::Missing("bits".into()))?,
                    budget,
                }
            }
        };
        Ok(Self {
            source,
            rate: raw.rate()?,
            eta_db: raw.eta_db(CODES_ETA_DB)?,
            trials: raw.trials()?,
            seed: raw.seed()?,
        })
    }

    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut e = Vec::new();
        match &self.source {
            CodeSource::Search { blocks, bits, budget } => {
                e.push(("L", blocks.to_string()));
                e.push(("bits", bits.to_string()));
                e.push(("budget", budget.to_string()));
            }
            CodeSource::Load { path, .. } => e.push(("codebook", path.display().to_string())),
        }
        match &self.rate {
            Some(RateChoice::Multiplexing(q)) => e.push(("r_n", format_rational(q))),
            Some(RateChoice::Fixed(r)) => e.push(("R", r.to_string())),
            None => {}
        }
        e.push(("eta_db_list", list_echo(&self.eta_db)));
        e.push(("trials", self.trials.to_string()));
        e.push(("seed", self.seed.to_string()));
        e
    }
}

pub fn verify_options(raw: &RawConfig) -> Result<VerifyOptions> {
    let mut opts = VerifyOptions { seed: raw.seed()?, ..VerifyOptions::default() };
    if let Some(n) = raw.parsed::<u64>("trials")? {
        if n == 0 {
            return Err(ConfigError::invalid("trials", "0", "must be at least 1"));
        }
        opts.trials = Some(n);
    }
    if let Some(s) = raw.parsed::<f64>("tolerance_scale")? {
        if !(s.is_finite() && s > 0.0) {
            return Err(ConfigError::invalid("tolerance_scale", &s.to_string(), "must be positive"));
        }
        opts.tolerance_scale = s;
    }
    if let Some(list) = raw.get("only") {
        let ids = list
            .split(',')
            .map(|s| {
                let s = s.trim();
                match s.parse::<u32>() {
                    Ok(id) if CRITERIA.iter().any(|c| c.0 == id) => Ok(id),
                    _ => Err(ConfigError::invalid("only", s, "not a check number")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        opts.only = Some(ids);
    }
    Ok(opts)
}
