//! Monte Carlo of a permutation code used as a rateless code over SISO
//! block fading.
//!
//! Each trial draws a message, one channel gain `h` and `L` noise samples.
//! The receiver stops at the first block where the accumulated Gaussian-input
//! information reaches the message size, then ML-decodes the received
//! prefix. Outage after `L` blocks counts as an error at block `L`. The same
//! draws are reused at every SNR and for every code in a paired run.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;

use super::code::{PermutationCode, UniversalityEvidence};
use super::decode::{ml_decode_prefix, ReceivedPrefix};
use crate::channel::{
    block_mutual_info, effective_rate, rateless_stop, ChannelRealization, EffectiveRate, OutageProfile, SnrPoint,
    StopOutcome,
};
use crate::error::{Error, Result};
use crate::numfmt::fmt12;
use crate::rng::{accumulate, complex_normal, Merge, Purpose, TrialStreams};

/// Non-outage samples a `(prefix, SNR)` cell needs before its conditional
/// error is reported.
pub const MIN_CELL_SAMPLES: u64 = 100;

/// The rate the code is operated at; it must equal `bits / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateTarget {
    /// `R` in bits per channel use.
    Fixed(f64),
    /// `R = r_n log2(eta)`, only consistent at one SNR.
    Multiplexing(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorDecomposition {
    /// `Pr(error, stop at l)` at index `l - 1`; outages are counted at `L`.
    pub joint_err: Vec<f64>,
    pub joint_err_stderr: Vec<f64>,
    /// Sum of `joint_err`.
    pub p_e: f64,
    pub p_e_stderr: f64,
    /// Stops at `1..=L`, then outages.
    pub stop_hist: Vec<u64>,
    /// `P(error | no outage)`; absent when every trial was in outage.
    pub cond_err_nonoutage: Option<f64>,
    pub outage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeTrialRecord {
    pub eta: SnrPoint,
    pub decomposition: ErrorDecomposition,
    pub profile: OutageProfile,
    pub effective: EffectiveRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedRecord {
    pub first: CodeTrialRecord,
    pub second: CodeTrialRecord,
    /// `P_e(first) - P_e(second)` and its paired standard error.
    pub diff: f64,
    pub diff_stderr: f64,
}

#[derive(Debug, Clone, Default)]
struct Counts {
    stops: Vec<u64>,
    /// Errors by stopping block (outage in the last slot).
    errors: Vec<u64>,
    /// Errors by stopping block, outage excluded.
    decoded_errors: Vec<u64>,
}

impl Counts {
    fn new(blocks: usize) -> Self {
        Self { stops: vec![0; blocks + 1], errors: vec![0; blocks], decoded_errors: vec![0; blocks] }
    }
}

impl Merge for Counts {
    fn merge(&mut self, other: Self) {
        self.stops.merge(other.stops);
        self.errors.merge(other.errors);
        self.decoded_errors.merge(other.decoded_errors);
    }
}

#[derive(Debug, Clone)]
struct SnrCounts {
    per_code: Vec<Counts>,
    only_first: u64,
    only_second: u64,
}

impl Merge for SnrCounts {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.per_code.iter_mut().zip(other.per_code) {
            a.merge(b);
        }
        self.only_first += other.only_first;
        self.only_second += other.only_second;
    }
}

impl Merge for Vec<SnrCounts> {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

fn code_rate(code: &PermutationCode) -> f64 {
    code.bits() as f64 / code.blocks() as f64
}

fn check_rate(code: &PermutationCode, target: Option<RateTarget>, etas: &[SnrPoint]) -> Result<()> {
    let want = code_rate(code);
    let Some(target) = target else { return Ok(()) };
    for eta in etas {
        let got = match target {
            RateTarget::Fixed(r) => r,
            RateTarget::Multiplexing(r_n) => r_n * eta.log2(),
        };
        if (got - want).abs() > 1e-9 * want.max(1.0) {
            return Err(Error::RateMismatch(format!(
                "code carries {} bits over {} blocks (R = {want}), requested R = {got} at {} dB",
                code.bits(),
                code.blocks(),
                eta.db()
            )));
        }
    }
    Ok(())
}

fn simulate(codes: &[&PermutationCode], etas: &[SnrPoint], trials: u64, seed: u64) -> Result<Vec<SnrCounts>> {
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if etas.is_empty() {
        return Err(Error::Usage("SNR grid is empty".into()));
    }
    let lead = codes[0];
    if codes.iter().any(|c| c.blocks() != lead.blocks() || c.messages() != lead.messages()) {
        return Err(Error::InvalidCode("paired codes must share L and the alphabet size".into()));
    }
    let blocks = lead.blocks();
    let k = lead.messages();
    let rate = code_rate(lead);
    let streams = TrialStreams::new(seed, Purpose::CodeTrial);
    let init = || {
        vec![SnrCounts { per_code: vec![Counts::new(blocks); codes.len()], only_first: 0, only_second: 0 }; etas.len()]
    };
    Ok(accumulate(trials, init, |acc, t| {
        let mut rng = streams.trial(t);
        let message = rng.random_range(0..k);
        let h = complex_normal(&mut rng);
        let noise: Vec<Complex64> = (0..blocks).map(|_| complex_normal(&mut rng)).collect();
        let ch = ChannelRealization::scalar(h);
        for (eta, cell) in etas.iter().zip(acc.iter_mut()) {
            let info = block_mutual_info(&ch, eta).unwrap_or(0.0);
            let stop = rateless_stop(info, rate, blocks as u32);
            let slot = stop.slot(blocks as u32);
            let mut errs = [false; 2];
            for (c, (code, counts)) in codes.iter().zip(cell.per_code.iter_mut()).enumerate() {
                counts.stops[slot] += 1;
                let err = match stop {
                    StopOutcome::Outage => {
                        counts.errors[blocks - 1] += 1;
                        true
                    }
                    StopOutcome::Decoded(l) => {
                        let rx = ReceivedPrefix::transmit(code, message, h, *eta, &noise[..l as usize]);
                        let wrong = ml_decode_prefix(code, &rx).message != message;
                        if wrong {
                            counts.errors[l as usize - 1] += 1;
                            counts.decoded_errors[l as usize - 1] += 1;
                        }
                        wrong
                    }
                };
                if c < 2 {
                    errs[c] = err;
                }
            }
            if codes.len() > 1 {
                match errs {
                    [true, false] => cell.only_first += 1,
                    [false, true] => cell.only_second += 1,
                    _ => {}
                }
            }
        }
    }))
}

fn binomial_se(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt()
}

fn record(eta: SnrPoint, counts: Counts, trials: u64, rate: f64) -> CodeTrialRecord {
    let n = trials as f64;
    let blocks = counts.errors.len();
    let joint_err: Vec<f64> = counts.errors.iter().map(|&e| e as f64 / n).collect();
    let joint_err_stderr = joint_err.iter().map(|&p| binomial_se(p, n)).collect();
    let p_e: f64 = joint_err.iter().sum();
    let outages = counts.stops[blocks];
    let decoded = trials - outages;
    let cond_err_nonoutage = (decoded > 0).then(|| counts.decoded_errors.iter().sum::<u64>() as f64 / decoded as f64);
    let profile = OutageProfile::from_stop_counts(counts.stops.clone(), trials);
    let effective = effective_rate(rate, blocks as u32, &profile, Some(&eta));
    CodeTrialRecord {
        eta,
        decomposition: ErrorDecomposition {
            joint_err,
            joint_err_stderr,
            p_e,
            p_e_stderr: binomial_se(p_e.min(1.0), n),
            stop_hist: counts.stops,
            cond_err_nonoutage,
            outage: outages as f64 / n,
        },
        profile,
        effective,
    }
}

/// Error decomposition, stop profile and effective rate at each SNR.
pub fn run_rateless_code_trials(
    code: &PermutationCode,
    rate: Option<RateTarget>,
    etas: &[SnrPoint],
    trials: u64,
    seed: u64,
) -> Result<Vec<CodeTrialRecord>> {
    check_rate(code, rate, etas)?;
    let counts = simulate(&[code], etas, trials, seed)?;
    Ok(etas
        .iter()
        .zip(counts)
        .map(|(eta, mut c)| record(*eta, c.per_code.remove(0), trials, code_rate(code)))
        .collect())
}

/// Runs two codes on identical draws and reports the paired `P_e` difference.
pub fn run_paired_code_trials(
    first: &PermutationCode,
    second: &PermutationCode,
    etas: &[SnrPoint],
    trials: u64,
    seed: u64,
) -> Result<Vec<PairedRecord>> {
    let counts = simulate(&[first, second], etas, trials, seed)?;
    let n = trials as f64;
    let rate = code_rate(first);
    Ok(etas
        .iter()
        .zip(counts)
        .map(|(eta, mut c)| {
            let b = record(*eta, c.per_code.pop().unwrap(), trials, rate);
            let a = record(*eta, c.per_code.pop().unwrap(), trials, rate);
            let mean = (c.only_first as f64 - c.only_second as f64) / n;
            let second_moment = (c.only_first + c.only_second) as f64 / n;
            let diff_stderr = ((second_moment - mean * mean).max(0.0) / n).sqrt();
            PairedRecord { diff: a.decomposition.p_e - b.decomposition.p_e, diff_stderr, first: a, second: b }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginCell {
    /// Stopping block.
    pub l: usize,
    pub eta: SnrPoint,
    pub samples: u64,
    pub errors: u64,
    /// `P(error | stop at l)`; absent below [`MIN_CELL_SAMPLES`].
    pub cond_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniversalityReport {
    pub evidence: UniversalityEvidence,
    pub cells: Vec<MarginCell>,
    /// `P(error | no outage)` per SNR, pooled over stopping blocks.
    pub pooled: Vec<(SnrPoint, Option<f64>)>,
}

/// Fits `ln(-ln P)` against `ln eta`; the slope estimates `delta` in
/// `P = exp(-eta^delta)`.
fn decay_fit(points: &[(SnrPoint, f64)]) -> Option<f64> {
    let xy: Vec<(f64, f64)> =
        points.iter().filter(|(_, p)| *p > 0.0 && *p < 1.0).map(|(e, p)| (e.linear().ln(), (-p.ln()).ln())).collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Conditional decoding error given each stopping block, across an SNR grid,
/// with an empirical decay exponent. No threshold on the exponent is implied.
pub fn universality_margin(
    code: &PermutationCode,
    etas: &[SnrPoint],
    trials: u64,
    seed: u64,
) -> Result<UniversalityReport> {
    let counts = simulate(&[code], etas, trials, seed)?;
    let blocks = code.blocks();
    let mut evidence = code.evidence();
    let mut cells = Vec::new();
    let mut pooled = Vec::new();
    let mut per_prefix: Vec<Vec<(SnrPoint, f64)>> = vec![Vec::new(); blocks];
    for (eta, c) in etas.iter().zip(counts) {
        let c = &c.per_code[0];
        for l in 1..=blocks {
            let samples = c.stops[l - 1];
            let errors = c.decoded_errors[l - 1];
            let cond_err = (samples >= MIN_CELL_SAMPLES).then(|| errors as f64 / samples as f64);
            if let Some(p) = cond_err {
                per_prefix[l - 1].push((*eta, p));
            }
            cells.push(MarginCell { l, eta: *eta, samples, errors, cond_err });
        }
        let decoded: u64 = c.stops[..blocks].iter().sum();
        let errs: u64 = c.decoded_errors.iter().sum();
        pooled.push((*eta, (decoded >= MIN_CELL_SAMPLES).then(|| errs as f64 / decoded as f64)));
    }
    evidence.decay_by_prefix = per_prefix.iter().map(|pts| decay_fit(pts)).collect();
    let pooled_pts: Vec<(SnrPoint, f64)> = pooled.iter().filter_map(|(e, p)| p.map(|p| (*e, p))).collect();
    evidence.decay_estimate = decay_fit(&pooled_pts);
    Ok(UniversalityReport { evidence, cells, pooled })
}

/// Trial CSV: `eta_db,l,joint_err,stderr,p_e,cond_err_nonoutage,seed`, one
/// row per SNR and stopping block.
pub fn write_trials_csv<W: Write>(out: &mut W, records: &[CodeTrialRecord], seed: u64) -> io::Result<()> {
    writeln!(out, "eta_db,l,joint_err,stderr,p_e,cond_err_nonoutage,seed")?;
    for rec in records {
        let d = &rec.decomposition;
        let cond = d.cond_err_nonoutage.map(fmt12).unwrap_or_default();
        for (l, (p, se)) in d.joint_err.iter().zip(&d.joint_err_stderr).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt12(rec.eta.db()),
                l + 1,
                fmt12(*p),
                fmt12(*se),
                fmt12(d.p_e),
                cond,
                seed
            )?;
        }
    }
    Ok(())
}
