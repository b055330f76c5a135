//! The verification suite: nine checks of the library against exact values,
//! closed-form oracles and brute force, each with a pinned tolerance and a
//! runtime limit.
//!
//! `tolerance_scale` multiplies every statistical or numerical tolerance
//! (sigma multipliers, relative bands, interval half-widths, and the exponent
//! of the factor-of-3 band); exact checks are unaffected.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rateless_dmt::channel::{
    effective_rate, estimate_outage_profile, run_rateless_experiment, siso_outage_closed_form, siso_outage_log2,
    write_results_csv, OutageProfile, SnrPoint,
};
use rateless_dmt::dmt::{
    default_grid, rateless_dmt_curve, rateless_dmt_point, AntennaConfig, RatelessConfig, Rational,
    DEFAULT_POINTS_PER_SEGMENT,
};
use rateless_dmt::numfmt::{fmt12, format_rational};
use rateless_dmt::permutation::{
    build_qam, ml_decode_prefix, run_paired_code_trials, search_permutation_code, write_trials_csv, PairedRecord,
    PermutationCode, ReceivedPrefix, SearchOptions,
};
use rateless_dmt::rng::complex_normal;
use rateless_dmt::slope::diversity_slope_log2;

use crate::config::DEFAULT_SEED;

/// Check numbers, names and runtime limits in seconds.
pub const CRITERIA: &[(u32, &str, u64)] = &[
    (1, "rateless and conventional curves, 2x2, L=2", 1),
    (2, "rateless sawtooth, 3x3, L=4", 1),
    (3, "SISO outage estimates vs closed form", 60),
    (4, "outage exponents from the closed form", 1),
    (5, "effective multiplexing gain", 30),
    (6, "rate collapse past min(M,N)/L", 5),
    (7, "permutation-code rateless trials", 600),
    (8, "decoder correctness", 30),
    (9, "determinism across reruns and thread counts", 1800),
];

/// Trials used by the Monte Carlo checks unless overridden.
pub const OUTAGE_TRIALS: u64 = 1_000_000;
pub const RATE_TRIALS: u64 = 100_000;
pub const CODE_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Overrides the trial count of every Monte Carlo check.
    pub trials: Option<u64>,
    /// Runs only these checks.
    pub only: Option<Vec<u32>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, tolerance_scale: 1.0, trials: None, only: None }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub measured: String,
    pub tolerance: String,
    /// Reasons for failure; empty when the check passed.
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} | tolerance: {} | {:.2} s (limit {} s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )?;
        for reason in &self.failures {
            write!(f, "\n    - {reason}")?;
        }
        Ok(())
    }
}

/// Measurement of one check before timing is attached.
struct Outcome {
    measured: String,
    tolerance: String,
    failures: Vec<String>,
}

fn db(x: f64) -> SnrPoint {
    SnrPoint::from_db(x).expect("finite SNR")
}

fn rational(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn siso(blocks: u32) -> RatelessConfig {
    RatelessConfig::new(AntennaConfig::siso(), blocks, 1).expect("valid config")
}

/// Reference tradeoff function: straight lines between the knots
/// `(k, (M-k)(N-k))`, zero past `min(M,N)`.
fn f_knots(m: i64, n: i64, k: &Rational) -> Rational {
    let i = k.floor();
    let knot = |j: &Rational| (rational(m, 1) - j) * (rational(n, 1) - j);
    if i >= rational(m.min(n), 1) {
        return rational(0, 1);
    }
    let next = &i + rational(1, 1);
    knot(&i) + (knot(&next) - knot(&i)) * (k - &i)
}

/// Outputs of the Monte Carlo checks, serialized to bytes, keyed by check.
type Fingerprints = BTreeMap<u32, Vec<u8>>;

struct Suite<'a> {
    opts: &'a VerifyOptions,
    prints: Fingerprints,
}

impl Suite<'_> {
    fn sigma(&self) -> f64 {
        3.0 * self.opts.tolerance_scale
    }

    fn trials(&self, default: u64) -> u64 {
        self.opts.trials.unwrap_or(default)
    }
}

fn outage_profiles(seed: u64, trials: u64) -> Vec<(SnrPoint, OutageProfile)> {
    [0.0, 10.0, 20.0, 30.0]
        .iter()
        .map(|&d| {
            let eta = db(d);
            (eta, estimate_outage_profile(&siso(2), &eta, 1.0, trials, seed).expect("valid inputs"))
        })
        .collect()
}

fn outage_bytes(profiles: &[(SnrPoint, OutageProfile)]) -> Vec<u8> {
    format!("{profiles:?}").into_bytes()
}

fn rate_experiment(seed: u64, trials: u64) -> Vec<rateless_dmt::channel::ExperimentRecord> {
    run_rateless_experiment(&siso(2), 0.25, &[db(60.0)], trials, seed).expect("valid inputs")
}

fn rate_bytes(records: &[rateless_dmt::channel::ExperimentRecord], seed: u64) -> Vec<u8> {
    let mut out = Vec::new();
    write_results_csv(&mut out, records, seed).unwrap();
    out.extend(format!("{records:?}").into_bytes());
    out
}

const CODE_ETAS_DB: [f64; 3] = [20.0, 30.0, 40.0];

fn searched_code() -> (PermutationCode, bool) {
    let found = search_permutation_code(2, 2, &SearchOptions::default()).expect("valid search");
    (found.code, found.exhaustive)
}

fn code_trials(code: &PermutationCode, seed: u64, trials: u64) -> Vec<PairedRecord> {
    let identity = PermutationCode::identity(code.constellation().clone(), code.blocks()).expect("valid");
    let etas: Vec<SnrPoint> = CODE_ETAS_DB.iter().map(|&d| db(d)).collect();
    run_paired_code_trials(code, &identity, &etas, trials, seed).expect("valid inputs")
}

fn code_bytes(records: &[PairedRecord], seed: u64) -> Vec<u8> {
    let mut out = Vec::new();
    let first: Vec<_> = records.iter().map(|r| r.first.clone()).collect();
    let second: Vec<_> = records.iter().map(|r| r.second.clone()).collect();
    write_trials_csv(&mut out, &first, seed).unwrap();
    write_trials_csv(&mut out, &second, seed).unwrap();
    out.extend(format!("{records:?}").into_bytes());
    out
}

fn check_curve_2x2(_: &mut Suite) -> Outcome {
    let cfg = RatelessConfig::new(AntennaConfig::new(2, 2).unwrap(), 2, 1).unwrap();
    let grid = default_grid(&cfg, DEFAULT_POINTS_PER_SEGMENT);
    let cmp = rateless_dmt_curve(&cfg, &grid).expect("valid grid");
    let one = rational(1, 1);
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in cmp.rateless.points.iter().filter(|p| p.r_n < one) {
        checked += 1;
        if p.gain.r != &p.r_n * rational(2, 1) || p.gain.d != f_knots(2, 2, &p.r_n) {
            failures.push(format!(
                "r_n = {}: got (r, d) = ({}, {})",
                format_rational(&p.r_n),
                format_rational(&p.gain.r),
                format_rational(&p.gain.d)
            ));
        }
    }
    for (r, d) in [(0, 4), (1, 1), (2, 0)] {
        let hit = cmp.conventional.points.iter().find(|p| p.gain.r == rational(r, 1));
        match hit {
            Some(p) if p.gain.d == rational(d, 1) => {}
            Some(p) => failures.push(format!("conventional d({r}) = {}, want {d}", format_rational(&p.gain.d))),
            None => failures.push(format!("conventional curve misses r = {r}")),
        }
    }
    failures.truncate(10);
    Outcome {
        measured: format!("{checked} rateless points on [0,1) and 3 conventional knots checked"),
        tolerance: "exact rational equality".into(),
        failures,
    }
}

fn check_sawtooth_3x3(_: &mut Suite) -> Outcome {
    let cfg = RatelessConfig::new(AntennaConfig::new(3, 3).unwrap(), 4, 1).unwrap();
    let grid = default_grid(&cfg, DEFAULT_POINTS_PER_SEGMENT);
    let cmp = rateless_dmt_curve(&cfg, &grid).expect("valid grid");
    let mut failures = Vec::new();
    let starts = cmp.rateless.segment_starts();
    let levels: Vec<_> = starts.iter().filter(|(s, _)| (1..=4).contains(s)).collect();
    let breaks: Vec<Rational> = levels.iter().skip(1).map(|(_, r)| r.clone()).collect();
    let want = vec![rational(3, 4), rational(3, 2), rational(9, 4)];
    if levels.len() != 4 {
        failures.push(format!("{} segments", levels.len()));
    }
    if breaks != want {
        failures.push(format!("breaks at {:?}", breaks.iter().map(format_rational).collect::<Vec<_>>()));
    }
    for p in cmp.rateless.points.iter().filter(|p| (1..=4).contains(&p.segment)) {
        let l = p.segment as i64;
        if p.gain.r != &p.r_n * rational(4, l) || p.gain.d != f_knots(3, 3, &p.r_n) {
            failures.push(format!("segment {l}, r_n = {}", format_rational(&p.r_n)));
        }
    }
    let end = rateless_dmt_point(&cfg, &rational(3, 1)).expect("valid point");
    if end.d != rational(0, 1) {
        failures.push(format!("d(r_n = 3) = {}", format_rational(&end.d)));
    }
    failures.truncate(10);
    Outcome {
        measured: format!(
            "{} segments, breaks at {{{}}}, d(3) = {}",
            levels.len(),
            breaks.iter().map(format_rational).collect::<Vec<_>>().join(", "),
            format_rational(&end.d)
        ),
        tolerance: "exact rational equality".into(),
        failures,
    }
}

fn check_outage_oracle(suite: &mut Suite) -> Outcome {
    let trials = suite.trials(OUTAGE_TRIALS);
    let profiles = outage_profiles(suite.opts.seed, trials);
    let k = suite.sigma();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut cells = Vec::new();
    for (eta, prof) in &profiles {
        for l in 1..=2u32 {
            let want = siso_outage_closed_form(eta, 2.0 / l as f64);
            let (got, se) = (prof.p_hat[l as usize], prof.stderr[l as usize]);
            let z = if se > 0.0 {
                (got - want).abs() / se
            } else if got == want {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
            cells.push(format!("{}dB p({l})={}", eta.db(), fmt12(got)));
            if z > k {
                failures.push(format!("{} dB, l = {l}: p_hat = {got}, closed form = {want}, |z| = {z:.2}", eta.db()));
            }
        }
    }
    suite.prints.insert(3, outage_bytes(&profiles));
    Outcome {
        measured: format!("max |z| = {worst:.2} over 8 cells, {trials} trials ({})", cells.join(", ")),
        tolerance: format!("|z| <= {k}"),
        failures,
    }
}

/// Slope of `-log2 p` against `log2 eta` for the closed-form SISO outage with
/// threshold `factor * log2 eta`, on 40..80 dB in 1 dB steps.
fn closed_form_slope(factor: f64) -> f64 {
    let pts: Vec<(SnrPoint, f64)> = (40..=80)
        .map(|d| {
            let eta = db(d as f64);
            (eta, siso_outage_log2(&eta, factor * eta.log2()))
        })
        .collect();
    diversity_slope_log2(&pts).expect("distinct SNRs").slope
}

fn band(center: f64, half: f64, scale: f64) -> (f64, f64) {
    (center - half * scale, center + half * scale)
}

fn check_slopes(suite: &mut Suite) -> Outcome {
    let s = suite.opts.tolerance_scale;
    // L = 2, r_n = 0.25, R = r_n log2(eta): p(2) has threshold R, p(1) has 2R.
    let last = closed_form_slope(0.25);
    let first = closed_form_slope(0.5);
    let (a_lo, a_hi) = band(0.74, 0.04, s);
    let (b_lo, b_hi) = band(0.49, 0.04, s);
    let mut failures = Vec::new();
    if !(a_lo..=a_hi).contains(&last) {
        failures.push(format!("slope of p(2) = {last}"));
    }
    if !(b_lo..=b_hi).contains(&first) {
        failures.push(format!("slope of p(1) = {first}"));
    }
    Outcome {
        measured: format!("slope p(2) = {last:.4} (limit 0.75), slope p(1) = {first:.4} (limit 0.5)"),
        tolerance: format!("[{a_lo:.3}, {a_hi:.3}] and [{b_lo:.3}, {b_hi:.3}]"),
        failures,
    }
}

/// Closed-form effective rate for SISO with `L = 2` at `R = r_n log2 eta`.
fn closed_form_rate(r_n: f64, eta: &SnrPoint) -> (f64, Option<f64>) {
    let rate = r_n * eta.log2();
    let p1 = siso_outage_closed_form(eta, 2.0 * rate);
    let profile = OutageProfile::from_probabilities(vec![1.0, p1]).expect("valid probability");
    let er = effective_rate(rate, 2, &profile, Some(eta));
    (er.r_bar, er.r_hat)
}

fn check_effective_rate(suite: &mut Suite) -> Outcome {
    let eta = db(60.0);
    let (r_bar, r_hat) = closed_form_rate(0.25, &eta);
    let r_hat = r_hat.expect("eta > 1");
    let rel = (r_hat - 0.5).abs() / 0.5;
    let rel_tol = 0.05 * suite.opts.tolerance_scale;
    let trials = suite.trials(RATE_TRIALS);
    let records = rate_experiment(suite.opts.seed, trials);
    let mc = &records[0].effective;
    let se = mc.r_bar_stderr.unwrap_or(0.0);
    let z = if se > 0.0 {
        (mc.r_bar - r_bar).abs() / se
    } else if mc.r_bar == r_bar {
        0.0
    } else {
        f64::INFINITY
    };
    let k = suite.sigma();
    let mut failures = Vec::new();
    if rel > rel_tol {
        failures.push(format!("r_hat = {r_hat}, {:.2}% from 0.5", 100.0 * rel));
    }
    if z > k {
        failures.push(format!("Monte Carlo R_bar = {} vs {r_bar}, |z| = {z:.2}", mc.r_bar));
    }
    suite.prints.insert(5, rate_bytes(&records, suite.opts.seed));
    Outcome {
        measured: format!(
            "r_hat = {r_hat:.5} ({:.3}% from 0.5); R_bar closed form {} vs Monte Carlo {} (|z| = {z:.2}, {trials} trials)",
            100.0 * rel,
            fmt12(r_bar),
            fmt12(mc.r_bar)
        ),
        tolerance: format!("relative {:.1}%, |z| <= {k}", 100.0 * rel_tol),
        failures,
    }
}

fn check_rate_collapse(suite: &mut Suite) -> Outcome {
    let s = suite.opts.tolerance_scale;
    let (_, r_hat) = closed_form_rate(0.75, &SnrPoint::from_linear(1e8).unwrap());
    let r_hat = r_hat.expect("eta > 1");
    let rel = (r_hat - 0.75).abs() / 0.75;
    // p(1) has threshold L R = 1.5 log2 eta.
    let slope = closed_form_slope(1.5);
    let mut failures = Vec::new();
    if rel > 0.10 * s {
        failures.push(format!("r_hat at 80 dB = {r_hat}"));
    }
    if slope.abs() > 0.05 * s {
        failures.push(format!("slope of p(1) = {slope}"));
    }
    Outcome {
        measured: format!("r_hat(80 dB) = {r_hat:.5} (target 0.75), slope of p(1) = {slope:.2e}"),
        tolerance: format!("relative {:.0}%, |slope| <= {:.3}", 10.0 * s, 0.05 * s),
        failures,
    }
}

fn check_code_trials(suite: &mut Suite) -> Outcome {
    let (code, exhaustive) = searched_code();
    let trials = suite.trials(CODE_TRIALS);
    let records = code_trials(&code, suite.opts.seed, trials);
    let k = suite.sigma();
    let factor = 3f64.powf(suite.opts.tolerance_scale);
    let mut failures = Vec::new();
    if !exhaustive {
        failures.push("search was not exhaustive".into());
    }
    let mut worst_z: f64 = 0.0;
    let mut ratios = Vec::new();
    let mut early_margin = String::new();
    let mut worst_diff: f64 = f64::NEG_INFINITY;
    for rec in &records {
        let eta = rec.first.eta;
        let prof = &rec.first.profile;
        // (a) stop probabilities
        for l in 1..=2usize {
            let want = siso_outage_closed_form(&eta, 2.0 / l as f64);
            let se = prof.stderr[l];
            let z = if se > 0.0 {
                (prof.p_hat[l] - want).abs() / se
            } else if prof.p_hat[l] == want {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
            if z > k {
                failures.push(format!("{} dB: p_hat({l}) = {} vs {want}", eta.db(), prof.p_hat[l]));
            }
        }
        let d = &rec.first.decomposition;
        // (b) total error tracks the outage probability
        if eta.db() >= 30.0 {
            let p_l = siso_outage_closed_form(&eta, 1.0);
            let ratio = d.p_e / p_l;
            ratios.push(format!("{}dB {ratio:.3}", eta.db()));
            if !(1.0 / factor..=factor).contains(&ratio) {
                failures.push(format!("{} dB: P_e / p(L) = {ratio}", eta.db()));
            }
        }
        // (c) early stops contribute no more than the last block
        if eta.db() == 40.0 {
            let early: f64 = d.joint_err[..1].iter().sum();
            let se =
                (d.joint_err_stderr[..1].iter().map(|s| s * s).sum::<f64>() + d.joint_err_stderr[1].powi(2)).sqrt();
            early_margin =
                format!("early {} vs last {} (+{k} se = {})", fmt12(early), fmt12(d.joint_err[1]), fmt12(k * se));
            if early > d.joint_err[1] + k * se {
                failures.push(format!("40 dB: {early_margin}"));
            }
        }
        // (d) searched code no worse than repetition
        let z = if rec.diff_stderr > 0.0 {
            rec.diff / rec.diff_stderr
        } else if rec.diff <= 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        worst_diff = worst_diff.max(z);
        if rec.diff > k * rec.diff_stderr {
            failures.push(format!(
                "{} dB: P_e(searched) - P_e(repetition) = {} (se {})",
                eta.db(),
                rec.diff,
                rec.diff_stderr
            ));
        }
    }
    suite.prints.insert(7, code_bytes(&records, suite.opts.seed));
    let pe: Vec<String> = records
        .iter()
        .map(|r| {
            format!(
                "{}dB {} vs {}",
                r.first.eta.db(),
                fmt12(r.first.decomposition.p_e),
                fmt12(r.second.decomposition.p_e)
            )
        })
        .collect();
    Outcome {
        measured: format!(
            "(a) max |z| = {worst_z:.2}; (b) P_e/p(L) = {}; (c) {early_margin}; (d) max paired z = {worst_diff:.2}, P_e searched vs repetition: {}; {trials} trials",
            ratios.join(", "),
            pe.join(", ")
        ),
        tolerance: format!("(a) |z| <= {k}; (b) ratio in [1/{factor:.2}, {factor:.2}]; (c),(d) {k} se"),
        failures,
    }
}

/// Nearest codeword over the whole metric, no pruning.
fn brute_force(code: &PermutationCode, rx: &ReceivedPrefix) -> usize {
    let gain = rx.h * rx.eta.linear().sqrt();
    let metric =
        |m: usize| -> f64 { rx.y.iter().enumerate().map(|(k, y)| (y - gain * code.symbol(k, m)).norm_sqr()).sum() };
    (1..code.messages()).fold(0, |best, m| if metric(m) < metric(best) { m } else { best })
}

fn check_decoder(suite: &mut Suite) -> Outcome {
    let mut failures = Vec::new();
    let mut codes = Vec::new();
    for blocks in 1..=3usize {
        for bits in 1..=4u32 {
            let opts = SearchOptions { budget: 20_000, seed: suite.opts.seed, ..SearchOptions::default() };
            codes.push(search_permutation_code(blocks, bits, &opts).expect("valid search").code);
            codes.push(PermutationCode::identity(build_qam(bits).unwrap(), blocks).unwrap());
        }
    }
    let h = Complex64::new(0.8, -0.6);
    let eta = db(10.0);
    let mut noiseless = 0u64;
    for code in &codes {
        let zeros = vec![Complex64::new(0.0, 0.0); code.blocks()];
        for l in code.evidence().decodable_prefixes() {
            for m in 0..code.messages() {
                noiseless += 1;
                let rx = ReceivedPrefix::transmit(code, m, h, eta, &zeros[..l]);
                let got = ml_decode_prefix(code, &rx).message;
                if got != m {
                    failures.push(format!(
                        "noiseless L={} bits={} l={l}: sent {m}, decoded {got}",
                        code.blocks(),
                        code.bits()
                    ));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(suite.opts.seed);
    let instances = 10_000;
    let mut disagreements = 0;
    for i in 0..instances {
        let code = &codes[i % codes.len()];
        let l = rng.random_range(1..=code.blocks());
        let m = rng.random_range(0..code.messages());
        let eta = db(rng.random_range(-5.0..25.0));
        let h = complex_normal(&mut rng);
        let noise: Vec<Complex64> = (0..l).map(|_| complex_normal(&mut rng)).collect();
        let rx = ReceivedPrefix::transmit(code, m, h, eta, &noise);
        if ml_decode_prefix(code, &rx).message != brute_force(code, &rx) {
            disagreements += 1;
        }
    }
    if disagreements > 0 {
        failures.push(format!("{disagreements} disagreements with brute force"));
    }
    failures.truncate(10);
    Outcome {
        measured: format!(
            "{noiseless} noiseless decodes over {} codes; {disagreements}/{instances} noisy disagreements",
            codes.len()
        ),
        tolerance: "exact agreement".into(),
        failures,
    }
}

fn rerun(id: u32, seed: u64, trials: Option<u64>) -> Vec<u8> {
    match id {
        3 => outage_bytes(&outage_profiles(seed, trials.unwrap_or(OUTAGE_TRIALS))),
        5 => rate_bytes(&rate_experiment(seed, trials.unwrap_or(RATE_TRIALS)), seed),
        7 => code_bytes(&code_trials(&searched_code().0, seed, trials.unwrap_or(CODE_TRIALS)), seed),
        _ => unreachable!("check {id} has no Monte Carlo part"),
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}

fn check_determinism(suite: &mut Suite) -> Outcome {
    let (seed, trials) = (suite.opts.seed, suite.opts.trials);
    let mut failures = Vec::new();
    let mut runs = 0;
    for id in [3u32, 5, 7] {
        let reference = match suite.prints.get(&id) {
            Some(bytes) => bytes.clone(),
            None => rerun(id, seed, trials),
        };
        let again = rerun(id, seed, trials);
        let one = in_pool(1, || rerun(id, seed, trials));
        let four = in_pool(4, || rerun(id, seed, trials));
        runs += 3;
        for (label, bytes) in [("rerun", again), ("1 thread", one), ("4 threads", four)] {
            if bytes != reference {
                failures.push(format!("check {id}: {label} differs"));
            }
        }
    }
    Outcome {
        measured: format!("{runs} reruns of checks 3, 5, 7 (default pool, 1 and 4 threads) compared byte for byte"),
        tolerance: "identical bytes".into(),
        failures,
    }
}

/// Runs the selected checks in order, calling `progress` after each.
pub fn run_checks_with(opts: &VerifyOptions, mut progress: impl FnMut(&Check)) -> Vec<Check> {
    let mut suite = Suite { opts, prints: Fingerprints::new() };
    let mut checks = Vec::new();
    for &(id, name, limit) in CRITERIA {
        if opts.only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = match id {
            1 => check_curve_2x2(&mut suite),
            2 => check_sawtooth_3x3(&mut suite),
            3 => check_outage_oracle(&mut suite),
            4 => check_slopes(&mut suite),
            5 => check_effective_rate(&mut suite),
            6 => check_rate_collapse(&mut suite),
            7 => check_code_trials(&mut suite),
            8 => check_decoder(&mut suite),
            9 => check_determinism(&mut suite),
            _ => unreachable!(),
        };
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(limit);
        let mut failures = outcome.failures;
        if elapsed >= limit {
            failures.push(format!("took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
        }
        let check =
            Check { id, name, measured: outcome.measured, tolerance: outcome.tolerance, failures, elapsed, limit };
        progress(&check);
        checks.push(check);
    }
    checks
}

pub fn run_checks(opts: &VerifyOptions) -> Vec<Check> {
    run_checks_with(opts, |_| {})
}
