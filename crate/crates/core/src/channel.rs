//! Monte Carlo engine for the rateless protocol over i.i.d. Rayleigh MIMO
//! block fading.
//!
//! One channel matrix `H` is drawn per codeword and stays fixed for all `L`
//! blocks. With Gaussian inputs every block carries `I_b = log2 det(I +
//! (eta/M) H H*)` bits per channel use, so after `l` blocks the receiver holds
//! `l T I_b` bits against a message of `R L T` bits. It decodes at the first
//! `l` with `l I_b >= L R` and declares outage if no `l <= L` qualifies.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::dmt::{AntennaConfig, RatelessConfig};
use crate::error::{Error, Result};
use crate::numfmt::fmt12;
use crate::rng::{accumulate, complex_normal, Purpose, TrialStreams};

/// Average SNR per receive antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    linear: f64,
    db: f64,
}

impl SnrPoint {
    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Range(format!("SNR in dB must be finite, got {db}")));
        }
        Ok(Self { linear: 10f64.powf(db / 10.0), db })
    }

    pub fn from_linear(linear: f64) -> Result<Self> {
        if !(linear.is_finite() && linear > 0.0) {
            return Err(Error::Range(format!("linear SNR must be positive, got {linear}")));
        }
        Ok(Self { linear, db: 10.0 * linear.log10() })
    }

    pub fn linear(&self) -> f64 {
        self.linear
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    pub fn log2(&self) -> f64 {
        self.linear.log2()
    }
}

/// A sampled `N x M` channel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: DMatrix<Complex64>,
}

impl ChannelRealization {
    pub fn from_matrix(h: DMatrix<Complex64>) -> Self {
        Self { h }
    }

    pub fn scalar(h: Complex64) -> Self {
        Self { h: DMatrix::from_element(1, 1, h) }
    }

    pub fn rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn tx(&self) -> usize {
        self.h.ncols()
    }
}

/// Draws `H` with i.i.d. CN(0,1) entries, column by column.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &AntennaConfig, rng: &mut R) -> ChannelRealization {
    let (rows, cols) = (cfg.rx() as usize, cfg.tx() as usize);
    let mut h = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            h[(r, c)] = complex_normal(rng);
        }
    }
    ChannelRealization { h }
}

/// Gaussian-input mutual information of one block, in bits per channel use:
/// `log2 det(I_N + (eta/M) H H*)`.
///
/// The determinant is taken over the smaller Gram matrix (`H H*` or `H* H`)
/// through a Cholesky factorization.
pub fn block_mutual_info(ch: &ChannelRealization, eta: &SnrPoint) -> Result<f64> {
    let h = &ch.h;
    if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numeric("channel matrix has non-finite entries".into()));
    }
    let scale = eta.linear() / ch.tx() as f64;
    if h.nrows() == 1 && h.ncols() == 1 {
        return Ok((scale * h[(0, 0)].norm_sqr()).ln_1p() / std::f64::consts::LN_2);
    }
    let gram = if h.nrows() <= h.ncols() { h * h.adjoint() } else { h.adjoint() * h };
    let dim = gram.nrows();
    let a = DMatrix::<Complex64>::identity(dim, dim) + gram * Complex64::new(scale, 0.0);
    let chol = a.cholesky().ok_or_else(|| Error::Numeric("I + (eta/M) H H* is not positive definite".into()))?;
    let l = chol.l_dirty();
    let ln_det: f64 = (0..dim).map(|i| 2.0 * l[(i, i)].re.ln()).sum();
    Ok((ln_det / std::f64::consts::LN_2).max(0.0))
}

/// Block after which the receiver decodes, or outage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopOutcome {
    Decoded(u32),
    Outage,
}

impl StopOutcome {
    /// Histogram slot: `l - 1` for a stop at block `l`, `blocks` for outage.
    pub fn slot(&self, blocks: u32) -> usize {
        match self {
            StopOutcome::Decoded(l) => (*l - 1) as usize,
            StopOutcome::Outage => blocks as usize,
        }
    }
}

/// Smallest `l` in `1..=blocks` with `l * info_per_block >= blocks * rate`.
/// Equality counts as decodable.
pub fn rateless_stop(info_per_block: f64, rate: f64, blocks: u32) -> StopOutcome {
    let need = blocks as f64 * rate;
    (1..=blocks).find(|&l| l as f64 * info_per_block >= need).map_or(StopOutcome::Outage, StopOutcome::Decoded)
}

/// `Pr(log2(1 + eta |h|^2) < threshold)` for `|h|^2 ~ Exp(1)`, i.e.
/// `1 - exp(-(2^threshold - 1) / eta)`.
pub fn siso_outage_closed_form(eta: &SnrPoint, threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return 0.0;
    }
    let x = (threshold * std::f64::consts::LN_2).exp_m1() / eta.linear();
    -(-x).exp_m1()
}

/// `log2` of [`siso_outage_closed_form`], accurate both for vanishing
/// probabilities and for probabilities that round to one.
pub fn siso_outage_log2(eta: &SnrPoint, threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let x = (threshold * std::f64::consts::LN_2).exp_m1() / eta.linear();
    let ln_p = if x < 1.0 { (-(-x).exp_m1()).ln() } else { (-(-x).exp()).ln_1p() };
    ln_p / std::f64::consts::LN_2
}

/// Estimated `p(l)`, the probability that decoding has not happened after
/// `l` blocks, for `l = 0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageProfile {
    pub p_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: u64,
    /// Stops at blocks `1..=L` followed by the outage count; empty when the
    /// profile was not estimated from trials.
    pub stop_counts: Vec<u64>,
}

impl OutageProfile {
    pub fn from_stop_counts(stop_counts: Vec<u64>, trials: u64) -> Self {
        let blocks = stop_counts.len() - 1;
        debug_assert_eq!(stop_counts.iter().sum::<u64>(), trials);
        let n = trials as f64;
        let mut p_hat = vec![1.0; blocks + 1];
        let mut stderr = vec![0.0; blocks + 1];
        // Not decoded after l blocks <=> stop slot index >= l.
        let mut remaining = trials;
        for l in 1..=blocks {
            remaining -= stop_counts[l - 1];
            let p = remaining as f64 / n;
            p_hat[l] = p;
            stderr[l] = (p * (1.0 - p) / n).sqrt();
        }
        Self { p_hat, stderr, trials, stop_counts }
    }

    /// A profile given directly by probabilities, `p[0]` must be 1.
    pub fn from_probabilities(p: Vec<f64>) -> Result<Self> {
        if p.first() != Some(&1.0) {
            return Err(Error::Usage("p(0) must equal 1".into()));
        }
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) || p.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Usage("p(l) must be nonincreasing within [0, 1]".into()));
        }
        let stderr = vec![0.0; p.len()];
        Ok(Self { p_hat: p, stderr, trials: 0, stop_counts: Vec::new() })
    }

    pub fn blocks(&self) -> u32 {
        (self.p_hat.len() - 1) as u32
    }
}

/// Per-SNR histogram of stop outcomes, with common random numbers: the same
/// `H` is used at every SNR of a trial.
fn simulate_stops(
    cfg: &RatelessConfig,
    etas: &[SnrPoint],
    rates: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<u64>>> {
    let blocks = cfg.blocks();
    let streams = TrialStreams::new(seed, Purpose::Channel);
    let slots = blocks as usize + 1;
    let counts = accumulate(
        trials,
        || vec![vec![0u64; slots]; etas.len()],
        |acc, t| {
            let mut rng = streams.trial(t);
            let ch = sample_channel(&cfg.antennas, &mut rng);
            for (k, (eta, rate)) in etas.iter().zip(rates).enumerate() {
                // Entries are finite by construction, so this cannot fail.
                let info = block_mutual_info(&ch, eta).unwrap_or(0.0);
                acc[k][rateless_stop(info, *rate, blocks).slot(blocks)] += 1;
            }
        },
    );
    Ok(counts)
}

/// Estimates `p(l)` at one SNR with a fixed rate `R` (bits per channel use).
pub fn estimate_outage_profile(
    cfg: &RatelessConfig,
    eta: &SnrPoint,
    rate: f64,
    trials: u64,
    seed: u64,
) -> Result<OutageProfile> {
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Range(format!("rate must be nonnegative, got {rate}")));
    }
    let counts = simulate_stops(cfg, std::slice::from_ref(eta), &[rate], trials, seed)?;
    Ok(OutageProfile::from_stop_counts(counts.into_iter().next().unwrap(), trials))
}

/// Average rate at which messages leave the transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRate {
    /// `R L / sum_{l<L} p(l)` in bits per channel use.
    pub r_bar: f64,
    /// `r_bar / log2(eta)`; absent when no SNR is given or `eta <= 1`.
    pub r_hat: Option<f64>,
    /// Standard error of `r_bar` when the profile came from trials.
    pub r_bar_stderr: Option<f64>,
}

/// `R_bar = R L / sum_{l=0}^{L-1} p(l)`; only `p(0..L)` of the profile is read.
///
/// The denominator is the mean number of blocks spent per message, which is
/// what the standard error is computed from.
///
/// # Panics
///
/// If the profile holds fewer than `blocks` probabilities.
pub fn effective_rate(rate: f64, blocks: u32, profile: &OutageProfile, eta: Option<&SnrPoint>) -> EffectiveRate {
    let blocks = blocks as usize;
    assert!(profile.p_hat.len() >= blocks, "profile shorter than L");
    let mean_blocks: f64 = profile.p_hat[..blocks].iter().sum();
    let r_bar = rate * blocks as f64 / mean_blocks;
    let r_hat = eta.filter(|e| e.linear() > 1.0).map(|e| r_bar / e.log2());

    let r_bar_stderr = (!profile.stop_counts.is_empty() && profile.trials > 0).then(|| {
        let n = profile.trials as f64;
        // Blocks used: l for a stop at l, L for outage.
        let second: f64 = profile
            .stop_counts
            .iter()
            .enumerate()
            .map(|(slot, &c)| {
                let used = (slot + 1).min(blocks) as f64;
                c as f64 * used * used
            })
            .sum::<f64>()
            / n;
        let var = (second - mean_blocks * mean_blocks).max(0.0);
        rate * blocks as f64 / (mean_blocks * mean_blocks) * (var / n).sqrt()
    });
    EffectiveRate { r_bar, r_hat, r_bar_stderr }
}

/// Outcome of the rateless protocol at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub eta: SnrPoint,
    /// `R = r_n log2(eta)`, floored at zero.
    pub rate: f64,
    pub profile: OutageProfile,
    pub effective: EffectiveRate,
}

/// Runs the rateless protocol at `R = r_n log2(eta)` over an SNR grid.
///
/// Every trial reuses one channel draw across the grid, so the estimates are
/// coupled and `p_hat` is monotone in SNR for each trial set. The block length
/// `T` cancels from the stopping rule and is only carried as metadata.
pub fn run_rateless_experiment(
    cfg: &RatelessConfig,
    r_n: f64,
    etas: &[SnrPoint],
    trials: u64,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    if etas.is_empty() {
        return Err(Error::Usage("SNR grid is empty".into()));
    }
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    if !(r_n.is_finite() && r_n >= 0.0) {
        return Err(Error::Domain(format!("r_n must be nonnegative, got {r_n}")));
    }
    let rates: Vec<f64> = etas.iter().map(|e| (r_n * e.log2()).max(0.0)).collect();
    let counts = simulate_stops(cfg, etas, &rates, trials, seed)?;
    Ok(etas
        .iter()
        .zip(rates)
        .zip(counts)
        .map(|((eta, rate), hist)| {
            let profile = OutageProfile::from_stop_counts(hist, trials);
            let effective = effective_rate(rate, cfg.blocks(), &profile, Some(eta));
            ExperimentRecord { eta: *eta, rate, profile, effective }
        })
        .collect())
}

/// Results CSV: `eta_db,l,p_hat,stderr,trials,r_bar,r_hat,seed`, one row per
/// SNR and `l = 0..=L`. An undefined `r_hat` is left empty.
pub fn write_results_csv<W: Write>(out: &mut W, records: &[ExperimentRecord], seed: u64) -> io::Result<()> {
    writeln!(out, "eta_db,l,p_hat,stderr,trials,r_bar,r_hat,seed")?;
    for rec in records {
        let r_hat = rec.effective.r_hat.map(fmt12).unwrap_or_default();
        for (l, (p, se)) in rec.profile.p_hat.iter().zip(&rec.profile.stderr).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt12(rec.eta.db()),
                l,
                fmt12(*p),
                fmt12(*se),
                rec.profile.trials,
                fmt12(rec.effective.r_bar),
                r_hat,
                seed
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::TrialStreams;
    use approx::assert_relative_eq;

    fn rl(m: u32, n: u32, l: u32) -> RatelessConfig {
        RatelessConfig::new(AntennaConfig::new(m, n).unwrap(), l, 1).unwrap()
    }

    fn snr(linear: f64) -> SnrPoint {
        SnrPoint::from_linear(linear).unwrap()
    }

    #[test]
    fn snr_conversions_agree() {
        let s = SnrPoint::from_db(20.0).unwrap();
        assert_relative_eq!(s.linear(), 100.0, max_relative = 1e-12);
        let t = SnrPoint::from_linear(1000.0).unwrap();
        assert_relative_eq!(t.db(), 30.0, max_relative = 1e-12);
        assert!(SnrPoint::from_linear(0.0).is_err());
        assert!(SnrPoint::from_db(f64::NAN).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_shaped() {
        let streams = TrialStreams::new(11, Purpose::Channel);
        let a = sample_channel(&AntennaConfig::siso(), &mut streams.trial(0));
        let b = sample_channel(&AntennaConfig::siso(), &mut streams.trial(0));
        assert_eq!(a, b);
        let c = sample_channel(&AntennaConfig::new(3, 2).unwrap(), &mut streams.trial(1));
        assert_eq!((c.h.nrows(), c.h.ncols()), (2, 3));
    }

    #[test]
    fn entries_have_unit_power() {
        let streams = TrialStreams::new(5, Purpose::Channel);
        let cfg = AntennaConfig::new(2, 2).unwrap();
        let n = 100_000;
        let mut power = [0.0f64; 4];
        let mut re2 = 0.0;
        for t in 0..n {
            let ch = sample_channel(&cfg, &mut streams.trial(t));
            for (k, z) in ch.h.iter().enumerate() {
                power[k] += z.norm_sqr();
            }
            re2 += ch.h[(0, 0)].re.powi(2);
        }
        for p in power {
            let mean = p / n as f64;
            assert!((0.99..=1.01).contains(&mean), "mean |h|^2 = {mean}");
        }
        let half = re2 / n as f64;
        assert!((half - 0.5).abs() < 0.01, "Re variance {half}");
    }

    #[test]
    fn mutual_info_examples() {
        let one = ChannelRealization::scalar(Complex64::new(1.0, 0.0));
        assert_relative_eq!(block_mutual_info(&one, &snr(3.0)).unwrap(), 2.0, epsilon = 1e-12);
        let zero = ChannelRealization::scalar(Complex64::new(0.0, 0.0));
        assert_eq!(block_mutual_info(&zero, &snr(123.0)).unwrap(), 0.0);
        let eye = ChannelRealization::from_matrix(DMatrix::identity(2, 2));
        assert_relative_eq!(block_mutual_info(&eye, &snr(2.0)).unwrap(), 2.0, epsilon = 1e-12);
        let bad = ChannelRealization::scalar(Complex64::new(f64::NAN, 0.0));
        assert!(matches!(block_mutual_info(&bad, &snr(1.0)), Err(Error::Numeric(_))));
    }

    /// Direct 2x2 complex determinant of I + c H H*.
    fn det2_oracle(h: &DMatrix<Complex64>, c: f64) -> f64 {
        let g = |i: usize, j: usize| -> Complex64 {
            let mut s = Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
            for k in 0..h.ncols() {
                s += h[(i, k)] * h[(j, k)].conj() * c;
            }
            s
        };
        (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).re.log2()
    }

    #[test]
    fn mutual_info_matches_direct_determinant() {
        let streams = TrialStreams::new(99, Purpose::Channel);
        for t in 0..200 {
            let cfg = AntennaConfig::new(1 + (t % 3) as u32, 2).unwrap();
            let ch = sample_channel(&cfg, &mut streams.trial(t));
            let eta = snr(10f64.powf((t % 7) as f64 / 2.0));
            let got = block_mutual_info(&ch, &eta).unwrap();
            let want = det2_oracle(&ch.h, eta.linear() / cfg.tx() as f64);
            assert_relative_eq!(got, want, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn tall_and_wide_channels_agree() {
        // det(I + c H H*) = det(I + c H* H); transposing swaps M and N, so
        // the SNR doubles to keep eta/M fixed.
        let streams = TrialStreams::new(3, Purpose::Channel);
        let ch = sample_channel(&AntennaConfig::new(2, 4).unwrap(), &mut streams.trial(0));
        let t = ChannelRealization::from_matrix(ch.h.adjoint());
        let a = block_mutual_info(&ch, &snr(50.0)).unwrap();
        let b = block_mutual_info(&t, &snr(100.0)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn stop_rule_examples() {
        assert_eq!(rateless_stop(2.0, 1.0, 2), StopOutcome::Decoded(1));
        assert_eq!(rateless_stop(1.2, 1.0, 2), StopOutcome::Decoded(2));
        assert_eq!(rateless_stop(0.9, 1.0, 2), StopOutcome::Outage);
        assert_eq!(rateless_stop(1.0, 0.5, 2), StopOutcome::Decoded(1));
        assert_eq!(rateless_stop(1.0, 1.0, 2), StopOutcome::Decoded(2));
        assert_eq!(rateless_stop(0.0, 0.0, 3), StopOutcome::Decoded(1));
        assert_eq!(rateless_stop(0.0, 0.5, 3), StopOutcome::Outage);
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(siso_outage_closed_form(&snr(10.0), 1.0), 0.0951625819640404, max_relative = 1e-12);
        assert_eq!(siso_outage_closed_form(&snr(10.0), 0.0), 0.0);
        assert_relative_eq!(siso_outage_closed_form(&snr(10.0), 2.0), 0.2591817793182821, max_relative = 1e-12);
        for (eta, t) in [(10.0, 1.0), (1e6, 4.9), (1e3, 30.0), (1e8, 0.01)] {
            let p = siso_outage_closed_form(&snr(eta), t);
            assert_relative_eq!(siso_outage_log2(&snr(eta), t), p.log2(), max_relative = 1e-12);
        }
        // rounds to 1 in the linear domain but not in the log domain
        assert!(siso_outage_log2(&snr(10.0), 12.0) < 0.0);
    }

    /// Midpoint-rule integration of the exponential density over the
    /// outage region `|h|^2 < (2^t - 1)/eta`.
    #[test]
    fn closed_form_matches_quadrature() {
        for (eta, t) in [(10.0, 1.0), (1.0, 2.0), (100.0, 3.5)] {
            let upper = (2f64.powf(t) - 1.0) / eta;
            let n = 200_000;
            let dx = upper / n as f64;
            let integral: f64 = (0..n).map(|i| (-(i as f64 + 0.5) * dx).exp() * dx).sum();
            assert_relative_eq!(siso_outage_closed_form(&snr(eta), t), integral, max_relative = 1e-8);
        }
    }

    #[test]
    fn effective_rate_examples() {
        let p = |v: Vec<f64>| OutageProfile::from_probabilities(v).unwrap();
        assert_relative_eq!(effective_rate(1.0, 2, &p(vec![1.0, 0.0]), None).r_bar, 2.0);
        assert_relative_eq!(effective_rate(1.0, 2, &p(vec![1.0, 1.0]), None).r_bar, 1.0);
        assert_relative_eq!(
            effective_rate(1.0, 3, &p(vec![1.0, 0.5, 0.25]), None).r_bar,
            3.0 / 1.75,
            max_relative = 1e-15
        );
        let r = effective_rate(1.0, 2, &p(vec![1.0, 0.0]), Some(&snr(4.0)));
        assert_relative_eq!(r.r_hat.unwrap(), 1.0);
        assert!(effective_rate(1.0, 2, &p(vec![1.0, 0.0]), Some(&snr(1.0))).r_hat.is_none());
        assert!(OutageProfile::from_probabilities(vec![0.5]).is_err());
        assert!(OutageProfile::from_probabilities(vec![1.0, 0.2, 0.4]).is_err());
    }

    #[test]
    fn profile_from_counts() {
        // 10 trials: 5 stop at 1, 3 at 2, 2 outage
        let prof = OutageProfile::from_stop_counts(vec![5, 3, 2], 10);
        assert_eq!(prof.p_hat, vec![1.0, 0.5, 0.2]);
        assert_relative_eq!(prof.stderr[1], (0.25f64 / 10.0).sqrt());
        // blocks used: 1,1,1,1,1,2,2,2,2,2 -> mean 1.5, var 0.25
        let er = effective_rate(1.0, 2, &prof, None);
        assert_relative_eq!(er.r_bar, 2.0 / 1.5);
        assert_relative_eq!(er.r_bar_stderr.unwrap(), 2.0 / 2.25 * (0.25f64 / 10.0).sqrt());
    }

    #[test]
    fn zero_rate_never_outage() {
        let prof = estimate_outage_profile(&rl(2, 3, 3), &snr(10.0), 0.0, 2000, 1).unwrap();
        assert_eq!(prof.p_hat, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn siso_profile_matches_closed_form() {
        let cfg = rl(1, 1, 2);
        let eta = snr(10.0);
        let prof = estimate_outage_profile(&cfg, &eta, 1.0, 200_000, 42).unwrap();
        for l in 1..=2 {
            let want = siso_outage_closed_form(&eta, 2.0 / l as f64);
            let diff = (prof.p_hat[l] - want).abs();
            assert!(diff <= 3.0 * prof.stderr[l], "l={l}: {} vs {want}", prof.p_hat[l]);
        }
    }

    #[test]
    fn degenerate_single_block_is_conventional() {
        let cfg = rl(1, 1, 1);
        let etas: Vec<_> = [10.0, 20.0].iter().map(|d| SnrPoint::from_db(*d).unwrap()).collect();
        let recs = run_rateless_experiment(&cfg, 0.5, &etas, 100_000, 3).unwrap();
        for rec in &recs {
            let want = siso_outage_closed_form(&rec.eta, rec.rate);
            assert!((rec.profile.p_hat[1] - want).abs() <= 3.0 * rec.profile.stderr[1]);
            assert_relative_eq!(rec.effective.r_bar, rec.rate / 1.0);
        }
    }

    #[test]
    fn overloaded_rate_drives_outage_to_one() {
        let cfg = rl(1, 1, 2);
        let etas: Vec<_> = [10.0, 30.0, 50.0].iter().map(|d| SnrPoint::from_db(*d).unwrap()).collect();
        let recs = run_rateless_experiment(&cfg, 1.2, &etas, 20_000, 9).unwrap();
        let p2: Vec<f64> = recs.iter().map(|r| r.profile.p_hat[2]).collect();
        assert!(p2.windows(2).all(|w| w[1] >= w[0]), "{p2:?}");
        assert!(p2[2] > 0.95);
        // r_hat approaches r_n L / L once both blocks are always needed
        let last = recs[2].effective.r_hat.unwrap();
        assert!((last - 1.2).abs() < 0.05, "{last}");
    }

    #[test]
    fn experiment_validation() {
        let cfg = rl(1, 1, 2);
        let eta = [snr(10.0)];
        assert!(run_rateless_experiment(&cfg, 0.5, &[], 10, 0).is_err());
        assert!(run_rateless_experiment(&cfg, 0.5, &eta, 0, 0).is_err());
        assert!(run_rateless_experiment(&cfg, -0.5, &eta, 10, 0).is_err());
        assert!(estimate_outage_profile(&cfg, &eta[0], 1.0, 0, 0).is_err());
    }

    #[test]
    fn results_csv_layout() {
        let cfg = rl(1, 1, 2);
        let recs = run_rateless_experiment(&cfg, 0.25, &[SnrPoint::from_db(20.0).unwrap()], 100, 7).unwrap();
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &recs, 7).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "eta_db,l,p_hat,stderr,trials,r_bar,r_hat,seed");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("20,0,1,0,100,"));
        assert!(lines[3].ends_with(",7"));
    }
}
