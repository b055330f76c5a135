//! Diversity-order estimation from error probabilities measured at several
//! SNRs: the slope of `-log2 P` against `log2 eta`.

use crate::channel::SnrPoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// Ordinary least-squares slope over all usable points.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit, in `log2` units.
    pub residual: f64,
    /// Secant slope through the two highest-SNR usable points.
    pub secant: f64,
    /// Indices of input points skipped because their probability was 0 or 1.
    pub excluded: Vec<usize>,
}

/// Fits `-log2 p` against `log2 eta`. Probabilities of exactly 0 or 1 carry no
/// exponent information and are reported in [`SlopeFit::excluded`].
pub fn diversity_slope(points: &[(SnrPoint, f64)]) -> Result<SlopeFit> {
    let mut excluded = Vec::new();
    let mut logs = Vec::with_capacity(points.len());
    for (i, (eta, p)) in points.iter().enumerate() {
        if *p > 0.0 && *p < 1.0 {
            logs.push((*eta, p.log2()));
        } else {
            excluded.push(i);
        }
    }
    let mut fit = diversity_slope_log2(&logs)?;
    fit.excluded = excluded;
    Ok(fit)
}

/// Same fit, with the probabilities already given as `log2 p`.
pub fn diversity_slope_log2(points: &[(SnrPoint, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::Usage(format!("slope needs at least 2 usable points, got {}", points.len())));
    }
    if points.iter().any(|(_, lp)| !lp.is_finite()) {
        return Err(Error::Numeric("log-probability must be finite".into()));
    }
    let mut xy: Vec<(f64, f64)> = points.iter().map(|(e, lp)| (e.log2(), -lp)).collect();
    xy.sort_by(|a, b| a.0.total_cmp(&b.0));
    if xy.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Usage("SNR values must be distinct".into()));
    }

    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let (a, b) = (xy[xy.len() - 2], xy[xy.len() - 1]);
    let secant = (b.1 - a.1) / (b.0 - a.0);
    Ok(SlopeFit { slope, intercept, residual, secant, excluded: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::siso_outage_closed_form;

    fn snr(x: f64) -> SnrPoint {
        SnrPoint::from_linear(x).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [1e2, 1e3, 1e4].iter().map(|&e| (snr(e), e.powi(-2))).collect();
        let fit = diversity_slope(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!((fit.secant - 2.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_probability_has_zero_slope() {
        let pts: Vec<_> = [10.0, 100.0, 1000.0].iter().map(|&e| (snr(e), 0.3)).collect();
        assert!(diversity_slope(&pts).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn siso_quarter_rate_slope() {
        // R = 0.25 log2(eta): p = 1 - exp(-(eta^0.25 - 1)/eta) ~ eta^-0.75
        let pts: Vec<_> = (0..=16)
            .map(|i| {
                let eta = snr(10f64.powf(4.0 + i as f64 * 0.25));
                (eta, siso_outage_closed_form(&eta, 0.25 * eta.log2()))
            })
            .collect();
        let fit = diversity_slope(&pts).unwrap();
        assert!((0.70..=0.78).contains(&fit.slope), "slope {}", fit.slope);
        assert!(fit.secant > fit.slope && fit.secant < 0.75);
    }

    #[test]
    fn degenerate_inputs() {
        let pts = vec![(snr(10.0), 0.0), (snr(100.0), 0.1), (snr(1000.0), 1.0), (snr(1e4), 0.01)];
        let fit = diversity_slope(&pts).unwrap();
        assert_eq!(fit.excluded, vec![0, 2]);
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(diversity_slope(&[(snr(10.0), 0.1)]).is_err());
        assert!(diversity_slope(&[(snr(10.0), 0.1), (snr(10.0), 0.2)]).is_err());
        assert!(diversity_slope(&[(snr(10.0), 0.0), (snr(100.0), 1.0)]).is_err());
    }
}
