//! Maximum-likelihood decoding of a received codeword prefix.

use num_complex::Complex64;

use super::code::PermutationCode;
use crate::channel::SnrPoint;

/// Observations of the first `l` blocks of a SISO codeword,
/// `y_k = sqrt(eta) h x_k + n_k` with unit-variance noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedPrefix {
    pub y: Vec<Complex64>,
    pub h: Complex64,
    pub eta: SnrPoint,
}

impl ReceivedPrefix {
    /// Passes the first `noise.len()` blocks of `message` through the channel.
    pub fn transmit(code: &PermutationCode, message: usize, h: Complex64, eta: SnrPoint, noise: &[Complex64]) -> Self {
        let gain = h * eta.linear().sqrt();
        let y = noise.iter().enumerate().map(|(k, n)| gain * code.symbol(k, message) + n).collect();
        Self { y, h, eta }
    }

    /// Prefix length `l`.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub message: usize,
    /// The channel gain is zero, so every hypothesis is equally likely.
    pub degenerate: bool,
}

/// `argmin_m sum_{k<l} |y_k - sqrt(eta) h x_k(m)|^2`, ties to the smallest
/// message index.
///
/// # Panics
///
/// If the prefix is empty or longer than the code.
pub fn ml_decode_prefix(code: &PermutationCode, rx: &ReceivedPrefix) -> Decoded {
    let l = rx.len();
    assert!(l >= 1 && l <= code.blocks(), "prefix length {l} outside 1..={}", code.blocks());
    let gain = rx.h * rx.eta.linear().sqrt();
    let mut best = f64::INFINITY;
    let mut message = 0;
    for m in 0..code.messages() {
        let mut metric = 0.0;
        for (k, y) in rx.y.iter().enumerate() {
            metric += (y - gain * code.symbol(k, m)).norm_sqr();
            if metric >= best {
                break;
            }
        }
        if metric < best {
            best = metric;
            message = m;
        }
    }
    Decoded { message, degenerate: gain.norm_sqr() == 0.0 }
}
