//! Exact diversity-multiplexing tradeoff curves.
//!
//! Everything here is evaluated in arbitrary-precision rational arithmetic so
//! that curve points can be compared for exact equality. The building block is
//! the MIMO tradeoff function `f(k)`, the piecewise linear interpolation of
//! `(k, (M-k)(N-k))` for integer `k = 0..min(M,N)`.
//!
//! A rateless code with `L` blocks aiming at per-level multiplexing gain
//! `r_n` decodes after `l` blocks in the typical high-SNR event, where `l` is
//! the index of the segment `[(l-1)m/L, l m/L)` (`m = min(M,N)`) containing
//! `r_n`. Its effective multiplexing gain is then `r = r_n L / l` while the
//! diversity stays at `f(r_n)`.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numfmt::{fmt12, format_rational, rational_to_f64};

pub type Rational = BigRational;

/// Default number of evenly spaced `r_n` values generated per segment.
pub const DEFAULT_POINTS_PER_SEGMENT: usize = 512;

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Transmit and receive antenna counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AntennaConfig {
    m: u32,
    n: u32,
}

impl AntennaConfig {
    pub fn new(tx: u32, rx: u32) -> Result<Self> {
        if tx == 0 || rx == 0 {
            return Err(Error::Range(format!("antenna counts must be positive, got M={tx}, N={rx}")));
        }
        Ok(Self { m: tx, n: rx })
    }

    pub fn siso() -> Self {
        Self { m: 1, n: 1 }
    }

    /// Number of transmit antennas `M`.
    pub fn tx(&self) -> u32 {
        self.m
    }

    /// Number of receive antennas `N`.
    pub fn rx(&self) -> u32 {
        self.n
    }

    /// `min(M, N)`, the maximal multiplexing gain of one block.
    pub fn min_dim(&self) -> u32 {
        self.m.min(self.n)
    }
}

/// System dimensions of a rateless transmission: antennas, blocks per
/// codeword `L` and channel uses per block `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatelessConfig {
    pub antennas: AntennaConfig,
    blocks: u32,
    block_len: u32,
}

impl RatelessConfig {
    pub fn new(antennas: AntennaConfig, blocks: u32, block_len: u32) -> Result<Self> {
        if blocks == 0 || block_len == 0 {
            return Err(Error::Range(format!("L and T must be positive, got L={blocks}, T={block_len}")));
        }
        Ok(Self { antennas, blocks, block_len })
    }

    /// Blocks per codeword `L`.
    pub fn blocks(&self) -> u32 {
        self.blocks
    }

    /// Channel uses per block `T`.
    pub fn block_len(&self) -> u32 {
        self.block_len
    }
}

/// A rate target: `R` bits per channel use together with the per-level
/// multiplexing gain `r_n` and the full-codeword gain `r_L = L r_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSpec {
    pub bits_per_use: f64,
    r_n: Rational,
    r_l: Rational,
}

impl RateSpec {
    /// `R = r_n log2(eta)` at linear SNR `eta`.
    pub fn at_snr(r_n: Rational, blocks: u32, eta_linear: f64) -> Result<Self> {
        if r_n.is_negative() {
            return Err(Error::Domain("r_n must be nonnegative".into()));
        }
        let r_l = &r_n * int(blocks as u64);
        Ok(Self { bits_per_use: rational_to_f64(&r_n) * eta_linear.log2(), r_n, r_l })
    }

    pub fn r_n(&self) -> &Rational {
        &self.r_n
    }

    pub fn r_l(&self) -> &Rational {
        &self.r_l
    }
}

/// A (multiplexing gain, diversity gain) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainPoint {
    pub r: Rational,
    pub d: Rational,
}

/// Which rateless decoding level a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    /// Typical decoding after block `l` (1-based).
    Level(u32),
    /// `r_n >= min(M,N)`: zero diversity.
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Rateless,
    Conventional,
    ParallelIdentical,
    ParallelIid,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Rateless => "rateless",
            Scheme::Conventional => "conventional",
            Scheme::ParallelIdentical => "parallel_identical",
            Scheme::ParallelIid => "parallel_iid",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One point of a curve, keyed by its generating parameter `r_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub r_n: Rational,
    /// Segment index; 0 for non-rateless curves, `L + 1` for the tail.
    pub segment: u32,
    pub gain: GainPoint,
    /// Set when the reported `r` was clamped to `min(M,N)` (tail points).
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmtCurve {
    pub scheme: Scheme,
    pub points: Vec<CurvePoint>,
}

impl DmtCurve {
    /// Maximal runs of points sharing a segment index, as `(segment, first r_n)`.
    pub fn segment_starts(&self) -> Vec<(u32, Rational)> {
        let mut out: Vec<(u32, Rational)> = Vec::new();
        for p in &self.points {
            if out.last().map(|(s, _)| *s != p.segment).unwrap_or(true) {
                out.push((p.segment, p.r_n.clone()));
            }
        }
        out
    }
}

/// The tradeoff function `f(k)`.
pub fn tradeoff_f(cfg: &AntennaConfig, k: &Rational) -> Result<Rational> {
    if k.is_negative() {
        return Err(Error::Domain(format!("f(k) needs k >= 0, got {}", format_rational(k))));
    }
    let m = cfg.min_dim() as u64;
    if *k >= int(m) {
        return Ok(Rational::zero());
    }
    let at = |i: u64| int((cfg.tx() as u64 - i) * (cfg.rx() as u64 - i));
    let floor = k.floor();
    let i: u64 = floor.to_integer().try_into().expect("k < min(M,N) fits in u64");
    let frac = k - &floor;
    let lo = at(i);
    let hi = at(i + 1);
    Ok(&lo + frac * (hi - &lo))
}

/// Diversity of a conventional scheme at multiplexing gain `r`.
pub fn conventional_dmt(cfg: &AntennaConfig, r: &Rational) -> Result<Rational> {
    let m = int(cfg.min_dim() as u64);
    if r.is_negative() || *r > m {
        return Err(Error::Range(format!(
            "conventional multiplexing gain must lie in [0, {}], got {}",
            cfg.min_dim(),
            format_rational(r)
        )));
    }
    tradeoff_f(cfg, r)
}

/// Locates `r_n` among the left-closed, right-open segments
/// `[(l-1) m / L, l m / L)`.
pub fn rateless_segment(cfg: &RatelessConfig, r_n: &Rational) -> Result<Segment> {
    if r_n.is_negative() {
        return Err(Error::Domain("r_n must be nonnegative".into()));
    }
    let m = int(cfg.antennas.min_dim() as u64);
    if *r_n >= m {
        return Ok(Segment::Tail);
    }
    // floor(r_n L / m) + 1 is the unique l with (l-1) m/L <= r_n < l m/L.
    let scaled = (r_n * int(cfg.blocks() as u64)) / m;
    let l: u32 = scaled.floor().to_integer().try_into().expect("segment index fits in u32");
    Ok(Segment::Level(l + 1))
}

/// Rateless DMT point for per-level gain `r_n`: `r = r_n L / l`,
/// `d = f(l r / L)`. Tail points report `r = min(M,N)`, `d = 0`.
pub fn rateless_dmt_point(cfg: &RatelessConfig, r_n: &Rational) -> Result<GainPoint> {
    Ok(rateless_curve_point(cfg, r_n)?.gain)
}

fn rateless_curve_point(cfg: &RatelessConfig, r_n: &Rational) -> Result<CurvePoint> {
    let blocks = int(cfg.blocks() as u64);
    match rateless_segment(cfg, r_n)? {
        Segment::Level(l) => {
            let r = r_n * &blocks / int(l as u64);
            let d = tradeoff_f(&cfg.antennas, &(&r * int(l as u64) / &blocks))?;
            Ok(CurvePoint { r_n: r_n.clone(), segment: l, gain: GainPoint { r, d }, clamped: false })
        }
        Segment::Tail => Ok(CurvePoint {
            r_n: r_n.clone(),
            segment: cfg.blocks() + 1,
            gain: GainPoint { r: int(cfg.antennas.min_dim() as u64), d: Rational::zero() },
            clamped: true,
        }),
    }
}

fn check_parallel_range(cfg: &RatelessConfig, r: &Rational) -> Result<()> {
    let max = int(cfg.blocks() as u64 * cfg.antennas.min_dim() as u64);
    if r.is_negative() || *r > max {
        return Err(Error::Range(format!(
            "parallel-channel multiplexing gain must lie in [0, {}], got {}",
            format_rational(&max),
            format_rational(r)
        )));
    }
    Ok(())
}

/// `d = f(r/L)`: L parallel subchannels sharing one channel matrix.
pub fn parallel_identical_dmt(cfg: &RatelessConfig, r: &Rational) -> Result<Rational> {
    check_parallel_range(cfg, r)?;
    tradeoff_f(&cfg.antennas, &(r / int(cfg.blocks() as u64)))
}

/// `d = L f(r/L)`: L parallel subchannels with i.i.d. channel matrices.
pub fn parallel_iid_dmt(cfg: &RatelessConfig, r: &Rational) -> Result<Rational> {
    Ok(parallel_identical_dmt(cfg, r)? * int(cfg.blocks() as u64))
}

fn check_grid(grid: &[Rational]) -> Result<()> {
    if let Some(neg) = grid.iter().find(|x| x.is_negative()) {
        return Err(Error::Domain(format!("grid value {} is negative", format_rational(neg))));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("r_n grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Rateless and conventional curves over the same `r_n` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmtComparison {
    pub rateless: DmtCurve,
    /// Only grid values within `[0, min(M,N)]` appear here.
    pub conventional: DmtCurve,
}

pub fn rateless_dmt_curve(cfg: &RatelessConfig, grid: &[Rational]) -> Result<DmtComparison> {
    check_grid(grid)?;
    let m = int(cfg.antennas.min_dim() as u64);
    let mut rateless = Vec::with_capacity(grid.len());
    let mut conventional = Vec::with_capacity(grid.len());
    for r_n in grid {
        rateless.push(rateless_curve_point(cfg, r_n)?);
        if *r_n <= m {
            conventional.push(CurvePoint {
                r_n: r_n.clone(),
                segment: 0,
                gain: GainPoint { r: r_n.clone(), d: conventional_dmt(&cfg.antennas, r_n)? },
                clamped: false,
            });
        }
    }
    Ok(DmtComparison {
        rateless: DmtCurve { scheme: Scheme::Rateless, points: rateless },
        conventional: DmtCurve { scheme: Scheme::Conventional, points: conventional },
    })
}

/// Both parallel-channel baselines evaluated at `r = L r_n` for each grid
/// value with `r_n <= min(M,N)`.
pub fn parallel_dmt_curves(cfg: &RatelessConfig, grid: &[Rational]) -> Result<(DmtCurve, DmtCurve)> {
    check_grid(grid)?;
    let m = int(cfg.antennas.min_dim() as u64);
    let blocks = int(cfg.blocks() as u64);
    let mut identical = Vec::new();
    let mut iid = Vec::new();
    for r_n in grid.iter().filter(|x| **x <= m) {
        let r = r_n * &blocks;
        let d = parallel_identical_dmt(cfg, &r)?;
        identical.push(CurvePoint {
            r_n: r_n.clone(),
            segment: 0,
            gain: GainPoint { r: r.clone(), d: d.clone() },
            clamped: false,
        });
        iid.push(CurvePoint { r_n: r_n.clone(), segment: 0, gain: GainPoint { r, d: d * &blocks }, clamped: false });
    }
    Ok((
        DmtCurve { scheme: Scheme::ParallelIdentical, points: identical },
        DmtCurve { scheme: Scheme::ParallelIid, points: iid },
    ))
}

/// `per_segment` evenly spaced `r_n` values on each segment
/// `[(l-1) m/L, l m/L)`, every segment start, and the tail start `m`.
pub fn default_grid(cfg: &RatelessConfig, per_segment: usize) -> Vec<Rational> {
    let per_segment = per_segment.max(1) as u64;
    let m = cfg.antennas.min_dim() as u64;
    let blocks = cfg.blocks() as u64;
    let denom = BigInt::from(blocks * per_segment);
    let mut grid = Vec::with_capacity((blocks * per_segment + 1) as usize);
    // r_n = m * j / (L * per_segment), j = 0..=L*per_segment
    for j in 0..=blocks * per_segment {
        grid.push(Rational::new(BigInt::from(m * j), denom.clone()));
    }
    grid
}

/// Writes curves as CSV with header `r_n,l,r,d,scheme`, optionally followed
/// by exact `p/q` columns. Lines starting with `#` before the header carry
/// metadata.
pub fn write_curves_csv<W: Write>(out: &mut W, curves: &[&DmtCurve], exact: bool) -> io::Result<()> {
    if exact {
        writeln!(out, "r_n,l,r,d,scheme,r_n_exact,r_exact,d_exact")?;
    } else {
        writeln!(out, "r_n,l,r,d,scheme")?;
    }
    for curve in curves {
        for p in &curve.points {
            write!(
                out,
                "{},{},{},{},{}",
                fmt12(rational_to_f64(&p.r_n)),
                p.segment,
                fmt12(rational_to_f64(&p.gain.r)),
                fmt12(rational_to_f64(&p.gain.d)),
                curve.scheme
            )?;
            if exact {
                write!(
                    out,
                    ",{},{},{}",
                    format_rational(&p.r_n),
                    format_rational(&p.gain.r),
                    format_rational(&p.gain.d)
                )?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
