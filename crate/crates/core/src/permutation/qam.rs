//! Unit-energy QAM alphabets.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_BITS: u32 = 8;

/// A finite alphabet of `2^bits` distinct complex points with unit mean energy.
#[derive(Debug, Clone)]
pub struct Constellation {
    points: Vec<Complex64>,
    bits: u32,
    /// Integer grid coordinates the points were scaled from, when known.
    lattice: Option<Vec<(i32, i32)>>,
}

impl Constellation {
    /// Validates an arbitrary point set.
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        let k = points.len();
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::InvalidConstellation(format!("need a power-of-two number of points >= 2, got {k}")));
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidConstellation("non-finite point".into()));
        }
        for i in 0..k {
            for j in i + 1..k {
                if points[i] == points[j] {
                    return Err(Error::InvalidConstellation(format!("points {i} and {j} coincide")));
                }
            }
        }
        let energy = points.iter().map(|z| z.norm_sqr()).sum::<f64>() / k as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConstellation(format!("mean energy must be 1, got {energy}")));
        }
        Ok(Self { points, bits: k.trailing_zeros(), lattice: None })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lattice(&self) -> Option<&[(i32, i32)]> {
        self.lattice.as_deref()
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }
}

impl PartialEq for Constellation {
    /// Two alphabets are equal when their points are; the grid is provenance.
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

fn odd_grid(cols: usize, rows: usize) -> impl Iterator<Item = (i32, i32)> {
    (0..rows)
        .flat_map(move |r| (0..cols).map(move |c| (2 * c as i32 - (cols as i32 - 1), 2 * r as i32 - (rows as i32 - 1))))
}

/// Square QAM for even `bits`, a 4x2 rectangle for 3 bits, the usual cross
/// shapes for 5 and 7 bits, BPSK for 1 bit. Points are listed row by row
/// (increasing imaginary part, then real part) and scaled to unit energy.
pub fn build_qam(bits: u32) -> Result<Constellation> {
    if !(1..=MAX_BITS).contains(&bits) {
        return Err(Error::Range(format!("QAM bits must lie in 1..={MAX_BITS}, got {bits}")));
    }
    let lattice: Vec<(i32, i32)> = match bits {
        1 => vec![(-1, 0), (1, 0)],
        3 => odd_grid(4, 2).collect(),
        b if b % 2 == 0 => {
            let side = 1usize << (b / 2);
            odd_grid(side, side).collect()
        }
        b => {
            // (3 * 2^((b-3)/2))^2 grid minus four square corners of side 2^((b-5)/2)
            let side = 3usize << ((b - 3) / 2);
            let corner = 1usize << ((b - 5) / 2);
            let edge = |i: usize| i < corner || i >= side - corner;
            (0..side)
                .flat_map(|r| (0..side).map(move |c| (c, r)))
                .filter(|&(c, r)| !(edge(c) && edge(r)))
                .map(|(c, r)| (2 * c as i32 - (side as i32 - 1), 2 * r as i32 - (side as i32 - 1)))
                .collect()
        }
    };
    debug_assert_eq!(lattice.len(), 1 << bits);
    let energy = lattice.iter().map(|&(x, y)| (x * x + y * y) as f64).sum::<f64>() / lattice.len() as f64;
    let scale = energy.sqrt().recip();
    let points = lattice.iter().map(|&(x, y)| Complex64::new(x as f64 * scale, y as f64 * scale)).collect();
    let mut c = Constellation::new(points)?;
    c.lattice = Some(lattice);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_qam() {
        let c = build_qam(2).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c.len(), 4);
        for z in c.points() {
            assert!((z.re.abs() - a).abs() < 1e-15 && (z.im.abs() - a).abs() < 1e-15);
        }
    }

    #[test]
    fn bpsk() {
        let c = build_qam(1).unwrap();
        assert_eq!(c.points(), &[Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn every_size_is_normalized_and_distinct() {
        for bits in 1..=MAX_BITS {
            let c = build_qam(bits).unwrap();
            assert_eq!(c.len(), 1 << bits);
            assert_eq!(c.bits(), bits);
            assert!((c.mean_energy() - 1.0).abs() < 1e-12, "bits={bits}");
            assert!(c.min_distance() > 0.0);
        }
    }

    #[test]
    fn cross_shapes_are_symmetric() {
        for bits in [5, 7] {
            let c = build_qam(bits).unwrap();
            let lat = c.lattice().unwrap();
            for &(x, y) in lat {
                assert!(lat.contains(&(-x, y)) && lat.contains(&(y, x)));
            }
        }
    }

    #[test]
    fn rejects_bad_alphabets() {
        assert!(matches!(build_qam(0), Err(Error::Range(_))));
        assert!(matches!(build_qam(9), Err(Error::Range(_))));
        let one = vec![Complex64::new(1.0, 0.0)];
        assert!(matches!(Constellation::new(one), Err(Error::InvalidConstellation(_))));
        let dup = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(Constellation::new(dup).is_err());
        let weak = vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)];
        assert!(Constellation::new(weak).is_err());
        let three = vec![Complex64::new(1.0, 0.0); 3];
        assert!(Constellation::new(three).is_err());
    }
}
