use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rateless_dmt::dmt::{
    conventional_dmt, parallel_identical_dmt, parallel_iid_dmt, rateless_dmt_point, rateless_segment, tradeoff_f,
    AntennaConfig, RatelessConfig, Segment,
};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Reference f: linear interpolation between the integer knots, written
/// directly from the knot values.
fn f_ref(m: i64, n: i64, num: i64, den: i64) -> BigRational {
    let i = num / den;
    let frac = q(num - i * den, den);
    let knot = |k: i64| q((m - k) * (n - k), 1);
    if i >= m.min(n) {
        return q(0, 1);
    }
    knot(i) + (knot(i + 1) - knot(i)) * frac
}

fn cfg(m: u32, n: u32, l: u32) -> RatelessConfig {
    RatelessConfig::new(AntennaConfig::new(m, n).unwrap(), l, 1).unwrap()
}

proptest! {
    #[test]
    fn f_matches_knot_interpolation(m in 1u32..6, n in 1u32..6, den in 1i64..40, t in 0i64..200) {
        let mn = m.min(n) as i64;
        let num = t % (mn * den + 1);
        let a = AntennaConfig::new(m, n).unwrap();
        prop_assert_eq!(tradeoff_f(&a, &q(num, den)).unwrap(), f_ref(m as i64, n as i64, num, den));
        prop_assert_eq!(conventional_dmt(&a, &q(num, den)).unwrap(), f_ref(m as i64, n as i64, num, den));
    }

    #[test]
    fn f_is_decreasing_and_convex(m in 1u32..6, n in 1u32..6, den in 1i64..20) {
        let a = AntennaConfig::new(m, n).unwrap();
        let top = m.min(n) as i64 * den;
        let vals: Vec<BigRational> = (0..=top).map(|j| tradeoff_f(&a, &q(j, den)).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        for w in vals.windows(3) {
            // second difference of a convex function is nonnegative
            prop_assert!(&w[2] - &w[1] * q(2, 1) + &w[0] >= q(0, 1));
        }
    }

    #[test]
    fn rateless_diversity_is_f_of_rn(m in 1u32..5, n in 1u32..5, l in 1u32..6, num in 0i64..400, den in 1i64..50) {
        let c = cfg(m, n, l);
        let mn = m.min(n) as i64;
        let r_n = q(num, den);
        let pt = rateless_dmt_point(&c, &r_n).unwrap();
        match rateless_segment(&c, &r_n).unwrap() {
            Segment::Level(seg) => {
                prop_assert!(r_n < q(mn, 1));
                // (seg-1) m / L <= r_n < seg m / L
                prop_assert!(q((seg as i64 - 1) * mn, l as i64) <= r_n);
                prop_assert!(r_n < q(seg as i64 * mn, l as i64));
                prop_assert_eq!(&pt.r, &(&r_n * q(l as i64, seg as i64)));
                prop_assert_eq!(pt.d, f_ref(m as i64, n as i64, num, den));
            }
            Segment::Tail => {
                prop_assert!(r_n >= q(mn, 1));
                prop_assert_eq!(pt.d, q(0, 1));
                prop_assert_eq!(pt.r, q(mn, 1));
            }
        }
    }

    #[test]
    fn first_segment_equals_parallel_identical(m in 1u32..5, n in 1u32..5, l in 1u32..6, j in 0i64..100) {
        let c = cfg(m, n, l);
        let mn = m.min(n) as i64;
        // r_n inside the first segment [0, m/L)
        let r_n = q(j * mn, 100 * l as i64);
        let pt = rateless_dmt_point(&c, &r_n).unwrap();
        prop_assert_eq!(&pt.d, &parallel_identical_dmt(&c, &pt.r).unwrap());
    }

    #[test]
    fn iid_is_l_times_identical(m in 1u32..5, n in 1u32..5, l in 1u32..6, j in 0i64..=100) {
        let c = cfg(m, n, l);
        let r = q(j * m.min(n) as i64 * l as i64, 100);
        let a = parallel_identical_dmt(&c, &r).unwrap();
        prop_assert_eq!(parallel_iid_dmt(&c, &r).unwrap(), a * q(l as i64, 1));
    }

    #[test]
    fn rateless_never_below_conventional(m in 1u32..5, n in 1u32..5, l in 1u32..6, j in 0i64..100) {
        // At equal effective multiplexing gain r the rateless diversity
        // f(r_n) = f(r l / L) dominates f(r).
        let c = cfg(m, n, l);
        let mn = m.min(n) as i64;
        let r_n = q(j * mn, 100);
        let pt = rateless_dmt_point(&c, &r_n).unwrap();
        prop_assert!(pt.d >= conventional_dmt(&c.antennas, &pt.r).unwrap());
    }
}
