use proptest::prelude::*;
use rateless_dmt::channel::{
    effective_rate, estimate_outage_profile, rateless_stop, run_rateless_experiment, OutageProfile, SnrPoint,
    StopOutcome,
};
use rateless_dmt::dmt::{AntennaConfig, RatelessConfig};

proptest! {
    #[test]
    fn stop_rule_depends_on_ratio_only(info in 0.0f64..20.0, rate in 0.01f64..10.0, scale in 0.01f64..100.0, l in 1u32..8) {
        // Scale by powers of two so the products stay exact.
        let k = scale.log2().round();
        let s = 2f64.powf(k);
        prop_assert_eq!(rateless_stop(info, rate, l), rateless_stop(info * s, rate * s, l));
    }

    #[test]
    fn stop_is_smallest_sufficient_block(info in 0.0f64..20.0, rate in 0.01f64..10.0, l in 1u32..8) {
        match rateless_stop(info, rate, l) {
            StopOutcome::Decoded(k) => {
                prop_assert!((1..=l).contains(&k));
                prop_assert!(k as f64 * info >= l as f64 * rate);
                prop_assert!(k == 1 || ((k - 1) as f64) * info < l as f64 * rate);
            }
            StopOutcome::Outage => prop_assert!((l as f64) * info < l as f64 * rate),
        }
    }

    #[test]
    fn effective_rate_between_r_and_lr(rate in 0.0f64..10.0, raw in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let mut p = vec![1.0];
        let mut sorted = raw.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        p.extend(sorted);
        let blocks = p.len() as u32;
        let er = effective_rate(rate, blocks, &OutageProfile::from_probabilities(p).unwrap(), None);
        let lr = rate * blocks as f64;
        prop_assert!(er.r_bar >= rate * (1.0 - 1e-12));
        prop_assert!(er.r_bar <= lr * (1.0 + 1e-12));
    }
}

#[test]
fn estimates_are_monotone_in_block_and_snr() {
    let cfg = RatelessConfig::new(AntennaConfig::new(2, 2).unwrap(), 3, 1).unwrap();
    let etas: Vec<SnrPoint> = [0.0, 5.0, 10.0, 15.0, 20.0].iter().map(|&d| SnrPoint::from_db(d).unwrap()).collect();
    // Fixed rate across SNR: coupled draws make p_hat monotone in SNR.
    let profiles: Vec<_> = etas.iter().map(|e| estimate_outage_profile(&cfg, e, 2.0, 20_000, 3).unwrap()).collect();
    for p in &profiles {
        assert_eq!(p.p_hat[0], 1.0);
        assert!(p.p_hat.windows(2).all(|w| w[1] <= w[0]));
    }
    for w in profiles.windows(2) {
        for l in 0..=3 {
            assert!(w[1].p_hat[l] <= w[0].p_hat[l]);
        }
    }
}

#[test]
fn zero_rate_never_waits() {
    let cfg = RatelessConfig::new(AntennaConfig::new(2, 3).unwrap(), 4, 7).unwrap();
    let p = estimate_outage_profile(&cfg, &SnrPoint::from_db(0.0).unwrap(), 0.0, 1000, 1).unwrap();
    assert_eq!(p.p_hat, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn block_length_does_not_change_results() {
    let etas = [SnrPoint::from_db(10.0).unwrap(), SnrPoint::from_db(20.0).unwrap()];
    let run = |t| {
        let cfg = RatelessConfig::new(AntennaConfig::new(2, 2).unwrap(), 2, t).unwrap();
        run_rateless_experiment(&cfg, 0.5, &etas, 5000, 9).unwrap()
    };
    assert_eq!(run(1), run(64));
}
