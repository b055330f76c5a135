use rateless_dmt_wasm::{dmt_curves_json, outage_sweep_json, permutation_code_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn curves_for_the_two_by_two_case() {
    let v = parse(dmt_curves_json(2, 2, 2, 4));
    let rateless = v["curves"]["rateless"].as_array().unwrap();
    // r_n = 0.5 is the third grid point: r = 1, d = 2.5 on segment 1.
    assert_eq!(rateless[2], serde_json::json!([1.0, 2.5, 1]));
    let segs: Vec<&str> = v["segments"].as_array().unwrap().iter().map(|s| s["r_n"].as_str().unwrap()).collect();
    assert_eq!(segs, ["0", "1", "2"]);
    assert_eq!(v["segments"][2]["tail"], true);
    assert_eq!(v["curves"]["conventional"].as_array().unwrap().last().unwrap(), &serde_json::json!([2.0, 0.0, 0]));
}

#[test]
fn curve_inputs_are_validated() {
    assert!(dmt_curves_json(0, 2, 2, 4).is_err());
    assert!(dmt_curves_json(2, 2, 0, 4).is_err());
    assert!(dmt_curves_json(2, 2, 2, 0).is_err());
}

#[test]
fn siso_sweep_carries_closed_form() {
    let v = parse(outage_sweep_json(1, 1, 2, 0.25, 10.0, 30.0, 10.0, 20_000, 7));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let p_hat = r["p_hat"].as_array().unwrap();
        let se = r["stderr"].as_array().unwrap();
        let closed = r["closed_form"]["p"].as_array().unwrap();
        for l in 1..=2 {
            let (p, s, c) = (p_hat[l].as_f64().unwrap(), se[l].as_f64().unwrap(), closed[l].as_f64().unwrap());
            assert!((p - c).abs() <= 4.0 * s.max(1e-4), "{p} {c} {s}");
        }
    }
    assert_eq!(v["slopes"].as_array().unwrap().len(), 2);
    // same inputs, same output
    assert_eq!(
        outage_sweep_json(1, 1, 2, 0.25, 10.0, 30.0, 10.0, 20_000, 7),
        outage_sweep_json(1, 1, 2, 0.25, 10.0, 30.0, 10.0, 20_000, 7)
    );
    let mimo = parse(outage_sweep_json(2, 2, 2, 0.5, 0.0, 10.0, 5.0, 1000, 1));
    assert!(mimo["rows"][0]["closed_form"].is_null());
}

#[test]
fn sweep_limits() {
    assert!(outage_sweep_json(1, 1, 2, 0.25, 10.0, 30.0, 10.0, 0, 7).is_err());
    assert!(outage_sweep_json(1, 1, 2, 0.25, 10.0, 30.0, 0.0, 10, 7).is_err());
    assert!(outage_sweep_json(1, 1, 2, 0.25, 0.0, 100.0, 0.5, 10, 7).is_err());
}

#[test]
fn permutation_code_report() {
    let v = parse(permutation_code_json(2, 2, 1000, 1, 20.0, 30.0, 10.0, 5000));
    assert_eq!(v["exhaustive"], true);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["perms"].as_array().unwrap().len(), 2);
    let pd = v["min_product_distance"].as_array().unwrap();
    assert!(pd[1].as_f64().unwrap() > 0.0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["joint_err"].as_array().unwrap().len(), 2);
    assert!(permutation_code_json(2, 9, 1000, 1, 20.0, 30.0, 10.0, 10).is_err());
}
