//! Browser bindings for the demo page. Each operation returns a JSON string;
//! the `*_json` functions hold the logic and also run natively.

use rateless_dmt::channel::{
    effective_rate, run_rateless_experiment, siso_outage_closed_form, OutageProfile, SnrPoint,
};
use rateless_dmt::dmt::{
    default_grid, parallel_dmt_curves, rateless_dmt_curve, AntennaConfig, DmtCurve, RatelessConfig,
};
use rateless_dmt::numfmt::{format_rational, rational_to_f64};
use rateless_dmt::permutation::{run_paired_code_trials, search_permutation_code, PermutationCode, SearchOptions};
use rateless_dmt::slope::diversity_slope;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest trial count accepted from the page, to keep the tab responsive.
pub const MAX_TRIALS: u64 = 200_000;
pub const MAX_SNR_POINTS: usize = 41;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rateless_cfg(m: u32, n: u32, l: u32) -> Result<RatelessConfig, String> {
    RatelessConfig::new(AntennaConfig::new(m, n).map_err(err)?, l, 1).map_err(err)
}

fn check_trials(trials: u64) -> Result<(), String> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be in 1..={MAX_TRIALS}"));
    }
    Ok(())
}

fn snr_range(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<SnrPoint>, String> {
    if !(step_db > 0.0 && hi_db >= lo_db) {
        return Err("SNR range must satisfy lo <= hi and step > 0".into());
    }
    let count = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize + 1;
    if count > MAX_SNR_POINTS {
        return Err(format!("at most {MAX_SNR_POINTS} SNR points"));
    }
    (0..count).map(|i| SnrPoint::from_db(lo_db + i as f64 * step_db).map_err(err)).collect()
}

fn curve_points(c: &DmtCurve) -> Value {
    c.points.iter().map(|p| json!([rational_to_f64(&p.gain.r), rational_to_f64(&p.gain.d), p.segment])).collect()
}

/// Rateless, conventional and both parallel-channel curves as
/// `[r, d, segment]` triples, plus the rateless segment starts.
pub fn dmt_curves_json(m: u32, n: u32, l: u32, per_segment: u32) -> Result<String, String> {
    let cfg = rateless_cfg(m, n, l)?;
    if l > 64 || !(1..=1024).contains(&per_segment) {
        return Err("L must be at most 64 and points per segment in 1..=1024".into());
    }
    let grid = default_grid(&cfg, per_segment as usize);
    let cmp = rateless_dmt_curve(&cfg, &grid).map_err(err)?;
    let (identical, iid) = parallel_dmt_curves(&cfg, &grid).map_err(err)?;
    let starts: Vec<Value> = cmp
        .rateless
        .segment_starts()
        .into_iter()
        .map(|(s, r)| json!({"segment": s, "r_n": format_rational(&r), "tail": s == l + 1}))
        .collect();
    Ok(json!({
        "M": m, "N": n, "L": l,
        "segments": starts,
        "curves": {
            "rateless": curve_points(&cmp.rateless),
            "conventional": curve_points(&cmp.conventional),
            "parallel_identical": curve_points(&identical),
            "parallel_iid": curve_points(&iid),
        }
    })
    .to_string())
}

/// Monte Carlo stop probabilities and effective rate with `R = r_n log2 eta`
/// across an SNR range, with the closed form and slopes for SISO.
#[allow(clippy::too_many_arguments)]
pub fn outage_sweep_json(
    m: u32,
    n: u32,
    l: u32,
    r_n: f64,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
    trials: u64,
    seed: u64,
) -> Result<String, String> {
    let cfg = rateless_cfg(m, n, l)?;
    if l > 16 {
        return Err("L must be at most 16".into());
    }
    check_trials(trials)?;
    let etas = snr_range(lo_db, hi_db, step_db)?;
    let records = run_rateless_experiment(&cfg, r_n, &etas, trials, seed).map_err(err)?;
    let siso = m == 1 && n == 1;
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let closed = siso.then(|| {
                let p: Vec<f64> = (0..=l)
                    .map(|k| if k == 0 { 1.0 } else { siso_outage_closed_form(&r.eta, l as f64 * r.rate / k as f64) })
                    .collect();
                let er = OutageProfile::from_probabilities(p.clone())
                    .map(|prof| effective_rate(r.rate, l, &prof, Some(&r.eta)).r_hat);
                json!({"p": p, "r_hat": er.ok().flatten()})
            });
            json!({
                "eta_db": r.eta.db(),
                "rate": r.rate,
                "p_hat": r.profile.p_hat,
                "stderr": r.profile.stderr,
                "r_bar": r.effective.r_bar,
                "r_hat": r.effective.r_hat,
                "closed_form": closed,
            })
        })
        .collect();
    // Slope of -log2 p(l) for each l, from the estimates.
    let slopes: Vec<Value> = (1..=l as usize)
        .map(|k| {
            let pts: Vec<(SnrPoint, f64)> = records.iter().map(|r| (r.eta, r.profile.p_hat[k])).collect();
            diversity_slope(&pts).ok().map(|f| f.slope).into()
        })
        .collect();
    Ok(json!({"M": m, "N": n, "L": l, "r_n": r_n, "trials": trials, "seed": seed, "rows": rows, "slopes": slopes})
        .to_string())
}

/// Searches a permutation code and runs it, paired with the repetition
/// code, as a rateless code over SISO fading.
#[allow(clippy::too_many_arguments)]
pub fn permutation_code_json(
    blocks: u32,
    bits: u32,
    budget: u64,
    seed: u64,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
    trials: u64,
) -> Result<String, String> {
    if !(1..=4).contains(&blocks) || !(1..=6).contains(&bits) {
        return Err("the demo supports L in 1..=4 and bits in 1..=6".into());
    }
    if budget == 0 || budget > 200_000 {
        return Err("budget must be in 1..=200000".into());
    }
    check_trials(trials)?;
    let etas = snr_range(lo_db, hi_db, step_db)?;
    let opts = SearchOptions { budget, seed, ..SearchOptions::default() };
    let found = search_permutation_code(blocks as usize, bits, &opts).map_err(err)?;
    let code = &found.code;
    let repetition = PermutationCode::identity(code.constellation().clone(), code.blocks()).map_err(err)?;
    let paired = run_paired_code_trials(code, &repetition, &etas, trials, seed).map_err(err)?;
    let points: Vec<Value> = code.constellation().points().iter().map(|p| json!([p.re, p.im])).collect();
    let rows: Vec<Value> = paired
        .iter()
        .map(|p| {
            let d = &p.first.decomposition;
            json!({
                "eta_db": p.first.eta.db(),
                "joint_err": d.joint_err,
                "p_e": d.p_e,
                "p_e_repetition": p.second.decomposition.p_e,
                "diff_stderr": p.diff_stderr,
                "outage": d.outage,
                "cond_err_nonoutage": d.cond_err_nonoutage,
                "r_bar": p.first.effective.r_bar,
            })
        })
        .collect();
    Ok(json!({
        "L": blocks,
        "bits": bits,
        "exhaustive": found.exhaustive,
        "evaluations": found.evaluations,
        "points": points,
        "perms": code.perms(),
        "min_product_distance": found.evidence.min_product_distance,
        "min_product_distance_repetition": repetition.prefix_min_product_distances(),
        "rows": rows,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dmt_curves(m: u32, n: u32, l: u32, per_segment: u32) -> Result<String, JsError> {
    js(dmt_curves_json(m, n, l, per_segment))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn outage_sweep(
    m: u32,
    n: u32,
    l: u32,
    r_n: f64,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    js(outage_sweep_json(m, n, l, r_n, lo_db, hi_db, step_db, trials as u64, seed as u64))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn permutation_code(
    blocks: u32,
    bits: u32,
    budget: u32,
    seed: u32,
    lo_db: f64,
    hi_db: f64,
    step_db: f64,
    trials: u32,
) -> Result<String, JsError> {
    js(permutation_code_json(blocks, bits, budget as u64, seed as u64, lo_db, hi_db, step_db, trials as u64))
}
