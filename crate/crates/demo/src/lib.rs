//! WebAssembly bindings behind `www/index.html`.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<String, String>`, so the logic also runs and tests natively.

use dpsec_core::arith::parse_rational;
use dpsec_core::manin::{self, CountingModel};
use dpsec_core::profile::{self, FibrationProfile};
use dpsec_core::report;
use dpsec_core::ruled;
use dpsec_core::thresholds::threshold_report;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_DEMO_DMAX: i64 = 200;
const MAX_DEMO_DEPTH: usize = 16;

pub fn shipped_profile_json(name: &str) -> Result<String, String> {
    let p = profile::shipped(name).map_err(|e| e.to_string())?;
    report::to_json(&p).map_err(|e| e.to_string())
}

pub fn thresholds_json(profile_json: &str) -> Result<String, String> {
    let p = FibrationProfile::from_json(profile_json).map_err(|e| e.to_string())?;
    report::to_json(&threshold_report(&p)).map_err(|e| e.to_string())
}

pub fn convergence_json(profile_json: &str, q: &str, d_max: i64) -> Result<String, String> {
    if d_max > MAX_DEMO_DMAX {
        return Err(format!("d_max is limited to {MAX_DEMO_DMAX} in the demo"));
    }
    let p = FibrationProfile::from_json(profile_json).map_err(|e| e.to_string())?;
    let q = parse_rational(q).ok_or_else(|| format!("{q:?} is not a rational number"))?;
    let m = CountingModel::from_rank_one_profile(p, q).map_err(|e| e.to_string())?;
    let r = manin::convergence_report(&m, d_max).map_err(|e| e.to_string())?;
    report::to_json(&r).map_err(|e| e.to_string())
}

pub fn random_fiber_json(seed: u64, depth: usize) -> Result<String, String> {
    if depth > MAX_DEMO_DEPTH {
        return Err(format!("depth is limited to {MAX_DEMO_DEPTH} in the demo"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (tree, sequence) = ruled::random_fiber(&mut rng, depth);
    let second = match ruled::verify_second_minus_one(&tree) {
        Ok(i) => json!(i),
        Err(_) => json!(null),
    };
    let contraction = match ruled::contract_keeping_section(&tree) {
        Ok((steps, _)) => json!(steps),
        Err(e) => json!(e.to_string()),
    };
    let v = json!({
        "tree": tree,
        "sequence": sequence,
        "second_minus_one": second,
        "contraction": contraction,
    });
    report::to_json(&v).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn shipped_profile(name: &str) -> Result<String, JsError> {
    shipped_profile_json(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn thresholds(profile_json: &str) -> Result<String, JsError> {
    thresholds_json(profile_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convergence(profile_json: &str, q: &str, d_max: i32) -> Result<String, JsError> {
    convergence_json(profile_json, q, d_max as i64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn random_fiber(seed: u32, depth: u32) -> Result<String, JsError> {
    random_fiber_json(seed as u64, depth as usize).map_err(|e| JsError::new(&e))
}
