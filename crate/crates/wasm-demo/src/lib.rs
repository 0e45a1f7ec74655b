//! Browser bindings. Each export takes plain numbers or strings and returns
//! a JSON string, so the page needs no glue beyond `JSON.parse`.

use diamond_gap::channels::{compose_theta, id_minus, named_channel, ChannelFamily, ChannelSpec};
use diamond_gap::diamond::{diamond_norm_sdp, pointwise_lr};
use diamond_gap::linalg::{BipartiteOperator, ONE, ZERO};
use diamond_gap::verify::{lemma_suite, ALPHA};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_D: usize = 4;

fn check_d(d: usize) -> Result<(), String> {
    if (2..=MAX_D).contains(&d) {
        Ok(())
    } else {
        Err(format!("d must be between 2 and {MAX_D}"))
    }
}

/// `L` and `R` for depolarizing noise of strength `p` at the maximally
/// entangled input.
pub fn depolarizing_pointwise_json(p: f64, d: usize) -> Result<String, String> {
    check_d(d)?;
    let t = named_channel(&ChannelFamily::Depolarizing(p), d).map_err(|e| e.to_string())?;
    let mut psi = vec![ZERO; d * d];
    for i in 0..d {
        psi[i * d + i] = ONE / (d as f64).sqrt();
    }
    let rho = BipartiteOperator::pure(d, d, &psi).map_err(|e| e.to_string())?;
    let lr = pointwise_lr(&t, &rho).map_err(|e| e.to_string())?;
    Ok(json!({ "L": lr.l, "R": lr.r, "bound": lr.bound }).to_string())
}

/// Certified `L = ‖Θ∘(id-T)‖◇` and `R = ‖id-T‖◇` for a channel spec such as
/// `dephasing:p=0.3` or `random:env=4,seed=7`.
pub fn channel_norms_json(spec: &str, d: usize) -> Result<String, String> {
    check_d(d)?;
    let spec: ChannelSpec = spec.parse().map_err(|e: diamond_gap::Error| e.to_string())?;
    if matches!(spec, ChannelSpec::File(_)) {
        return Err("files are not available in the browser".into());
    }
    let t = spec.build(d).map_err(|e| e.to_string())?;
    let phi = id_minus(&t);
    let r = diamond_norm_sdp(&phi).map_err(|e| e.to_string())?;
    let l = diamond_norm_sdp(&compose_theta(&phi)).map_err(|e| e.to_string())?;
    let ratio = if r.value > 0.0 {
        l.value / (d as f64 * r.value)
    } else {
        0.0
    };
    Ok(json!({
        "L": l.value,
        "R": r.value,
        "bound": d as f64 * ALPHA * r.value,
        "ratio": ratio,
        "alpha": ALPHA,
        "gap_L": l.gap,
        "gap_R": r.gap,
    })
    .to_string())
}

/// Randomized check of the lemma chain.
pub fn lemma_chain_json(seed: u64, trials: usize) -> Result<String, String> {
    let report = lemma_suite(seed, trials.clamp(1, 2000)).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn depolarizing_pointwise(p: f64, d: usize) -> Result<String, JsError> {
    depolarizing_pointwise_json(p, d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn channel_norms(spec: &str, d: usize) -> Result<String, JsError> {
    channel_norms_json(spec, d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lemma_chain(seed: u64, trials: usize) -> Result<String, JsError> {
    lemma_chain_json(seed, trials).map_err(|e| JsError::new(&e))
}
