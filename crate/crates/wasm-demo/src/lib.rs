//! Browser demo: three interactive views over the solver, exported through
//! wasm-bindgen as functions returning JSON strings.

pub mod demo;

use wasm_bindgen::prelude::*;

fn to_json<T: serde::Serialize>(r: sketchpne::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

fn choice(name: &str) -> Result<sketchpne::PrecisionChoice, JsError> {
    name.parse()
        .map_err(|e: sketchpne::Error| JsError::new(&e.to_string()))
}

/// Residual sweep: QR, PNE and HPNE errors with their bounds.
#[wasm_bindgen]
pub fn residual_sweep(
    m: usize,
    n: usize,
    kappa: f64,
    precision: &str,
    points: usize,
    seed: u32,
) -> Result<String, JsError> {
    to_json(demo::residual_sweep(
        m,
        n,
        kappa,
        choice(precision)?,
        points,
        seed.into(),
    ))
}

/// `κ(A_p)` per precision over several sketches, and the automatic choice.
#[wasm_bindgen]
pub fn preconditioner_quality(
    m: usize,
    n: usize,
    kappa: f64,
    d_factor: f64,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    to_json(demo::preconditioner_quality(
        m,
        n,
        kappa,
        d_factor,
        trials,
        seed.into(),
    ))
}

/// Closed-form bound curves for given condition numbers and precisions.
#[wasm_bindgen]
pub fn bound_curves(
    kappa_a: f64,
    kappa_rs: f64,
    kappa_ap: f64,
    u1: f64,
    u2: f64,
    points: usize,
) -> Result<String, JsError> {
    to_json(demo::bound_curves(
        kappa_a, kappa_rs, kappa_ap, u1, u2, points,
    ))
}
