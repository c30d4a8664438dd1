//! Browser bindings. Each exported function has a plain Rust twin returning
//! `toboggan::error::Result` so it can be tested off the browser.

use serde_json::json;
use toboggan::error::Result;
use toboggan::potential::PowerLawPotential;
use toboggan::riemann_path::{make_straight, make_toboggan, Contour, Edge};
use toboggan::scattering::{analytic_amplitudes, ScatterProblem};
use toboggan::spectrum::{find_eigenvalues, oracle_levels, EigenProblem};
use wasm_bindgen::prelude::*;

const R_MAX: f64 = 8.0;

fn contour(winding: u32, eps: f64) -> Result<Contour> {
    if winding == 0 {
        make_straight(eps, R_MAX, 257)
    } else {
        make_toboggan(winding, eps, R_MAX, 256)
    }
}

/// Flattened `[re0, im0, re1, im1, ...]` of the sampled contour.
pub fn contour_xy(winding: u32, eps: f64) -> Result<Vec<f64>> {
    Ok(contour(winding, eps)?
        .samples
        .iter()
        .flat_map(|s| {
            let z = s.point.embedded();
            [z.re, z.im]
        })
        .collect())
}

/// Shooting eigenvalues in `[lo, hi]` next to the closed-form levels.
pub fn spectrum_json(alpha: f64, winding: u32, eps: f64, lo: f64, hi: f64) -> Result<String> {
    let prob = EigenProblem::new(PowerLawPotential::from_alpha(alpha), contour(winding, eps)?, (lo, hi));
    let found = find_eigenvalues(&prob)?;
    Ok(json!({
        "levels": found.iter().map(|r| json!({
            "re": r.energy.re,
            "im": r.energy.im,
            "residual": r.residual,
            "converged": r.converged,
        })).collect::<Vec<_>>(),
        "exact": oracle_levels(alpha, lo, hi).iter().map(|(e, _)| *e).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Closed-form backward and forward amplitudes.
pub fn scatter_json(alpha: f64, energy: f64, winding: u32, upper: bool) -> Result<String> {
    let branch = if upper { Edge::UpperEdge } else { Edge::LowerEdge };
    let r = analytic_amplitudes(&ScatterProblem::new(alpha, energy, winding, branch))?;
    Ok(json!({
        "backward": [r.backward.re, r.backward.im],
        "forward": [r.forward.re, r.forward.im],
        "resonance": r.resonance,
        "resonance_proximity": r.resonance_proximity,
    })
    .to_string())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn contour_points(winding: u32, eps: f64) -> std::result::Result<Vec<f64>, JsError> {
    js(contour_xy(winding, eps))
}

#[wasm_bindgen]
pub fn spectrum(alpha: f64, winding: u32, eps: f64, lo: f64, hi: f64) -> std::result::Result<String, JsError> {
    js(spectrum_json(alpha, winding, eps, lo, hi))
}

#[wasm_bindgen]
pub fn scatter(alpha: f64, energy: f64, winding: u32, upper: bool) -> std::result::Result<String, JsError> {
    js(scatter_json(alpha, energy, winding, upper))
}
