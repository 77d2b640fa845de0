//! Browser bindings for the static demo page in `www/`. Every export returns a
//! JSON string so the page needs no generated TypeScript types.

use qutrit_qrg::flow::{rg_trajectory, FlowStatus};
use qutrit_qrg::scan::scan_delta;
use qutrit_qrg::tensor::{assemble_psi0, random_product_tensor, random_tensor, TensorJson};
use qutrit_qrg::{invariants_full, Couplings, Tensor333};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    depth: usize,
    /// `null` where the flow went singular before this depth.
    abs_i6: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct ScanView {
    d: f64,
    grid: Vec<f64>,
    curves: Vec<Curve>,
    boundaries: Vec<qutrit_qrg::scan::Boundary>,
}

#[derive(Serialize)]
struct FlowPoint {
    step: usize,
    j: f64,
    delta: f64,
    d: f64,
    abs_i6: f64,
}

#[derive(Serialize)]
struct FlowView {
    steps: Vec<FlowPoint>,
    singular_cause: Option<String>,
}

#[derive(Serialize)]
struct InvariantView {
    i6: [f64; 2],
    i9: [f64; 2],
    i12: [f64; 2],
    j12: [f64; 2],
    delta333: [f64; 2],
    scale: f64,
    genuine: bool,
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `|I6|` against Δ at fixed D for each depth, plus detected boundaries.
#[wasm_bindgen]
pub fn scan(d: f64, delta_min: f64, delta_max: f64, points: usize, depths: Vec<u32>) -> Result<String, String> {
    let depths: Vec<usize> = depths.into_iter().map(|n| n as usize).collect();
    let s = scan_delta(d, delta_min, delta_max, points, &depths).map_err(err)?;
    let curves = (0..s.depths.len()).map(|k| Curve { depth: s.depths[k], abs_i6: s.curve(k) }).collect();
    Ok(to_json(&ScanView { d: s.d, grid: s.grid, curves, boundaries: s.boundaries }))
}

/// RG trajectory from (J = 1, Δ, D).
#[wasm_bindgen]
pub fn flow(delta: f64, d: f64, steps: usize) -> Result<String, String> {
    let c = Couplings::new(1.0, delta, d).map_err(err)?;
    let t = rg_trajectory(&c, steps);
    let points = t
        .steps
        .iter()
        .map(|s| FlowPoint {
            step: s.step,
            j: s.couplings.j,
            delta: s.couplings.delta,
            d: s.couplings.d,
            abs_i6: s.abs_i6(),
        })
        .collect();
    let singular_cause = match t.status {
        FlowStatus::Singular { cause, .. } => Some(cause),
        FlowStatus::Completed => None,
    };
    Ok(to_json(&FlowView { steps: points, singular_cause }))
}

/// Invariants of a tensor given as `{"re": [...27], "im": [...27]}`.
#[wasm_bindgen]
pub fn invariants(tensor_json: &str, zero_floor: f64) -> Result<String, String> {
    let t = Tensor333::from_json_str(tensor_json).map_err(err)?;
    let inv = invariants_full(&t).map_err(err)?;
    let f = inv.floored(zero_floor);
    let pair = |z: num_complex::Complex64| [z.re, z.im];
    Ok(to_json(&InvariantView {
        i6: pair(f.i6),
        i9: pair(f.i9),
        i12: pair(f.i12),
        j12: pair(f.j12),
        delta333: pair(f.delta333),
        scale: f.scale,
        genuine: inv.is_genuine(zero_floor),
    }))
}

/// Preset tensors for the page: `ghz`, `psi0`, `product` or `random`.
#[wasm_bindgen]
pub fn example_tensor(kind: &str, seed: u64) -> Result<String, String> {
    let t = match kind {
        "ghz" => Tensor333::nurmiev(1.0, 0.0, 0.0),
        "psi0" => assemble_psi0(1.0, 0.5).map_err(err)?,
        "product" => random_product_tensor(seed),
        "random" => random_tensor(seed),
        other => return Err(format!("unknown example `{other}`")),
    };
    let j: TensorJson = t.to_json();
    Ok(serde_json::to_string_pretty(&j).expect("plain data serializes"))
}
