//! WebAssembly bindings for the demo page in `www/`.

use std::f64::consts::PI;

use heatkernel::coefficients::{a0_projector_case, vector_projector_symbol, PointJet};
use heatkernel::simplex::{self, IntegralSpec};
use heatkernel::torus::{compare_with_engine, ConstantCoefficients, TorusModel};
use heatkernel::{linalg, MatrixN};
use wasm_bindgen::prelude::*;

fn js(e: heatkernel::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `I_{d/2+p,k}(r₀, …, r_{k-1}, x)` along a grid of `x`.
pub fn integral_curve_values(
    d: u32,
    p: u32,
    fixed: &[f64],
    x_min: f64,
    x_max: f64,
    points: usize,
) -> heatkernel::Result<Vec<f64>> {
    let spec = IntegralSpec::new(d, p, fixed.len())?;
    let mut r = fixed.to_vec();
    r.push(0.0);
    grid(x_min, x_max, points)
        .into_iter()
        .map(|x| {
            *r.last_mut().expect("non-empty") = x;
            simplex::integral(spec, &r)
        })
        .collect()
}

#[wasm_bindgen]
pub fn integral_curve(
    d: u32,
    p: u32,
    fixed: Vec<f64>,
    x_min: f64,
    x_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    integral_curve_values(d, p, &fixed, x_min, x_max, points).map_err(js)
}

/// Flat-metric `a₀` for the vector projector symbol, and the closed law, at each `ζ`.
pub fn projector_a0_values(d: usize, zetas: &[f64]) -> heatkernel::Result<(Vec<f64>, Vec<f64>)> {
    let jet = PointJet::flat(d);
    let x = vector_projector_symbol(&jet);
    let mut engine = Vec::with_capacity(zetas.len());
    let mut law = Vec::with_capacity(zetas.len());
    for &z in zetas {
        engine.push(a0_projector_case(&jet, z, &x)?);
        law.push(jet.volume_factor() * (d as f64 + (1.0 + z).powf(-(d as f64) / 2.0) - 1.0));
    }
    Ok((engine, law))
}

/// Engine values followed by the closed law, `2·points` numbers in total.
#[wasm_bindgen]
pub fn projector_a0(d: usize, zeta_min: f64, zeta_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let (mut engine, law) = projector_a0_values(d, &grid(zeta_min, zeta_max, points)).map_err(js)?;
    engine.extend(law);
    Ok(engine)
}

/// Heat-trace fit on the flat 2-torus of side 2π with constant
/// `u = [[a, c], [c, b]]`, `v = 0` and `w = diag(w, -w)`.
#[wasm_bindgen]
pub struct TraceFit {
    ts: Vec<f64>,
    traces: Vec<f64>,
    pub fit_a0: f64,
    pub fit_a0_uncertainty: f64,
    pub fit_a1: f64,
    pub fit_a1_uncertainty: f64,
    pub engine_a0: f64,
    pub engine_a1: f64,
}

#[wasm_bindgen]
impl TraceFit {
    pub fn ts(&self) -> Vec<f64> {
        self.ts.clone()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.traces.clone()
    }
}

pub fn trace_fit_values(a: f64, b: f64, c: f64, w: f64) -> heatkernel::Result<TraceFit> {
    let u = linalg::from_real_rows(&[&[a, c], &[c, b]]);
    let w = linalg::from_real_rows(&[&[w, 0.0], &[0.0, -w]]);
    let model = TorusModel::constant(2, 2.0 * PI, 40, ConstantCoefficients { u, v: vec![MatrixN::zeros(2, 2); 2], w });
    let cmp = compare_with_engine(&model, None, 4, 8)?;
    let k = &cmp.fit.coefficients;
    Ok(TraceFit {
        ts: cmp.samples.iter().map(|s| s.t).collect(),
        traces: cmp.samples.iter().map(|s| s.trace).collect(),
        fit_a0: k[0].value,
        fit_a0_uncertainty: k[0].uncertainty,
        fit_a1: k[1].value,
        fit_a1_uncertainty: k[1].uncertainty,
        engine_a0: cmp.engine_a0,
        engine_a1: cmp.engine_a1,
    })
}

#[wasm_bindgen]
pub fn trace_fit(a: f64, b: f64, c: f64, w: f64) -> Result<TraceFit, JsError> {
    trace_fit_values(a, b, c, w).map_err(js)
}
