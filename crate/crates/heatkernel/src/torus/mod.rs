//! Brute-force heat traces of operators on flat tori.
//!
//! Operators have the form `P = -(u ∂_μ∂_μ + v^μ ∂_μ + w)` on the periodic box
//! `[0, L]^d`. Constant coefficients split into momentum blocks; varying
//! coefficients are treated by Galerkin truncation in the Fourier basis. The
//! small-`t` fit of `t^{d/2} Tr e^{-tP}` is then compared with the integrated
//! engine densities.

mod field;
mod fit;
mod spectrum;

pub use field::{FourierMode, MatrixField};
pub use fit::{fit_asymptotics, AsymptoticFit, Estimate};
pub use spectrum::{galerkin_spectrum, heat_trace_constant, heat_trace_varying, HeatTraceSample};

use crate::coefficients::{a0_local, a1_local_pipeline, OperatorCoefficients, PointJet};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, MatrixN};
use std::f64::consts::PI;

/// Largest Galerkin matrix (`(2K+1)^d N`) accepted for varying coefficients.
pub const MAX_GALERKIN_DIM: usize = 12000;
/// Largest single connected block handed to the dense eigensolver.
pub const MAX_BLOCK_DIM: usize = 3000;
/// Relative accuracy the default window asks of truncation and winding errors.
pub const WINDOW_ACCURACY: f64 = 1e-8;
/// Number of points in the default geometric window `[t₀, 8t₀]`.
pub const WINDOW_POINTS: usize = 12;

/// Constant `u`, skew-Hermitian `v^μ` and Hermitian `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCoefficients {
    pub u: MatrixN,
    pub v: Vec<MatrixN>,
    pub w: MatrixN,
}

/// Trigonometric-polynomial `u(x)` and `w(x)`. The first-order part is fixed by
/// selfadjointness, `P = -∂_μ (u ∂_μ) - w`, i.e. `v^μ = ∂_μ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct VaryingCoefficients {
    pub u: MatrixField,
    pub w: MatrixField,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusFields {
    Constant(ConstantCoefficients),
    Varying(VaryingCoefficients),
}

/// Flat periodic box with side `side` and Fourier modes `|n_i| ≤ cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusModel {
    pub d: usize,
    pub side: f64,
    pub cutoff: usize,
    pub fields: TorusFields,
}

/// Extreme values of the coefficients used by the error bounds.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Bounds {
    pub n: usize,
    pub u_min: f64,
    pub u_max: f64,
    /// `sqrt(Σ_μ ‖v^μ‖²)`.
    pub v_norm: f64,
    pub w_norm: f64,
}

impl TorusModel {
    pub fn constant(d: usize, side: f64, cutoff: usize, coeffs: ConstantCoefficients) -> Self {
        TorusModel { d, side, cutoff, fields: TorusFields::Constant(coeffs) }
    }

    pub fn varying(d: usize, side: f64, cutoff: usize, coeffs: VaryingCoefficients) -> Self {
        TorusModel { d, side, cutoff, fields: TorusFields::Varying(coeffs) }
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.d as i32)
    }

    /// Spacing `2π/L` of the momentum lattice.
    pub fn momentum_unit(&self) -> f64 {
        2.0 * PI / self.side
    }

    pub fn matrix_dim(&self) -> usize {
        match &self.fields {
            TorusFields::Constant(c) => c.u.nrows(),
            TorusFields::Varying(v) => v.u.dim(),
        }
    }

    /// Checks shapes, Hermiticity and ellipticity.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return invalid("torus dimension must be positive");
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::NonPositive(self.side));
        }
        if self.cutoff == 0 {
            return invalid("cutoff must be at least 1");
        }
        match &self.fields {
            TorusFields::Constant(c) => {
                let n = linalg::ensure_square(&c.u, "u")?;
                if c.v.len() != self.d {
                    return Err(Error::Shape(format!("v needs {} entries, got {}", self.d, c.v.len())));
                }
                for m in c.v.iter().chain(std::iter::once(&c.w)) {
                    if m.nrows() != n || m.ncols() != n {
                        return Err(Error::Shape(format!("coefficients must be {n}x{n}")));
                    }
                }
                linalg::ensure_hermitian(&c.u, 1e-10)?;
                linalg::ensure_hermitian(&c.w, 1e-10)?;
                for v in &c.v {
                    let dev = linalg::max_abs(&(v + v.adjoint()));
                    if dev > 1e-10 * (1.0 + linalg::max_abs(v)) {
                        return Err(Error::NotHermitian(dev));
                    }
                }
                let (ev, _) = linalg::hermitian_eigen(&c.u);
                if ev[0] <= 0.0 {
                    return Err(Error::NotPositive(ev[0]));
                }
            }
            TorusFields::Varying(v) => {
                if self.d != 2 {
                    return invalid("varying coefficients are supported on two-dimensional tori only");
                }
                v.u.validate(self.d)?;
                v.w.validate(self.d)?;
                if v.w.dim() != v.u.dim() {
                    return Err(Error::Shape("u and w fields differ in matrix size".into()));
                }
                let dim = (2 * self.cutoff + 1).pow(self.d as u32) * v.u.dim();
                if dim > MAX_GALERKIN_DIM {
                    return Err(Error::TooLarge(format!("Galerkin dimension {dim} exceeds {MAX_GALERKIN_DIM}")));
                }
                let min = self.bounds()?.u_min;
                if min <= 0.0 {
                    return Err(Error::NotPositive(min));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn bounds(&self) -> Result<Bounds> {
        match &self.fields {
            TorusFields::Constant(c) => {
                let (ev, _) = linalg::hermitian_eigen(&c.u);
                let op = |m: &MatrixN| m.clone().svd(false, false).singular_values.max();
                Ok(Bounds {
                    n: c.u.nrows(),
                    u_min: ev[0],
                    u_max: *ev.last().unwrap(),
                    v_norm: c.v.iter().map(|v| op(v).powi(2)).sum::<f64>().sqrt(),
                    w_norm: op(&c.w),
                })
            }
            TorusFields::Varying(v) => {
                let m = self.sample_grid(v);
                let (mut u_min, mut u_max, mut w_norm) = (f64::INFINITY, 0.0f64, 0.0f64);
                for x in grid_points(self.d, m, self.side) {
                    let (ev, _) = linalg::hermitian_eigen(&v.u.value(&x, self.side));
                    u_min = u_min.min(ev[0]);
                    u_max = u_max.max(*ev.last().unwrap());
                    let (ew, _) = linalg::hermitian_eigen(&v.w.value(&x, self.side));
                    w_norm = w_norm.max(ew[0].abs()).max(ew.last().unwrap().abs());
                }
                Ok(Bounds { n: v.u.dim(), u_min, u_max, v_norm: 0.0, w_norm })
            }
        }
    }

    /// Ellipticity sampling grid: at least 8 points per shortest wavelength.
    fn sample_grid(&self, v: &VaryingCoefficients) -> usize {
        let wave = v.u.max_wave().max(v.w.max_wave());
        (8 * wave).max(32)
    }

    /// Bound on the heat-trace contribution of the modes outside the cutoff box.
    ///
    /// Uses `λ(B(k)) ≥ 0.9 u_min |k|² - 2.5 |v|²/u_min - |w|`, which follows from
    /// `a|k|² - V|k| ≥ (1-ε) a|k|² - V²/(4εa)` with `ε = 0.1`.
    pub fn truncation_bound(&self, t: f64) -> Result<f64> {
        let b = self.bounds()?;
        Ok(self.tail_bound(&b, t))
    }

    pub(crate) fn tail_bound(&self, b: &Bounds, t: f64) -> f64 {
        let c = 0.9 * b.u_min * t * self.momentum_unit().powi(2);
        let shift = t * (2.5 * b.v_norm.powi(2) / b.u_min + b.w_norm);
        let (full, tail) = gaussian_sums(c, self.cutoff);
        b.n as f64 * shift.exp() * self.d as f64 * tail * full.powi(self.d as i32 - 1)
    }

    /// Relative size of the winding (image) terms neglected by the asymptotic expansion.
    pub fn winding_bound(&self, t: f64) -> Result<f64> {
        let b = self.bounds()?;
        Ok(2.0 * self.d as f64 * (-self.side.powi(2) / (4.0 * t * b.u_max)).exp())
    }

    /// Leading-order trace estimate `L^d N (4π t u_max)^{-d/2}`, a lower bound on `a₀ t^{-d/2}`.
    fn leading_lower_bound(&self, b: &Bounds, t: f64) -> f64 {
        self.volume() * b.n as f64 * (4.0 * PI * t * b.u_max).powf(-(self.d as f64) / 2.0)
    }

    /// Geometric window `[t₀, 8t₀]` where `t₀` is the smallest time whose
    /// truncation bound is below `WINDOW_ACCURACY` of the trace. Fails if the
    /// winding terms are not negligible at `8t₀`, i.e. the cutoff is too small.
    pub fn default_window(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let b = self.bounds()?;
        let ok = |t: f64| self.tail_bound(&b, t) <= WINDOW_ACCURACY * self.leading_lower_bound(&b, t);
        let mut hi = 1e-3 * self.side.powi(2);
        while !ok(hi) {
            hi *= 2.0;
            if hi > 1e6 * self.side.powi(2) {
                return invalid("no admissible time window for this cutoff");
            }
        }
        let mut lo = hi / 2.0;
        while ok(lo) && lo > 1e-12 {
            lo /= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let t0 = hi;
        let winding = self.winding_bound(8.0 * t0)?;
        if winding > WINDOW_ACCURACY {
            return invalid(format!(
                "cutoff {} too small for side {}: winding terms {winding:.2e} at t = {:.3e}",
                self.cutoff,
                self.side,
                8.0 * t0
            ));
        }
        Ok(geometric_grid(t0, 8.0 * t0, WINDOW_POINTS))
    }

    /// Heat traces at the requested times.
    pub fn heat_traces(&self, ts: &[f64]) -> Result<Vec<HeatTraceSample>> {
        match &self.fields {
            TorusFields::Constant(_) => heat_trace_constant(self, ts),
            TorusFields::Varying(_) => heat_trace_varying(self, ts),
        }
    }

    /// Engine prediction `(∫a₀, ∫a₁)` over the box. Varying fields are integrated
    /// with the trapezoidal rule on `grid` points per axis.
    pub fn engine_coefficients(&self, grid: usize) -> Result<(f64, f64)> {
        self.validate()?;
        let jet = PointJet::flat(self.d);
        match &self.fields {
            TorusFields::Constant(c) => {
                let co = OperatorCoefficients::constant(self.d, c.u.clone(), c.v.clone(), c.w.clone());
                let vol = self.volume();
                Ok((vol * a0_local(&jet, &c.u)?, vol * a1_local_pipeline(&jet, &co)?.re))
            }
            TorusFields::Varying(v) => {
                if grid == 0 {
                    return invalid("integration grid must be positive");
                }
                let (mut a0, mut a1) = (0.0, 0.0);
                for x in grid_points(self.d, grid, self.side) {
                    let co = v.coefficients_at(&x, self.side);
                    a0 += a0_local(&jet, &co.u)?;
                    a1 += a1_local_pipeline(&jet, &co)?.re;
                }
                let cell = (self.side / grid as f64).powi(self.d as i32);
                Ok((a0 * cell, a1 * cell))
            }
        }
    }
}

impl VaryingCoefficients {
    /// Pointwise `(u, v, w)` data with `v^μ = ∂_μ u`.
    pub fn coefficients_at(&self, x: &[f64], side: f64) -> OperatorCoefficients {
        let du = self.u.gradient(x, side);
        let ddu = self.u.hessian(x, side);
        OperatorCoefficients {
            u: self.u.value(x, side),
            v: du.clone(),
            dv: ddu.clone(),
            du,
            ddu,
            w: self.w.value(x, side),
        }
    }
}

/// `(Σ_{n∈ℤ} e^{-cn²}, 2 Σ_{n>K} e^{-cn²})`.
fn gaussian_sums(c: f64, cutoff: usize) -> (f64, f64) {
    let mut full = 1.0;
    let mut tail = 0.0;
    let mut n = 1usize;
    loop {
        let term = 2.0 * (-c * (n * n) as f64).exp();
        full += term;
        if n > cutoff {
            tail += term;
        }
        if term < 1e-18 * full && n > cutoff {
            break;
        }
        n += 1;
    }
    (full, tail)
}

/// `n` points `a, a q, …, b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let q = (b / a).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| a * q.powi(i as i32)).collect()
}

/// Uniform grid `x_i = i L / m` in each of `d` axes.
fn grid_points(d: usize, m: usize, side: f64) -> impl Iterator<Item = Vec<f64>> {
    let total = m.pow(d as u32);
    let h = side / m as f64;
    (0..total).map(move |mut idx| {
        (0..d)
            .map(|_| {
                let i = idx % m;
                idx /= m;
                i as f64 * h
            })
            .collect()
    })
}

/// Torus fit compared with the engine.
#[derive(Clone, Debug)]
pub struct TorusComparison {
    pub samples: Vec<HeatTraceSample>,
    pub fit: AsymptoticFit,
    pub engine_a0: f64,
    pub engine_a1: f64,
}

impl TorusComparison {
    pub fn a0_relative_error(&self) -> f64 {
        ((self.fit.coefficients[0].value - self.engine_a0) / self.engine_a0).abs()
    }

    pub fn a1_relative_error(&self) -> f64 {
        ((self.fit.coefficients[1].value - self.engine_a1) / self.engine_a1).abs()
    }
}

/// Computes traces on `window` (or the default window), fits to `order` and
/// evaluates the engine densities.
pub fn compare_with_engine(
    model: &TorusModel,
    window: Option<&[f64]>,
    order: usize,
    grid: usize,
) -> Result<TorusComparison> {
    let ts = match window {
        Some(w) => w.to_vec(),
        None => model.default_window()?,
    };
    let samples = model.heat_traces(&ts)?;
    let fit = fit_asymptotics(&samples, model.d, order)?;
    let (engine_a0, engine_a1) = model.engine_coefficients(grid)?;
    Ok(TorusComparison { samples, fit, engine_a0, engine_a1 })
}
