//! Simplex integrals
//!
//! ```text
//! I_{α,k}(r₀,…,r_k) = ∫_{Δ_k} [(1-s₁) r₀ + (s₁-s₂) r₁ + … + s_k r_k]^{-α} ds
//! ```
//!
//! over the standard simplex `1 ≥ s₁ ≥ … ≥ s_k ≥ 0`, with `α = d/2 + p`.

mod divdiff;
mod quadrature;
pub mod vandermonde;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use divdiff::{lagrange_sum, Antiderivative};

/// Default Gauss–Legendre order per panel for [`integral_quadrature`].
pub const DEFAULT_QUADRATURE_ORDER: usize = 24;

/// Largest simplex dimension accepted by the public entry points.
pub const MAX_K: usize = 16;

/// Integral selector `(d, p, k)` with `α = d/2 + p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub d: u32,
    pub p: u32,
    pub k: usize,
}

/// Which closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralCase {
    /// `d` even and `α ≤ k`: logarithmic Lagrange sums.
    EvenLog,
    /// `d` even and `α > k`: nested polynomial sum.
    EvenPolynomial,
    /// `d` odd: partial fractions in half-integer powers.
    OddHalfInteger,
}

impl IntegralSpec {
    pub fn new(d: u32, p: u32, k: usize) -> Result<Self> {
        if d == 0 {
            return invalid("dimension d must be at least 1");
        }
        if k > MAX_K {
            return invalid(format!("k = {k} exceeds the supported maximum {MAX_K}"));
        }
        Ok(IntegralSpec { d, p, k })
    }

    pub fn alpha(&self) -> f64 {
        self.d as f64 / 2.0 + self.p as f64
    }

    pub fn case(&self) -> IntegralCase {
        if self.d % 2 == 1 {
            IntegralCase::OddHalfInteger
        } else if self.alpha() <= self.k as f64 {
            IntegralCase::EvenLog
        } else {
            IntegralCase::EvenPolynomial
        }
    }

    fn check_args(&self, r: &[f64]) -> Result<()> {
        check_args(self.k, r)
    }
}

fn check_args(k: usize, r: &[f64]) -> Result<()> {
    if r.len() != k + 1 {
        return Err(Error::Shape(format!("expected {} arguments, got {}", k + 1, r.len())));
    }
    match r.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        Some(&x) => Err(Error::NonPositive(x)),
        None => Ok(()),
    }
}

/// `I_{α,k}(r)` for arbitrary real `α` and positive arguments.
///
/// Coincident and nearly coincident arguments are handled exactly through
/// Taylor-expanded divided differences.
pub fn integral_alpha(alpha: f64, r: &[f64]) -> Result<f64> {
    if r.is_empty() {
        return Err(Error::Shape("at least one argument required".into()));
    }
    let k = r.len() - 1;
    if k > MAX_K {
        return invalid(format!("k = {k} exceeds the supported maximum {MAX_K}"));
    }
    check_args(k, r)?;
    Ok(integral_unchecked(alpha, r))
}

pub(crate) fn integral_unchecked(alpha: f64, r: &[f64]) -> f64 {
    let f = Antiderivative::new(alpha, r.len() - 1);
    let mut x = r.to_vec();
    divdiff::divided_difference(&f, &mut x)
}

/// `I_{α,k}(r)` dispatched on the case of `spec`.
pub fn integral(spec: IntegralSpec, r: &[f64]) -> Result<f64> {
    spec.check_args(r)?;
    Ok(integral_unchecked(spec.alpha(), r))
}

/// Reduced integral `Ĩ_{α,k}(r₀,…,r_{k-1}) = I_{α,k}(r₀,…,r_{k-1},r₀)`.
pub fn integral_reduced(spec: IntegralSpec, r: &[f64]) -> Result<f64> {
    if spec.k == 0 || r.len() != spec.k {
        return Err(Error::Shape(format!("reduced integral takes k = {} arguments", spec.k)));
    }
    let mut full = r.to_vec();
    full.push(r[0]);
    integral(spec, &full)
}

/// Even `d`, `α > k`: the nested sum
/// `(Πr_i)^{-n} / (n(n+1)…(n+k-1)) Σ_{0≤l_k≤…≤l₁≤n-1} r₀^{l₁} r₁^{l₂+n-1-l₁} ⋯ r_k^{n-1-l_k}`
/// with `n = α - k`.
pub fn integral_closed_case2(spec: IntegralSpec, r: &[f64]) -> Result<f64> {
    if spec.case() != IntegralCase::EvenPolynomial {
        return invalid(format!("{:?} is not in the even polynomial case", spec));
    }
    spec.check_args(r)?;
    let k = spec.k;
    let n = (spec.alpha() as usize) - k;
    let prod: f64 = r.iter().product();
    let denom: f64 = (0..k).map(|i| (n + i) as f64).product();
    // exponent of r_i is l_{i+1} + (n-1) - l_i with l_0 = n-1, l_{k+1} = 0.
    fn walk(r: &[f64], n: usize, i: usize, prev: usize, acc: f64, total: &mut f64) {
        let k = r.len() - 1;
        if i == k {
            *total += acc * r[k].powi((n - 1 - prev) as i32);
            return;
        }
        // choose l_{i+1} ≤ prev
        for l in 0..=prev {
            let e = if i == 0 { l } else { l + (n - 1) - prev };
            walk(r, n, i + 1, l, acc * r[i].powi(e as i32), total);
        }
    }
    let mut total = 0.0;
    if k == 0 {
        total = 1.0;
    } else {
        walk(r, n, 0, n - 1, 1.0, &mut total);
    }
    Ok(total * prod.powi(-(n as i32)) / denom.max(1.0))
}

/// Even `d`, `α ≤ k`: `Σ_i Π_{j≠i}(r_i-r_j)^{-1} c r_i^{k-α} ln r_i` in its
/// confluent-safe form.
pub fn integral_log_case1(spec: IntegralSpec, r: &[f64]) -> Result<f64> {
    if spec.case() != IntegralCase::EvenLog {
        return invalid(format!("{:?} is not in the even logarithmic case", spec));
    }
    integral(spec, r)
}

/// Odd `d`: `(-1)^k/(α₀)_k Σ_i Π_{j≠i}(r_i-r_j)^{-1} r_i^{-α₀}` with `α₀ = α-k`,
/// in its confluent-safe form.
pub fn integral_partial_fraction(spec: IntegralSpec, r: &[f64]) -> Result<f64> {
    if spec.case() != IntegralCase::OddHalfInteger {
        return invalid(format!("{:?} is not in the odd case", spec));
    }
    integral(spec, r)
}

/// The literal Lagrange sum, without any treatment of close arguments.
pub fn integral_lagrange(alpha: f64, r: &[f64]) -> Result<f64> {
    check_args(r.len().saturating_sub(1), r)?;
    for i in 0..r.len() {
        for j in 0..i {
            if r[i] == r[j] {
                return Err(Error::Coincident(r[j], r[i]));
            }
        }
    }
    Ok(lagrange_sum(&Antiderivative::new(alpha, r.len() - 1), r))
}

/// Right-hand side of
/// `I_{α,k} = (α-1)^{-1} (r_{k-1}-r_k)^{-1} [I_{α-1,k-1}(…,r_{k-2},r_k) - I_{α-1,k-1}(…,r_{k-1})]`
/// where `lower` evaluates `I_{α-1,k-1}`.
///
/// For `r_{k-1} = r_k` (relative gap below 1e-9) the difference quotient is
/// replaced by a numerical derivative of `lower` in its last argument.
pub fn integral_recursive_step(alpha: f64, r: &[f64], lower: impl Fn(&[f64]) -> Result<f64>) -> Result<f64> {
    if r.len() < 2 {
        return invalid("recursion needs k ≥ 1");
    }
    if alpha == 1.0 {
        return invalid("recursion is singular at α = 1");
    }
    check_args(r.len() - 1, r)?;
    let k = r.len() - 1;
    let mut left: Vec<f64> = r[..k - 1].to_vec();
    left.push(r[k]);
    let (a, b) = (r[k - 1], r[k]);
    if (a - b).abs() <= 1e-9 * a.max(b) {
        // Richardson-extrapolated central difference, O(h⁴).
        let last = left.len() - 1;
        let mut central = |h: f64| -> Result<f64> {
            left[last] = b + h;
            let up = lower(&left)?;
            left[last] = b - h;
            let down = lower(&left)?;
            Ok((up - down) / (2.0 * h))
        };
        let h = 1e-3 * b;
        let slope = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
        return Ok(-slope / (alpha - 1.0));
    }
    Ok((lower(&left)? - lower(&r[..k])?) / ((alpha - 1.0) * (a - b)))
}

/// [`integral_recursive_step`] with the exact lower integral.
pub fn integral_recursive_exact(alpha: f64, r: &[f64]) -> Result<f64> {
    integral_recursive_step(alpha, r, |s| Ok(integral_unchecked(alpha - 1.0, s)))
}

/// Numerical value by graded iterated Gauss–Legendre quadrature.
pub fn integral_quadrature(alpha: f64, r: &[f64], order: usize) -> Result<f64> {
    if r.is_empty() {
        return Err(Error::Shape("at least one argument required".into()));
    }
    check_args(r.len() - 1, r)?;
    if order == 0 {
        return invalid("quadrature order must be positive");
    }
    Ok(quadrature::simplex_quadrature(alpha, r, order))
}
