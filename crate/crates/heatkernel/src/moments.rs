//! Gaussian ξ-moments.
//!
//! With `|ξ|²_g = g^{μν} ξ_μ ξ_ν`,
//! `(2π)^{-d} ∫ ξ_{μ₁}⋯ξ_{μ_{2p}} e^{-σ|ξ|²_g} dξ = g_d σ^{-d/2-p} G_{μ₁…μ_{2p}}`,
//! where `g_d = |g|^{1/2} / (2^d π^{d/2})` and `G` is `2^{-p}` times the sum over
//! perfect pairings of products of `g_{μν}`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, MatrixN};

/// `g_d = |g|^{1/2} / (2^d π^{d/2})` from the determinant of the covariant metric.
pub fn volume_factor(d: usize, det_lower: f64) -> f64 {
    det_lower.sqrt() / (2f64.powi(d as i32) * PI.powf(d as f64 / 2.0))
}

/// All perfect pairings of `0..2p`, each as a list of index pairs.
pub fn pairings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], current: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = rest[0];
        for j in 1..rest.len() {
            let remaining: Vec<usize> = rest[1..].iter().copied().filter(|&x| x != rest[j]).collect();
            current.push((first, rest[j]));
            rec(&remaining, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

/// Fully symmetric rank-`2p` tensor stored densely, index `Σ μ_i d^{rank-1-i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTensor {
    d: usize,
    rank: usize,
    data: Vec<f64>,
}

impl MomentTensor {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[idx.iter().fold(0, |acc, &i| acc * self.d + i)]
    }

    /// `g^{μ₁μ₂} G_{μ₁μ₂…}` as a tensor of rank `2p-2`.
    pub fn trace_first_pair(&self, g_upper: &DMatrix<f64>) -> MomentTensor {
        let d = self.d;
        let rest = self.rank - 2;
        let size = d.pow(rest as u32);
        let mut data = vec![0.0; size];
        for (flat, out) in data.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    acc += g_upper[(a, b)] * self.data[(a * d + b) * size + flat];
                }
            }
            *out = acc;
        }
        MomentTensor { d, rank: rest, data }
    }
}

/// The tensor `G_{μ₁…μ_{2p}}` for the covariant metric `g_lower`.
pub fn moment_tensor(p: usize, g_lower: &DMatrix<f64>) -> Result<MomentTensor> {
    let d = g_lower.nrows();
    if d == 0 || g_lower.ncols() != d {
        return Err(Error::Shape("metric must be square".into()));
    }
    if p > 5 {
        return invalid("moment tensors are limited to p ≤ 5");
    }
    let rank = 2 * p;
    let pairs = pairings(rank);
    let size = d.pow(rank as u32);
    let norm = 0.5f64.powi(p as i32);
    let mut idx = vec![0usize; rank];
    let mut data = vec![0.0; size];
    for (flat, out) in data.iter_mut().enumerate() {
        let mut rem = flat;
        for slot in (0..rank).rev() {
            idx[slot] = rem % d;
            rem /= d;
        }
        let s: f64 =
            pairs.iter().map(|pairing| pairing.iter().map(|&(a, b)| g_lower[(idx[a], idx[b])]).product::<f64>()).sum();
        *out = norm * s;
    }
    Ok(MomentTensor { d, rank, data })
}

/// Result of [`xi_integral_oracle`].
#[derive(Clone, Debug)]
pub struct OracleValue {
    pub value: MatrixN,
    /// Difference between the requested order and a coarser rule.
    pub error_estimate: f64,
}

/// `(2π)^{-d} ∫_{ℝ^d} f(ξ) dξ` by tensor-product Gauss–Hermite quadrature.
///
/// The rule is adapted to the weight `exp(-scale · g^{μν} ξ_μ ξ_ν)`; `f` should
/// decay at least that fast.
pub fn xi_integral_oracle(
    g_upper: &DMatrix<f64>,
    scale: f64,
    order: usize,
    f: impl Fn(&[f64]) -> MatrixN,
) -> Result<OracleValue> {
    let d = g_upper.nrows();
    if d == 0 || d > 6 || g_upper.ncols() != d {
        return invalid("oracle supports square metrics with 1 ≤ d ≤ 6");
    }
    if !(scale > 0.0) || order < 2 {
        return invalid("oracle needs scale > 0 and order ≥ 2");
    }
    let fine = hermite_product(g_upper, scale, order, &f)?;
    let coarse = hermite_product(g_upper, scale, (3 * order) / 4, &f)?;
    let error_estimate = linalg::max_abs(&(&fine - &coarse));
    Ok(OracleValue { value: fine, error_estimate })
}

fn hermite_product(
    g_upper: &DMatrix<f64>,
    scale: f64,
    order: usize,
    f: &impl Fn(&[f64]) -> MatrixN,
) -> Result<MatrixN> {
    let d = g_upper.nrows();
    // ξ = C y / √scale with Cᵀ G C = 1, C = G^{-1/2}.
    let eig = g_upper.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositive(eig.eigenvalues.min()));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let c = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose() / scale.sqrt();
    let jac = c.determinant().abs();
    let rule = GaussHermite::new(NonZeroUsize::new(order).expect("order ≥ 2"));
    let nodes: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    let n = nodes.len();
    let probe = f(&vec![0.0; d]);
    let mut total = MatrixN::zeros(probe.nrows(), probe.ncols());
    let mut counter = vec![0usize; d];
    let mut y = vec![0.0; d];
    let mut xi = vec![0.0; d];
    'outer: loop {
        let mut w = 1.0;
        let mut r2 = 0.0;
        for a in 0..d {
            let (node, weight) = nodes[counter[a]];
            y[a] = node;
            w *= weight;
            r2 += node * node;
        }
        for a in 0..d {
            xi[a] = (0..d).map(|b| c[(a, b)] * y[b]).sum();
        }
        total += f(&xi) * Complex64::new(w * r2.exp(), 0.0);
        for a in 0..d {
            counter[a] += 1;
            if counter[a] < n {
                continue 'outer;
            }
            counter[a] = 0;
        }
        break;
    }
    Ok(total * Complex64::new(jac / (2.0 * PI).powi(d as i32), 0.0))
}
