//! Matrix-valued simplex integrals.
//!
//! For a positive Hermitian `u = Σ_i λ_i π_i` and matrices `B₁,…,B_k`,
//! `I_{α,k}(u,…,u)[B] = Σ_{i₀…i_k} I_{α,k}(λ_{i₀},…,λ_{i_k}) π_{i₀} B₁ π_{i₁} ⋯ B_k π_{i_k}`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, MatrixN, ZERO};
use crate::simplex::{self, IntegralCase, IntegralSpec};

/// Relative gap below which eigenvalues are merged into one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;
/// Smallest admissible `λ_min / λ_max`.
pub const MIN_EIGEN_RATIO: f64 = 1e-12;

/// Cached `I_{α,k}` values over eigenvalue tuples, keyed by `(α bits, k)`.
type Table = Rc<Vec<f64>>;

/// Spectral decomposition of a positive Hermitian matrix with clustered eigenvalues.
#[derive(Debug)]
pub struct SpectralData {
    n: usize,
    /// Cluster eigenvalues, ascending.
    values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    vectors: MatrixN,
    /// Cluster index of each eigenvector.
    cluster_of: Vec<usize>,
    tables: RefCell<HashMap<(u64, usize), Table>>,
}

impl SpectralData {
    pub fn new(u: &MatrixN) -> Result<Self> {
        Self::with_tolerance(u, DEFAULT_CLUSTER_TOL)
    }

    pub fn with_tolerance(u: &MatrixN, cluster_tol: f64) -> Result<Self> {
        let n = linalg::ensure_square(u, "u")?;
        linalg::ensure_hermitian(u, 1e-10)?;
        let (raw, vectors) = linalg::hermitian_eigen(u);
        let (lo, hi) = (raw[0], raw[n - 1]);
        if !(lo > 0.0) {
            return Err(Error::NotPositive(lo));
        }
        if lo / hi < MIN_EIGEN_RATIO {
            return Err(Error::IllConditioned(lo / hi));
        }
        let mut values: Vec<f64> = Vec::new();
        let mut members: Vec<Vec<f64>> = Vec::new();
        let mut cluster_of = Vec::with_capacity(n);
        for &l in &raw {
            match members.last_mut() {
                Some(group) if l - group[group.len() - 1] <= cluster_tol * hi => group.push(l),
                _ => members.push(vec![l]),
            }
            cluster_of.push(members.len() - 1);
        }
        for group in &members {
            values.push(group.iter().sum::<f64>() / group.len() as f64);
        }
        Ok(SpectralData { n, values, vectors, cluster_of, tables: RefCell::new(HashMap::new()) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Distinct (clustered) eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &MatrixN {
        &self.vectors
    }

    /// Orthogonal projector onto the `i`-th cluster.
    pub fn projector(&self, i: usize) -> MatrixN {
        let mut p = MatrixN::zeros(self.n, self.n);
        for (col, &c) in self.cluster_of.iter().enumerate() {
            if c == i {
                let v = self.vectors.column(col);
                p += v * v.adjoint();
            }
        }
        p
    }

    pub fn projectors(&self) -> Vec<MatrixN> {
        (0..self.values.len()).map(|i| self.projector(i)).collect()
    }

    /// `f(u)` through the clustered spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> MatrixN {
        let diag = nalgebra::DVector::from_iterator(
            self.n,
            self.cluster_of.iter().map(|&c| Complex64::new(f(self.values[c]), 0.0)),
        );
        &self.vectors * MatrixN::from_diagonal(&diag) * self.vectors.adjoint()
    }

    /// Express a matrix in the eigenbasis.
    pub fn to_eigenbasis(&self, b: &MatrixN) -> MatrixN {
        self.vectors.adjoint() * b * &self.vectors
    }

    fn out_of_eigenbasis(&self, b: &MatrixN) -> MatrixN {
        &self.vectors * b * self.vectors.adjoint()
    }

    /// `I_{α,k}` on every tuple of cluster eigenvalues, flattened base `m`.
    fn table(&self, alpha: f64, k: usize) -> Table {
        let key = (alpha.to_bits(), k);
        if let Some(t) = self.tables.borrow().get(&key) {
            return t.clone();
        }
        let m = self.values.len();
        let count = m.pow(k as u32 + 1);
        let mut args = vec![0.0; k + 1];
        let data: Vec<f64> = (0..count)
            .map(|flat| {
                let mut rem = flat;
                for slot in (0..=k).rev() {
                    args[slot] = self.values[rem % m];
                    rem /= m;
                }
                simplex::integral_unchecked(alpha, &args)
            })
            .collect();
        let rc = Rc::new(data);
        self.tables.borrow_mut().insert(key, rc.clone());
        rc
    }
}

/// A pure tensor `A₀ ⊗ A₁ ⊗ ⋯ ⊗ A_k`.
#[derive(Clone, Debug)]
pub struct ElementaryTensor {
    pub factors: Vec<MatrixN>,
}

impl ElementaryTensor {
    /// `ι(A₀⊗⋯⊗A_k)(B₁,…,B_k) = A₀ B₁ A₁ ⋯ B_k A_k`.
    pub fn iota(&self, b: &[MatrixN]) -> Result<MatrixN> {
        iota_product(&self.factors, b)
    }
}

/// `A₀ B₁ A₁ ⋯ B_k A_k`.
pub fn iota_product(a: &[MatrixN], b: &[MatrixN]) -> Result<MatrixN> {
    if a.len() != b.len() + 1 {
        return Err(Error::Shape(format!(
            "ι needs k+1 tensor factors for k matrices, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut out = a[0].clone();
    for (bi, ai) in b.iter().zip(&a[1..]) {
        out = out * bi * ai;
    }
    Ok(out)
}

fn check_words(n: usize, b: &[MatrixN]) -> Result<()> {
    for m in b {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Shape(format!("operand is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
        }
    }
    Ok(())
}

/// `I_{α,k}(u,…,u)[B₁,…,B_k]` with `k = b.len()`.
pub fn apply_i_operator(spec: IntegralSpec, u: &SpectralData, b: &[MatrixN]) -> Result<MatrixN> {
    if spec.k != b.len() {
        return Err(Error::Shape(format!("spec has k = {}, got {} matrices", spec.k, b.len())));
    }
    check_words(u.n, b)?;
    Ok(apply_alpha(spec.alpha(), u, b))
}

/// Same as [`apply_i_operator`] for arbitrary real `α`.
pub fn apply_alpha(alpha: f64, u: &SpectralData, b: &[MatrixN]) -> MatrixN {
    let k = b.len();
    let n = u.n;
    let m = u.values.len();
    let table = u.table(alpha, k);
    let bt: Vec<MatrixN> = b.iter().map(|x| u.to_eigenbasis(x)).collect();
    let mut out = MatrixN::zeros(n, n);
    // Iterate over eigenvector tuples e₀…e_k, accumulating partial products.
    fn rec(
        level: usize,
        e_prev: usize,
        flat: usize,
        acc: Complex64,
        e0: usize,
        ctx: &(&[MatrixN], &[usize], &[f64], usize, usize),
        out: &mut MatrixN,
    ) {
        let (bt, cluster_of, table, m, n) = *ctx;
        if level == bt.len() {
            out[(e0, e_prev)] += acc * table[flat];
            return;
        }
        for e in 0..n {
            let x = bt[level][(e_prev, e)];
            if x == ZERO {
                continue;
            }
            rec(level + 1, e, flat * m + cluster_of[e], acc * x, e0, ctx, out);
        }
    }
    let ctx = (&bt[..], &u.cluster_of[..], &table[..], m, n);
    for e0 in 0..n {
        rec(0, e0, u.cluster_of[e0], Complex64::new(1.0, 0.0), e0, &ctx, &mut out);
    }
    u.out_of_eigenbasis(&out)
}

/// The defining projector sum, evaluated literally (reference implementation).
pub fn apply_i_projector_sum(spec: IntegralSpec, u: &SpectralData, b: &[MatrixN]) -> Result<MatrixN> {
    if spec.k != b.len() {
        return Err(Error::Shape("k mismatch".into()));
    }
    check_words(u.n, b)?;
    let proj = u.projectors();
    let m = proj.len();
    let k = b.len();
    let mut out = MatrixN::zeros(u.n, u.n);
    let mut args = vec![0.0; k + 1];
    let mut factors = vec![proj[0].clone(); k + 1];
    for flat in 0..m.pow(k as u32 + 1) {
        let mut rem = flat;
        for slot in (0..=k).rev() {
            args[slot] = u.values[rem % m];
            factors[slot] = proj[rem % m].clone();
            rem /= m;
        }
        let w = simplex::integral(spec, &args)?;
        out += iota_product(&factors, b)? * Complex64::new(w, 0.0);
    }
    Ok(out)
}

/// Polynomial-case evaluation without diagonalising `u`:
/// `((n)(n+1)…(n+k-1))^{-1} Σ_{0≤l_k≤…≤l₁≤n-1} u^{l₁-n} B₁ u^{l₂-l₁-1} ⋯ B_k u^{-l_k-1}`.
pub fn apply_i_factorized(spec: IntegralSpec, u: &MatrixN, b: &[MatrixN]) -> Result<MatrixN> {
    if spec.case() != IntegralCase::EvenPolynomial {
        return invalid("factorised evaluation needs even d and α > k");
    }
    if spec.k != b.len() {
        return Err(Error::Shape("k mismatch".into()));
    }
    let n_dim = linalg::ensure_square(u, "u")?;
    check_words(n_dim, b)?;
    let k = spec.k;
    let n = spec.alpha() as usize - k;
    let inv = linalg::inverse(u)?;
    let mut pow = vec![linalg::identity(n_dim)];
    for i in 1..=n + 1 {
        pow.push(&pow[i - 1] * &inv);
    }
    let denom: f64 = (0..k).map(|i| (n + i) as f64).product::<f64>().max(1.0);
    if k == 0 {
        return Ok(pow[n].clone());
    }
    // ls[0] = l₁ … ls[k-1] = l_k, non-increasing, all ≤ n-1.
    let mut total = MatrixN::zeros(n_dim, n_dim);
    let mut ls = vec![0usize; k];
    fn rec(i: usize, upper: usize, ls: &mut Vec<usize>, n: usize, pow: &[MatrixN], b: &[MatrixN], total: &mut MatrixN) {
        let k = b.len();
        if i == k {
            let mut m = pow[n - ls[0]].clone();
            for j in 0..k {
                m *= &b[j];
                let e = if j + 1 < k { ls[j] - ls[j + 1] + 1 } else { ls[k - 1] + 1 };
                m *= &pow[e];
            }
            *total += m;
            return;
        }
        for l in 0..=upper {
            ls[i] = l;
            rec(i + 1, l, ls, n, pow, b, total);
        }
    }
    rec(0, n - 1, &mut ls, n, &pow, b, &mut total);
    Ok(total * Complex64::new(1.0 / denom, 0.0))
}

/// `tr I_{α,k}(u,…,u)[B]` through the reduced integral `Ĩ` (last argument set to the first).
pub fn apply_i_reduced(spec: IntegralSpec, u: &SpectralData, b: &[MatrixN]) -> Result<Complex64> {
    if spec.k != b.len() || spec.k == 0 {
        return Err(Error::Shape("reduced trace needs k = number of matrices ≥ 1".into()));
    }
    check_words(u.n, b)?;
    Ok(trace_alpha(spec.alpha(), u, &b.iter().map(|x| u.to_eigenbasis(x)).collect::<Vec<_>>()))
}

/// `Σ_{e₀…e_{k-1}} Ĩ(λ_{e₀},…,λ_{e_{k-1}}) B₁_{e₀e₁} ⋯ B_k_{e_{k-1}e₀}` with operands already
/// in the eigenbasis.
pub fn trace_alpha(alpha: f64, u: &SpectralData, bt: &[MatrixN]) -> Complex64 {
    let k = bt.len();
    let m = u.values.len();
    let table = u.table(alpha, k);
    let mut total = ZERO;
    fn rec(
        level: usize,
        e_prev: usize,
        flat: usize,
        acc: Complex64,
        e0: usize,
        ctx: &(&[MatrixN], &[usize], &[f64], usize, usize),
        total: &mut Complex64,
    ) {
        let (bt, cluster_of, table, m, n) = *ctx;
        let k = bt.len();
        if level + 1 == k {
            let x = bt[level][(e_prev, e0)];
            *total += acc * x * table[flat * m + cluster_of[e0]];
            return;
        }
        for e in 0..n {
            let x = bt[level][(e_prev, e)];
            if x == ZERO {
                continue;
            }
            rec(level + 1, e, flat * m + cluster_of[e], acc * x, e0, ctx, total);
        }
    }
    let ctx = (bt, &u.cluster_of[..], &table[..], m, u.n);
    for e0 in 0..u.n {
        rec(0, e0, u.cluster_of[e0], Complex64::new(1.0, 0.0), e0, &ctx, &mut total);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn operator_matches_projector_sum_and_factorisation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = linalg::random_positive(&mut rng, 3, 0.5, 3.0);
        let sd = SpectralData::new(&u).unwrap();
        let b: Vec<MatrixN> = (0..3).map(|_| linalg::random_complex(&mut rng, 3, 1.0)).collect();
        let spec = IntegralSpec::new(4, 2, 3).unwrap();
        let a = apply_i_operator(spec, &sd, &b).unwrap();
        let p = apply_i_projector_sum(spec, &sd, &b).unwrap();
        let f = apply_i_factorized(spec, &u, &b).unwrap();
        assert!(linalg::max_abs(&(&a - &p)) < 1e-12 * linalg::max_abs(&a));
        assert!(linalg::max_abs(&(&a - &f)) < 1e-12 * linalg::max_abs(&a));
    }

    #[test]
    fn degenerate_spectrum_clusters() {
        let u = linalg::from_real_rows(&[&[2.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        let sd = SpectralData::new(&u).unwrap();
        assert_eq!(sd.eigenvalues().len(), 2);
        let id = linalg::identity(3);
        // With identity insertions the operator is I(u,…,u) = u^{-α}/k!.
        let spec = IntegralSpec::new(3, 1, 2).unwrap();
        let a = apply_i_operator(spec, &sd, &[id.clone(), id]).unwrap();
        let expect = sd.map(|l| l.powf(-2.5) / 2.0);
        assert!(linalg::max_abs(&(a - expect)) < 1e-14);
    }

    #[test]
    fn reduced_trace_matches_full_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = linalg::random_positive(&mut rng, 4, 0.3, 2.0);
        let sd = SpectralData::new(&u).unwrap();
        let b: Vec<MatrixN> = (0..2).map(|_| linalg::random_complex(&mut rng, 4, 1.0)).collect();
        let spec = IntegralSpec::new(2, 1, 2).unwrap();
        let full = apply_i_operator(spec, &sd, &b).unwrap().trace();
        let red = apply_i_reduced(spec, &sd, &b).unwrap();
        assert!((full - red).norm() < 1e-12 * full.norm());
    }

    #[test]
    fn rejects_bad_input() {
        let u = linalg::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(SpectralData::new(&u), Err(Error::NotPositive(_))));
        let u = linalg::from_real_rows(&[&[1.0, 0.0], &[0.0, 1e-14]]);
        assert!(matches!(SpectralData::new(&u), Err(Error::IllConditioned(_))));
        let u = linalg::from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(matches!(SpectralData::new(&u), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn iota_interleaves() {
        let a = linalg::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let b = linalg::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let t = ElementaryTensor { factors: vec![a.clone(), a.clone()] };
        assert_eq!(t.iota(std::slice::from_ref(&b)).unwrap(), &a * &b * &a);
        assert!(t.iota(&[]).is_err());
    }
}
