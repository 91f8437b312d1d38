//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Dense complex `N×N` matrix.
pub type MatrixN = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn zeros(n: usize) -> MatrixN {
    MatrixN::zeros(n, n)
}

pub fn identity(n: usize) -> MatrixN {
    MatrixN::identity(n, n)
}

pub fn scaled_identity(n: usize, c: f64) -> MatrixN {
    MatrixN::identity(n, n) * Complex64::new(c, 0.0)
}

/// Build a matrix from real entries given row by row.
pub fn from_real_rows(rows: &[&[f64]]) -> MatrixN {
    let n = rows.len();
    MatrixN::from_fn(n, rows[0].len(), |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn trace(m: &MatrixN) -> Complex64 {
    m.trace()
}

/// Largest entry modulus, used as a cheap norm in tolerances.
pub fn max_abs(m: &MatrixN) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &MatrixN) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &MatrixN, b: &MatrixN) -> MatrixN {
    a * b - b * a
}

pub fn hermitian_deviation(m: &MatrixN) -> f64 {
    let scale = max_abs(m).max(1.0);
    max_abs(&(m - m.adjoint())) / scale
}

pub fn ensure_square(m: &MatrixN, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Shape(format!("{what} must be a non-empty square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub fn ensure_hermitian(m: &MatrixN, tol: f64) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn inverse(m: &MatrixN) -> Result<MatrixN> {
    m.clone().try_inverse().ok_or_else(|| Error::InvalidArgument("matrix is singular".into()))
}

/// Real symmetric inverse for metric-sized matrices.
pub fn inverse_real(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or_else(|| Error::InvalidArgument("metric is singular".into()))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &MatrixN) -> (Vec<f64>, MatrixN) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = MatrixN::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &MatrixN, f: impl Fn(f64) -> f64) -> MatrixN {
    let (values, vectors) = hermitian_eigen(m);
    let diag = MatrixN::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| Complex64::new(f(l), 0.0)),
    ));
    &vectors * diag * vectors.adjoint()
}

/// `exp(-h)` for a general square matrix; uses the spectrum when `h` is Hermitian.
pub fn exp_neg(h: &MatrixN) -> MatrixN {
    if hermitian_deviation(h) < 1e-13 {
        hermitian_fn(h, |l| (-l).exp())
    } else {
        (-h).exp()
    }
}

/// Random Hermitian matrix with entries of order `scale`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> MatrixN {
    let a = MatrixN::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale);
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random skew-Hermitian matrix with entries of order `scale`.
pub fn random_skew_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> MatrixN {
    random_hermitian(rng, n, scale) * I
}

pub fn random_complex<R: Rng>(rng: &mut R, n: usize, scale: f64) -> MatrixN {
    MatrixN::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
}

/// Random unitary matrix (QR of a complex Gaussian-like matrix).
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> MatrixN {
    let a = random_complex(rng, n, 1.0);
    a.qr().q()
}

/// Hermitian positive matrix with spectrum drawn uniformly from `[lo, hi]`.
pub fn random_positive<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> MatrixN {
    let q = random_unitary(rng, n);
    let diag = MatrixN::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|_| Complex64::new(rng.gen_range(lo..hi), 0.0)),
    ));
    let m = &q * diag * q.adjoint();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}
