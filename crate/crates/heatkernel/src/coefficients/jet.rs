//! Second-order jets of the metric and of the operator coefficients at a point.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, MatrixN};
use crate::moments;

/// `g^{μν}`, `∂_c g^{μν}` and `∂_c∂_e g^{μν}` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointJet {
    /// Inverse metric `g^{μν}`.
    pub g: DMatrix<f64>,
    /// `dg[c] = ∂_c g^{μν}`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[c][e] = ∂_c ∂_e g^{μν}`.
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

fn symmetric_dev(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).abs().max()
}

impl PointJet {
    pub fn flat(d: usize) -> Self {
        PointJet {
            g: DMatrix::identity(d, d),
            dg: vec![DMatrix::zeros(d, d); d],
            ddg: vec![vec![DMatrix::zeros(d, d); d]; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.g.ncols() != d {
            return Err(Error::Shape("metric must be a non-empty square matrix".into()));
        }
        if self.dg.len() != d || self.ddg.len() != d || self.ddg.iter().any(|r| r.len() != d) {
            return Err(Error::Shape(format!("metric jets must have {d} first and {d}x{d} second derivatives")));
        }
        let all = std::iter::once(&self.g).chain(&self.dg).chain(self.ddg.iter().flatten());
        for m in all {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Shape("metric jet entries must be d×d".into()));
            }
            if symmetric_dev(m) > 1e-12 * (1.0 + m.abs().max()) {
                return Err(Error::InvalidArgument("metric jets must be symmetric in μν".into()));
            }
        }
        for c in 0..d {
            for e in 0..c {
                if (&self.ddg[c][e] - &self.ddg[e][c]).abs().max() > 1e-12 {
                    return Err(Error::InvalidArgument("second derivatives must commute".into()));
                }
            }
        }
        let eig = self.g.clone().symmetric_eigen();
        if eig.eigenvalues.min() <= 0.0 {
            return Err(Error::NotPositive(eig.eigenvalues.min()));
        }
        Ok(())
    }

    /// Covariant metric `g_{μν}`.
    pub fn g_lower(&self) -> DMatrix<f64> {
        linalg::inverse_real(&self.g).expect("validated metric is invertible")
    }

    /// `|g| = det g_{μν}`.
    pub fn det_lower(&self) -> f64 {
        1.0 / self.g.determinant()
    }

    /// `g_d = |g|^{1/2} / (2^d π^{d/2})`.
    pub fn volume_factor(&self) -> f64 {
        moments::volume_factor(self.dim(), self.det_lower())
    }

    /// `∂_c g_{μν} = -g ∂_c g^{..} g`.
    pub fn dg_lower(&self) -> Vec<DMatrix<f64>> {
        let l = self.g_lower();
        self.dg.iter().map(|dg| -(&l * dg * &l)).collect()
    }

    /// `∂_c ∂_e g_{μν}`.
    pub fn ddg_lower(&self) -> Vec<Vec<DMatrix<f64>>> {
        let l = self.g_lower();
        let dl = self.dg_lower();
        let d = self.dim();
        (0..d)
            .map(|c| {
                (0..d)
                    .map(|e| -(&dl[e] * &self.dg[c] * &l) - &l * &self.ddg[e][c] * &l - &l * &self.dg[c] * &dl[e])
                    .collect()
            })
            .collect()
    }

    /// Random jet with metric spectrum in `[0.5, 2]` and derivatives of size `scale`.
    pub fn random<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Self {
        let sym = |rng: &mut R, s: f64| {
            let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0) * s);
            (&a + a.transpose()) * 0.5
        };
        let q = {
            let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
            a.qr().q()
        };
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.gen_range(0.5..2.0)));
        let g = &q * diag * q.transpose();
        let g = (&g + g.transpose()) * 0.5;
        let dg = (0..d).map(|_| sym(rng, scale)).collect();
        let mut ddg = vec![vec![DMatrix::zeros(d, d); d]; d];
        for c in 0..d {
            for e in 0..=c {
                let m = sym(rng, scale);
                ddg[c][e] = m.clone();
                ddg[e][c] = m;
            }
        }
        PointJet { g, dg, ddg }
    }
}

/// `u`, `v^μ`, `w` of `P = -(g^{μν} u ∂_μ∂_ν + v^μ ∂_μ + w)` with the derivatives `a₁` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCoefficients {
    pub u: MatrixN,
    /// `du[c] = ∂_c u`.
    pub du: Vec<MatrixN>,
    /// `ddu[c][e] = ∂_c ∂_e u`.
    pub ddu: Vec<Vec<MatrixN>>,
    /// `v[μ] = v^μ`.
    pub v: Vec<MatrixN>,
    /// `dv[c][μ] = ∂_c v^μ`.
    pub dv: Vec<Vec<MatrixN>>,
    pub w: MatrixN,
}

/// `u`, connection `A_μ`, `p^μ` and `q` with the derivatives `a₁` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantCoefficients {
    pub u: MatrixN,
    pub du: Vec<MatrixN>,
    pub ddu: Vec<Vec<MatrixN>>,
    /// `a[μ] = A_μ`.
    pub a: Vec<MatrixN>,
    /// `da[c][μ] = ∂_c A_μ`.
    pub da: Vec<Vec<MatrixN>>,
    /// `p[μ] = p^μ`.
    pub p: Vec<MatrixN>,
    /// `dp[c][μ] = ∂_c p^μ`.
    pub dp: Vec<Vec<MatrixN>>,
    pub q: MatrixN,
}

fn check_list(list: &[MatrixN], d: usize, n: usize, what: &str) -> Result<()> {
    if list.len() != d {
        return Err(Error::Shape(format!("{what} needs {d} entries, got {}", list.len())));
    }
    for m in list {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Shape(format!("{what} entries must be {n}x{n}")));
        }
    }
    Ok(())
}

fn check_grid(grid: &[Vec<MatrixN>], d: usize, n: usize, what: &str) -> Result<()> {
    if grid.len() != d {
        return Err(Error::Shape(format!("{what} needs {d} rows, got {}", grid.len())));
    }
    grid.iter().try_for_each(|row| check_list(row, d, n, what))
}

/// Random symmetric pair `ddx[c][e] = ddx[e][c]`.
fn random_sym_grid<R: Rng>(rng: &mut R, d: usize, f: impl Fn(&mut R) -> MatrixN) -> Vec<Vec<MatrixN>> {
    let mut out = vec![vec![MatrixN::zeros(0, 0); d]; d];
    for c in 0..d {
        for e in 0..=c {
            let m = f(rng);
            out[c][e] = m.clone();
            out[e][c] = m;
        }
    }
    out
}

impl OperatorCoefficients {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let n = linalg::ensure_square(&self.u, "u")?;
        check_list(&self.du, d, n, "du")?;
        check_grid(&self.ddu, d, n, "ddu")?;
        check_list(&self.v, d, n, "v")?;
        check_grid(&self.dv, d, n, "dv")?;
        check_list(std::slice::from_ref(&self.w), 1, n, "w")
    }

    /// Constant coefficients (all derivatives zero).
    pub fn constant(d: usize, u: MatrixN, v: Vec<MatrixN>, w: MatrixN) -> Self {
        let n = u.nrows();
        OperatorCoefficients {
            du: vec![linalg::zeros(n); d],
            ddu: vec![vec![linalg::zeros(n); d]; d],
            dv: vec![vec![linalg::zeros(n); d]; d],
            u,
            v,
            w,
        }
    }

    /// Random data: `u` positive with spectrum in `[lo, hi]`, the rest of size `scale`.
    pub fn random<R: Rng>(rng: &mut R, d: usize, n: usize, (lo, hi): (f64, f64), scale: f64) -> Self {
        let u = linalg::random_positive(rng, n, lo, hi);
        OperatorCoefficients {
            du: (0..d).map(|_| linalg::random_hermitian(rng, n, scale)).collect(),
            ddu: random_sym_grid(rng, d, |r| linalg::random_hermitian(r, n, scale)),
            v: (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect(),
            dv: (0..d).map(|_| (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect()).collect(),
            w: linalg::random_complex(rng, n, scale),
            u,
        }
    }
}

impl InvariantCoefficients {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let n = linalg::ensure_square(&self.u, "u")?;
        check_list(&self.du, d, n, "du")?;
        check_grid(&self.ddu, d, n, "ddu")?;
        check_list(&self.a, d, n, "A")?;
        check_grid(&self.da, d, n, "dA")?;
        check_list(&self.p, d, n, "p")?;
        check_grid(&self.dp, d, n, "dp")?;
        check_list(std::slice::from_ref(&self.q), 1, n, "q")
    }

    /// `u = c·1` with vanishing connection, `p` and `q`.
    pub fn scalar_constant(d: usize, n: usize, c: f64) -> Self {
        let z = linalg::zeros(n);
        InvariantCoefficients {
            u: linalg::scaled_identity(n, c),
            du: vec![z.clone(); d],
            ddu: vec![vec![z.clone(); d]; d],
            a: vec![z.clone(); d],
            da: vec![vec![z.clone(); d]; d],
            p: vec![z.clone(); d],
            dp: vec![vec![z.clone(); d]; d],
            q: z,
        }
    }

    pub fn random<R: Rng>(rng: &mut R, d: usize, n: usize, (lo, hi): (f64, f64), scale: f64) -> Self {
        let u = linalg::random_positive(rng, n, lo, hi);
        InvariantCoefficients {
            du: (0..d).map(|_| linalg::random_hermitian(rng, n, scale)).collect(),
            ddu: random_sym_grid(rng, d, |r| linalg::random_hermitian(r, n, scale)),
            a: (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect(),
            da: (0..d).map(|_| (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect()).collect(),
            p: (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect(),
            dp: (0..d).map(|_| (0..d).map(|_| linalg::random_complex(rng, n, scale)).collect()).collect(),
            q: linalg::random_complex(rng, n, scale),
            u,
        }
    }
}
