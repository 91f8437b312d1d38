use crate::error::{Error, Result};
use crate::linalg::{self, MatrixN, I};
use num_complex::Complex64;
use std::f64::consts::PI;

/// One term `c e^{2πi j·x/L}` of a matrix field.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierMode {
    pub wave: Vec<i32>,
    pub coeff: MatrixN,
}

/// Matrix-valued trigonometric polynomial on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    n: usize,
    modes: Vec<FourierMode>,
}

impl MatrixField {
    pub fn new(n: usize, modes: Vec<FourierMode>) -> Self {
        MatrixField { n, modes }
    }

    pub fn zero(n: usize) -> Self {
        MatrixField { n, modes: Vec::new() }
    }

    /// Constant field on a `d`-torus.
    pub fn constant(d: usize, c: MatrixN) -> Self {
        MatrixField { n: c.nrows(), modes: vec![FourierMode { wave: vec![0; d], coeff: c }] }
    }

    /// Adds `a cos(2π j·x/L)`; Hermitian `a` keeps the field Hermitian.
    pub fn with_cos(mut self, wave: &[i32], a: MatrixN) -> Self {
        let half = a * Complex64::new(0.5, 0.0);
        self.push(wave.to_vec(), half.clone());
        self.push(wave.iter().map(|j| -j).collect(), half);
        self
    }

    /// Adds `b sin(2π j·x/L)`.
    pub fn with_sin(mut self, wave: &[i32], b: MatrixN) -> Self {
        let half = b * Complex64::new(0.0, -0.5);
        self.push(wave.to_vec(), half.clone());
        self.push(wave.iter().map(|j| -j).collect(), -half);
        self
    }

    fn push(&mut self, wave: Vec<i32>, coeff: MatrixN) {
        match self.modes.iter_mut().find(|m| m.wave == wave) {
            Some(m) => m.coeff += coeff,
            None => self.modes.push(FourierMode { wave, coeff }),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[FourierMode] {
        &self.modes
    }

    /// Largest `|j_i|` over all modes.
    pub fn max_wave(&self) -> usize {
        self.modes.iter().flat_map(|m| m.wave.iter()).map(|j| j.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Fourier coefficient at `wave` (zero if absent).
    pub fn coefficient(&self, wave: &[i32]) -> MatrixN {
        self.modes.iter().filter(|m| m.wave == wave).fold(linalg::zeros(self.n), |acc, m| acc + &m.coeff)
    }

    /// Shapes, and Hermiticity `ĉ(-j) = ĉ(j)†` of the field.
    pub fn validate(&self, d: usize) -> Result<()> {
        for m in &self.modes {
            if m.wave.len() != d {
                return Err(Error::Shape(format!("mode {:?} is not a {d}-vector", m.wave)));
            }
            if m.coeff.nrows() != self.n || m.coeff.ncols() != self.n {
                return Err(Error::Shape(format!("mode coefficients must be {0}x{0}", self.n)));
            }
        }
        for m in &self.modes {
            let neg: Vec<i32> = m.wave.iter().map(|j| -j).collect();
            let dev = linalg::max_abs(&(self.coefficient(&neg) - m.coeff.adjoint()));
            if dev > 1e-10 * (1.0 + linalg::max_abs(&m.coeff)) {
                return Err(Error::NotHermitian(dev));
            }
        }
        Ok(())
    }

    fn phase(wave: &[i32], x: &[f64], side: f64) -> Complex64 {
        let theta: f64 = wave.iter().zip(x).map(|(j, xi)| *j as f64 * xi).sum::<f64>() * 2.0 * PI / side;
        Complex64::from_polar(1.0, theta)
    }

    pub fn value(&self, x: &[f64], side: f64) -> MatrixN {
        self.modes.iter().fold(linalg::zeros(self.n), |acc, m| acc + &m.coeff * Self::phase(&m.wave, x, side))
    }

    /// `[∂_μ f]`.
    pub fn gradient(&self, x: &[f64], side: f64) -> Vec<MatrixN> {
        let k = 2.0 * PI / side;
        (0..x.len())
            .map(|mu| {
                self.modes.iter().fold(linalg::zeros(self.n), |acc, m| {
                    acc + &m.coeff * (Self::phase(&m.wave, x, side) * I * (k * m.wave[mu] as f64))
                })
            })
            .collect()
    }

    /// `[∂_μ ∂_ν f]`.
    pub fn hessian(&self, x: &[f64], side: f64) -> Vec<Vec<MatrixN>> {
        let k = 2.0 * PI / side;
        (0..x.len())
            .map(|mu| {
                (0..x.len())
                    .map(|nu| {
                        self.modes.iter().fold(linalg::zeros(self.n), |acc, m| {
                            let s = -k * k * (m.wave[mu] * m.wave[nu]) as f64;
                            acc + &m.coeff * (Self::phase(&m.wave, x, side) * s)
                        })
                    })
                    .collect()
            })
            .collect()
    }
}
