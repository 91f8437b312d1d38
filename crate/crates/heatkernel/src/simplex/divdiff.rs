//! Divided differences of the k-th antiderivative of `x^{-α}`.
//!
//! `I_{α,k}(r) = F[r₀,…,r_k]` where `F^{(k)}(x) = x^{-α}`. Blocks of nearly
//! equal points are expanded in a Taylor series about their centre, which
//! gives the confluent limits without perturbing the arguments.

/// Relative spread below which a block is handled by Taylor expansion.
const TAYLOR_SPREAD: f64 = 0.25;
const MAX_TAYLOR_TERMS: usize = 400;

/// `F` with `F^{(k)} = x^{-α}`, up to a polynomial of degree `< k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Antiderivative {
    /// `coef · x^beta`
    Power { coef: f64, beta: f64 },
    /// `coef · x^n · ln x`
    PowerLog { coef: f64, n: u32 },
}

impl Antiderivative {
    pub fn new(alpha: f64, k: usize) -> Self {
        let beta = k as f64 - alpha;
        let integral_alpha = alpha.fract() == 0.0 && alpha >= 1.0 && alpha <= k as f64;
        if integral_alpha {
            // F = (-1)^{α-1} / ((α-1)! (k-α)!) · x^{k-α} ln x
            let n = (k as f64 - alpha) as u32;
            let a = alpha as u32 - 1;
            let log_mag = -ln_factorial(a) - ln_factorial(n);
            let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
            Antiderivative::PowerLog { coef: sign * log_mag.exp(), n }
        } else {
            // F = x^β / (β(β-1)…(β-k+1))
            let mut log_mag = 0.0;
            let mut sign = 1.0;
            for i in 0..k {
                let f = beta - i as f64;
                log_mag += f.abs().ln();
                if f < 0.0 {
                    sign = -sign;
                }
            }
            Antiderivative::Power { coef: sign * (-log_mag).exp(), beta }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Antiderivative::Power { coef, beta } => coef * x.powf(beta),
            Antiderivative::PowerLog { coef, n } => coef * x.powi(n as i32) * x.ln(),
        }
    }

    /// Taylor coefficients `F^{(m)}(c)/m!` for `m = m0, m0+1, …` (lazy).
    fn taylor(&self, c: f64, m0: usize) -> TaylorIter {
        TaylorIter { f: *self, c, m: m0, last: None }
    }
}

struct TaylorIter {
    f: Antiderivative,
    c: f64,
    m: usize,
    last: Option<f64>,
}

impl Iterator for TaylorIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let m = self.m;
        let c = self.c;
        let value = match (self.f, self.last) {
            (Antiderivative::Power { beta, .. }, Some(prev)) => prev * (beta - (m - 1) as f64) / (m as f64 * c),
            (Antiderivative::Power { coef, beta }, None) => {
                let mut b = 1.0;
                for i in 0..m {
                    b *= (beta - i as f64) / (i + 1) as f64;
                }
                coef * b * c.powf(beta - m as f64)
            }
            (Antiderivative::PowerLog { coef, n }, last) => {
                let n_us = n as usize;
                if m <= n_us {
                    let mut b = 1.0;
                    for i in 0..m {
                        b *= (n_us - i) as f64 / (i + 1) as f64;
                    }
                    let harmonic: f64 = ((n_us - m + 1)..=n_us).map(|j| 1.0 / j as f64).sum();
                    coef * b * c.powi((n_us - m) as i32) * (c.ln() + harmonic)
                } else if let (Some(prev), true) = (last, m > n_us + 1) {
                    -prev * (m - 1 - n_us) as f64 / (m as f64 * c)
                } else {
                    // n! (-1)^{m-n-1} (m-n-1)! / m! · c^{n-m}
                    let j = m - n_us - 1;
                    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
                    let log_mag = ln_factorial(n) + ln_factorial(j as u32) - ln_factorial(m as u32);
                    coef * sign * log_mag.exp() * c.powi(n as i32 - m as i32)
                }
            }
        };
        self.last = Some(value);
        self.m += 1;
        Some(value)
    }
}

pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Divided difference `F[x₀,…,x_k]`; sorts `x` in place.
pub fn divided_difference(f: &Antiderivative, x: &mut [f64]) -> f64 {
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let mut table: Vec<f64> = x.iter().map(|&xi| f.value(xi)).collect();
    for m in 1..n {
        for i in 0..n - m {
            let (lo, hi) = (x[i], x[i + m]);
            let centre = 0.5 * (lo + hi);
            table[i] = if hi - lo <= TAYLOR_SPREAD * centre {
                taylor_block(f, &x[i..=i + m], centre)
            } else {
                (table[i + 1] - table[i]) / (hi - lo)
            };
        }
    }
    table[0]
}

/// `F[x_i..x_j] = Σ_q F^{(m+q)}(c)/(m+q)! · h_q(x - c)` with `h_q` the complete
/// homogeneous symmetric polynomials.
fn taylor_block(f: &Antiderivative, x: &[f64], centre: f64) -> f64 {
    let m = x.len() - 1;
    let y: Vec<f64> = x.iter().map(|&xi| xi - centre).collect();
    if y.iter().all(|&v| v == 0.0) {
        return f.taylor(centre, m).next().unwrap_or(0.0);
    }
    let mut h = vec![1.0; y.len()];
    let mut sum = 0.0;
    let mut small = 0;
    for (q, t) in f.taylor(centre, m).enumerate().take(MAX_TAYLOR_TERMS) {
        if q > 0 {
            let mut acc = 0.0;
            for (hv, &yv) in h.iter_mut().zip(&y) {
                acc += yv * *hv;
                *hv = acc;
            }
        }
        let term = t * h[y.len() - 1];
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || (t == 0.0 && q > 0) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

/// Lagrange form `Σ_i F(x_i) / Π_{j≠i}(x_i - x_j)`; only sensible for well-separated points.
pub fn lagrange_sum(f: &Antiderivative, x: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| {
            let denom: f64 = (0..x.len()).filter(|&j| j != i).map(|j| x[i] - x[j]).product();
            f.value(x[i]) / denom
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kth_derivative_check(alpha: f64, k: usize, x: f64) {
        // k-th forward divided difference at a single confluent point is F^{(k)}/k!.
        let f = Antiderivative::new(alpha, k);
        let mut pts = vec![x; k + 1];
        let dd = divided_difference(&f, &mut pts);
        let expect = x.powf(-alpha) / (1..=k).product::<usize>() as f64;
        assert!((dd - expect).abs() <= 1e-13 * expect.abs(), "{alpha} {k}: {dd} vs {expect}");
    }

    #[test]
    fn confluent_limit_is_scaled_power() {
        for k in 0..=6 {
            for &alpha in &[0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 5.0, 7.0] {
                kth_derivative_check(alpha, k, 1.7);
            }
        }
    }

    #[test]
    fn taylor_and_recursion_agree_near_threshold() {
        let f = Antiderivative::new(2.5, 3);
        let base = [1.0, 1.1, 1.2, 1.3];
        let mut a = base;
        let v1 = divided_difference(&f, &mut a);
        let v2 = lagrange_sum(&f, &base);
        assert!((v1 - v2).abs() < 1e-10 * v1.abs());
    }

    #[test]
    fn log_kernel_derivative() {
        // F = -x ln x / 1!… check F'' = x^{-1} for α=1, k=2: F = x ln x.
        let f = Antiderivative::new(1.0, 2);
        let h = 1e-3;
        let x = 2.0;
        let second = (f.value(x + h) - 2.0 * f.value(x) + f.value(x - h)) / (h * h);
        assert!((second - 0.5).abs() < 1e-6);
    }
}
