use super::HeatTraceSample;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Condition number above which the fit is refused.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub uncertainty: f64,
}

/// Coefficients `c_j` of `t^{d/2} Tr e^{-tP} ≈ Σ_j c_j t^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticFit {
    pub coefficients: Vec<Estimate>,
    pub condition_number: f64,
    /// Root-mean-square residual relative to the largest data value.
    pub relative_residual: f64,
    /// Share of the highest retained power at the largest `t`.
    pub highest_term_fraction: f64,
}

struct RawFit {
    coeffs: Vec<f64>,
    sigma: Vec<f64>,
    condition: f64,
    rms: f64,
}

fn solve(ts: &[f64], ys: &[f64], order: usize) -> Result<RawFit> {
    let tmax = ts.iter().cloned().fold(0.0, f64::max);
    let rows = ts.len();
    let cols = order + 1;
    let a = DMatrix::from_fn(rows, cols, |i, j| (ts[i] / tmax).powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::Fit(format!("design matrix condition number {condition:.3e}")));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &a * &x - &b;
    let dof = rows.saturating_sub(cols);
    let s2 = if dof > 0 { resid.norm_squared() / dof as f64 } else { 0.0 };
    let ata_inv = (a.transpose() * &a).try_inverse().ok_or_else(|| Error::Fit("normal matrix is singular".into()))?;
    Ok(RawFit {
        coeffs: (0..cols).map(|j| x[j] / tmax.powi(j as i32)).collect(),
        sigma: (0..cols).map(|j| (s2 * ata_inv[(j, j)]).sqrt() / tmax.powi(j as i32)).collect(),
        condition,
        rms: (resid.norm_squared() / rows as f64).sqrt(),
    })
}

/// Least-squares fit of `t^{d/2}·trace` against `1, t, …, t^order`.
///
/// The uncertainty of each coefficient is the larger of the residual-based
/// standard error and its change when one or two more powers are fitted
/// (when the samples allow it).
pub fn fit_asymptotics(samples: &[HeatTraceSample], d: usize, order: usize) -> Result<AsymptoticFit> {
    if samples.len() < order + 2 {
        return Err(Error::Fit(format!("{} samples cannot support order {order}", samples.len())));
    }
    if let Some(s) = samples.iter().find(|s| !(s.t > 0.0 && s.trace > 0.0)) {
        return Err(Error::Fit(format!("invalid sample t = {}, trace = {}", s.t, s.trace)));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.t.powf(d as f64 / 2.0) * s.trace).collect();
    let main = solve(&ts, &ys, order)?;
    let richer: Vec<RawFit> =
        (order + 1..=order + 2).filter(|&o| ts.len() > o + 1).filter_map(|o| solve(&ts, &ys, o).ok()).collect();
    let coefficients = (0..=order)
        .map(|j| {
            let shift = richer.iter().map(|r| (r.coeffs[j] - main.coeffs[j]).abs()).fold(0.0, f64::max);
            Estimate { value: main.coeffs[j], uncertainty: main.sigma[j].max(shift) }
        })
        .collect();
    let ymax = ys.iter().cloned().fold(0.0, f64::max);
    let tmax = ts.iter().cloned().fold(0.0, f64::max);
    Ok(AsymptoticFit {
        coefficients,
        condition_number: main.condition,
        relative_residual: main.rms / ymax,
        highest_term_fraction: (main.coeffs[order] * tmax.powi(order as i32)).abs() / ymax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64, d: usize) -> Vec<HeatTraceSample> {
        (0..12)
            .map(|i| {
                let t = 0.02 * 1.2f64.powi(i);
                HeatTraceSample { t, trace: f(t) / t.powf(d as f64 / 2.0), truncation_bound: 0.0 }
            })
            .collect()
    }

    #[test]
    fn recovers_exact_polynomial() {
        let s = samples(|t| 3.0 + 0.5 * t, 4);
        let fit = fit_asymptotics(&s, 4, 1).unwrap();
        assert!((fit.coefficients[0].value - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_covers_model_error() {
        let s = samples(|t| 1.0 + t + (2.0 * t).exp() * 0.1, 2);
        let fit = fit_asymptotics(&s, 2, 3).unwrap();
        let truth = 1.0 + 0.2;
        assert!((fit.coefficients[1].value - truth).abs() <= 3.0 * fit.coefficients[1].uncertainty + 1e-9);
    }

    #[test]
    fn too_few_samples_fail() {
        let s = samples(|t| t, 2);
        assert!(matches!(fit_asymptotics(&s[..3], 2, 2), Err(Error::Fit(_))));
    }
}
