//! Lagrange-type sums over distinct complex nodes.

use crate::error::{invalid, Result};
use num_complex::Complex64;

/// `w_n = Π_{m≠n} (a_n - a_m)^{-1}`.
pub fn lagrange_weights(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let scale = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    a.iter()
        .enumerate()
        .map(|(n, an)| {
            let mut p = Complex64::new(1.0, 0.0);
            for (m, am) in a.iter().enumerate() {
                if m != n {
                    let diff = an - am;
                    if diff.norm() <= 1e-14 * scale {
                        return invalid(format!("nodes {n} and {m} coincide"));
                    }
                    p *= diff;
                }
            }
            Ok(p.inv())
        })
        .collect()
}

/// `Σ_n a_n^s Π_{m≠n} (a_n - a_m)^{-1}`: zero for `s < r`, one for `s = r`
/// where `r + 1` is the number of nodes.
pub fn power_sum(a: &[Complex64], s: u32) -> Result<Complex64> {
    let w = lagrange_weights(a)?;
    Ok(a.iter().zip(&w).map(|(an, wn)| an.powu(s) * wn).sum())
}

/// `Π_m (z - a_m)^{-1}`.
pub fn inverse_product(z: Complex64, a: &[Complex64]) -> Result<Complex64> {
    let mut p = Complex64::new(1.0, 0.0);
    for am in a {
        p *= z - am;
    }
    if p.norm() == 0.0 {
        return invalid("z coincides with a node");
    }
    Ok(p.inv())
}

/// `Σ_n (z - a_n)^{-1} Π_{m≠n} (a_n - a_m)^{-1}`, the partial-fraction form of
/// [`inverse_product`].
pub fn partial_fraction_sum(z: Complex64, a: &[Complex64]) -> Result<Complex64> {
    let w = lagrange_weights(a)?;
    a.iter().zip(&w).try_fold(Complex64::new(0.0, 0.0), |acc, (an, wn)| {
        let diff = z - an;
        if diff.norm() == 0.0 {
            return invalid("z coincides with a node");
        }
        Ok(acc + wn / diff)
    })
}
