//! Christoffel symbols and curvature from a metric jet.
//!
//! Conventions: `R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ} Γ^λ_{νσ} - Γ^ρ_{νλ} Γ^λ_{μσ}`,
//! `R_{σν} = R^ρ_{σρν}`, `R = g^{σν} R_{σν}`; the round sphere has `R > 0`.

use nalgebra::DMatrix;

use super::jet::PointJet;

/// `gamma[ρ][(μ, ν)] = Γ^ρ_{μν}`.
pub fn christoffel(jet: &PointJet) -> Vec<DMatrix<f64>> {
    let d = jet.dim();
    let dl = jet.dg_lower();
    (0..d)
        .map(|rho| {
            DMatrix::from_fn(d, d, |mu, nu| {
                0.5 * (0..d)
                    .map(|s| jet.g[(rho, s)] * (dl[mu][(s, nu)] + dl[nu][(s, mu)] - dl[s][(mu, nu)]))
                    .sum::<f64>()
            })
        })
        .collect()
}

/// `dgamma[λ][ρ][(μ, ν)] = ∂_λ Γ^ρ_{μν}`.
pub fn christoffel_derivative(jet: &PointJet) -> Vec<Vec<DMatrix<f64>>> {
    let d = jet.dim();
    let dl = jet.dg_lower();
    let ddl = jet.ddg_lower();
    (0..d)
        .map(|lam| {
            (0..d)
                .map(|rho| {
                    DMatrix::from_fn(d, d, |mu, nu| {
                        0.5 * (0..d)
                            .map(|s| {
                                jet.dg[lam][(rho, s)] * (dl[mu][(s, nu)] + dl[nu][(s, mu)] - dl[s][(mu, nu)])
                                    + jet.g[(rho, s)]
                                        * (ddl[lam][mu][(s, nu)] + ddl[lam][nu][(s, mu)] - ddl[lam][s][(mu, nu)])
                            })
                            .sum::<f64>()
                    })
                })
                .collect()
        })
        .collect()
}

/// `riemann[ρ][σ][μ][ν] = R^ρ_{σμν}`.
pub fn riemann(jet: &PointJet) -> Vec<Vec<Vec<Vec<f64>>>> {
    let d = jet.dim();
    let gam = christoffel(jet);
    let dgam = christoffel_derivative(jet);
    let mut out = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for rho in 0..d {
        for sig in 0..d {
            for mu in 0..d {
                for nu in 0..d {
                    let mut r = dgam[mu][rho][(nu, sig)] - dgam[nu][rho][(mu, sig)];
                    for l in 0..d {
                        r += gam[rho][(mu, l)] * gam[l][(nu, sig)] - gam[rho][(nu, l)] * gam[l][(mu, sig)];
                    }
                    out[rho][sig][mu][nu] = r;
                }
            }
        }
    }
    out
}

/// Scalar curvature by contracting the Riemann tensor.
pub fn scalar_curvature_from_riemann(jet: &PointJet) -> f64 {
    let d = jet.dim();
    let riem = riemann(jet);
    let mut r = 0.0;
    for sig in 0..d {
        for nu in 0..d {
            let ric: f64 = (0..d).map(|rho| riem[rho][sig][rho][nu]).sum();
            r += jet.g[(sig, nu)] * ric;
        }
    }
    r
}

/// Scalar curvature written directly in the jets of `g^{μν}`.
pub fn scalar_curvature(jet: &PointJet) -> f64 {
    let d = jet.dim();
    let g = &jet.g;
    let l = jet.g_lower();
    let dg = &jet.dg;
    let ddg = &jet.ddg;
    let mut r = 0.0;
    // g^{μν} g_{ρσ} ∂_μ∂_ν g^{ρσ} - ∂_μ∂_ν g^{μν}
    for mu in 0..d {
        for nu in 0..d {
            r += g[(mu, nu)] * l.component_mul(&ddg[mu][nu]).sum();
            r -= ddg[mu][nu][(mu, nu)];
        }
    }
    // traces t_ν = g_{ρσ} ∂_ν g^{ρσ}, divergences δ^ν = ∂_μ g^{μν}
    let t: Vec<f64> = (0..d).map(|nu| l.component_mul(&dg[nu]).sum()).collect();
    let div: Vec<f64> = (0..d).map(|nu| (0..d).map(|mu| dg[mu][(mu, nu)]).sum()).collect();
    for nu in 0..d {
        r += div[nu] * t[nu];
    }
    for mu in 0..d {
        for nu in 0..d {
            // ½ g_{ρσ} ∂_μ g^{νρ} ∂_ν g^{μσ}
            let mut s = 0.0;
            for rho in 0..d {
                for sig in 0..d {
                    s += l[(rho, sig)] * dg[mu][(nu, rho)] * dg[nu][(mu, sig)];
                }
            }
            r += 0.5 * s;
            // -¼ g^{μν} t_μ t_ν
            r -= 0.25 * g[(mu, nu)] * t[mu] * t[nu];
            // -5/4 g^{μν} g_{ρσ} g_{αβ} ∂_μ g^{ρα} ∂_ν g^{σβ} = -5/4 g^{μν} tr(L dg_μ L dg_ν)
            r -= 1.25 * g[(mu, nu)] * (&l * &dg[mu] * &l * &dg[nu]).trace();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Stereographic chart of the round 2-sphere of radius `rho`: `g^{ij} = (ρ²+|x|²)²/(4ρ⁴) δ^{ij}`.
    pub(crate) fn sphere_jet(rho: f64, x: [f64; 2]) -> PointJet {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let s = rho * rho + r2;
        let k = 1.0 / (4.0 * rho.powi(4));
        let f = k * s * s;
        let df = [4.0 * k * s * x[0], 4.0 * k * s * x[1]];
        let ddf = |i: usize, j: usize| 8.0 * k * x[i] * x[j] + if i == j { 4.0 * k * s } else { 0.0 };
        let id = DMatrix::<f64>::identity(2, 2);
        PointJet {
            g: &id * f,
            dg: (0..2).map(|c| &id * df[c]).collect(),
            ddg: (0..2).map(|c| (0..2).map(|e| &id * ddf(c, e)).collect()).collect(),
        }
    }

    #[test]
    fn sphere_curvature() {
        for (rho, x) in [(1.0, [0.0, 0.0]), (1.7, [0.3, -0.8]), (0.6, [1.2, 0.4])] {
            let jet = sphere_jet(rho, x);
            let expect = 2.0 / (rho * rho);
            assert!((scalar_curvature(&jet) - expect).abs() < 1e-12);
            assert!((scalar_curvature_from_riemann(&jet) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_riemann_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for d in 2..=5 {
            let jet = PointJet::random(&mut rng, d, 0.4);
            let a = scalar_curvature(&jet);
            let b = scalar_curvature_from_riemann(&jet);
            assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "d={d}: {a} vs {b}");
        }
    }
}
