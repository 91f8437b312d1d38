use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;

use super::geometry::{christoffel, scalar_curvature};
use super::jet::{InvariantCoefficients, OperatorCoefficients, PointJet};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, MatrixN};
use crate::tensor::SpectralData;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_dim(jet: &PointJet, d: usize, what: &str) -> Result<()> {
    if jet.dim() != d {
        return invalid(format!("{what} is only available for d = {d}, got d = {}", jet.dim()));
    }
    Ok(())
}

/// Metric traces `t_ν = g_{ρσ} ∂_ν g^{ρσ}`.
fn metric_traces(jet: &PointJet, l: &DMatrix<f64>) -> Vec<f64> {
    jet.dg.iter().map(|dg| l.component_mul(dg).sum()).collect()
}

/// Divergences `δ^ν = ∂_μ g^{μν}`.
fn metric_divergence(jet: &PointJet) -> Vec<f64> {
    let d = jet.dim();
    (0..d).map(|nu| (0..d).map(|mu| jet.dg[mu][(mu, nu)]).sum()).collect()
}

/// `a₀ = g_d tr(u^{-d/2})`.
pub fn a0_local(jet: &PointJet, u: &MatrixN) -> Result<f64> {
    jet.validate()?;
    let sd = SpectralData::new(u)?;
    let d = jet.dim() as f64;
    Ok(jet.volume_factor() * sd.map(|l| l.powf(-d / 2.0)).trace().re)
}

/// Scalar metric part `α` of `a₁` in four dimensions.
fn metric_alpha(jet: &PointJet) -> f64 {
    let d = jet.dim();
    let g = &jet.g;
    let l = jet.g_lower();
    let dg = &jet.dg;
    let t = metric_traces(jet, &l);
    let div = metric_divergence(jet);
    let mut a = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            a += jet.ddg[mu][nu][(mu, nu)] / 3.0;
            a -= g[(mu, nu)] * l.component_mul(&jet.ddg[mu][nu]).sum() / 12.0;
            a += g[(mu, nu)] * t[mu] * t[nu] / 48.0;
            a += g[(mu, nu)] * (&l * &dg[mu] * &l * &dg[nu]).trace() / 24.0;
            let mut s = 0.0;
            for rho in 0..d {
                for sig in 0..d {
                    s += l[(rho, sig)] * dg[mu][(nu, rho)] * dg[nu][(mu, sig)];
                }
            }
            a += s / 12.0;
        }
    }
    for nu in 0..d {
        a -= div[nu] * t[nu] / 12.0;
    }
    for rho in 0..d {
        for sig in 0..d {
            a -= 0.25 * l[(rho, sig)] * div[rho] * div[sig];
        }
    }
    a
}

/// Closed four-dimensional `a₁` in terms of `(u, v^μ, w)`:
/// `g₄ (α tr u⁻¹ + tr(u⁻² ℓ))`.
pub fn a1_local_raw(jet: &PointJet, coeffs: &OperatorCoefficients) -> Result<Complex64> {
    jet.validate()?;
    require_dim(jet, 4, "the closed a₁ formula")?;
    coeffs.validate(4)?;
    let d = 4;
    let ui = linalg::inverse(&coeffs.u)?;
    let ui2 = &ui * &ui;
    let l = jet.g_lower();
    let div = metric_divergence(jet);
    let mut ell = coeffs.w.clone();
    for mu in 0..d {
        let gv: f64 = (0..d).map(|nu| l[(mu, nu)] * div[nu]).sum();
        ell += &coeffs.v[mu] * c(0.5 * gv);
        ell -= &coeffs.dv[mu][mu] * c(0.5);
        for nu in 0..d {
            ell -= &coeffs.v[mu] * &ui * &coeffs.v[nu] * c(0.25 * l[(mu, nu)]);
        }
        ell += &coeffs.du[mu] * &ui * &coeffs.v[mu] * c(0.5);
    }
    let value = c(metric_alpha(jet)) * ui.trace() + (&ui2 * ell).trace();
    Ok(value * jet.volume_factor())
}

/// `c^μ = -½ g^{μν} g_{ρσ} ∂_ν g^{ρσ} + ∂_ν g^{μν}` and its first derivatives.
fn metric_drift(jet: &PointJet) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = jet.dim();
    let l = jet.g_lower();
    let dl = jet.dg_lower();
    let t = metric_traces(jet, &l);
    let drift: Vec<f64> =
        (0..d).map(|mu| (0..d).map(|nu| -0.5 * jet.g[(mu, nu)] * t[nu] + jet.dg[nu][(mu, nu)]).sum()).collect();
    // ∂_λ t_ν = ∂_λ g_{ρσ} ∂_ν g^{ρσ} + g_{ρσ} ∂_λ∂_ν g^{ρσ}
    let dt =
        |lam: usize, nu: usize| dl[lam].component_mul(&jet.dg[nu]).sum() + l.component_mul(&jet.ddg[lam][nu]).sum();
    let ddrift: Vec<Vec<f64>> = (0..d)
        .map(|lam| {
            (0..d)
                .map(|mu| {
                    (0..d)
                        .map(|nu| {
                            -0.5 * (jet.dg[lam][(mu, nu)] * t[nu] + jet.g[(mu, nu)] * dt(lam, nu))
                                + jet.ddg[lam][nu][(mu, nu)]
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    (drift, ddrift)
}

/// `(u, A_μ, p^μ, q) ↦ (u, v^μ, w)` with all derivatives needed by `a₁`.
pub fn change_variables(jet: &PointJet, inv: &InvariantCoefficients) -> Result<OperatorCoefficients> {
    jet.validate()?;
    let d = jet.dim();
    inv.validate(d)?;
    let (drift, ddrift) = metric_drift(jet);
    let g = &jet.g;
    let u = &inv.u;
    let sym = |x: &MatrixN, y: &MatrixN, z: &MatrixN| x * y * z;
    let mut v = Vec::with_capacity(d);
    let mut dv = vec![Vec::with_capacity(d); d];
    for mu in 0..d {
        let mut vm = u * c(drift[mu]) + &inv.p[mu];
        for nu in 0..d {
            vm += (&inv.du[nu] + u * &inv.a[nu] + &inv.a[nu] * u) * c(g[(mu, nu)]);
        }
        v.push(vm);
    }
    for lam in 0..d {
        for mu in 0..d {
            let mut x = u * c(ddrift[lam][mu]) + &inv.du[lam] * c(drift[mu]) + &inv.dp[lam][mu];
            for nu in 0..d {
                let inner = &inv.du[nu] + u * &inv.a[nu] + &inv.a[nu] * u;
                let dinner = &inv.ddu[lam][nu]
                    + &inv.du[lam] * &inv.a[nu]
                    + u * &inv.da[lam][nu]
                    + &inv.da[lam][nu] * u
                    + &inv.a[nu] * &inv.du[lam];
                x += inner * c(jet.dg[lam][(mu, nu)]) + dinner * c(g[(mu, nu)]);
            }
            dv[lam].push(x);
        }
    }
    let mut w = inv.q.clone();
    for mu in 0..d {
        w += u * &inv.a[mu] * c(drift[mu]) + &inv.p[mu] * &inv.a[mu];
        for nu in 0..d {
            w += (&inv.du[nu] * &inv.a[mu] + u * &inv.da[mu][nu] + sym(&inv.a[mu], u, &inv.a[nu])) * c(g[(mu, nu)]);
        }
    }
    Ok(OperatorCoefficients { u: u.clone(), du: inv.du.clone(), ddu: inv.ddu.clone(), v, dv, w })
}

/// Four-dimensional `a₁` in gauge- and diffeomorphism-covariant form.
pub fn a1_local_invariant(jet: &PointJet, inv: &InvariantCoefficients) -> Result<Complex64> {
    jet.validate()?;
    require_dim(jet, 4, "the covariant a₁ formula")?;
    inv.validate(4)?;
    let d = 4;
    let g = &jet.g;
    let l = jet.g_lower();
    let gam = christoffel(jet);
    let u = &inv.u;
    let ui = linalg::inverse(u)?;
    let ui2 = &ui * &ui;
    let nabla_u: Vec<MatrixN> = (0..d).map(|mu| &inv.du[mu] + linalg::commutator(&inv.a[mu], u)).collect();
    let mut total = c(scalar_curvature(jet) / 6.0) * ui.trace() + (&ui2 * &inv.q).trace();
    // -½ g^{μν} tr(u⁻² ∇̂_μ∇̂_ν u)
    let mut lap = linalg::zeros(u.nrows());
    for mu in 0..d {
        for nu in 0..d {
            if g[(mu, nu)] == 0.0 {
                continue;
            }
            let mut x = &inv.ddu[mu][nu]
                + linalg::commutator(&inv.da[mu][nu], u)
                + linalg::commutator(&inv.a[nu], &inv.du[mu])
                + linalg::commutator(&inv.a[mu], &nabla_u[nu]);
            for rho in 0..d {
                x -= &nabla_u[rho] * c(gam[rho][(mu, nu)]);
            }
            lap += x * c(g[(mu, nu)]);
        }
    }
    total -= (&ui2 * lap).trace() * 0.5;
    // -½ tr(u⁻² ∇̂_μ p^μ)
    let mut div_p = linalg::zeros(u.nrows());
    for mu in 0..d {
        div_p += &inv.dp[mu][mu] + linalg::commutator(&inv.a[mu], &inv.p[mu]);
        for nu in 0..d {
            div_p += &inv.p[nu] * c(gam[mu][(mu, nu)]);
        }
    }
    total -= (&ui2 * div_p).trace() * 0.5;
    // ¼ g^{μν} tr(u⁻² (∇̂_μ u - g_{μρ}p^ρ) u⁻¹ (∇̂_ν u + g_{νσ}p^σ))
    let lowered: Vec<MatrixN> = (0..d)
        .map(|mu| (0..d).fold(linalg::zeros(u.nrows()), |acc, rho| acc + &inv.p[rho] * c(l[(mu, rho)])))
        .collect();
    for mu in 0..d {
        for nu in 0..d {
            if g[(mu, nu)] == 0.0 {
                continue;
            }
            let left = &nabla_u[mu] - &lowered[mu];
            let right = &nabla_u[nu] + &lowered[nu];
            total += (&ui2 * left * &ui * right).trace() * (0.25 * g[(mu, nu)]);
        }
    }
    Ok(total * jet.volume_factor())
}

/// Four-dimensional `a₁` for `u = f·1_N` with `p = 0`.
pub fn a1_scalar_symbol(jet: &PointJet, f: f64, df: &[f64], ddf: &[Vec<f64>], q: &MatrixN) -> Result<Complex64> {
    jet.validate()?;
    require_dim(jet, 4, "the scalar-symbol a₁ formula")?;
    if !(f > 0.0) {
        return Err(Error::NonPositive(f));
    }
    if df.len() != 4 || ddf.len() != 4 || ddf.iter().any(|r| r.len() != 4) {
        return Err(Error::Shape("df needs 4 entries and ddf 4x4".into()));
    }
    let n = linalg::ensure_square(q, "q")? as f64;
    let gam = christoffel(jet);
    let mut s = n / 6.0 / f * scalar_curvature(jet);
    for mu in 0..4 {
        for nu in 0..4 {
            let g = jet.g[(mu, nu)];
            let gdf: f64 = (0..4).map(|rho| gam[rho][(mu, nu)] * df[rho]).sum();
            s += n * g * (-0.5 * ddf[mu][nu] / (f * f) + 0.5 * gdf / (f * f) + 0.25 * df[mu] * df[nu] / f.powi(3));
        }
    }
    Ok((c(s) + q.trace() / (f * f)) * jet.volume_factor())
}

/// `X̂(σ) = X^{μν} σ_μ σ_ν`.
pub fn normalized_symbol(x: &[Vec<MatrixN>], sigma: &[f64]) -> MatrixN {
    let n = x[0][0].nrows();
    let mut out = linalg::zeros(n);
    for (mu, row) in x.iter().enumerate() {
        for (nu, m) in row.iter().enumerate() {
            out += m * c(sigma[mu] * sigma[nu]);
        }
    }
    out
}

/// Check `X̂(σ)² = X̂(σ)` on `g`-unit covectors: axes, pairwise diagonals and
/// a fixed pseudo-random sample.
pub fn check_projector_symbol(jet: &PointJet, x: &[Vec<MatrixN>], tol: f64) -> Result<()> {
    use rand::Rng;
    let d = jet.dim();
    if x.len() != d || x.iter().any(|r| r.len() != d) {
        return Err(Error::Shape(format!("X must be a {d}x{d} array of matrices")));
    }
    let n = linalg::ensure_square(&x[0][0], "X")?;
    for m in x.iter().flatten() {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Shape("all X^{μν} must share one size".into()));
        }
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for a in 0..d {
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        dirs.push(e);
        for b in 0..a {
            let mut e = vec![0.0; d];
            e[a] = 1.0;
            e[b] = -0.7;
            dirs.push(e);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..16 {
        dirs.push((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    let mut worst: f64 = 0.0;
    for s in dirs {
        let norm2: f64 =
            (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| jet.g[(a, b)] * s[a] * s[b]).sum();
        let s: Vec<f64> = s.iter().map(|v| v / norm2.sqrt()).collect();
        let xh = normalized_symbol(x, &s);
        worst = worst.max(linalg::max_abs(&(&xh * &xh - &xh)));
    }
    if worst > tol {
        return Err(Error::NotIdempotent(worst));
    }
    Ok(())
}

/// `a₀` for `u^{μν} = g^{μν} 1 + ζ X^{μν}` with `X̂(σ)` a projector on the unit sphere.
pub fn a0_projector_case(jet: &PointJet, zeta: f64, x: &[Vec<MatrixN>]) -> Result<f64> {
    jet.validate()?;
    if !(zeta > -1.0) {
        return invalid(format!("ζ = {zeta} must exceed -1 for ellipticity"));
    }
    check_projector_symbol(jet, x, 1e-9)?;
    let d = jet.dim();
    let n = x[0][0].nrows() as f64;
    let l = jet.g_lower();
    let mut tr = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            tr += l[(mu, nu)] * x[mu][nu].trace().re;
        }
    }
    Ok(jet.volume_factor() * (n + tr / d as f64 * ((1.0 + zeta).powf(-(d as f64) / 2.0) - 1.0)))
}

/// The spin-one example `(X^{αβ})^μ_ν = ½(g^{μα}δ^β_ν + g^{μβ}δ^α_ν)` with `X̂(σ)^μ_ν = σ^μ σ_ν`.
pub fn vector_projector_symbol(jet: &PointJet) -> Vec<Vec<MatrixN>> {
    let d = jet.dim();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    MatrixN::from_fn(d, d, |mu, nu| {
                        let x = 0.5
                            * (jet.g[(mu, a)] * if b == nu { 1.0 } else { 0.0 }
                                + jet.g[(mu, b)] * if a == nu { 1.0 } else { 0.0 });
                        c(x)
                    })
                })
                .collect()
        })
        .collect()
}

/// Input to [`selfadjoint_from`]: `u` with its jets, skew-adjoint `ṽ^μ` with first
/// derivatives, and self-adjoint `w̃`.
#[derive(Clone, Debug)]
pub struct SelfAdjointData {
    pub u: MatrixN,
    pub du: Vec<MatrixN>,
    pub ddu: Vec<Vec<MatrixN>>,
    pub vt: Vec<MatrixN>,
    /// `dvt[c][μ] = ∂_c ṽ^μ`.
    pub dvt: Vec<Vec<MatrixN>>,
    pub wt: MatrixN,
}

/// Coefficients of the formally self-adjoint operator built from `(u, ṽ, w̃)`
/// with `u^{μν} = g^{μν} u`.
pub fn selfadjoint_from(jet: &PointJet, data: &SelfAdjointData) -> Result<OperatorCoefficients> {
    jet.validate()?;
    let d = jet.dim();
    linalg::ensure_square(&data.u, "u")?;
    linalg::ensure_hermitian(&data.u, 1e-10)?;
    linalg::ensure_hermitian(&data.wt, 1e-10)?;
    for v in &data.vt {
        if linalg::max_abs(&(v + v.adjoint())) > 1e-10 * (1.0 + linalg::max_abs(v)) {
            return invalid("ṽ^μ must be skew-adjoint");
        }
    }
    let probe = OperatorCoefficients {
        u: data.u.clone(),
        du: data.du.clone(),
        ddu: data.ddu.clone(),
        v: data.vt.clone(),
        dv: data.dvt.clone(),
        w: data.wt.clone(),
    };
    probe.validate(d)?;
    let l = jet.g_lower();
    let dl = jet.dg_lower();
    // ∂_ν log|g|^{1/2} = -½ g_{ρσ} ∂_ν g^{ρσ}
    let lg: Vec<f64> = metric_traces(jet, &l).iter().map(|t| -0.5 * t).collect();
    let dlg = |lam: usize, nu: usize| {
        -0.5 * (dl[lam].component_mul(&jet.dg[nu]).sum() + l.component_mul(&jet.ddg[lam][nu]).sum())
    };
    let u = &data.u;
    let mut v = Vec::with_capacity(d);
    for mu in 0..d {
        let mut x = data.vt[mu].clone();
        for nu in 0..d {
            x += u * c(lg[nu] * jet.g[(mu, nu)] + jet.dg[nu][(mu, nu)]) + &data.du[nu] * c(jet.g[(mu, nu)]);
        }
        v.push(x);
    }
    let mut dv = vec![Vec::with_capacity(d); d];
    for lam in 0..d {
        for mu in 0..d {
            let mut x = data.dvt[lam][mu].clone();
            for nu in 0..d {
                let g = jet.g[(mu, nu)];
                let dg = jet.dg[lam][(mu, nu)];
                x += u * c(dlg(lam, nu) * g + lg[nu] * dg + jet.ddg[lam][nu][(mu, nu)])
                    + &data.du[lam] * c(lg[nu] * g + jet.dg[nu][(mu, nu)])
                    + &data.du[nu] * c(dg)
                    + &data.ddu[lam][nu] * c(g);
            }
            dv[lam].push(x);
        }
    }
    let mut w = data.wt.clone();
    for mu in 0..d {
        w += (&data.vt[mu] * c(lg[mu]) + &data.dvt[mu][mu]) * c(0.5);
    }
    Ok(OperatorCoefficients { u: u.clone(), du: data.du.clone(), ddu: data.ddu.clone(), v, dv, w })
}

/// Jet of a gauge transformation `γ(x)`.
#[derive(Clone, Debug)]
pub struct GaugeJet {
    pub gamma: MatrixN,
    pub dgamma: Vec<MatrixN>,
    pub ddgamma: Vec<Vec<MatrixN>>,
}

/// `∂_c(ABC)` from the factors and their derivatives.
fn d_triple(a: &MatrixN, da: &MatrixN, b: &MatrixN, db: &MatrixN, x: &MatrixN, dx: &MatrixN) -> MatrixN {
    da * b * x + a * db * x + a * b * dx
}

/// `P ↦ γ P γ⁻¹` expressed on `(u, v^μ, w)` and their jets.
pub fn gauge_transform(jet: &PointJet, co: &OperatorCoefficients, gj: &GaugeJet) -> Result<OperatorCoefficients> {
    jet.validate()?;
    let d = jet.dim();
    co.validate(d)?;
    let gi = linalg::inverse(&gj.gamma)?;
    let g0 = &gj.gamma;
    let dg = &gj.dgamma;
    let ddg = &gj.ddgamma;
    let dgi: Vec<MatrixN> = dg.iter().map(|x| -(&gi * x * &gi)).collect();
    let ddgi: Vec<Vec<MatrixN>> = (0..d)
        .map(|a| (0..d).map(|b| -(&dgi[b] * &dg[a] * &gi) - &gi * &ddg[a][b] * &gi - &gi * &dg[a] * &dgi[b]).collect())
        .collect();
    let u = &co.u;
    let u2 = g0 * u * &gi;
    let du2: Vec<MatrixN> = (0..d).map(|a| d_triple(g0, &dg[a], u, &co.du[a], &gi, &dgi[a])).collect();
    let ddu2: Vec<Vec<MatrixN>> = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    &ddg[a][b] * u * &gi
                        + g0 * &co.ddu[a][b] * &gi
                        + g0 * u * &ddgi[a][b]
                        + &dg[a] * &co.du[b] * &gi
                        + &dg[b] * &co.du[a] * &gi
                        + &dg[a] * u * &dgi[b]
                        + &dg[b] * u * &dgi[a]
                        + g0 * &co.du[a] * &dgi[b]
                        + g0 * &co.du[b] * &dgi[a]
                })
                .collect()
        })
        .collect();
    let g = &jet.g;
    let mut v2 = Vec::with_capacity(d);
    for mu in 0..d {
        let mut x = g0 * &co.v[mu] * &gi;
        for nu in 0..d {
            x += g0 * u * &dgi[nu] * c(2.0 * g[(mu, nu)]);
        }
        v2.push(x);
    }
    let mut dv2 = vec![Vec::with_capacity(d); d];
    for lam in 0..d {
        for mu in 0..d {
            let mut x = d_triple(g0, &dg[lam], &co.v[mu], &co.dv[lam][mu], &gi, &dgi[lam]);
            for nu in 0..d {
                x += g0 * u * &dgi[nu] * c(2.0 * jet.dg[lam][(mu, nu)]);
                x += d_triple(g0, &dg[lam], u, &co.du[lam], &dgi[nu], &ddgi[lam][nu]) * c(2.0 * g[(mu, nu)]);
            }
            dv2[lam].push(x);
        }
    }
    let mut w2 = g0 * &co.w * &gi;
    for mu in 0..d {
        w2 += g0 * &co.v[mu] * &dgi[mu];
        for nu in 0..d {
            w2 += g0 * u * &ddgi[mu][nu] * c(g[(mu, nu)]);
        }
    }
    Ok(OperatorCoefficients { u: u2, du: du2, ddu: ddu2, v: v2, dv: dv2, w: w2 })
}

/// Pull the data back along the linear change of coordinates `x' = J x`.
/// Densities transform as `a'(x') = a(x) / |det J|`.
pub fn linear_coordinate_change(
    jet: &PointJet,
    co: &OperatorCoefficients,
    j: &DMatrix<f64>,
) -> Result<(PointJet, OperatorCoefficients)> {
    let d = jet.dim();
    if j.nrows() != d || j.ncols() != d {
        return Err(Error::Shape(format!("Jacobian must be {d}x{d}")));
    }
    let k = linalg::inverse_real(j)?;
    let g = j * &jet.g * j.transpose();
    let dg: Vec<DMatrix<f64>> = (0..d)
        .map(|cc| (0..d).fold(DMatrix::zeros(d, d), |acc, a| acc + (j * &jet.dg[a] * j.transpose()) * k[(a, cc)]))
        .collect();
    let ddg: Vec<Vec<DMatrix<f64>>> = (0..d)
        .map(|c1| {
            (0..d)
                .map(|c2| {
                    let mut m = DMatrix::zeros(d, d);
                    for a in 0..d {
                        for b in 0..d {
                            m += (j * &jet.ddg[a][b] * j.transpose()) * (k[(a, c1)] * k[(b, c2)]);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let n = co.u.nrows();
    let mix1 = |list: &[MatrixN]| -> Vec<MatrixN> {
        (0..d).map(|cc| (0..d).fold(linalg::zeros(n), |acc, a| acc + &list[a] * c(k[(a, cc)]))).collect()
    };
    let vec_push = |list: &[MatrixN]| -> Vec<MatrixN> {
        (0..d).map(|mu| (0..d).fold(linalg::zeros(n), |acc, a| acc + &list[a] * c(j[(mu, a)]))).collect()
    };
    let ddu: Vec<Vec<MatrixN>> = {
        let first: Vec<Vec<MatrixN>> = co.ddu.iter().map(|row| mix1(row)).collect();
        (0..d)
            .map(|c1| {
                (0..d).map(|c2| (0..d).fold(linalg::zeros(n), |acc, a| acc + &first[a][c2] * c(k[(a, c1)]))).collect()
            })
            .collect()
    };
    let dv: Vec<Vec<MatrixN>> = {
        let pushed: Vec<Vec<MatrixN>> = co.dv.iter().map(|row| vec_push(row)).collect();
        (0..d)
            .map(|cc| {
                (0..d).map(|mu| (0..d).fold(linalg::zeros(n), |acc, a| acc + &pushed[a][mu] * c(k[(a, cc)]))).collect()
            })
            .collect()
    };
    Ok((
        PointJet { g, dg, ddg },
        OperatorCoefficients { u: co.u.clone(), du: mix1(&co.du), ddu, v: vec_push(&co.v), dv, w: co.w.clone() },
    ))
}
