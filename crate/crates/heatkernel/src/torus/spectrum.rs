use super::{TorusFields, TorusModel, MAX_BLOCK_DIM};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, MatrixN, I};
use num_complex::Complex64;
use std::collections::HashMap;

/// `Tr e^{-tP}` over the retained modes with a bound on the discarded ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTraceSample {
    pub t: f64,
    pub trace: f64,
    pub truncation_bound: f64,
}

fn check_times(ts: &[f64]) -> Result<()> {
    match ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        Some(t) => Err(Error::NonPositive(*t)),
        None => Ok(()),
    }
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Eigenvalues of a Hermitian 2x2 block given by its upper triangle.
fn eigen2(a: f64, d: f64, b: Complex64) -> [f64; 2] {
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [m - r, m + r]
}

/// Sum over the momentum blocks `B(k) = u|k|² - i v^μ k_μ - w`, `k ∈ (2π/L)ℤ^d`.
pub fn heat_trace_constant(model: &TorusModel, ts: &[f64]) -> Result<Vec<HeatTraceSample>> {
    let TorusFields::Constant(c) = &model.fields else {
        return invalid("heat_trace_constant needs constant coefficients");
    };
    model.validate()?;
    check_times(ts)?;
    let d = model.d;
    let n = c.u.nrows();
    let kmax = model.cutoff as i64;
    let side = (2 * kmax + 1) as usize;
    let unit = model.momentum_unit();
    let per_slab = side.pow(d as u32 - 1);
    let mut slabs: Vec<Vec<f64>> = vec![Vec::with_capacity(side); ts.len()];
    let mut acc = vec![0.0; ts.len()];
    let mut k = vec![0.0; d];
    let mut block = linalg::zeros(n);
    for first in -kmax..=kmax {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for idx in 0..per_slab {
            let mut rest = idx;
            k[0] = unit * first as f64;
            for kk in k.iter_mut().skip(1) {
                *kk = unit * ((rest % side) as i64 - kmax) as f64;
                rest /= side;
            }
            let ksq: f64 = k.iter().map(|x| x * x).sum();
            let mut eval = |lam: f64| {
                for (a, t) in acc.iter_mut().zip(ts) {
                    *a += (-t * lam).exp();
                }
            };
            if n == 1 {
                let vk: f64 = c.v.iter().zip(&k).map(|(v, kk)| v[(0, 0)].im * kk).sum();
                eval(c.u[(0, 0)].re * ksq + vk - c.w[(0, 0)].re);
            } else {
                for i in 0..n {
                    for j in i..n {
                        let vk: Complex64 = c.v.iter().zip(&k).map(|(v, kk)| v[(i, j)] * *kk).sum();
                        block[(i, j)] = c.u[(i, j)] * ksq - I * vk - c.w[(i, j)];
                        block[(j, i)] = block[(i, j)].conj();
                    }
                }
                if n == 2 {
                    let ev = eigen2(block[(0, 0)].re, block[(1, 1)].re, block[(0, 1)]);
                    ev.into_iter().for_each(&mut eval);
                } else {
                    block.clone().symmetric_eigenvalues().iter().for_each(|l| eval(*l));
                }
            }
        }
        for (s, a) in slabs.iter_mut().zip(&acc) {
            s.push(*a);
        }
    }
    let bounds = model.bounds()?;
    Ok(ts
        .iter()
        .zip(&slabs)
        .map(|(t, s)| HeatTraceSample {
            t: *t,
            trace: pairwise_sum(s),
            truncation_bound: model.tail_bound(&bounds, *t),
        })
        .collect())
}

/// Eigenvalues (ascending) of the Galerkin matrix of `-∂_μ(u ∂_μ) - w` on the
/// modes `|n_i| ≤ K`. Modes coupled by the fields form connected components
/// that are diagonalised separately.
pub fn galerkin_spectrum(model: &TorusModel) -> Result<Vec<f64>> {
    let TorusFields::Varying(f) = &model.fields else {
        return invalid("galerkin_spectrum needs varying coefficients");
    };
    model.validate()?;
    let d = model.d;
    let n = f.u.dim();
    let kmax = model.cutoff as i32;
    let side = (2 * kmax + 1) as usize;
    let total = side.pow(d as u32);
    let point = |mut idx: usize| -> Vec<i32> {
        (0..d)
            .map(|_| {
                let c = (idx % side) as i32 - kmax;
                idx /= side;
                c
            })
            .collect()
    };
    let index = |p: &[i32]| -> Option<usize> {
        let mut idx = 0usize;
        for c in p.iter().rev() {
            if c.abs() > kmax {
                return None;
            }
            idx = idx * side + (c + kmax) as usize;
        }
        Some(idx)
    };

    let mut coeffs: HashMap<Vec<i32>, (MatrixN, MatrixN)> = HashMap::new();
    for m in f.u.modes() {
        coeffs.entry(m.wave.clone()).or_insert_with(|| (linalg::zeros(n), linalg::zeros(n))).0 += &m.coeff;
    }
    for m in f.w.modes() {
        coeffs.entry(m.wave.clone()).or_insert_with(|| (linalg::zeros(n), linalg::zeros(n))).1 += &m.coeff;
    }
    let waves: Vec<Vec<i32>> = coeffs.keys().filter(|w| w.iter().any(|c| *c != 0)).cloned().collect();

    let mut parent: Vec<usize> = (0..total).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..total {
        let p = point(i);
        for w in &waves {
            let q: Vec<i32> = p.iter().zip(w).map(|(a, b)| a + b).collect();
            if let Some(j) = index(&q) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..total {
        let r = root(&mut parent, i);
        let c = *slot.entry(r).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[c].push(i);
    }

    let unit = model.momentum_unit();
    let mut spectrum = Vec::with_capacity(total * n);
    for comp in &components {
        let m = comp.len() * n;
        if m > MAX_BLOCK_DIM {
            return Err(Error::TooLarge(format!("coupled Galerkin block of dimension {m} exceeds {MAX_BLOCK_DIM}")));
        }
        let pts: Vec<Vec<i32>> = comp.iter().map(|i| point(*i)).collect();
        let mut mat = MatrixN::zeros(m, m);
        for (a, pa) in pts.iter().enumerate() {
            for (b, pb) in pts.iter().enumerate() {
                let diff: Vec<i32> = pa.iter().zip(pb).map(|(x, y)| x - y).collect();
                let Some((uc, wc)) = coeffs.get(&diff) else { continue };
                let kk: f64 = pa.iter().zip(pb).map(|(x, y)| (*x as f64) * (*y as f64)).sum::<f64>() * unit * unit;
                let blk = uc * Complex64::new(kk, 0.0) - wc;
                mat.view_mut((a * n, b * n), (n, n)).copy_from(&blk);
            }
        }
        let dev = linalg::hermitian_deviation(&mat);
        if dev > 1e-10 * (1.0 + linalg::max_abs(&mat)) {
            return Err(Error::NotHermitian(dev));
        }
        spectrum.extend(mat.symmetric_eigenvalues().iter());
    }
    spectrum.sort_by(f64::total_cmp);
    Ok(spectrum)
}

/// Heat traces of the Galerkin truncation; one eigendecomposition serves all `ts`.
pub fn heat_trace_varying(model: &TorusModel, ts: &[f64]) -> Result<Vec<HeatTraceSample>> {
    check_times(ts)?;
    let spectrum = galerkin_spectrum(model)?;
    let bounds = model.bounds()?;
    Ok(ts
        .iter()
        .map(|t| {
            let terms: Vec<f64> = spectrum.iter().rev().map(|l| (-t * l).exp()).collect();
            HeatTraceSample { t: *t, trace: pairwise_sum(&terms), truncation_bound: model.tail_bound(&bounds, *t) }
        })
        .collect())
}
