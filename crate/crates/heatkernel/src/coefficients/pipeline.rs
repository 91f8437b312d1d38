//! `a₁` assembled from the symbolic expansion: contract each specialised term
//! with the metric jets and the Gaussian moment tensor, then apply the matrix
//! integrals to the remaining word.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::jet::{OperatorCoefficients, PointJet};
use crate::error::Result;
use crate::linalg::MatrixN;
use crate::moments::{moment_tensor, MomentTensor};
use crate::symbolic::{expand_volterra_order1, rewrite_all, specialize_scalar_metric, MatField, SpecializedTerm};
use crate::tensor::{self, SpectralData};

/// The specialised first-order terms, generated once.
pub fn first_order_terms() -> &'static [SpecializedTerm] {
    static TERMS: OnceLock<Vec<SpecializedTerm>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let mut all = Vec::new();
        for group in expand_volterra_order1() {
            all.extend(rewrite_all(&group.terms).expect("first-order rewriting terminates"));
        }
        specialize_scalar_metric(&all).expect("rewritten terms carry no pending derivatives")
    })
}

/// Concrete matrix atom after index assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Atom {
    U,
    Du(usize),
    Ddu(usize, usize),
    V(usize),
    Dv(usize, usize),
    W,
}

impl Atom {
    fn matrix<'a>(&self, c: &'a OperatorCoefficients) -> &'a MatrixN {
        match *self {
            Atom::U => &c.u,
            Atom::Du(a) => &c.du[a],
            Atom::Ddu(a, b) => &c.ddu[a][b],
            Atom::V(a) => &c.v[a],
            Atom::Dv(c_, a) => &c.dv[c_][a],
            Atom::W => &c.w,
        }
    }
}

enum Factor<'a> {
    Metric(&'a DMatrix<f64>, [usize; 2]),
    MetricD(&'a [DMatrix<f64>], [usize; 3]),
    MetricDd(&'a [Vec<DMatrix<f64>>], [usize; 4]),
    Moment(&'a MomentTensor, Vec<usize>),
}

impl Factor<'_> {
    fn value(&self, x: &[usize]) -> f64 {
        match self {
            Factor::Metric(g, [a, b]) => g[(x[*a], x[*b])],
            Factor::MetricD(dg, [a, b, c]) => dg[x[*c]][(x[*a], x[*b])],
            Factor::MetricDd(ddg, [a, b, c, e]) => ddg[x[*c]][x[*e]][(x[*a], x[*b])],
            Factor::Moment(m, ls) => {
                let d = m.dim();
                m.data()[ls.iter().fold(0, |acc, &l| acc * d + x[l])]
            }
        }
    }
}

/// Σ over all index assignments of the scalar network, grouped by the
/// assignment of the word's labels.
fn contract(term: &SpecializedTerm, jet: &PointJet, moments: &[MomentTensor]) -> HashMap<Vec<Atom>, f64> {
    let d = jet.dim();
    let n = term.labels().len();
    let pos = |l: u16| l as usize;
    let mut factors: Vec<Factor> = term
        .metric
        .iter()
        .map(|m| match m.derivs.len() {
            0 => Factor::Metric(&jet.g, [pos(m.a), pos(m.b)]),
            1 => Factor::MetricD(&jet.dg, [pos(m.a), pos(m.b), pos(m.derivs[0])]),
            _ => Factor::MetricDd(&jet.ddg, [pos(m.a), pos(m.b), pos(m.derivs[0]), pos(m.derivs[1])]),
        })
        .collect();
    if !term.xi.is_empty() {
        factors.push(Factor::Moment(&moments[term.p()], term.xi.iter().map(|&l| pos(l)).collect()));
    }
    let word = |x: &[usize]| -> Vec<Atom> {
        term.word
            .iter()
            .map(|a| match (&a.field, a.derivs.as_slice()) {
                (MatField::U, []) => Atom::U,
                (MatField::U, [c]) => Atom::Du(x[pos(*c)]),
                (MatField::U, [c, e]) => Atom::Ddu(x[pos(*c)], x[pos(*e)]),
                (MatField::V(a), []) => Atom::V(x[pos(*a)]),
                (MatField::V(a), [c]) => Atom::Dv(x[pos(*c)], x[pos(*a)]),
                (MatField::W, []) => Atom::W,
                _ => unreachable!("first-order terms carry at most two derivatives on u and one on v"),
            })
            .collect()
    };
    let mut out: HashMap<Vec<Atom>, f64> = HashMap::new();
    let mut x = vec![0usize; n];
    loop {
        let value: f64 = factors.iter().map(|f| f.value(&x)).product();
        if value != 0.0 {
            *out.entry(word(&x)).or_insert(0.0) += value;
        }
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] < d {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    out
}

/// `a₁` via the symbolic expansion and spectral evaluation of every `I_{d/2+p,k}`.
pub fn a1_local_pipeline(jet: &PointJet, coeffs: &OperatorCoefficients) -> Result<Complex64> {
    jet.validate()?;
    let d = jet.dim();
    coeffs.validate(d)?;
    let sd = SpectralData::new(&coeffs.u)?;
    let g_lower = jet.g_lower();
    let terms = first_order_terms();
    let max_p = terms.iter().map(|t| t.p()).max().unwrap_or(0);
    let moments: Vec<MomentTensor> = (0..=max_p).map(|p| moment_tensor(p, &g_lower)).collect::<Result<_>>()?;
    let mut words: HashMap<(usize, Vec<Atom>), f64> = HashMap::new();
    for t in terms {
        let c = *t.coeff.numer() as f64 / *t.coeff.denom() as f64;
        for (w, s) in contract(t, jet, &moments) {
            *words.entry((t.p(), w)).or_insert(0.0) += c * s;
        }
    }
    let mut cache: HashMap<Atom, MatrixN> = HashMap::new();
    let mut keys: Vec<_> = words.into_iter().filter(|(_, s)| *s != 0.0).collect();
    keys.sort_by(|a, b| format!("{:?}", a.0).cmp(&format!("{:?}", b.0)));
    let mut total = Complex64::new(0.0, 0.0);
    for ((p, word), s) in keys {
        let mats: Vec<MatrixN> = word
            .iter()
            .map(|a| cache.entry(*a).or_insert_with(|| sd.to_eigenbasis(a.matrix(coeffs))).clone())
            .collect();
        let alpha = d as f64 / 2.0 + p as f64;
        total += tensor::trace_alpha(alpha, &sd, &mats) * s;
    }
    Ok(total * jet.volume_factor())
}
