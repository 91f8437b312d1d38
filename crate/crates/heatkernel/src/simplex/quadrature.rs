//! Independent quadrature for simplex integrals.
//!
//! Arguments are sorted ascending, so with the nested coordinates
//! `1 ≥ s₁ ≥ … ≥ s_k ≥ 0` the linear form `L = r₀ + Σ s_j (r_j - r_{j-1})` has
//! non-negative slopes and every singularity of the integrand lies on the
//! negative real axis of each variable. Each axis is split into panels whose
//! width never exceeds their distance to that singularity; the innermost axis
//! is integrated exactly.

use std::cell::RefCell;
use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::rc::Rc;

use gauss_quad::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
type Rule = Rc<Vec<(f64, f64)>>;

thread_local! {
    static RULES: RefCell<HashMap<usize, Rule>> = RefCell::new(HashMap::new());
}

/// Nodes and weights on `[0, 1]`.
fn rule(order: usize) -> Rc<Vec<(f64, f64)>> {
    RULES.with(|cache| {
        cache
            .borrow_mut()
            .entry(order)
            .or_insert_with(|| {
                let gl = GaussLegendre::new(NonZeroUsize::new(order).expect("order > 0"));
                Rc::new(gl.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect())
            })
            .clone()
    })
}

struct Nested<'a> {
    alpha: f64,
    slopes: &'a [f64],
    rule: Rc<Vec<(f64, f64)>>,
}

impl Nested<'_> {
    /// `∫_0^b ds (inner integral)` on axis `j` with `L = base + s·slope_j + …`.
    fn axis(&self, j: usize, b: f64, base: f64) -> f64 {
        let slope = self.slopes[j];
        if j + 1 == self.slopes.len() {
            return exact_linear(self.alpha, base, slope, b);
        }
        let reach: f64 = self.slopes[j..].iter().sum();
        let pole = if reach > 0.0 { base / reach } else { f64::INFINITY };
        let mut total = 0.0;
        let mut a = 0.0;
        while a < b {
            let width = (a + pole).min(b - a);
            let hi = if width >= b - a { b } else { a + width };
            for &(x, w) in self.rule.iter() {
                let s = a + (hi - a) * x;
                total += w * (hi - a) * self.axis(j + 1, s, base + s * slope);
            }
            a = hi;
        }
        total
    }
}

/// `∫_0^b (A + s c)^{-α} ds` evaluated without cancellation.
fn exact_linear(alpha: f64, a: f64, c: f64, b: f64) -> f64 {
    if c == 0.0 || b == 0.0 {
        return b * a.powf(-alpha);
    }
    let z = b * c / a;
    let lz = z.ln_1p();
    let e = 1.0 - alpha;
    let factor = if e == 0.0 { lz } else { (e * lz).exp_m1() / e };
    a.powf(e) * factor / c
}

/// Quadrature value of `I_{α,k}(r)` with `order` Gauss–Legendre nodes per panel.
pub fn simplex_quadrature(alpha: f64, r: &[f64], order: usize) -> f64 {
    let mut sorted = r.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() == 1 {
        return sorted[0].powf(-alpha);
    }
    let slopes: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    let nested = Nested { alpha, slopes: &slopes, rule: rule(order.max(1)) };
    nested.axis(0, 1.0, sorted[0])
}
