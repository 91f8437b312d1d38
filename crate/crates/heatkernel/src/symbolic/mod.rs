//! Symbolic first-order expansion of the heat-kernel symbol.
//!
//! A [`Term`] is `c · ξ_{a₁}⋯ξ_{a_m} · f_k[A₁ ⊗ ⋯ ⊗ A_k]` where each slot `A_i` is a
//! coefficient field (`u^{ab}`, `v^a`, `w`) or the principal symbol
//! `H = u^{ab} ξ_a ξ_b`, carrying applied derivatives and possibly derivatives
//! still waiting to act on everything to their right. All indices are
//! contracted dummies represented by integer labels.

mod format;
mod rewrite;
mod specialize;

use num_rational::Rational64;

pub use format::parse_term;
pub use rewrite::{expand_volterra_order1, push_derivatives, rewrite_all, TermGroup};
pub use specialize::{specialize_scalar_metric, MatAtom, MatField, MetricFactor, SpecializedTerm};

pub type Label = u16;

/// Coefficient field occupying a tensor slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    U(Label, Label),
    V(Label),
    W,
    H,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub field: Field,
    /// Derivatives already applied to the field.
    pub derivs: Vec<Label>,
    /// Derivatives acting on everything to the right of this slot.
    pub pending: Vec<Label>,
}

impl Slot {
    pub fn new(field: Field) -> Self {
        Slot { field, derivs: Vec::new(), pending: Vec::new() }
    }

    pub fn with_pending(field: Field, pending: Vec<Label>) -> Self {
        Slot { field, derivs: Vec::new(), pending }
    }

    fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        let own: Vec<Label> = match self.field {
            Field::U(a, b) => vec![a, b],
            Field::V(a) => vec![a],
            Field::W | Field::H => vec![],
        };
        own.into_iter().chain(self.derivs.iter().copied()).chain(self.pending.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational64,
    pub xi: Vec<Label>,
    pub slots: Vec<Slot>,
}

impl Term {
    /// Number of tensor slots `k` in `f_k`.
    pub fn order(&self) -> usize {
        self.slots.len()
    }

    /// Total ξ-degree including the two hidden in every `H`.
    pub fn xi_degree(&self) -> usize {
        self.xi.len() + 2 * self.slots.iter().filter(|s| s.field == Field::H).count()
    }

    pub fn pending_count(&self) -> usize {
        self.slots.iter().map(|s| s.pending.len()).sum()
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        for l in self.xi.iter().copied().chain(self.slots.iter().flat_map(|s| s.labels())) {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }

    pub(crate) fn next_label(&self) -> Label {
        self.labels().into_iter().max().map_or(0, |m| m + 1)
    }

    /// Every label must occur exactly twice (full contraction).
    pub fn is_contracted(&self) -> bool {
        let mut all: Vec<Label> = self.xi.iter().copied().chain(self.slots.iter().flat_map(|s| s.labels())).collect();
        all.sort_unstable();
        all.chunks(2).all(|c| c.len() == 2 && c[0] == c[1]) && all.windows(3).all(|w| !(w[0] == w[1] && w[1] == w[2]))
    }

    fn encode(&self, map: &[(Label, Label)]) -> Vec<u16> {
        let m = |l: &Label| map.iter().find(|(from, _)| from == l).map(|&(_, to)| to).unwrap_or(*l);
        let mut out = Vec::with_capacity(32);
        let mut xi: Vec<u16> = self.xi.iter().map(m).collect();
        xi.sort_unstable();
        out.extend(xi);
        out.push(u16::MAX);
        for s in &self.slots {
            match s.field {
                Field::U(a, b) => {
                    let (x, y) = (m(&a), m(&b));
                    out.extend([1, x.min(y), x.max(y)]);
                }
                Field::V(a) => out.extend([2, m(&a)]),
                Field::W => out.push(3),
                Field::H => out.push(4),
            }
            out.push(u16::MAX - 1);
            let mut d: Vec<u16> = s.derivs.iter().map(m).collect();
            d.sort_unstable();
            out.extend(d);
            out.push(u16::MAX - 2);
            let mut p: Vec<u16> = s.pending.iter().map(m).collect();
            p.sort_unstable();
            out.extend(p);
            out.push(u16::MAX - 3);
        }
        out
    }

    fn apply_map(&self, map: &[(Label, Label)]) -> Term {
        let m = |l: &Label| map.iter().find(|(from, _)| from == l).map(|&(_, to)| to).unwrap_or(*l);
        let mut xi: Vec<Label> = self.xi.iter().map(m).collect();
        xi.sort_unstable();
        let slots = self
            .slots
            .iter()
            .map(|s| {
                let field = match s.field {
                    Field::U(a, b) => {
                        let (x, y) = (m(&a), m(&b));
                        Field::U(x.min(y), x.max(y))
                    }
                    Field::V(a) => Field::V(m(&a)),
                    ref f => f.clone(),
                };
                let mut derivs: Vec<Label> = s.derivs.iter().map(m).collect();
                derivs.sort_unstable();
                let mut pending: Vec<Label> = s.pending.iter().map(m).collect();
                pending.sort_unstable();
                Slot { field, derivs, pending }
            })
            .collect();
        Term { coeff: self.coeff, xi, slots }
    }

    /// Representative with dummy labels renamed to `0..n` so that the encoded
    /// form is lexicographically minimal over all renamings.
    pub fn canonical(&self) -> Term {
        let labels = self.labels();
        let best = canonical_map(&labels, |map| self.encode(map));
        self.apply_map(&best)
    }

    /// Canonical key identifying the term up to coefficient.
    pub fn key(&self) -> Vec<u16> {
        self.canonical().encode(&[])
    }
}

/// Brute-force search over label permutations for the minimal encoding.
pub(crate) fn canonical_map(labels: &[Label], encode: impl Fn(&[(Label, Label)]) -> Vec<u16>) -> Vec<(Label, Label)> {
    let n = labels.len();
    let mut perm: Vec<Label> = (0..n as Label).collect();
    let mut best_map: Vec<(Label, Label)> = labels.iter().copied().zip(perm.iter().copied()).collect();
    let mut best = encode(&best_map);
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0;
    let mut map = best_map.clone();
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            for (slot, &to) in map.iter_mut().zip(&perm) {
                slot.1 = to;
            }
            let e = encode(&map);
            if e < best {
                best = e;
                best_map = map.clone();
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best_map
}

/// Merge terms with equal canonical form, dropping zero coefficients.
/// Output is sorted by `(order, canonical key)`.
pub fn simplify(terms: &[Term]) -> Vec<Term> {
    let mut merged: Vec<(Vec<u16>, Term)> = Vec::new();
    for t in terms {
        let c = t.canonical();
        let key = c.encode(&[]);
        match merged.iter_mut().find(|(k, _)| *k == key) {
            Some((_, existing)) => existing.coeff += c.coeff,
            None => merged.push((key, c)),
        }
    }
    merged.retain(|(_, t)| t.coeff != Rational64::from_integer(0));
    merged.sort_by(|a, b| (a.1.order(), &a.0).cmp(&(b.1.order(), &b.0)));
    merged.into_iter().map(|(_, t)| t).collect()
}

/// The `(k, p)` pairs whose integrals `I_{d/2+p,k}` enter `a_r`.
pub fn count_required_operators(r: usize) -> Vec<(usize, usize)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    (r..=4 * r).map(|k| (k, k - r)).collect()
}
