//! Specialisation to `u^{ab} = g^{ab} u`.
//!
//! Every derivative of `g^{ab} u` is distributed by the Leibniz rule, leaving a
//! scalar network of metric jets times ξ-factors, and a word of matrix atoms
//! built from `u`, `v^a`, `w` and their derivatives.

use std::fmt;

use num_rational::Rational64;

use super::format::{coeff_str, label_name, labels_str};
use super::{canonical_map, Field, Label, Term};
use crate::error::{invalid, Result};

/// `∂_{derivs} g^{ab}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetricFactor {
    pub a: Label,
    pub b: Label,
    pub derivs: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MatField {
    U,
    V(Label),
    W,
}

/// `∂_{derivs}` applied to a matrix coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatAtom {
    pub field: MatField,
    pub derivs: Vec<Label>,
}

/// `c · ξ_{a₁}⋯ξ_{a_{2p}} · Π (∂g) · f_k[word]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecializedTerm {
    pub coeff: Rational64,
    pub xi: Vec<Label>,
    pub metric: Vec<MetricFactor>,
    pub word: Vec<MatAtom>,
}

impl SpecializedTerm {
    pub fn k(&self) -> usize {
        self.word.len()
    }

    pub fn p(&self) -> usize {
        self.xi.len() / 2
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        let mut add = |l: Label| {
            if !out.contains(&l) {
                out.push(l)
            }
        };
        self.xi.iter().for_each(|&l| add(l));
        for m in &self.metric {
            add(m.a);
            add(m.b);
            m.derivs.iter().for_each(|&l| add(l));
        }
        for w in &self.word {
            if let MatField::V(a) = w.field {
                add(a);
            }
            w.derivs.iter().for_each(|&l| add(l));
        }
        out
    }

    /// Labels carried by the matrix word.
    pub fn word_labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        for w in &self.word {
            if let MatField::V(a) = w.field {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
            for &l in &w.derivs {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    }

    fn encode(&self, map: &[(Label, Label)]) -> Vec<u16> {
        let m = |l: &Label| map.iter().find(|(f, _)| f == l).map(|&(_, t)| t).unwrap_or(*l);
        let mut out = Vec::with_capacity(48);
        for w in &self.word {
            match w.field {
                MatField::U => out.push(1),
                MatField::V(a) => out.extend([2, m(&a)]),
                MatField::W => out.push(3),
            }
            let mut d: Vec<u16> = w.derivs.iter().map(m).collect();
            d.sort_unstable();
            out.extend(d);
            out.push(u16::MAX);
        }
        let mut xi: Vec<u16> = self.xi.iter().map(m).collect();
        xi.sort_unstable();
        out.extend(xi);
        out.push(u16::MAX - 1);
        let mut factors: Vec<Vec<u16>> = self
            .metric
            .iter()
            .map(|f| {
                let (x, y) = (m(&f.a), m(&f.b));
                let mut v = vec![f.derivs.len() as u16, x.min(y), x.max(y)];
                let mut d: Vec<u16> = f.derivs.iter().map(m).collect();
                d.sort_unstable();
                v.extend(d);
                v
            })
            .collect();
        factors.sort();
        for f in factors {
            out.extend(f);
            out.push(u16::MAX - 2);
        }
        out
    }

    fn apply_map(&self, map: &[(Label, Label)]) -> SpecializedTerm {
        let m = |l: &Label| map.iter().find(|(f, _)| f == l).map(|&(_, t)| t).unwrap_or(*l);
        let sorted = |v: &[Label]| {
            let mut s: Vec<Label> = v.iter().map(m).collect();
            s.sort_unstable();
            s
        };
        let mut metric: Vec<MetricFactor> = self
            .metric
            .iter()
            .map(|f| {
                let (x, y) = (m(&f.a), m(&f.b));
                MetricFactor { a: x.min(y), b: x.max(y), derivs: sorted(&f.derivs) }
            })
            .collect();
        metric.sort_by(|p, q| (p.derivs.len(), p.a, p.b, &p.derivs).cmp(&(q.derivs.len(), q.a, q.b, &q.derivs)));
        SpecializedTerm {
            coeff: self.coeff,
            xi: sorted(&self.xi),
            metric,
            word: self
                .word
                .iter()
                .map(|w| MatAtom {
                    field: match w.field {
                        MatField::V(a) => MatField::V(m(&a)),
                        ref f => f.clone(),
                    },
                    derivs: sorted(&w.derivs),
                })
                .collect(),
        }
    }

    pub fn canonical(&self) -> SpecializedTerm {
        let labels = self.labels();
        let best = canonical_map(&labels, |map| self.encode(map));
        self.apply_map(&best)
    }
}

impl fmt::Display for MatAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            MatField::U => write!(f, "u")?,
            MatField::V(a) => write!(f, "v^{{{}}}", label_name(a))?,
            MatField::W => write!(f, "w")?,
        }
        if !self.derivs.is_empty() {
            write!(f, "_{{,{}}}", labels_str(&self.derivs))?;
        }
        Ok(())
    }
}

impl fmt::Display for SpecializedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xi: Vec<String> = self.xi.iter().map(|&l| label_name(l)).collect();
        write!(f, "{} xi({})", coeff_str(&self.coeff), xi.join(","))?;
        for m in &self.metric {
            write!(f, " g^{{{}}}", labels_str(&[m.a, m.b]))?;
            if !m.derivs.is_empty() {
                write!(f, "_{{,{}}}", labels_str(&m.derivs))?;
            }
        }
        let word: Vec<String> = self.word.iter().map(|w| w.to_string()).collect();
        write!(f, " f{}[{}]", self.word.len(), word.join(" (x) "))
    }
}

/// All splittings of `d` into (metric part, matrix part).
fn leibniz(d: &[Label]) -> Vec<(Vec<Label>, Vec<Label>)> {
    (0..1usize << d.len())
        .map(|mask| {
            let (mut g, mut u) = (Vec::new(), Vec::new());
            for (i, &l) in d.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    g.push(l);
                } else {
                    u.push(l);
                }
            }
            (g, u)
        })
        .collect()
}

/// Specialise derivative-free terms to `u^{ab} = g^{ab} u`, then merge.
pub fn specialize_scalar_metric(terms: &[Term]) -> Result<Vec<SpecializedTerm>> {
    let mut raw: Vec<SpecializedTerm> = Vec::new();
    for t in terms {
        if t.pending_count() != 0 {
            return invalid(format!("term `{t}` still has pending derivatives"));
        }
        let mut fresh = t.next_label();
        let mut partial =
            vec![SpecializedTerm { coeff: t.coeff, xi: t.xi.clone(), metric: Vec::new(), word: Vec::new() }];
        for s in &t.slots {
            let options: Vec<(Vec<Label>, Option<MetricFactor>, MatAtom)> = match s.field {
                Field::V(a) => vec![(vec![], None, MatAtom { field: MatField::V(a), derivs: s.derivs.clone() })],
                Field::W => {
                    if !s.derivs.is_empty() {
                        return invalid("derivatives of w are not supported");
                    }
                    vec![(vec![], None, MatAtom { field: MatField::W, derivs: vec![] })]
                }
                Field::U(a, b) => leibniz(&s.derivs)
                    .into_iter()
                    .map(|(g, u)| {
                        (vec![], Some(MetricFactor { a, b, derivs: g }), MatAtom { field: MatField::U, derivs: u })
                    })
                    .collect(),
                Field::H => {
                    let (x, y) = (fresh, fresh + 1);
                    fresh += 2;
                    leibniz(&s.derivs)
                        .into_iter()
                        .map(|(g, u)| {
                            (
                                vec![x, y],
                                Some(MetricFactor { a: x, b: y, derivs: g }),
                                MatAtom { field: MatField::U, derivs: u },
                            )
                        })
                        .collect()
                }
            };
            let mut next = Vec::with_capacity(partial.len() * options.len());
            for p in &partial {
                for (xi, mf, atom) in &options {
                    let mut q = p.clone();
                    q.xi.extend(xi);
                    if let Some(mf) = mf {
                        q.metric.push(mf.clone());
                    }
                    q.word.push(atom.clone());
                    next.push(q);
                }
            }
            partial = next;
        }
        raw.extend(partial);
    }
    let mut merged: Vec<(Vec<u16>, SpecializedTerm)> = Vec::new();
    for t in raw {
        let c = t.canonical();
        let key = c.encode(&[]);
        match merged.iter_mut().find(|(k, _)| *k == key) {
            Some((_, e)) => e.coeff += c.coeff,
            None => merged.push((key, c)),
        }
    }
    merged.retain(|(_, t)| *t.coeff.numer() != 0);
    merged.sort_by(|a, b| (a.1.k(), &a.0).cmp(&(b.1.k(), &b.0)));
    Ok(merged.into_iter().map(|(_, t)| t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_term;

    #[test]
    fn second_derivative_of_h_gives_three_terms() {
        let t = parse_term("-1 xi() f2[u^{ab} (x) H_{,ab}]").unwrap();
        let s = specialize_scalar_metric(&[t]).unwrap();
        assert_eq!(s.len(), 3);
        let mut coeffs: Vec<i64> = s.iter().map(|t| *t.coeff.numer()).collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![-2, -1, -1]);
        for t in &s {
            assert_eq!(t.p(), 1);
            assert_eq!(t.k(), 2);
        }
    }

    #[test]
    fn vector_slot_passes_through() {
        let t = parse_term("-1 xi(a,b) f2[v^{a} (x) v^{b}]").unwrap();
        let s = specialize_scalar_metric(&[t]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].to_string(), "-1 xi(a,b) f2[v^{a} (x) v^{b}]");
    }
}
