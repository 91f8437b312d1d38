//! Initial order-one expansion and the derivative-pushing rule
//!
//! ```text
//! ∂_c acting right of slot i:
//!   f_k[…A_i ∂_c ⊗ … ⊗ A_k] = Σ_{j>i} f_k[… ⊗ ∂_c A_j ⊗ …]
//!                            - Σ_{j≥i} f_{k+1}[… ⊗ A_j ⊗ ∂_c H ⊗ A_{j+1} ⊗ …]
//! ```
//!
//! The rightmost pending derivative is always resolved first.

use num_rational::Rational64;

use super::{simplify, Field, Slot, Term};
use crate::error::{invalid, Result};

/// Named group of terms contributing at the same order.
#[derive(Clone, Debug)]
pub struct TermGroup {
    pub name: String,
    pub terms: Vec<Term>,
}

fn term(c: i64, xi: Vec<u16>, slots: Vec<Slot>) -> Term {
    Term { coeff: Rational64::from_integer(c), xi, slots }
}

/// `f₂[K⊗K]` and `-f₁[P]` with `K = -iξ_a(v^a + 2u^{ab}∂_b)` and
/// `P = -(u^{ab}∂_a∂_b + v^a∂_a + w)`, before any derivative is moved.
pub fn expand_volterra_order1() -> Vec<TermGroup> {
    use Field::*;
    let (a, b, c, e) = (0, 1, 2, 3);
    let kk = vec![
        term(-1, vec![a, b], vec![Slot::new(V(a)), Slot::new(V(b))]),
        term(-2, vec![a, b], vec![Slot::new(V(a)), Slot::with_pending(U(b, e), vec![e])]),
        term(-2, vec![a, b], vec![Slot::with_pending(U(a, c), vec![c]), Slot::new(V(b))]),
        term(-4, vec![a, b], vec![Slot::with_pending(U(a, c), vec![c]), Slot::with_pending(U(b, e), vec![e])]),
    ];
    let p = vec![
        term(1, vec![], vec![Slot::with_pending(U(a, b), vec![a, b])]),
        term(1, vec![], vec![Slot::with_pending(V(a), vec![a])]),
        term(1, vec![], vec![Slot::new(W)]),
    ];
    vec![TermGroup { name: "-f1[P]".into(), terms: p }, TermGroup { name: "f2[K(x)K]".into(), terms: kk }]
}

/// One rewriting step on the rightmost pending derivative; `None` if the term
/// carries no pending derivative.
pub fn push_derivatives(t: &Term) -> Option<Vec<Term>> {
    let i = t.slots.iter().rposition(|s| !s.pending.is_empty())?;
    let mut base = t.clone();
    let c = base.slots[i].pending.pop().expect("non-empty");
    let mut out = Vec::new();
    for j in i + 1..base.slots.len() {
        let mut n = base.clone();
        n.slots[j].derivs.push(c);
        n.slots[j].derivs.sort_unstable();
        out.push(n);
    }
    for j in i..base.slots.len() {
        let mut n = base.clone();
        n.coeff = -n.coeff;
        n.slots.insert(j + 1, Slot { field: Field::H, derivs: vec![c], pending: Vec::new() });
        out.push(n);
    }
    base.slots.clear();
    Some(out)
}

/// Apply [`push_derivatives`] until no pending derivatives remain, then
/// canonicalise and merge.
pub fn rewrite_all(terms: &[Term]) -> Result<Vec<Term>> {
    let initial: usize = terms.iter().map(|t| t.pending_count()).sum();
    let arity = terms.iter().map(|t| t.order() + t.pending_count()).max().unwrap_or(0);
    let budget = 1 + initial.max(1) * arity.max(1) * 64;
    let mut work: Vec<Term> = terms.to_vec();
    let mut done = Vec::new();
    let mut steps = 0usize;
    while let Some(t) = work.pop() {
        match push_derivatives(&t) {
            None => done.push(t),
            Some(next) => {
                steps += 1;
                if steps > budget {
                    return invalid("derivative rewriting did not terminate");
                }
                work.extend(next);
            }
        }
    }
    Ok(simplify(&done))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_term;

    fn keys(ts: &[Term]) -> Vec<Vec<u16>> {
        let mut k: Vec<_> = ts.iter().map(|t| t.key()).collect();
        k.sort();
        k
    }

    #[test]
    fn single_derivative_on_last_slot() {
        let t = parse_term("1 xi() f1[v^{a}*d{a}]").unwrap();
        let out = rewrite_all(&[t]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].to_string(), "-1 xi() f2[v^{a} (x) H_{,a}]");
    }

    #[test]
    fn terms_are_parity_consistent() {
        for g in expand_volterra_order1() {
            for t in rewrite_all(&g.terms).unwrap() {
                assert_eq!(t.xi_degree(), 2 * (t.order() - 1), "{t}");
                assert!(t.is_contracted(), "{t}");
                assert_eq!(t.pending_count(), 0);
            }
        }
    }

    #[test]
    fn principal_part_of_p() {
        let groups = expand_volterra_order1();
        let got = rewrite_all(&groups[0].terms).unwrap();
        let expect: Vec<Term> = [
            "+1 xi() f1[w]",
            "-1 xi() f2[v^{a} (x) H_{,a}]",
            "-1 xi() f2[u^{ab} (x) H_{,ab}]",
            "+2 xi() f3[u^{ab} (x) H_{,a} (x) H_{,b}]",
        ]
        .iter()
        .map(|s| parse_term(s).unwrap())
        .collect();
        assert_eq!(keys(&got), keys(&expect));
    }
}
