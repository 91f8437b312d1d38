use heatkernel::symbolic::{parse_term, rewrite_all, simplify, Field, Label, Slot, Term};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(field kind, applied derivative count, pending derivative count)`.
type SlotShape = (u8, usize, usize);

fn arity(kind: u8) -> usize {
    match kind {
        0 => 2,
        1 => 1,
        _ => 0,
    }
}

/// Fully contracted term with the given shape; labels are paired at random.
fn build(coeff: (i64, i64), xi: usize, shapes: &[SlotShape], seed: u64) -> Term {
    let mut positions = xi + shapes.iter().map(|&(k, d, p)| arity(k) + d + p).sum::<usize>();
    let xi = if positions % 2 == 1 {
        positions += 1;
        xi + 1
    } else {
        xi
    };
    let mut labels: Vec<Label> = (0..(positions / 2) as Label).flat_map(|l| [l, l]).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut it = labels.into_iter();
    let mut take = |n: usize| -> Vec<Label> { it.by_ref().take(n).collect() };
    let mut xs = take(xi);
    xs.sort_unstable();
    let slots = shapes
        .iter()
        .map(|&(k, d, p)| {
            let own = take(arity(k));
            let field = match k {
                0 => Field::U(own[0].min(own[1]), own[0].max(own[1])),
                1 => Field::V(own[0]),
                2 => Field::W,
                _ => Field::H,
            };
            let mut derivs = take(d);
            derivs.sort_unstable();
            Slot { field, derivs, pending: take(p) }
        })
        .collect();
    Term { coeff: Rational64::new(coeff.0, coeff.1), xi: xs, slots }
}

fn term_strategy(max_labels: usize) -> impl Strategy<Value = Term> {
    (
        (-9i64..=9).prop_filter("non-zero", |c| *c != 0),
        1i64..=4,
        0usize..=2,
        prop::collection::vec((0u8..4, 0usize..=1, 0usize..=1), 1..=3),
        any::<u64>(),
    )
        .prop_map(|(n, d, xi, shapes, seed)| build((n, d), xi, &shapes, seed))
        .prop_filter("label budget", move |t| t.labels().len() <= max_labels)
}

fn relabel(t: &Term, perm: &[Label]) -> Term {
    let m = |l: &Label| perm[*l as usize] + 40;
    let mut out = t.clone();
    out.xi = t.xi.iter().map(m).collect();
    for s in &mut out.slots {
        s.field = match s.field {
            Field::U(a, b) => Field::U(m(&a), m(&b)),
            Field::V(a) => Field::V(m(&a)),
            ref f => f.clone(),
        };
        s.derivs = s.derivs.iter().map(m).collect();
        s.pending = s.pending.iter().map(m).collect();
    }
    out
}

/// `ξ-degree - 2·order + derivative count`, unchanged by derivative pushing.
fn weight(t: &Term) -> i64 {
    let derivs: usize = t.slots.iter().map(|s| s.derivs.len() + s.pending.len()).sum();
    t.xi_degree() as i64 - 2 * t.order() as i64 + derivs as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_round_trip(t in term_strategy(7)) {
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert_eq!(back.coeff, t.coeff);
        prop_assert_eq!(back.key(), t.key());
        prop_assert_eq!(parse_term(&back.to_string()).unwrap(), back);
    }

    #[test]
    fn canonical_form_is_idempotent(t in term_strategy(6)) {
        let c = t.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(c.is_contracted());
    }

    #[test]
    fn key_ignores_label_names(t in term_strategy(6), seed in any::<u64>()) {
        let mut perm: Vec<Label> = (0..8).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(relabel(&t, &perm).key(), t.key());
    }

    #[test]
    fn simplify_doubles_duplicates(t in term_strategy(6), seed in any::<u64>()) {
        let mut perm: Vec<Label> = (0..8).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let s = simplify(&[t.clone(), relabel(&t, &perm)]);
        prop_assert_eq!(s.len(), 1);
        prop_assert_eq!(s[0].coeff, t.coeff * 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewriting_preserves_contraction_and_weight(t in term_strategy(5)) {
        let out = rewrite_all(std::slice::from_ref(&t)).unwrap();
        for r in &out {
            prop_assert_eq!(r.pending_count(), 0);
            prop_assert!(r.is_contracted(), "{}", r);
            prop_assert_eq!(weight(r), weight(&t));
            prop_assert!(r.order() >= t.order() && r.order() <= t.order() + t.pending_count());
        }
    }
}
