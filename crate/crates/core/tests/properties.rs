//! Property tests over small random automata and sets. Oracles here are
//! written from the definitions, not from library code.

use proptest::prelude::*;

use parikh_core::alphabet::words_up_to;
use parikh_core::closures::{intersect_pa, inverse_hom, union_pa, Homomorphism};
use parikh_core::equiv::{bounded_equiv, Equivalence};
use parikh_core::format::{parse_document, write_epsilon, write_pa, Document};
use parikh_core::pa::{
    complete, eliminate_epsilon, is_empty, is_finite, member, member_epsilon, Emptiness, EpsTransition, EpsilonPA,
    Finiteness, Transition,
};
use parikh_core::semilinear::{concat_sets, union_sets, Atom, ConstraintSet, ExplicitSemilinear, LinearSet, Relation};
use parikh_core::{Alphabet, Letter, ParikhAutomaton, SemilinearSet};

fn linear_set(dim: usize) -> impl Strategy<Value = LinearSet> {
    (
        prop::collection::vec(0u64..=4, dim),
        prop::collection::vec(prop::collection::vec(0u64..=4, dim), 0..=2),
    )
        .prop_map(|(o, ps)| LinearSet::new(o, ps).unwrap())
}

fn explicit(dim: usize) -> impl Strategy<Value = ExplicitSemilinear> {
    prop::collection::vec(linear_set(dim), 0..=2).prop_map(move |ps| ExplicitSemilinear::new(dim, ps).unwrap())
}

/// `v ∈ offset + N·periods`, by search over multipliers.
fn in_linear(offset: &[u64], periods: &[Vec<u64>], v: &[u64]) -> bool {
    if offset.iter().zip(v).any(|(o, x)| o > x) {
        return false;
    }
    let rest: Vec<u64> = v.iter().zip(offset).map(|(x, o)| x - o).collect();
    fn go(periods: &[Vec<u64>], rest: &[u64]) -> bool {
        match periods.split_first() {
            None => rest.iter().all(|x| *x == 0),
            Some((p, more)) => {
                let mut r = rest.to_vec();
                loop {
                    if go(more, &r) {
                        return true;
                    }
                    if p.iter().zip(&r).any(|(a, b)| a > b) {
                        return false;
                    }
                    for (x, a) in r.iter_mut().zip(p) {
                        *x -= a;
                    }
                }
            }
        }
    }
    go(periods, &rest)
}

fn in_explicit(s: &ExplicitSemilinear, v: &[u64]) -> bool {
    s.parts().iter().any(|l| in_linear(l.offset(), l.periods(), v))
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![
        Just(Relation::Lt),
        Just(Relation::Le),
        Just(Relation::Eq),
        Just(Relation::Ge),
        Just(Relation::Gt),
        Just(Relation::Ne)
    ]
}

fn atom(dim: usize) -> impl Strategy<Value = Atom> {
    prop_oneof![
        (prop::collection::vec(-2i64..=2, dim), relation(), -3i64..=4).prop_map(|(c, r, k)| Atom::linear(c, r, k)),
        (prop::collection::vec(-2i64..=2, dim), 2u64..=3, 0u64..=2)
            .prop_map(|(c, m, r)| Atom::congruence(c, m, r % m).unwrap()),
    ]
}

fn constraint(dim: usize) -> impl Strategy<Value = ConstraintSet> {
    prop::collection::vec(prop::collection::vec(atom(dim), 0..=2), 0..=2)
        .prop_map(move |cs| ConstraintSet::new(dim, cs).unwrap())
}

fn acceptance(dim: usize) -> impl Strategy<Value = SemilinearSet> {
    prop_oneof![
        constraint(dim).prop_map(SemilinearSet::Constraint),
        explicit(dim).prop_map(SemilinearSet::Explicit),
    ]
}

/// Automata over {a,b} with up to three states and dimension 1 or 2.
fn automaton() -> impl Strategy<Value = ParikhAutomaton> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, dim)| {
        let edge = (0..n, 0usize..2, prop::collection::vec(0u64..=2, dim), 0..n);
        (
            prop::collection::vec(edge, 1..=6),
            prop::collection::vec(any::<bool>(), n),
            acceptance(dim),
        )
            .prop_map(move |(edges, acc, c)| {
                let transitions = edges
                    .into_iter()
                    .map(|(s, l, v, t)| Transition {
                        source: s,
                        letter: Letter(l),
                        vector: v,
                        target: t,
                    })
                    .collect();
                let accepting = (0..n).filter(|q| acc[*q]).collect();
                ParikhAutomaton::new(
                    Alphabet::new(["a", "b"]).unwrap(),
                    (0..n).map(|i| format!("q{i}")).collect(),
                    0,
                    accepting,
                    transitions,
                    c,
                )
                .unwrap()
            })
    })
}

fn epsilon_automaton() -> impl Strategy<Value = EpsilonPA> {
    (1usize..=3).prop_flat_map(|n| {
        let edge = (
            0..n,
            prop::option::of(0usize..2),
            prop::collection::vec(0u64..=1, 1),
            0..n,
        );
        (
            prop::collection::vec(edge, 1..=6),
            prop::collection::vec(any::<bool>(), n),
            constraint(1),
        )
            .prop_map(move |(edges, acc, c)| {
                let transitions = edges
                    .into_iter()
                    .map(|(s, l, v, t)| EpsTransition {
                        source: s,
                        letter: l.map(Letter),
                        vector: v,
                        target: t,
                    })
                    .collect();
                EpsilonPA::new(
                    Alphabet::new(["a", "b"]).unwrap(),
                    (0..n).map(|i| format!("q{i}")).collect(),
                    0,
                    (0..n).filter(|q| acc[*q]).collect(),
                    transitions,
                    SemilinearSet::Constraint(c),
                )
                .unwrap()
            })
    })
}

/// Membership by enumerating every transition sequence spelling `w`.
fn brute_member(a: &ParikhAutomaton, w: &[Letter]) -> bool {
    fn go(a: &ParikhAutomaton, w: &[Letter], q: usize, v: Vec<u64>) -> bool {
        match w.split_first() {
            None => a.is_accepting(q) && a.acceptance().contains(&v).unwrap(),
            Some((l, rest)) => a.transitions().iter().any(|t| {
                t.source == q
                    && t.letter == *l
                    && go(a, rest, t.target, v.iter().zip(&t.vector).map(|(x, y)| x + y).collect())
            }),
        }
    }
    go(a, w, a.initial(), vec![0; a.dim()])
}

fn vectors(dim: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// ε-steps per block for the oracle. Generated ε-vectors are 0/1 over at
/// most three states, and past 6 the generated constraints only see the
/// value mod 6, so 64 steps is well clear of anything they distinguish.
const EPS_BLOCK: usize = 64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn explicit_membership_matches_definition(s in (1usize..=3).prop_flat_map(explicit)) {
        for v in vectors(s.dim(), 6) {
            prop_assert_eq!(s.contains(&v).unwrap(), in_explicit(&s, &v));
        }
    }

    #[test]
    fn union_of_sets(
        (s, t) in (1usize..=3).prop_flat_map(|d| (explicit(d), explicit(d)))
    ) {
        let u = union_sets(&s, &t).unwrap();
        for v in vectors(s.dim(), if s.dim() == 3 { 5 } else { 8 }) {
            prop_assert_eq!(u.contains(&v).unwrap(), in_explicit(&s, &v) || in_explicit(&t, &v));
        }
    }

    #[test]
    fn concatenation_of_sets(s in (1usize..=2).prop_flat_map(explicit), t in (1usize..=2).prop_flat_map(explicit)) {
        let c = concat_sets(&s, &t);
        for v in vectors(s.dim(), 5) {
            for w in vectors(t.dim(), 5) {
                let vw: Vec<u64> = v.iter().chain(&w).copied().collect();
                prop_assert_eq!(c.contains(&vw).unwrap(), in_explicit(&s, &v) && in_explicit(&t, &w));
            }
        }
    }

    #[test]
    fn complement_flips_membership(k in (1usize..=2).prop_flat_map(constraint)) {
        let n = k.not();
        for v in vectors(k.dim(), 6) {
            prop_assert_eq!(n.contains(&v).unwrap(), !k.contains(&v).unwrap());
        }
    }

    #[test]
    fn member_matches_run_enumeration(a in automaton()) {
        for w in words_up_to(2, 6) {
            prop_assert_eq!(member(&a, &w).unwrap(), brute_member(&a, &w));
        }
    }

    #[test]
    fn completion_preserves_language(a in automaton()) {
        let c = complete(&a);
        for w in words_up_to(2, 6) {
            prop_assert_eq!(member(&c, &w).unwrap(), member(&a, &w).unwrap());
        }
    }

    #[test]
    fn emptiness_is_sound(a in automaton()) {
        match is_empty(&a).unwrap() {
            Emptiness::Witness(w) => prop_assert!(member(&a, &w).unwrap()),
            Emptiness::Empty => {
                for w in words_up_to(2, 8) {
                    prop_assert!(!member(&a, &w).unwrap());
                }
            }
            Emptiness::Unknown => {}
        }
    }

    #[test]
    fn infinite_certificates_pump(a in automaton()) {
        if let Finiteness::Infinite(c) = is_finite(&a).unwrap() {
            let mut last = None;
            for lambda in 0..5 {
                let w = c.pumped(&a, lambda);
                prop_assert!(member(&a, &w).unwrap());
                prop_assert!(last.is_none_or(|n| w.len() > n));
                last = Some(w.len());
            }
        }
    }

    #[test]
    fn union_and_intersection(a in automaton(), b in automaton()) {
        let u = union_pa(&a, &b).unwrap().automaton;
        let i = intersect_pa(&a, &b).unwrap().automaton;
        for w in words_up_to(2, 5) {
            let (x, y) = (brute_member(&a, &w), brute_member(&b, &w));
            prop_assert_eq!(member(&u, &w).unwrap(), x || y);
            prop_assert_eq!(member(&i, &w).unwrap(), x && y);
        }
    }

    #[test]
    fn inverse_images(a in automaton(), images in prop::collection::vec("[ab]{0,2}", 2)) {
        let maps: Vec<String> = images.iter().zip(["x", "y"]).map(|(img, l)| format!("{l}={img}")).collect();
        let h = Homomorphism::parse(a.alphabet(), &maps).unwrap();
        let inv = inverse_hom(&a, &h).unwrap().automaton;
        for w in words_up_to(2, 5) {
            prop_assert_eq!(member(&inv, &w).unwrap(), brute_member(&a, &h.apply(&w)));
        }
    }

    #[test]
    fn epsilon_elimination(e in epsilon_automaton()) {
        let a = eliminate_epsilon(&e).unwrap();
        for w in words_up_to(2, 4) {
            prop_assert_eq!(member(&a, &w).unwrap(), member_epsilon(&e, &w, Some(EPS_BLOCK)).unwrap());
        }
    }

    #[test]
    fn documents_round_trip(a in automaton(), e in epsilon_automaton()) {
        let text = write_pa(&a, None);
        let doc = parse_document(&text).unwrap();
        prop_assert_eq!(doc.to_text(), text.clone());
        prop_assert_eq!(parse_document(&doc.to_json()).unwrap().to_text(), text);
        let etext = write_epsilon(&e);
        let Document::Epsilon(back) = parse_document(&etext).unwrap() else { panic!("kind changed") };
        prop_assert_eq!(write_epsilon(&back), etext);
    }

    #[test]
    fn equivalence_is_reflexive(a in automaton()) {
        prop_assert_eq!(bounded_equiv(&a, &a, 6).unwrap(), Equivalence::EqualToBound(6));
        let c = complete(&a);
        prop_assert_eq!(bounded_equiv(&a, &c, 6).unwrap(), Equivalence::EqualToBound(6));
    }
}
