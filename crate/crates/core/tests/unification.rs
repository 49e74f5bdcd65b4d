mod common;

use common::{atom, term, VARIABLES};
use proptest::prelude::*;
use qlp_core::semantics::Universe;
use qlp_core::syntax::sym;
use qlp_core::unify::match_terms;
use qlp_core::{mgu, Atom, Substitution, Term};

/// Ground terms of depth at most 2 over `a`, `b`, `f/1`.
fn small_universe() -> Vec<Term> {
    Universe::new(&[(sym("a"), 0), (sym("b"), 0), (sym("f"), 1)], 2).terms().to_vec()
}

fn all_groundings(vars: &[qlp_core::syntax::Symbol], universe: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                universe.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn shared_vars(a: &Atom, b: &Atom) -> Vec<qlp_core::syntax::Symbol> {
    let mut vars = a.vars();
    b.collect_vars(&mut vars);
    vars.sort();
    vars.dedup();
    vars
}

// only f/1 and constants, so the brute-force universe is small
fn unary_term(depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        (0..VARIABLES.len()).prop_map(|i| Term::var(VARIABLES[i])),
    ];
    if depth <= 1 {
        return leaf.boxed();
    }
    prop_oneof![2 => leaf, 1 => unary_term(depth - 1).prop_map(|t| Term::app("f", vec![t]))].boxed()
}

fn unary_atom() -> BoxedStrategy<Atom> {
    (unary_term(2), unary_term(2)).prop_map(|(s, t)| Atom::new("r", vec![s, t])).boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mgu_unifies(a in atom(3, &VARIABLES), b in atom(3, &VARIABLES)) {
        if let Some(s) = mgu(&a, &b) {
            prop_assert_eq!(s.apply_atom(&a), s.apply_atom(&b));
            prop_assert!(s.is_idempotent());
        }
    }

    #[test]
    fn substitution_application_is_idempotent(a in atom(3, &VARIABLES), b in atom(3, &VARIABLES), t in term(3, &VARIABLES)) {
        if let Some(s) = mgu(&a, &b) {
            prop_assert_eq!(s.apply_term(&s.apply_term(&t)), s.apply_term(&t));
        }
    }

    #[test]
    fn mgu_is_most_general_among_ground_unifiers(a in unary_atom(), b in unary_atom()) {
        let universe = small_universe();
        let vars = shared_vars(&a, &b);
        let result = mgu(&a, &b);
        for u in all_groundings(&vars, &universe) {
            if u.apply_atom(&a) != u.apply_atom(&b) {
                continue;
            }
            let s = result.as_ref().expect("a unifier exists, so mgu must succeed");
            // u = s·r on the atoms' variables iff each xs matches onto xu
            let pairs: Vec<(Term, Term)> = vars
                .iter()
                .map(|x| {
                    let v = Term::Var(x.clone());
                    (s.apply_term(&v), u.apply_term(&v))
                })
                .collect();
            prop_assert!(match_terms(&pairs).is_some(), "{} does not factor through {}", u, s);
        }
    }

    #[test]
    fn mgu_is_symmetric_up_to_renaming(a in atom(3, &VARIABLES), b in atom(3, &VARIABLES)) {
        let ab = mgu(&a, &b);
        let ba = mgu(&b, &a);
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let (Some(s), Some(t)) = (ab, ba) {
            let x = s.apply_atom(&a);
            let y = t.apply_atom(&a);
            prop_assert!(qlp_core::unify::match_atom(&x, &y).is_some() && qlp_core::unify::match_atom(&y, &x).is_some());
        }
    }
}

#[test]
fn occurs_check_blocks_cyclic_bindings() {
    let a = Atom::new("p", vec![Term::var("X")]);
    let b = Atom::new("p", vec![Term::app("f", vec![Term::var("X")])]);
    assert!(mgu(&a, &b).is_none());
}
