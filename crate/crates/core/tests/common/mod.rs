#![allow(dead_code)]

use proptest::prelude::*;
use qlp_core::{parse_program, Atom, Clause, Domain, Program, QualValue, Term};

pub const PU: &str = "\
cruel(X) <-0.90- human(X), eats(X,Y), animal(Y)
cruel(X) <-0.40- human(X), eats(X,Y), plant(Y)
animal(bird) <-1.0-
animal(cat) <-1.0-
plant(oak) <-1.0-
plant(apple) <-1.0-
human(adam) <-1.0-
human(eve) <-1.0-
human(father(X)) <-0.90- human(X)
human(mother(X)) <-0.90- human(X)
eats(adam,X) <-0.80-
eats(eve,X) <-0.30- animal(X)
eats(eve,X) <-0.60- plant(X)
eats(father(X),Y) <-0.80- eats(X,Y)
eats(mother(X),Y) <-0.70- eats(X,Y)
";

pub fn pu() -> Program {
    parse_program(PU, &Domain::Cert).unwrap()
}

pub fn pw() -> Program {
    pu().requalify(Domain::Weight, QualValue::weight(1, 1)).unwrap()
}

pub const PREDICATES: [(&str, usize); 3] = [("p", 1), ("q", 1), ("r", 2)];
pub const CONSTANTS: [&str; 2] = ["a", "b"];
pub const VARIABLES: [&str; 3] = ["X", "Y", "Z"];

pub fn domains() -> Vec<Domain> {
    vec![
        Domain::Bool,
        Domain::Cert,
        Domain::Weight,
        Domain::product(Domain::Cert, Domain::Weight),
    ]
}

pub fn value(domain: &Domain) -> BoxedStrategy<QualValue> {
    match domain {
        Domain::Bool => any::<bool>().prop_map(QualValue::Bool).boxed(),
        Domain::Cert => (0i64..=10).prop_map(|n| QualValue::cert(n, 10)).boxed(),
        Domain::Weight => prop_oneof![
            9 => (0i64..=12).prop_map(|n| QualValue::weight(n, 2)),
            1 => Just(QualValue::infinity()),
        ]
        .boxed(),
        Domain::Product(l, r) => (value(l), value(r)).prop_map(|(a, b)| QualValue::pair(a, b)).boxed(),
    }
}

pub fn non_bot_value(domain: &Domain) -> BoxedStrategy<QualValue> {
    let d = domain.clone();
    value(domain).prop_filter("non-bottom", move |v| !d.is_bot(v)).boxed()
}

/// Terms of depth at most `depth` over `a`, `b`, `f/1`, `g/2` and the
/// given variables.
pub fn term(depth: u32, vars: &'static [&'static str]) -> BoxedStrategy<Term> {
    let mut leaves: Vec<BoxedStrategy<Term>> = CONSTANTS.iter().map(|c| Just(Term::constant(c)).boxed()).collect();
    for v in vars {
        leaves.push(Just(Term::var(v)).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    if depth <= 1 {
        return leaf;
    }
    let inner = term(depth - 1, vars);
    prop_oneof![
        2 => leaf,
        1 => inner.clone().prop_map(|t| Term::app("f", vec![t])),
        1 => (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
    ]
    .boxed()
}

pub fn atom(depth: u32, vars: &'static [&'static str]) -> BoxedStrategy<Atom> {
    (0..PREDICATES.len(), proptest::collection::vec(term(depth, vars), 2))
        .prop_map(|(i, args)| {
            let (p, n) = PREDICATES[i];
            Atom::new(p, args[..n].to_vec())
        })
        .boxed()
}

/// Clauses whose body arguments are head variables or constants, so every
/// atom in a proof of a ground head is no deeper than the head.
pub fn shallow_clause(domain: &Domain, max_body: usize) -> BoxedStrategy<Clause> {
    let body_arg = prop_oneof![
        (0..VARIABLES.len()).prop_map(Some),
        (0..CONSTANTS.len()).prop_map(|_| None),
    ];
    (
        atom(2, &VARIABLES),
        non_bot_value(domain),
        proptest::collection::vec((0..PREDICATES.len(), proptest::collection::vec((body_arg, 0..CONSTANTS.len()), 2)), 0..=max_body),
    )
        .prop_map(|(head, attenuation, body)| {
            let head_vars = head.vars();
            let body = body
                .into_iter()
                .map(|(pi, args)| {
                    let (p, n) = PREDICATES[pi];
                    let args = args[..n]
                        .iter()
                        .map(|(v, c)| match v {
                            Some(i) if !head_vars.is_empty() => Term::Var(head_vars[i % head_vars.len()].clone()),
                            _ => Term::constant(CONSTANTS[*c]),
                        })
                        .collect();
                    Atom::new(p, args)
                })
                .collect();
            Clause { head, attenuation, body }
        })
        .boxed()
}

pub fn shallow_program(domain: &Domain, max_clauses: usize) -> BoxedStrategy<Program> {
    let d = domain.clone();
    proptest::collection::vec(shallow_clause(domain, 2), 1..=max_clauses)
        .prop_map(move |clauses| Program::new(d.clone(), clauses).unwrap())
        .boxed()
}

/// Clauses with arbitrary body atoms, including variables local to the body.
pub fn program(domain: &Domain, max_clauses: usize) -> BoxedStrategy<Program> {
    let d = domain.clone();
    let clause = (atom(2, &VARIABLES), non_bot_value(domain), proptest::collection::vec(atom(2, &VARIABLES), 0..=2))
        .prop_map(|(head, attenuation, body)| Clause { head, attenuation, body });
    proptest::collection::vec(clause, 1..=max_clauses)
        .prop_map(move |clauses| Program::new(d.clone(), clauses).unwrap())
        .boxed()
}
