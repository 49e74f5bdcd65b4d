//! Random corpus, a textbook SLD resolver and a bounded-universe solution
//! enumerator shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qlp_core::semantics::{least_model_over, Universe};
use qlp_core::syntax::{sym, Symbol};
use qlp_core::{
    parse_program, Atom, Clause, Domain, GoalItem, InitialGoal, Program, QVar, QualSubstitution, QualValue,
    Substitution, Term,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PU_TEXT: &str = include_str!("../../fixtures/pu.qlp");
pub const PW_TEXT: &str = include_str!("../../fixtures/pw.qlp");

pub fn pu() -> Program {
    parse_program(PU_TEXT, &Domain::Cert).unwrap()
}

pub fn pw() -> Program {
    parse_program(PW_TEXT, &Domain::Weight).unwrap()
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

const PREDICATES: [(&str, usize); 3] = [("p", 1), ("q", 2), ("r", 1)];
const CONSTANTS: [&str; 3] = ["a", "b", "c"];
const VARIABLES: [&str; 3] = ["X", "Y", "Z"];

pub fn corpus_domains() -> Vec<Domain> {
    vec![
        Domain::Bool,
        Domain::Cert,
        Domain::Weight,
        Domain::product(Domain::Cert, Domain::Weight),
    ]
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs.choose(rng).expect("non-empty choice").clone()
}

/// Compound with probability 0.2 when depth allows, otherwise a variable
/// with probability `var_share` or a constant.
fn term(rng: &mut ChaCha8Rng, depth: usize, vars: &[&str], var_share: f64) -> Term {
    let roll: f64 = rng.gen();
    if depth >= 2 && roll < 0.2 {
        if rng.gen_bool(0.7) {
            Term::app("f", vec![term(rng, 1, vars, var_share)])
        } else {
            Term::app("g", vec![term(rng, 1, vars, var_share), term(rng, 1, vars, var_share)])
        }
    } else if rng.gen_bool(var_share) && !vars.is_empty() {
        Term::var(pick(rng, vars))
    } else {
        Term::constant(pick(rng, &CONSTANTS))
    }
}

fn atom(rng: &mut ChaCha8Rng, predicates: &[(&str, usize)], vars: &[&str], var_share: f64) -> Atom {
    let (p, n) = pick(rng, predicates);
    Atom::new(p, (0..n).map(|_| term(rng, 2, vars, var_share)).collect())
}

fn cert(rng: &mut ChaCha8Rng, choices: &[(i64, i64)]) -> QualValue {
    let (n, d) = pick(rng, choices);
    QualValue::cert(n, d)
}

fn weight(rng: &mut ChaCha8Rng, choices: &[(i64, i64)]) -> QualValue {
    let (n, d) = pick(rng, choices);
    QualValue::weight(n, d)
}

pub fn attenuation(rng: &mut ChaCha8Rng, domain: &Domain) -> QualValue {
    match domain {
        Domain::Bool => QualValue::Bool(true),
        Domain::Cert => cert(rng, &[(1, 2), (7, 10), (4, 5), (9, 10), (1, 1), (1, 1)]),
        Domain::Weight => weight(rng, &[(1, 2), (1, 1), (1, 1), (2, 1)]),
        Domain::Product(l, r) => QualValue::pair(attenuation(rng, l), attenuation(rng, r)),
    }
}

pub fn threshold(rng: &mut ChaCha8Rng, domain: &Domain) -> QualValue {
    match domain {
        Domain::Bool => QualValue::Bool(true),
        Domain::Cert => cert(rng, &[(1, 10), (1, 4), (2, 5), (1, 2), (4, 5)]),
        Domain::Weight => weight(rng, &[(2, 1), (3, 1), (4, 1), (5, 1)]),
        Domain::Product(l, r) => QualValue::pair(threshold(rng, l), threshold(rng, r)),
    }
}

/// A program of at most six clauses with at most two body atoms each and
/// argument terms of depth at most two, with at least one fact.
pub fn random_program(rng: &mut ChaCha8Rng, domain: &Domain) -> Program {
    let n = rng.gen_range(2..=6);
    let mut clauses: Vec<Clause> = (0..n)
        .map(|_| {
            let head = atom(rng, &PREDICATES, &VARIABLES[..2], 0.5);
            let k = pick(rng, &[0, 0, 0, 1, 1, 1, 2]);
            let body = (0..k).map(|_| atom(rng, &PREDICATES, &VARIABLES, 0.6)).collect();
            Clause {
                head,
                attenuation: attenuation(rng, domain),
                body,
            }
        })
        .collect();
    if clauses.iter().all(|c| !c.body.is_empty()) {
        let i = rng.gen_range(0..clauses.len());
        clauses[i].body.clear();
    }
    Program::new(domain.clone(), clauses).expect("fixed arities")
}

/// One or two atoms over predicates defined by `program`.
pub fn random_goal(rng: &mut ChaCha8Rng, program: &Program) -> InitialGoal {
    let domain = program.domain();
    let mut defined: Vec<(&str, usize)> = PREDICATES
        .iter()
        .copied()
        .filter(|(p, n)| program.clauses().iter().any(|c| &*c.head.predicate == *p && c.head.args.len() == *n))
        .collect();
    if defined.is_empty() {
        defined = PREDICATES.to_vec();
    }
    let n = rng.gen_range(1..=2);
    let items = (0..n)
        .map(|i| GoalItem {
            atom: atom(rng, &defined, &VARIABLES[..2], 0.7),
            qvar: QVar::new(&format!("W{}", i + 1)),
            threshold: threshold(rng, domain),
        })
        .collect();
    InitialGoal::new(domain.clone(), items).expect("distinct qualification variables")
}

pub struct Case {
    pub seed: u64,
    pub program: Program,
    pub goal: InitialGoal,
}

/// `per_domain` cases for each corpus domain, reproducible from `seed`.
pub fn corpus(seed: u64, per_domain: usize) -> Vec<Case> {
    let mut out = Vec::new();
    for (di, domain) in corpus_domains().iter().enumerate() {
        for i in 0..per_domain {
            let case_seed = seed ^ ((di as u64) << 32) ^ i as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
            let program = random_program(&mut rng, domain);
            let goal = random_goal(&mut rng, &program);
            out.push(Case {
                seed: case_seed,
                program,
                goal,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// textbook SLD resolution on unannotated clauses

type Bindings = BTreeMap<Symbol, Term>;

fn walk(t: &Term, b: &Bindings) -> Term {
    match t {
        Term::Var(v) => match b.get(v) {
            Some(u) => walk(u, b),
            None => t.clone(),
        },
        Term::App(..) => t.clone(),
    }
}

fn resolve_fully(t: &Term, b: &Bindings) -> Term {
    match walk(t, b) {
        Term::App(f, args) => Term::App(f, args.iter().map(|a| resolve_fully(a, b)).collect()),
        v => v,
    }
}

fn occurs(v: &Symbol, t: &Term, b: &Bindings) -> bool {
    match walk(t, b) {
        Term::Var(w) => w == *v,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a, b)),
    }
}

fn unify(s: &Term, t: &Term, b: &mut Bindings) -> bool {
    let (s, t) = (walk(s, b), walk(t, b));
    match (&s, &t) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), _) => {
            if occurs(x, &t, b) {
                return false;
            }
            b.insert(x.clone(), t.clone());
            true
        }
        (_, Term::Var(_)) => unify(&t, &s, b),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, b))
        }
    }
}

fn rename(t: &Term, suffix: usize) -> Term {
    match t {
        Term::Var(v) => Term::Var(sym(&format!("{v}~{suffix}"))),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename(a, suffix)).collect()),
    }
}

fn rename_atom(a: &Atom, suffix: usize) -> Atom {
    Atom {
        predicate: a.predicate.clone(),
        args: a.args.iter().map(|t| rename(t, suffix)).collect(),
    }
}

/// Leftmost depth-first SLD resolution with clauses in program order,
/// exploring derivations of at most `max_depth` steps. Returns the goal
/// variables' bindings, in order of discovery.
pub fn textbook_sld(clauses: &[(Atom, Vec<Atom>)], goal: &[Atom], vars: &[Symbol], max_depth: usize) -> Vec<Vec<Term>> {
    let mut out = Vec::new();
    let mut counter = 0;
    sld(clauses, goal.to_vec(), Bindings::new(), max_depth, &mut counter, &mut |b| {
        out.push(vars.iter().map(|v| resolve_fully(&Term::Var(v.clone()), b)).collect());
    });
    out
}

fn sld(
    clauses: &[(Atom, Vec<Atom>)],
    goal: Vec<Atom>,
    b: Bindings,
    depth: usize,
    counter: &mut usize,
    found: &mut dyn FnMut(&Bindings),
) {
    let Some((first, rest)) = goal.split_first() else {
        found(&b);
        return;
    };
    if depth == 0 {
        return;
    }
    for (head, body) in clauses {
        if head.predicate != first.predicate || head.args.len() != first.args.len() {
            continue;
        }
        *counter += 1;
        let head = rename_atom(head, *counter);
        let mut b2 = b.clone();
        if !first.args.iter().zip(&head.args).all(|(s, t)| unify(s, t, &mut b2)) {
            continue;
        }
        let mut next: Vec<Atom> = body.iter().map(|a| rename_atom(a, *counter)).collect();
        next.extend(rest.iter().cloned());
        sld(clauses, next, b2, depth - 1, counter, found);
    }
}

/// Terms with variables renamed in order of first occurrence, so answers
/// compare up to renaming.
pub fn canonical(terms: &[Term]) -> String {
    let mut names: BTreeMap<Symbol, String> = BTreeMap::new();
    fn go(t: &Term, names: &mut BTreeMap<Symbol, String>) -> String {
        match t {
            Term::Var(v) => {
                let n = names.len();
                names.entry(v.clone()).or_insert_with(|| format!("V{n}")).clone()
            }
            Term::App(f, args) if args.is_empty() => f.to_string(),
            Term::App(f, args) => {
                let inner: Vec<String> = args.iter().map(|a| go(a, names)).collect();
                format!("{f}({})", inner.join(","))
            }
        }
    }
    let parts: Vec<String> = terms.iter().map(|t| go(t, &mut names)).collect();
    parts.join(" ; ")
}

pub fn canonical_answer(sigma: &Substitution, vars: &[Symbol]) -> String {
    let terms: Vec<Term> = vars.iter().map(|v| sigma.apply_term(&Term::Var(v.clone()))).collect();
    canonical(&terms)
}

// ---------------------------------------------------------------------------
// bounded-universe solutions

/// Maximal solutions `(θ, ρ)` of `goal` whose proofs have height at most
/// `height` and use only atoms over the ground terms of depth at most
/// `term_depth`: `θ` grounds every goal variable and `ρ(Wi)` is an apex of
/// `Aiθ` that meets the goal bound.
pub fn bounded_solutions(
    program: &Program,
    goal: &InitialGoal,
    term_depth: usize,
    height: usize,
) -> Vec<(Substitution, QualSubstitution)> {
    let domain = program.domain();
    let mut functors = program.functors();
    for item in goal.items() {
        collect_functors(&item.atom.args, &mut functors);
    }
    let universe = Universe::new(&functors, term_depth);
    let (frag, _) = least_model_over(program, universe.clone(), height);
    let vars = goal.vars();
    let mut out = Vec::new();
    let mut thetas = vec![Substitution::new()];
    for v in &vars {
        thetas = thetas
            .into_iter()
            .flat_map(|s| {
                universe.terms().iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    for theta in thetas {
        // one apex per goal item, across all combinations
        let mut rhos = vec![QualSubstitution::new()];
        for item in goal.items() {
            let atom = theta.apply_atom(&item.atom);
            let apexes: Vec<QualValue> = frag
                .apexes(&atom)
                .iter()
                .filter(|v| domain.leq(&item.threshold, v).unwrap())
                .cloned()
                .collect();
            rhos = rhos
                .into_iter()
                .flat_map(|r| {
                    apexes.iter().map(move |v| {
                        let mut r = r.clone();
                        r.insert(item.qvar.clone(), v.clone());
                        r
                    })
                })
                .collect();
        }
        out.extend(rhos.into_iter().map(|r| (theta.clone(), r)));
    }
    out
}

fn collect_functors(terms: &[Term], out: &mut Vec<(Symbol, usize)>) {
    for t in terms {
        if let Term::App(f, args) = t {
            if !out.iter().any(|(g, n)| g == f && *n == args.len()) {
                out.push((f.clone(), args.len()));
            }
            collect_functors(args, out);
        }
    }
}
