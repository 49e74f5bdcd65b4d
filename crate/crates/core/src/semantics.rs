//! Declarative semantics used as a test oracle: depth-bounded proof search
//! in qualified Horn logic, and the immediate-consequence operator over a
//! finite ground fragment of the annotated Herbrand base.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::{Domain, QualValue};
use crate::resolution::clause_index;
use crate::syntax::{sym, Atom, Clause, Program, Symbol, Term};
use crate::unify::{match_atom, mgu, rename_clause_with_map, Substitution, VarSupply};

/// `A#d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedAtom {
    pub atom: Atom,
    pub value: QualValue,
}

impl fmt::Display for AnnotatedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.atom, self.value)
    }
}

/// One inference of the qualified modus ponens rule together with the
/// proofs of its premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub root: AnnotatedAtom,
    /// Position of the clause in the program.
    pub clause: usize,
    /// Instantiates the clause's own variables.
    pub substitution: Substitution,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    /// Height in inference steps; a fact gives height 1.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    /// Re-checks every inference of the tree against `program`.
    pub fn is_valid(&self, program: &Program) -> bool {
        let Some(clause) = program.clauses().get(self.clause) else {
            return false;
        };
        let premises: Vec<AnnotatedAtom> = self.children.iter().map(|c| c.root.clone()).collect();
        qmp_check(program.domain(), clause, &self.substitution, &premises, &self.root)
            && self.children.iter().all(|c| c.is_valid(program))
    }

    /// Indented rendering, root first.
    pub fn render(&self, program: &Program) -> String {
        let mut out = String::new();
        self.render_into(program, 0, &mut out);
        out
    }

    fn render_into(&self, program: &Program, indent: usize, out: &mut String) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        out.push_str(&format!("{}  [{}]\n", self.root, program.label(self.clause)));
        for c in &self.children {
            c.render_into(program, indent + 1, out);
        }
    }
}

/// One application of the inference rule: `conclusion = head·θ`, every
/// premise atom is the matching body atom under `θ`, and the conclusion's
/// value is below `d ∘ ⊓{premise values}`.
pub fn qmp_check(
    domain: &Domain,
    clause: &Clause,
    theta: &Substitution,
    premises: &[AnnotatedAtom],
    conclusion: &AnnotatedAtom,
) -> bool {
    if theta.apply_atom(&clause.head) != conclusion.atom || premises.len() != clause.body.len() {
        return false;
    }
    if clause.body.iter().zip(premises).any(|(b, p)| theta.apply_atom(b) != p.atom) {
        return false;
    }
    if domain.is_bot(&conclusion.value) || premises.iter().any(|p| domain.is_bot(&p.value)) {
        return false;
    }
    domain
        .big_glb(premises.iter().map(|p| &p.value))
        .and_then(|g| domain.attenuate(&clause.attenuation, &g))
        .and_then(|bound| domain.leq(&conclusion.value, &bound))
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofSearch {
    Proved(ProofTree),
    /// No proof of any height exists.
    Refuted,
    /// No proof within the bound, but the search was cut at the bound.
    BoundReached,
}

/// A proof of `target` with height at most `depth_bound`, if one exists.
pub fn qhl_prove(program: &Program, target: &AnnotatedAtom, depth_bound: usize) -> Option<ProofTree> {
    match qhl_decide(program, target, depth_bound) {
        ProofSearch::Proved(tree) => Some(tree),
        _ => None,
    }
}

/// Searches for a proof of `target` with height at most `depth_bound`.
///
/// Variables of the target atom are rigid: the proof must conclude exactly
/// that atom, not an instance of it. Clauses whose attenuation already
/// drops the accumulated bound below the target value are skipped, since
/// attenuation never raises a value.
pub fn qhl_decide(program: &Program, target: &AnnotatedAtom, depth_bound: usize) -> ProofSearch {
    let domain = program.domain();
    if !domain.contains(&target.value) || domain.is_bot(&target.value) || depth_bound == 0 {
        return if depth_bound == 0 {
            ProofSearch::BoundReached
        } else {
            ProofSearch::Refuted
        };
    }
    let frozen: Substitution = dedup(target.atom.vars())
        .into_iter()
        .map(|v| {
            let c = Term::App(sym(&format!("{FROZEN}{v}")), Vec::new());
            (v, c)
        })
        .collect();
    let goal = frozen.apply_atom(&target.atom);
    let mut prover = Prover {
        program,
        domain,
        index: clause_index(program),
        supply: VarSupply::new("_P"),
        hit_bound: false,
    };
    let top = domain.top();
    let mut found: Option<(Substitution, Partial)> = None;
    prover.solve_atom(
        &goal,
        &Substitution::new(),
        &top,
        &target.value,
        depth_bound,
        &mut |_, s, tree| {
            found = Some((s.clone(), tree));
            true
        },
    );
    match found {
        Some((s, partial)) => {
            let mut tree = partial.finish(&s, program);
            tree.root.value = target.value.clone();
            ProofSearch::Proved(tree)
        }
        None if prover.hit_bound => ProofSearch::BoundReached,
        None => ProofSearch::Refuted,
    }
}

/// A proof node whose atoms still wait for the final substitution.
#[derive(Debug, Clone)]
struct Partial {
    atom: Atom,
    clause: usize,
    renaming: Substitution,
    value: QualValue,
    children: Vec<Partial>,
}

impl Partial {
    fn finish(&self, s: &Substitution, program: &Program) -> ProofTree {
        let apply = |a: &Atom| Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(|t| thaw(&s.apply_term(t))).collect(),
        };
        let original = &program.clauses()[self.clause];
        let substitution: Substitution = original
            .vars()
            .into_iter()
            .map(|v| {
                let renamed = self.renaming.apply_term(&Term::Var(v.clone()));
                (v, thaw(&s.apply_term(&renamed)))
            })
            .filter(|(v, t)| *t != Term::Var(v.clone()))
            .collect();
        ProofTree {
            root: AnnotatedAtom {
                atom: apply(&self.atom),
                value: self.value.clone(),
            },
            clause: self.clause,
            substitution,
            children: self.children.iter().map(|c| c.finish(s, program)).collect(),
        }
    }
}

/// Prefix of the constants that stand in for a target's variables during
/// proof search; no parsed constructor can start with it.
const FROZEN: &str = "?";

fn thaw(t: &Term) -> Term {
    match t {
        Term::App(f, args) if args.is_empty() && f.starts_with(FROZEN) => Term::Var(sym(&f[FROZEN.len()..])),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(thaw).collect()),
        Term::Var(_) => t.clone(),
    }
}

type Found<'k> = dyn FnMut(&mut Prover<'_>, &Substitution, Partial) -> bool + 'k;
type BodyDone<'k> = dyn FnMut(&mut Prover<'_>, &Substitution, Vec<Partial>) -> bool + 'k;

struct Prover<'p> {
    program: &'p Program,
    domain: &'p Domain,
    index: BTreeMap<(Symbol, usize), Vec<usize>>,
    supply: VarSupply,
    hit_bound: bool,
}

impl Prover<'_> {
    /// Proves `atom` under `subst` so that `alpha ∘ value ⊒ beta`, calling
    /// `k` for each proof until it returns `true`.
    fn solve_atom(
        &mut self,
        atom: &Atom,
        subst: &Substitution,
        alpha: &QualValue,
        beta: &QualValue,
        depth: usize,
        k: &mut Found<'_>,
    ) -> bool {
        let goal = subst.apply_atom(atom);
        let program = self.program;
        let candidates = self.index.get(&goal.key()).cloned().unwrap_or_default();
        for ci in candidates {
            let clause = &program.clauses()[ci];
            let alpha_d = self.domain.attenuate(alpha, &clause.attenuation).expect("program domain");
            if !self.domain.leq(beta, &alpha_d).expect("program domain") {
                continue;
            }
            let (renamed, renaming) = rename_clause_with_map(clause, &mut self.supply);
            let Some(m) = mgu(&goal, &renamed.head) else { continue };
            if !clause.body.is_empty() && depth <= 1 {
                self.hit_bound = true;
                continue;
            }
            let s1 = subst.compose(&m);
            let d = clause.attenuation.clone();
            let head = renamed.head.clone();
            let body = renamed.body.clone();
            let mut done = |p: &mut Prover<'_>, s: &Substitution, children: Vec<Partial>| {
                let value = p
                    .domain
                    .big_glb(children.iter().map(|c| &c.value))
                    .and_then(|g| p.domain.attenuate(&d, &g))
                    .expect("program domain");
                let ok = p
                    .domain
                    .attenuate(alpha, &value)
                    .and_then(|av| p.domain.leq(beta, &av))
                    .expect("program domain");
                if !ok {
                    return false;
                }
                let node = Partial {
                    atom: head.clone(),
                    clause: ci,
                    renaming: renaming.clone(),
                    value,
                    children,
                };
                k(p, s, node)
            };
            if self.solve_body(&body, 0, &s1, &alpha_d, beta, depth - 1, Vec::new(), &mut done) {
                return true;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_body(
        &mut self,
        body: &[Atom],
        i: usize,
        subst: &Substitution,
        alpha: &QualValue,
        beta: &QualValue,
        depth: usize,
        acc: Vec<Partial>,
        k: &mut BodyDone<'_>,
    ) -> bool {
        if i == body.len() {
            return k(self, subst, acc);
        }
        let mut next = |p: &mut Prover<'_>, s: &Substitution, tree: Partial| {
            let mut acc = acc.clone();
            acc.push(tree);
            p.solve_body(body, i + 1, s, alpha, beta, depth, acc, &mut *k)
        };
        self.solve_atom(&body[i], subst, alpha, beta, depth, &mut next)
    }
}

/// The ground terms of depth at most `bound` over a set of constructors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    bound: usize,
    terms: Vec<Term>,
}

/// Constant added when a program has none, so the universe is not empty.
pub const FILLER_CONSTANT: &str = "c0";

impl Universe {
    pub fn new(functors: &[(Symbol, usize)], bound: usize) -> Self {
        let mut functors: Vec<(Symbol, usize)> = functors.to_vec();
        if !functors.iter().any(|(_, n)| *n == 0) {
            functors.push((sym(FILLER_CONSTANT), 0));
        }
        let mut terms: Vec<Term> = Vec::new();
        for level in 1..=bound {
            let known = terms.clone();
            let mut fresh = Vec::new();
            for (f, n) in &functors {
                if *n == 0 {
                    if level == 1 {
                        fresh.push(Term::App(f.clone(), Vec::new()));
                    }
                    continue;
                }
                if known.is_empty() {
                    continue;
                }
                // argument tuples over known terms with at least one of the
                // newest depth, so each term appears exactly once
                let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
                for _ in 0..*n {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            known.iter().map(move |x| {
                                let mut t = t.clone();
                                t.push(x.clone());
                                t
                            })
                        })
                        .collect();
                }
                for args in tuples {
                    if args.iter().any(|a| a.depth() == level - 1) {
                        fresh.push(Term::App(f.clone(), args));
                    }
                }
            }
            terms.extend(fresh);
        }
        Universe { bound, terms }
    }

    pub fn for_program(program: &Program, bound: usize) -> Self {
        Universe::new(&program.functors(), bound)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn admits(&self, atom: &Atom) -> bool {
        atom.args.iter().all(|t| t.depth() <= self.bound)
    }
}

/// Maximal annotations of ground atoms. The represented interpretation is
/// the downward closure: `A#d` belongs iff `d` is below some apex of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretationFragment {
    domain: Domain,
    universe: Universe,
    apexes: BTreeMap<Atom, Vec<QualValue>>,
}

impl InterpretationFragment {
    pub fn empty(domain: Domain, universe: Universe) -> Self {
        InterpretationFragment {
            domain,
            universe,
            apexes: BTreeMap::new(),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn apexes(&self, atom: &Atom) -> &[QualValue] {
        self.apexes.get(atom).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, &[QualValue])> {
        self.apexes.iter().map(|(a, v)| (a, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.apexes.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.apexes.is_empty()
    }

    /// Adds `atom#value`, keeping the apexes of `atom` an antichain.
    /// Returns whether the represented set grew.
    pub fn insert(&mut self, atom: Atom, value: QualValue) -> bool {
        let domain = &self.domain;
        let entry = self.apexes.entry(atom).or_default();
        if entry.iter().any(|e| domain.leq(&value, e).unwrap_or(false)) {
            return false;
        }
        entry.retain(|e| !domain.leq(e, &value).unwrap_or(false));
        entry.push(value);
        entry.sort();
        true
    }

    /// Removes one apex; used to build non-models in tests.
    pub fn remove(&mut self, atom: &Atom, value: &QualValue) -> bool {
        let Some(entry) = self.apexes.get_mut(atom) else {
            return false;
        };
        let before = entry.len();
        entry.retain(|e| e != value);
        let removed = entry.len() != before;
        if entry.is_empty() {
            self.apexes.remove(atom);
        }
        removed
    }

    /// `atom#value` is represented. A non-ground atom is a member when all
    /// of its ground instances over the universe are.
    pub fn contains(&self, atom: &Atom, value: &QualValue) -> bool {
        if self.domain.is_bot(value) {
            return false;
        }
        if atom.is_ground() {
            return self
                .apexes(atom)
                .iter()
                .any(|e| self.domain.leq(value, e).unwrap_or(false));
        }
        let vars = dedup(atom.vars());
        let mut ok = true;
        for_each_grounding(&vars, self.universe.terms(), &Substitution::new(), &mut |theta| {
            ok = self.contains(&theta.apply_atom(atom), value);
            !ok
        });
        ok
    }

    /// Every apex of `self` lies below an apex of `other`.
    pub fn is_subset_of(&self, other: &InterpretationFragment) -> bool {
        self.apexes
            .iter()
            .all(|(atom, values)| values.iter().all(|v| other.contains(atom, v)))
    }

    /// One `atom # value` line per apex, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .apexes
            .iter()
            .flat_map(|(a, vs)| vs.iter().map(move |v| format!("{a} # {v}")))
            .collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

fn dedup(mut vars: Vec<Symbol>) -> Vec<Symbol> {
    let mut seen = Vec::new();
    vars.retain(|v| {
        if seen.contains(v) {
            false
        } else {
            seen.push(v.clone());
            true
        }
    });
    vars
}

/// Calls `f` for every extension of `base` binding `vars` to universe terms
/// until it returns `true`.
fn for_each_grounding(vars: &[Symbol], terms: &[Term], base: &Substitution, f: &mut dyn FnMut(&Substitution) -> bool) -> bool {
    let Some((v, rest)) = vars.split_first() else {
        return f(base);
    };
    if base.get(v).is_some() {
        return for_each_grounding(rest, terms, base, f);
    }
    for t in terms {
        let mut s = base.clone();
        s.insert(v.clone(), t.clone());
        if for_each_grounding(rest, terms, &s, f) {
            return true;
        }
    }
    false
}

/// The immediate consequences of `frag`: for every clause instance whose
/// body atoms all have apexes in `frag`, the head annotated with
/// `d ∘ ⊓{body apexes}`. Heads deeper than the universe bound are dropped.
pub fn tp_step(program: &Program, frag: &InterpretationFragment) -> InterpretationFragment {
    let domain = program.domain();
    let mut out = InterpretationFragment::empty(domain.clone(), frag.universe.clone());
    for clause in program.clauses() {
        join_body(frag, &clause.body, &Substitution::new(), &mut Vec::new(), &mut |theta, values| {
            let value = domain
                .big_glb(values.iter().copied())
                .and_then(|g| domain.attenuate(&clause.attenuation, &g))
                .expect("program domain");
            let head = theta.apply_atom(&clause.head);
            if head.is_ground() {
                if frag.universe.admits(&head) {
                    out.insert(head, value);
                }
                return;
            }
            let vars = dedup(head.vars());
            for_each_grounding(&vars, frag.universe.terms(), theta, &mut |full| {
                let head = full.apply_atom(&clause.head);
                if frag.universe.admits(&head) {
                    out.insert(head, value.clone());
                }
                false
            });
        });
    }
    out
}

fn join_body<'f>(
    frag: &'f InterpretationFragment,
    body: &[Atom],
    theta: &Substitution,
    values: &mut Vec<&'f QualValue>,
    f: &mut dyn FnMut(&Substitution, &[&'f QualValue]),
) {
    let Some((first, rest)) = body.split_first() else {
        f(theta, values);
        return;
    };
    let pattern = theta.apply_atom(first);
    if pattern.is_ground() {
        for v in frag.apexes(&pattern) {
            values.push(v);
            join_body(frag, rest, theta, values, f);
            values.pop();
        }
        return;
    }
    let key = pattern.key();
    let from = Atom {
        predicate: key.0.clone(),
        args: Vec::new(),
    };
    for (atom, apexes) in frag.apexes.range(from..) {
        if atom.predicate != key.0 {
            break;
        }
        let Some(m) = match_atom(&pattern, atom) else { continue };
        let extended = theta.compose(&m);
        for v in apexes {
            values.push(v);
            join_body(frag, rest, &extended, values, f);
            values.pop();
        }
    }
}

/// Iterates `tp_step` from the empty fragment. Returns the last fragment
/// and whether it is a fixpoint.
pub fn least_model(program: &Program, universe_bound: usize, max_iters: usize) -> (InterpretationFragment, bool) {
    least_model_over(program, Universe::for_program(program, universe_bound), max_iters)
}

pub fn least_model_over(program: &Program, universe: Universe, max_iters: usize) -> (InterpretationFragment, bool) {
    let mut frag = InterpretationFragment::empty(program.domain().clone(), universe);
    for _ in 0..max_iters {
        let next = tp_step(program, &frag);
        if next == frag {
            return (frag, true);
        }
        frag = next;
    }
    let fixpoint = tp_step(program, &frag) == frag;
    (frag, fixpoint)
}

/// `T_P(frag) ⊆ frag`.
pub fn is_model(program: &Program, frag: &InterpretationFragment) -> bool {
    tp_step(program, frag).is_subset_of(frag)
}
