//! SLD resolution over a qualification domain.
//!
//! A goal state pairs the atoms still to be solved with the substitution
//! computed so far and a qualification constraint store. A step selects an
//! atom `A#W` whose threshold is `α ∘ W ⊒ β`, picks a clause `H <-d- B1..Bk`
//! with `d ∘ α ⊒ β`, unifies `A` with a fresh variant of `H`, and replaces
//! the threshold by `W = d ∘ ⊓{W1..Wk}` while the body atoms get fresh
//! variables `Wi` with thresholds `d ∘ α ∘ Wi ⊒ β`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::constraints::{ConstraintStore, QualConstraint, QualSubstitution};
use crate::domain::Domain;
use crate::semantics::{qhl_decide, AnnotatedAtom, ProofSearch};
use crate::syntax::{sym, Atom, Clause, InitialGoal, Program, QVar, Symbol};
use crate::unify::{match_terms, mgu, rename_clause_with_map, Substitution, VarSupply};

/// `A1#W1, ..., An#Wn | σ | Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalState {
    pub atoms: Vec<(Atom, QVar)>,
    pub sigma: Substitution,
    pub store: ConstraintStore,
    /// Index of the next qualification variable name `W<n>` to try.
    pub next_qvar: usize,
}

impl GoalState {
    pub fn is_solved(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `k` qualification variable names `W<n>` unused in this state.
    fn fresh_qvars(&self, k: usize) -> (Vec<QVar>, usize) {
        let mut next = self.next_qvar;
        if k == 0 {
            return (Vec::new(), next);
        }
        let taken: BTreeSet<QVar> = self
            .store
            .war()
            .into_iter()
            .chain(self.atoms.iter().map(|(_, w)| w.clone()))
            .collect();
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let w = QVar(sym(&format!("W{next}")));
            next += 1;
            if !taken.contains(&w) {
                out.push(w);
            }
        }
        (out, next)
    }

    pub fn display<'a>(&'a self, domain: &'a Domain) -> impl fmt::Display + 'a {
        GoalDisplay { goal: self, domain }
    }
}

struct GoalDisplay<'a> {
    goal: &'a GoalState,
    domain: &'a Domain,
}

impl fmt::Display for GoalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (atom, w)) in self.goal.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}#{w}")?;
        }
        write!(f, " | {{{}}} | {}", self.goal.sigma, self.goal.store.display(self.domain))
    }
}

/// The state of an initial goal: identity substitution and `⊤ ∘ Wi ⊒ βi`
/// for every item.
pub fn initial_state(goal: &InitialGoal) -> GoalState {
    let top = goal.domain().top();
    let store = ConstraintStore::from_constraints(
        goal.items()
            .iter()
            .map(|item| QualConstraint::Threshold {
                alpha: top.clone(),
                w: item.qvar.clone(),
                beta: item.threshold.clone(),
            })
            .collect(),
    );
    GoalState {
        atoms: goal.items().iter().map(|i| (i.atom.clone(), i.qvar.clone())).collect(),
        sigma: Substitution::new(),
        store,
        next_qvar: goal.items().len() + 1,
    }
}

/// One successful resolution step.
#[derive(Debug, Clone)]
pub struct Step {
    pub state: GoalState,
    /// Most general unifier of the selected atom and the renamed head.
    pub mgu: Substitution,
    /// Qualification variables given to the clause body atoms.
    pub fresh: Vec<QVar>,
}

/// Resolves the atom at `index` with `clause`. `None` when the clause is
/// not enabled (checked before renaming or unifying) or when the head does
/// not unify. With `prune` off the enablement check is skipped.
///
/// `keep` restricts the accumulated substitution to the variables worth
/// reporting; bindings for renamed clause variables are never read again.
pub fn resolution_step(
    domain: &Domain,
    state: &GoalState,
    index: usize,
    clause: &Clause,
    supply: &mut VarSupply,
    prune: bool,
    keep: Option<&[Symbol]>,
) -> Option<Step> {
    let (selected, w) = &state.atoms[index];
    let (alpha, beta) = state.store.threshold(w).expect("goal atom has a threshold constraint");
    if prune && !crate::constraints::enabled(domain, &clause.attenuation, alpha, beta) {
        return None;
    }
    let (renamed, _) = rename_clause_with_map(clause, supply);
    let unifier = mgu(selected, &renamed.head)?;

    let (fresh, next_qvar) = state.fresh_qvars(renamed.body.len());
    let store = if prune {
        state.store.resolve(domain, w, &clause.attenuation, &fresh)
    } else {
        state.store.resolve_unchecked(domain, w, &clause.attenuation, &fresh)
    };
    let mut next = GoalState {
        atoms: Vec::with_capacity(state.atoms.len() + renamed.body.len()),
        sigma: Substitution::new(),
        store,
        next_qvar,
    };
    for (i, (atom, v)) in state.atoms.iter().enumerate() {
        if i == index {
            for (b, wi) in renamed.body.iter().zip(&fresh) {
                next.atoms.push((unifier.apply_atom(b), wi.clone()));
            }
        } else {
            next.atoms.push((unifier.apply_atom(atom), v.clone()));
        }
    }
    let sigma = state.sigma.compose(&unifier);
    next.sigma = match keep {
        Some(vars) => sigma.restrict(vars),
        None => sigma,
    };
    Some(Step {
        state: next,
        mgu: unifier,
        fresh,
    })
}

/// `(σ, μ)`: a term substitution over the goal variables and the
/// qualification values of the goal's qualification variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComputedAnswer {
    pub sigma: Substitution,
    pub mu: QualSubstitution,
    /// Successful resolution steps taken by the search so far.
    pub steps: u64,
}

#[derive(Clone, Copy)]
pub enum Selection {
    Leftmost,
    Rightmost,
    /// Picks an atom index from a non-solved state.
    Custom(fn(&GoalState) -> usize),
}

impl Selection {
    pub fn select(&self, state: &GoalState) -> usize {
        match self {
            Selection::Leftmost => 0,
            Selection::Rightmost => state.atoms.len() - 1,
            Selection::Custom(rule) => rule(state),
        }
    }
}

impl fmt::Debug for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Leftmost => f.write_str("Leftmost"),
            Selection::Rightmost => f.write_str("Rightmost"),
            Selection::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub selection: Selection,
    /// Resolution steps allowed along one branch; deeper branches are cut
    /// and the search reports truncation.
    pub max_depth: Option<usize>,
    pub max_answers: Option<usize>,
    /// Resolution steps allowed over the whole search.
    pub max_steps: Option<u64>,
    pub trace: bool,
    /// Check enablement before each step. When off, answers whose
    /// qualifications miss a goal bound are filtered out at the end.
    pub prune: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            selection: Selection::Leftmost,
            max_depth: Some(10_000),
            max_answers: None,
            max_steps: None,
            trace: false,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    Running,
    /// Every branch was explored.
    Exhausted,
    /// Some branch was cut by a budget, or the answer limit stopped the
    /// search with choice points left.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("program is over `{program}` but the goal is over `{goal}`")]
pub struct DomainMismatch {
    pub program: String,
    pub goal: String,
}

struct Frame {
    state: GoalState,
    depth: usize,
    selected: usize,
    /// Position in the candidate clause list of the selected atom.
    next_alt: usize,
}

/// Depth-first enumeration of computed answers, clauses in program order.
pub struct Solver<'p> {
    program: &'p Program,
    index: BTreeMap<(Symbol, usize), Vec<usize>>,
    config: SearchConfig,
    goal: InitialGoal,
    goal_vars: Vec<Symbol>,
    stack: Vec<Frame>,
    supply: VarSupply,
    steps: u64,
    answers: usize,
    cut: bool,
    status: SearchStatus,
    trace: Vec<String>,
}

pub fn solve<'p>(program: &'p Program, goal: &InitialGoal, config: SearchConfig) -> Result<Solver<'p>, DomainMismatch> {
    if program.domain() != goal.domain() {
        return Err(DomainMismatch {
            program: format!("{}", program.domain()),
            goal: format!("{}", goal.domain()),
        });
    }
    Ok(Solver::new(program, goal, config))
}

pub(crate) fn clause_index(program: &Program) -> BTreeMap<(Symbol, usize), Vec<usize>> {
    let mut index: BTreeMap<(Symbol, usize), Vec<usize>> = BTreeMap::new();
    for (i, c) in program.clauses().iter().enumerate() {
        index.entry(c.head.key()).or_default().push(i);
    }
    index
}

impl<'p> Solver<'p> {
    fn new(program: &'p Program, goal: &InitialGoal, config: SearchConfig) -> Self {
        let state = initial_state(goal);
        let selected = if state.is_solved() { 0 } else { config.selection.select(&state) };
        Solver {
            program,
            index: clause_index(program),
            goal_vars: goal.vars(),
            goal: goal.clone(),
            config,
            stack: alloc::vec![Frame {
                state,
                depth: 0,
                selected,
                next_alt: 0,
            }],
            supply: VarSupply::default(),
            steps: 0,
            answers: 0,
            cut: false,
            status: SearchStatus::Running,
            trace: Vec::new(),
        }
    }

    pub fn status(&self) -> SearchStatus {
        self.status
    }

    /// Successful resolution steps so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Trace lines recorded so far (only with `trace` on).
    pub fn trace(&self) -> &[String] {
        &self.trace
    }

    fn finish(&mut self) {
        self.stack.clear();
        if self.status == SearchStatus::Running {
            self.status = if self.cut {
                SearchStatus::Truncated
            } else {
                SearchStatus::Exhausted
            };
        }
    }

    fn answer_of(&self, state: &GoalState) -> Option<ComputedAnswer> {
        let domain = self.program.domain();
        let omega = state.store.omega(domain).expect("solved goals have solved stores");
        let mu = omega.restrict(&self.goal.qvars());
        if !self.config.prune {
            let meets_bounds = self.goal.items().iter().all(|item| {
                mu.get(&item.qvar)
                    .map(|v| domain.leq(&item.threshold, v).unwrap_or(false))
                    .unwrap_or(false)
            });
            if !meets_bounds {
                return None;
            }
        }
        Some(ComputedAnswer {
            sigma: state.sigma.restrict(&self.goal_vars),
            mu,
            steps: self.steps,
        })
    }

    fn record(&mut self, frame_state: &GoalState, selected: usize, clause: usize, step: &Step) {
        let domain = self.program.domain();
        let (atom, w) = &frame_state.atoms[selected];
        let added: Vec<String> = step
            .state
            .store
            .constraints()
            .iter()
            .filter(|c| c.var() == w || step.fresh.contains(c.var()))
            .map(|c| format!("{}", c.display(domain)))
            .collect();
        self.trace.push(format!(
            "{}. {atom}#{w} via {} mgu {{{}}} adds [{}] => {}",
            self.steps,
            self.program.label(clause),
            step.mgu,
            added.join(", "),
            step.state.display(domain)
        ));
    }
}

impl Iterator for Solver<'_> {
    type Item = ComputedAnswer;

    fn next(&mut self) -> Option<ComputedAnswer> {
        if self.status != SearchStatus::Running {
            return None;
        }
        if self.config.max_answers.is_some_and(|m| self.answers >= m) {
            self.status = SearchStatus::Truncated;
            self.finish();
            return None;
        }
        let domain = self.program.domain().clone();
        loop {
            let Some(frame) = self.stack.last_mut() else {
                self.finish();
                return None;
            };
            if frame.state.is_solved() {
                // only the initial goal can be solved on the stack
                let frame = self.stack.pop().expect("frame present");
                if let Some(answer) = self.answer_of(&frame.state) {
                    self.answers += 1;
                    return Some(answer);
                }
                continue;
            }
            if self.config.max_depth.is_some_and(|m| frame.depth >= m) {
                self.cut = true;
                self.stack.pop();
                continue;
            }
            let key = frame.state.atoms[frame.selected].0.key();
            let candidates = self.index.get(&key).map(Vec::as_slice).unwrap_or(&[]);
            if frame.next_alt >= candidates.len() {
                self.stack.pop();
                continue;
            }
            if self.config.max_steps.is_some_and(|m| self.steps >= m) {
                self.cut = true;
                self.finish();
                return None;
            }
            let clause_no = candidates[frame.next_alt];
            frame.next_alt += 1;
            let clause = &self.program.clauses()[clause_no];
            let Some(step) = resolution_step(
                &domain,
                &frame.state,
                frame.selected,
                clause,
                &mut self.supply,
                self.config.prune,
                Some(&self.goal_vars),
            ) else {
                continue;
            };
            let depth = frame.depth + 1;
            self.steps += 1;
            if self.config.trace {
                let (state, selected) = (frame.state.clone(), frame.selected);
                self.record(&state, selected, clause_no, &step);
            }
            let child = step.state;
            if child.is_solved() {
                if let Some(answer) = self.answer_of(&child) {
                    self.answers += 1;
                    return Some(answer);
                }
                continue;
            }
            let selected = self.config.selection.select(&child);
            self.stack.push(Frame {
                state: child,
                depth,
                selected,
                next_alt: 0,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid,
    /// The proof search hit its depth bound without a verdict.
    Unknown,
}

/// Whether `(theta, rho)` solves `goal`: `rho` satisfies the goal's
/// thresholds and every `Aθ#ρ(W)` is derivable, with proofs searched up to
/// height `oracle_depth`.
pub fn check_answer(
    program: &Program,
    goal: &InitialGoal,
    theta: &Substitution,
    rho: &QualSubstitution,
    oracle_depth: usize,
) -> Verdict {
    let domain = program.domain();
    if domain != goal.domain() {
        return Verdict::Invalid;
    }
    let initial = initial_state(goal);
    if !initial.store.check_solution(domain, rho) {
        return Verdict::Invalid;
    }
    let mut unknown = false;
    for item in goal.items() {
        let value = rho.get(&item.qvar).expect("checked by the store").clone();
        let target = AnnotatedAtom {
            atom: theta.apply_atom(&item.atom),
            value,
        };
        match qhl_decide(program, &target, oracle_depth) {
            ProofSearch::Proved(_) => {}
            ProofSearch::Refuted => return Verdict::Invalid,
            ProofSearch::BoundReached => unknown = true,
        }
    }
    if unknown {
        Verdict::Unknown
    } else {
        Verdict::Valid
    }
}

/// `(σ, μ)` is at least as general as `(θ, ρ)`: some `η` has `xση = xθ`
/// for every `x` in `vars`, and `μ(W) ⊒ ρ(W)` for every `W` in `qvars`. A
/// variable missing from `ρ` stands for `⊥`.
pub fn subsumes(
    domain: &Domain,
    general: (&Substitution, &QualSubstitution),
    specific: (&Substitution, &QualSubstitution),
    vars: &[Symbol],
    qvars: &[QVar],
) -> bool {
    let (sigma, mu) = general;
    let (theta, rho) = specific;
    let pairs: Vec<_> = vars
        .iter()
        .map(|x| {
            let v = crate::syntax::Term::Var(x.clone());
            (sigma.apply_term(&v), theta.apply_term(&v))
        })
        .collect();
    if match_terms(&pairs).is_none() {
        return false;
    }
    qvars.iter().all(|w| match (mu.get(w), rho.get(w)) {
        (_, None) => true,
        (None, Some(r)) => domain.is_bot(r),
        (Some(m), Some(r)) => domain.leq(r, m).unwrap_or(false),
    })
}
