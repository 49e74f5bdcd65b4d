//! Translation of qualified programs into constrained clauses.
//!
//! Every predicate gets three extra arguments `(Alpha, W, Beta)` standing
//! for a threshold `Alpha ∘ W ⊒ Beta`. A clause `p(t) <-d- q1(s1)..qk(sk)`
//! becomes
//!
//! ```text
//! p(t,Alpha,W,Beta) :- d∘Alpha ⊒ Beta,
//!                      W1 ⊐ ⊥, W1 ⊑ ⊤, q1(s1, d∘Alpha, W1, Beta),
//!                      ...
//!                      W = d ∘ ⊓{W1..Wk}
//! ```
//!
//! so running the translated clauses with plain constrained resolution
//! mirrors a qualified resolution step.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::constraints::QualSubstitution;
use crate::domain::{Domain, QualValue};
use crate::resolution::{ComputedAnswer, DomainMismatch, SearchConfig, SearchStatus};
use crate::syntax::{sym, Atom, InitialGoal, Program, QVar, Symbol, Term};
use crate::unify::{mgu, Substitution, VarSupply};

/// A qualification argument: a clause parameter, a constant, or a
/// constant attenuating a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QualExpr {
    Param(Symbol),
    Value(QualValue),
    Attenuated(QualValue, Symbol),
}

/// An atom with its three qualification arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TAtom {
    pub atom: Atom,
    pub alpha: QualExpr,
    pub w: QVar,
    pub beta: QualExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TLiteral {
    /// `d ∘ Alpha ⊒ Beta`
    Enable { d: QualValue },
    /// `w ⊐ ⊥, w ⊑ ⊤`
    Range { w: QVar },
    Call(TAtom),
    /// `w = d ∘ ⊓{deps}`
    Define { w: QVar, d: QualValue, deps: Vec<QVar> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TClause {
    pub head: TAtom,
    pub body: Vec<TLiteral>,
}

impl TClause {
    pub fn calls(&self) -> impl Iterator<Item = &TAtom> {
        self.body.iter().filter_map(|l| match l {
            TLiteral::Call(a) => Some(a),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslatedProgram {
    pub domain: Domain,
    pub clauses: Vec<TClause>,
    /// Constructors of the source program, for datatype declarations.
    pub functors: Vec<(Symbol, usize)>,
}

pub const ALPHA: &str = "Alpha";
pub const BETA: &str = "Beta";

pub fn translate_program(program: &Program) -> TranslatedProgram {
    let alpha = sym(ALPHA);
    let beta = sym(BETA);
    let clauses = program
        .clauses()
        .iter()
        .map(|c| {
            let d = c.attenuation.clone();
            let mut body = Vec::with_capacity(2 * c.body.len() + 2);
            body.push(TLiteral::Enable { d: d.clone() });
            let mut deps = Vec::with_capacity(c.body.len());
            for (i, b) in c.body.iter().enumerate() {
                let wi = QVar::new(&format!("W{}", i + 1));
                body.push(TLiteral::Range { w: wi.clone() });
                body.push(TLiteral::Call(TAtom {
                    atom: b.clone(),
                    alpha: QualExpr::Attenuated(d.clone(), alpha.clone()),
                    w: wi.clone(),
                    beta: QualExpr::Param(beta.clone()),
                }));
                deps.push(wi);
            }
            body.push(TLiteral::Define {
                w: QVar::new("W"),
                d,
                deps,
            });
            TClause {
                head: TAtom {
                    atom: c.head.clone(),
                    alpha: QualExpr::Param(alpha.clone()),
                    w: QVar::new("W"),
                    beta: QualExpr::Param(beta.clone()),
                },
                body,
            }
        })
        .collect();
    TranslatedProgram {
        domain: program.domain().clone(),
        clauses,
        functors: program.functors(),
    }
}

/// One call per goal item with `Alpha = ⊤` and `Beta` the item's bound.
pub fn translate_goal(goal: &InitialGoal) -> Vec<TAtom> {
    let top = goal.domain().top();
    goal.items()
        .iter()
        .map(|item| TAtom {
            atom: item.atom.clone(),
            alpha: QualExpr::Value(top.clone()),
            w: item.qvar.clone(),
            beta: QualExpr::Value(item.threshold.clone()),
        })
        .collect()
}

/// A body literal with its clause parameters filled in.
#[derive(Debug, Clone)]
enum Pending {
    Enable { d: QualValue, alpha: QualValue, beta: QualValue },
    Range { w: QVar },
    Call { atom: Atom, alpha: QualValue, w: QVar, beta: QualValue },
    Define { w: QVar, d: QualValue, deps: Vec<QVar> },
}

#[derive(Debug, Clone)]
struct RunState {
    /// Next literal last.
    pending: Vec<Pending>,
    sigma: Substitution,
    values: BTreeMap<QVar, QualValue>,
}

struct RunFrame {
    state: RunState,
    depth: usize,
    next_alt: usize,
}

/// Leftmost depth-first execution of translated clauses. Constraint
/// literals are evaluated as soon as they are reached: under left-to-right
/// execution `Alpha` and `Beta` are always known at a call, and every
/// `Wi` is fixed before the clause's defining literal runs.
///
/// Budgets follow [`SearchConfig`]: resolving a call is one step. The
/// selection rule is ignored.
pub struct TranslatedSolver<'t> {
    program: &'t TranslatedProgram,
    index: BTreeMap<(Symbol, usize), Vec<usize>>,
    config: SearchConfig,
    goal_vars: Vec<Symbol>,
    goal_qvars: Vec<QVar>,
    stack: Vec<RunFrame>,
    supply: VarSupply,
    qvar_counter: u64,
    steps: u64,
    answers: usize,
    cut: bool,
    status: SearchStatus,
}

pub fn run_translated<'t>(
    program: &'t TranslatedProgram,
    goal: &InitialGoal,
    config: SearchConfig,
) -> Result<TranslatedSolver<'t>, DomainMismatch> {
    if program.domain != *goal.domain() {
        return Err(DomainMismatch {
            program: format!("{}", program.domain),
            goal: format!("{}", goal.domain()),
        });
    }
    let domain = &program.domain;
    let mut pending: Vec<Pending> = translate_goal(goal)
        .into_iter()
        .map(|t| Pending::Call {
            atom: t.atom,
            alpha: constant(&t.alpha),
            w: t.w,
            beta: constant(&t.beta),
        })
        .collect();
    pending.reverse();
    let mut index: BTreeMap<(Symbol, usize), Vec<usize>> = BTreeMap::new();
    for (i, c) in program.clauses.iter().enumerate() {
        index.entry(c.head.atom.key()).or_default().push(i);
    }
    let mut solver = TranslatedSolver {
        program,
        index,
        config,
        goal_vars: goal.vars(),
        goal_qvars: goal.qvars(),
        stack: Vec::new(),
        supply: VarSupply::new("_T"),
        qvar_counter: 0,
        steps: 0,
        answers: 0,
        cut: false,
        status: SearchStatus::Running,
    };
    let state = RunState {
        pending,
        sigma: Substitution::new(),
        values: BTreeMap::new(),
    };
    // goal calls carry constant arguments, so settling cannot fail here
    let state = settle(domain, state).expect("initial goal settles");
    solver.stack.push(RunFrame {
        state,
        depth: 0,
        next_alt: 0,
    });
    Ok(solver)
}

fn constant(e: &QualExpr) -> QualValue {
    match e {
        QualExpr::Value(v) => v.clone(),
        _ => panic!("goal arguments are constants"),
    }
}

/// Runs constraint literals at the front until a call or the end.
fn settle(domain: &Domain, mut state: RunState) -> Option<RunState> {
    while let Some(next) = state.pending.last() {
        match next {
            Pending::Call { .. } => break,
            Pending::Enable { d, alpha, beta } => {
                let ok = domain
                    .attenuate(d, alpha)
                    .and_then(|da| domain.leq(beta, &da))
                    .expect("program domain");
                if !ok {
                    return None;
                }
            }
            Pending::Range { w } => {
                if let Some(v) = state.values.get(w) {
                    if domain.is_bot(v) {
                        return None;
                    }
                }
            }
            Pending::Define { w, d, deps } => {
                let known: Vec<&QualValue> = deps
                    .iter()
                    .map(|x| state.values.get(x).expect("body calls run before the defining literal"))
                    .collect();
                let value = domain
                    .big_glb(known)
                    .and_then(|g| domain.attenuate(d, &g))
                    .expect("program domain");
                state.values.insert(w.clone(), value);
            }
        }
        state.pending.pop();
    }
    Some(state)
}

impl TranslatedSolver<'_> {
    pub fn status(&self) -> SearchStatus {
        self.status
    }

    pub fn steps(&self) -> u64 {
        self.steps
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

    fn answer_of(&self, state: &RunState) -> ComputedAnswer {
        let mu: QualSubstitution = self
            .goal_qvars
            .iter()
            .filter_map(|w| state.values.get(w).map(|v| (w.clone(), v.clone())))
            .collect();
        ComputedAnswer {
            sigma: state.sigma.restrict(&self.goal_vars),
            mu,
            steps: self.steps,
        }
    }

    /// The body of clause `ci` with its parameters bound, or `None` when
    /// the head does not unify.
    fn expand(&mut self, ci: usize, state: &RunState) -> Option<RunState> {
        let Some(Pending::Call { atom, alpha, w, beta }) = state.pending.last() else {
            unreachable!("frames stop at calls")
        };
        let clause = &self.program.clauses[ci];
        let domain = &self.program.domain;
        let renaming: Substitution = {
            let mut vars = clause.head.atom.vars();
            for call in clause.calls() {
                call.atom.collect_vars(&mut vars);
            }
            let mut s = Substitution::new();
            for v in vars {
                if s.get(&v).is_none() {
                    s.insert(v, Term::Var(self.supply.fresh()));
                }
            }
            s
        };
        let head = renaming.apply_atom(&clause.head.atom);
        let unifier = mgu(atom, &head)?;
        let mut qvars: BTreeMap<QVar, QVar> = BTreeMap::new();
        qvars.insert(clause.head.w.clone(), w.clone());
        let mut rename_q = |q: &QVar, counter: &mut u64| -> QVar {
            qvars
                .entry(q.clone())
                .or_insert_with(|| {
                    *counter += 1;
                    QVar(sym(&format!("_W{counter}")))
                })
                .clone()
        };
        let eval = |e: &QualExpr| -> QualValue {
            match e {
                QualExpr::Value(v) => v.clone(),
                QualExpr::Param(p) if **p == *ALPHA => alpha.clone(),
                QualExpr::Param(_) => beta.clone(),
                QualExpr::Attenuated(d, _) => domain.attenuate(d, alpha).expect("program domain"),
            }
        };
        let mut body: Vec<Pending> = Vec::with_capacity(clause.body.len());
        for lit in &clause.body {
            body.push(match lit {
                TLiteral::Enable { d } => Pending::Enable {
                    d: d.clone(),
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                },
                TLiteral::Range { w } => Pending::Range {
                    w: rename_q(w, &mut self.qvar_counter),
                },
                TLiteral::Call(t) => Pending::Call {
                    atom: unifier.apply_atom(&renaming.apply_atom(&t.atom)),
                    alpha: eval(&t.alpha),
                    w: rename_q(&t.w, &mut self.qvar_counter),
                    beta: eval(&t.beta),
                },
                TLiteral::Define { w, d, deps } => Pending::Define {
                    w: rename_q(w, &mut self.qvar_counter),
                    d: d.clone(),
                    deps: deps.iter().map(|x| rename_q(x, &mut self.qvar_counter)).collect(),
                },
            });
        }
        let mut pending: Vec<Pending> = state.pending[..state.pending.len() - 1]
            .iter()
            .map(|p| match p {
                Pending::Call { atom, alpha, w, beta } => Pending::Call {
                    atom: unifier.apply_atom(atom),
                    alpha: alpha.clone(),
                    w: w.clone(),
                    beta: beta.clone(),
                },
                other => other.clone(),
            })
            .collect();
        pending.extend(body.into_iter().rev());
        Some(RunState {
            pending,
            sigma: state.sigma.compose(&unifier).restrict(&self.goal_vars),
            values: state.values.clone(),
        })
    }
}

impl Iterator for TranslatedSolver<'_> {
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
        let domain = self.program.domain.clone();
        loop {
            let Some(frame) = self.stack.last_mut() else {
                self.finish();
                return None;
            };
            if frame.state.pending.is_empty() {
                let frame = self.stack.pop().expect("frame present");
                self.answers += 1;
                return Some(self.answer_of(&frame.state));
            }
            if self.config.max_depth.is_some_and(|m| frame.depth >= m) {
                self.cut = true;
                self.stack.pop();
                continue;
            }
            let Some(Pending::Call { atom, .. }) = frame.state.pending.last() else {
                unreachable!("frames stop at calls")
            };
            let candidates = self.index.get(&atom.key()).map(Vec::as_slice).unwrap_or(&[]);
            if frame.next_alt >= candidates.len() {
                self.stack.pop();
                continue;
            }
            if self.config.max_steps.is_some_and(|m| self.steps >= m) {
                self.cut = true;
                self.finish();
                return None;
            }
            let ci = candidates[frame.next_alt];
            frame.next_alt += 1;
            let depth = frame.depth + 1;
            let state = frame.state.clone();
            let Some(child) = self.expand(ci, &state) else { continue };
            self.steps += 1;
            let Some(child) = settle(&domain, child) else { continue };
            if child.pending.is_empty() {
                self.answers += 1;
                return Some(self.answer_of(&child));
            }
            self.stack.push(RunFrame {
                state: child,
                depth,
                next_alt: 0,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// Domain-order constraints: `>=` is `⊒`, `>` is `⊐`, `<=` is `⊑`.
    Generic,
    /// Arithmetic constraints over the reals with `min1`/`max1` helpers,
    /// for `B`, `U` and `W`. Products fall back to [`Dialect::Generic`].
    ToyLike,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Generic => "generic",
            Dialect::ToyLike => "toy_like",
        })
    }
}

pub fn emit_text(program: &TranslatedProgram, dialect: Dialect) -> String {
    match (dialect, &program.domain) {
        (Dialect::ToyLike, Domain::Product(..)) | (Dialect::Generic, _) => emit_generic(program),
        (Dialect::ToyLike, _) => emit_toy(program),
    }
}

fn expr_text(domain: &Domain, e: &QualExpr) -> String {
    match e {
        QualExpr::Param(p) => String::from(&**p),
        QualExpr::Value(v) => v.to_decimal_string(),
        QualExpr::Attenuated(d, p) => format!("{}{}{p}", d.to_decimal_string(), domain.op_symbol()),
    }
}

fn tatom_text(domain: &Domain, t: &TAtom) -> String {
    let mut args: Vec<String> = t.atom.args.iter().map(|a| format!("{a}")).collect();
    args.push(expr_text(domain, &t.alpha));
    args.push(format!("{}", t.w));
    args.push(expr_text(domain, &t.beta));
    format!("{}({})", t.atom.predicate, args.join(","))
}

fn emit_generic(program: &TranslatedProgram) -> String {
    let domain = &program.domain;
    let op = domain.op_symbol();
    let bot = domain.bot().to_decimal_string();
    let top = domain.top().to_decimal_string();
    let mut out = format!("% constrained clauses over {domain}; comparisons use the domain order\n");
    for c in &program.clauses {
        let lits: Vec<String> = c
            .body
            .iter()
            .map(|l| match l {
                TLiteral::Enable { d } => format!("{}{op}{ALPHA} >= {BETA}", d.to_decimal_string()),
                TLiteral::Range { w } => format!("{w} > {bot}, {w} <= {top}"),
                TLiteral::Call(t) => tatom_text(domain, t),
                TLiteral::Define { w, d, deps } => {
                    let deps: Vec<String> = deps.iter().map(|x| format!("{x}")).collect();
                    format!("{w} = {} {op} glb{{{}}}", d.to_decimal_string(), deps.join(","))
                }
            })
            .collect();
        out.push_str(&format!("{} :- {}.\n", tatom_text(domain, &c.head), lits.join(", ")));
    }
    out
}

fn emit_toy(program: &TranslatedProgram) -> String {
    let weight = program.domain == Domain::Weight;
    let mut out = String::new();
    if weight {
        out.push_str("max1 [] = 0\nmax1 [X|Xs] = max2 X (max1 Xs)\nmax2 W1 W2 = if W1 >= W2 then W1 else W2\n");
    } else {
        out.push_str("min1 [] = 1\nmin1 [X|Xs] = min2 X (min1 Xs)\nmin2 W1 W2 = if W1 <= W2 then W1 else W2\n");
    }
    if !program.functors.is_empty() {
        let mut alternatives: Vec<String> = program
            .functors
            .iter()
            .filter(|(_, n)| *n == 0)
            .map(|(f, _)| String::from(&**f))
            .collect();
        let compound: Vec<String> = program
            .functors
            .iter()
            .filter(|(_, n)| *n > 0)
            .map(|(f, n)| {
                let mut s = String::from(&**f);
                for _ in 0..*n {
                    s.push_str(" being");
                }
                s
            })
            .collect();
        out.push_str("data being = ");
        out.push_str(&alternatives.join(" | "));
        if !compound.is_empty() {
            if !alternatives.is_empty() {
                out.push_str("\n             | ");
            }
            out.push_str(&compound.join(" | "));
        }
        out.push('\n');
        alternatives.clear();
    }
    for c in &program.clauses {
        let d = match c.body.first() {
            Some(TLiteral::Enable { d }) => d.to_decimal_string(),
            _ => unreachable!("translated clauses open with the enablement literal"),
        };
        let head = toy_atom(&c.head.atom, "F", "W", "M");
        let enable = if weight { format!("F+{d}<=M") } else { format!("F*{d}>=M") };
        let alpha = if weight { format!("F+{d}") } else { format!("F*{d}") };
        let mut groups: Vec<String> = Vec::new();
        let mut range = String::new();
        let mut deps: Vec<String> = Vec::new();
        for lit in &c.body[1..] {
            match lit {
                TLiteral::Range { w } => {
                    range = if weight {
                        format!("{w}>=0.0")
                    } else {
                        format!("{w}>0, {w}<=1.0")
                    };
                }
                TLiteral::Call(t) => {
                    let w = format!("{}", t.w);
                    groups.push(format!("{range}, {}", toy_atom(&t.atom, &alpha, &w, "M")));
                    deps.push(w);
                }
                TLiteral::Define { .. } => {
                    let define = if weight {
                        format!("W == {d} + max1 [{}]", deps.join(","))
                    } else {
                        format!("W == {d} * min1 [{}]", deps.join(","))
                    };
                    groups.push(define);
                }
                TLiteral::Enable { .. } => unreachable!("one enablement literal per clause"),
            }
        }
        if groups.len() == 1 {
            out.push_str(&format!("{head} :- {enable}, {}\n", groups[0]));
        } else {
            out.push_str(&format!("{head} :- {enable},\n"));
            let last = groups.len() - 1;
            for (i, g) in groups.iter().enumerate() {
                out.push_str("    ");
                out.push_str(g);
                out.push_str(if i == last { "\n" } else { ",\n" });
            }
        }
    }
    out
}

fn toy_atom(atom: &Atom, alpha: &str, w: &str, beta: &str) -> String {
    let mut args: Vec<String> = atom.args.iter().map(|a| format!("{a}")).collect();
    args.push(String::from(alpha));
    args.push(String::from(w));
    args.push(String::from(beta));
    format!("{}({})", atom.predicate, args.join(","))
}
