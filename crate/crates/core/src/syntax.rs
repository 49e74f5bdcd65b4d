//! Terms, atoms, qualified clauses, programs and initial goals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::domain::{Domain, QualValue};

pub type Symbol = Arc<str>;

pub fn sym(name: &str) -> Symbol {
    Arc::from(name)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(sym(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::App(sym(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(sym(name), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Constants have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => &**v == var,
            Term::App(_, args) => args.iter().any(|t| t.occurs(var)),
        }
    }

    /// Appends variables in order of first occurrence, without duplicates.
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    fn collect_functors(&self, out: &mut Vec<(Symbol, usize)>) {
        if let Term::App(f, args) = self {
            if !out.iter().any(|(g, n)| g == f && *n == args.len()) {
                out.push((f.clone(), args.len()));
            }
            args.iter().for_each(|t| t.collect_functors(out));
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(c, args) => {
                f.write_str(c)?;
                write_args(f, args)
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: sym(predicate),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        self.args.iter().for_each(|t| t.collect_vars(out));
    }

    pub fn key(&self) -> (Symbol, usize) {
        (self.predicate.clone(), self.args.len())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        write_args(f, &self.args)
    }
}

/// A qualified definite clause `head <-d- body`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Atom,
    pub attenuation: QualValue,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        self.body.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-{}-", self.head, self.attenuation)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("attenuation `{value}` of clause {index} is not a value of domain {domain}")]
    ForeignValue { index: usize, value: String, domain: String },
    #[error("attenuation of clause {index} is the bottom element")]
    BottomAttenuation { index: usize },
    #[error("`{name}` is used with arities {first} and {second}")]
    ArityClash { name: String, first: usize, second: usize },
    #[error("qualification variable `{0}` annotates more than one goal atom")]
    DuplicateQVar(String),
    #[error("threshold for `{0}` is the bottom element")]
    BottomThreshold(String),
    #[error("threshold `{value}` for `{qvar}` is not a value of domain {domain}")]
    ForeignThreshold { qvar: String, value: String, domain: String },
}

/// A QLP program over one domain. Clause order is the search order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    domain: Domain,
    clauses: Vec<Clause>,
}

impl Program {
    pub fn new(domain: Domain, clauses: Vec<Clause>) -> Result<Self, ProgramError> {
        let mut predicates = BTreeMap::new();
        let mut functors = BTreeMap::new();
        for (index, clause) in clauses.iter().enumerate() {
            if !domain.contains(&clause.attenuation) {
                return Err(ProgramError::ForeignValue {
                    index,
                    value: format!("{}", clause.attenuation),
                    domain: format!("{domain}"),
                });
            }
            if domain.is_bot(&clause.attenuation) {
                return Err(ProgramError::BottomAttenuation { index });
            }
            for atom in core::iter::once(&clause.head).chain(&clause.body) {
                check_arity(&mut predicates, &atom.predicate, atom.arity())?;
                let mut fs = Vec::new();
                atom.args.iter().for_each(|t| t.collect_functors(&mut fs));
                for (f, n) in fs {
                    check_arity(&mut functors, &f, n)?;
                }
            }
        }
        Ok(Program { domain, clauses })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `pred.i`: the clause's 1-based position among clauses for the same
    /// predicate.
    pub fn label(&self, index: usize) -> String {
        let head = &self.clauses[index].head;
        let position = self.clauses[..=index]
            .iter()
            .filter(|c| c.head.predicate == head.predicate)
            .count();
        format!("{}.{}", head.predicate, position)
    }

    /// Constructors `(name, arity)` in order of first occurrence.
    pub fn functors(&self) -> Vec<(Symbol, usize)> {
        let mut out = Vec::new();
        for clause in &self.clauses {
            for atom in core::iter::once(&clause.head).chain(&clause.body) {
                atom.args.iter().for_each(|t| t.collect_functors(&mut out));
            }
        }
        out
    }

    /// The same clauses read over another domain, every attenuation
    /// replaced by `attenuation`.
    pub fn requalify(&self, domain: Domain, attenuation: QualValue) -> Result<Program, ProgramError> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause {
                attenuation: attenuation.clone(),
                ..c.clone()
            })
            .collect();
        Program::new(domain, clauses)
    }
}

fn check_arity(seen: &mut BTreeMap<Symbol, usize>, name: &Symbol, arity: usize) -> Result<(), ProgramError> {
    match seen.get(name) {
        Some(&first) if first != arity => Err(ProgramError::ArityClash {
            name: String::from(&**name),
            first,
            second: arity,
        }),
        Some(_) => Ok(()),
        None => {
            seen.insert(name.clone(), arity);
            Ok(())
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            writeln!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// A qualification variable such as `W1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVar(pub Symbol);

impl QVar {
    pub fn new(name: &str) -> Self {
        QVar(sym(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalItem {
    pub atom: Atom,
    pub qvar: QVar,
    pub threshold: QualValue,
}

/// `A1#W1, ..., An#Wn | W1 >= b1, ..., Wn >= bn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialGoal {
    domain: Domain,
    items: Vec<GoalItem>,
}

impl InitialGoal {
    pub fn new(domain: Domain, items: Vec<GoalItem>) -> Result<Self, ProgramError> {
        let mut seen = BTreeSet::new();
        for item in &items {
            if !seen.insert(item.qvar.clone()) {
                return Err(ProgramError::DuplicateQVar(String::from(item.qvar.name())));
            }
            if !domain.contains(&item.threshold) {
                return Err(ProgramError::ForeignThreshold {
                    qvar: String::from(item.qvar.name()),
                    value: format!("{}", item.threshold),
                    domain: format!("{domain}"),
                });
            }
            if domain.is_bot(&item.threshold) {
                return Err(ProgramError::BottomThreshold(String::from(item.qvar.name())));
            }
        }
        Ok(InitialGoal { domain, items })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn items(&self) -> &[GoalItem] {
        &self.items
    }

    /// Term variables of the goal in order of first occurrence.
    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.items.iter().for_each(|i| i.atom.collect_vars(&mut out));
        out
    }

    pub fn qvars(&self) -> Vec<QVar> {
        self.items.iter().map(|i| i.qvar.clone()).collect()
    }
}

impl fmt::Display for InitialGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}#{}", item.atom, item.qvar)?;
        }
        if !self.items.is_empty() {
            f.write_str(" | ")?;
        }
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}>={}", item.qvar, item.threshold)?;
        }
        Ok(())
    }
}
