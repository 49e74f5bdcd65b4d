//! Idempotent substitutions, most general unifiers and clause renaming.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{sym, Atom, Clause, Symbol, Term};

/// A finite map from variables to terms, kept idempotent: no variable of
/// the domain occurs in any bound term.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    map: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.map.iter()
    }

    /// Adds a raw binding without normalising. Returns `false` if the
    /// variable was already bound. Used when reading answers back from
    /// text, where idempotence is not guaranteed.
    pub fn insert(&mut self, var: Symbol, term: Term) -> bool {
        if self.map.contains_key(&var) {
            return false;
        }
        self.map.insert(var, term);
        true
    }

    /// Extends the substitution with `var -> term`, where `term` has already
    /// been instantiated by `self` and does not contain `var`.
    fn bind(&mut self, var: Symbol, term: Term) {
        let single = Substitution {
            map: BTreeMap::from([(var.clone(), term.clone())]),
        };
        for t in self.map.values_mut() {
            if t.occurs(&var) {
                *t = single.apply_term(t);
            }
        }
        self.map.insert(var, term);
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(|t| self.apply_term(t)).collect(),
        }
    }

    pub fn apply_atoms(&self, atoms: &[Atom]) -> Vec<Atom> {
        atoms.iter().map(|a| self.apply_atom(a)).collect()
    }

    /// The substitution that applies `self` first and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Symbol, Term> = self
            .map
            .iter()
            .map(|(v, t)| (v.clone(), other.apply_term(t)))
            .filter(|(v, t)| !matches!(t, Term::Var(w) if w == v))
            .collect();
        for (v, t) in &other.map {
            if !self.map.contains_key(v) {
                map.insert(v.clone(), t.clone());
            }
        }
        Substitution { map }
    }

    /// Keeps only bindings for `vars`.
    pub fn restrict(&self, vars: &[Symbol]) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.map.keys().all(|v| !t.occurs(v)))
    }
}

impl FromIterator<(Symbol, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Renders as `X = adam, Y = f(Z)`.
impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} = {t}")?;
        }
        Ok(())
    }
}

/// Robinson unification with occurs check over term pairs.
///
/// When both sides are variables the right-hand one is bound, so calling
/// `mgu(goal_atom, clause_head)` binds clause variables in preference to
/// goal variables.
pub fn mgu_terms(pairs: Vec<(Term, Term)>) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut work = pairs;
    while let Some((l, r)) = work.pop() {
        let l = subst.apply_term(&l);
        let r = subst.apply_term(&r);
        match (l, r) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (l, Term::Var(y)) => {
                if l.occurs(&y) {
                    return None;
                }
                subst.bind(y, l);
            }
            (Term::Var(x), r) => {
                if r.occurs(&x) {
                    return None;
                }
                subst.bind(x, r);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                // reversed so that pops visit arguments left to right
                work.extend(fa.into_iter().zip(ga).rev());
            }
        }
    }
    Some(subst)
}

/// The most general unifier of two atoms, if any.
pub fn mgu(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    mgu_terms(a.args.iter().cloned().zip(b.args.iter().cloned()).rev().collect())
}

/// One-way matching: a substitution `η` over the pattern's variables with
/// `η(pattern) = target`. Variables in `target` are treated as constants.
pub fn match_terms(pairs: &[(Term, Term)]) -> Option<Substitution> {
    let mut bindings: BTreeMap<Symbol, Term> = BTreeMap::new();
    let mut work: Vec<(Term, Term)> = pairs.to_vec();
    while let Some((p, t)) = work.pop() {
        match p {
            Term::Var(v) => match bindings.get(&v) {
                Some(bound) if *bound != t => return None,
                Some(_) => {}
                None => {
                    bindings.insert(v, t);
                }
            },
            Term::App(f, pa) => match t {
                Term::App(g, ta) if f == g && pa.len() == ta.len() => work.extend(pa.into_iter().zip(ta)),
                _ => return None,
            },
        }
    }
    Some(Substitution { map: bindings })
}

pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<Substitution> {
    if pattern.predicate != target.predicate || pattern.args.len() != target.args.len() {
        return None;
    }
    let pairs: Vec<_> = pattern.args.iter().cloned().zip(target.args.iter().cloned()).collect();
    match_terms(&pairs)
}

/// Monotone source of fresh variable names `<prefix><n>`.
#[derive(Debug, Clone)]
pub struct VarSupply {
    prefix: &'static str,
    next: u64,
}

impl VarSupply {
    pub fn new(prefix: &'static str) -> Self {
        VarSupply { prefix, next: 0 }
    }

    pub fn fresh(&mut self) -> Symbol {
        let name = format!("{}{}", self.prefix, self.next);
        self.next += 1;
        sym(&name)
    }

    pub fn issued(&self) -> u64 {
        self.next
    }
}

impl Default for VarSupply {
    fn default() -> Self {
        VarSupply::new("_G")
    }
}

/// A variant of `clause` whose variables are all fresh, together with the
/// renaming that produced it.
pub fn rename_clause_with_map(clause: &Clause, supply: &mut VarSupply) -> (Clause, Substitution) {
    let renaming: Substitution = clause
        .vars()
        .into_iter()
        .map(|v| (v, Term::Var(supply.fresh())))
        .collect();
    let renamed = Clause {
        head: renaming.apply_atom(&clause.head),
        attenuation: clause.attenuation.clone(),
        body: renaming.apply_atoms(&clause.body),
    };
    (renamed, renaming)
}

pub fn rename_clause(clause: &Clause, supply: &mut VarSupply) -> Clause {
    rename_clause_with_map(clause, supply).0
}

/// Renames `vars` to `_V0, _V1, ...` in order, for comparing results up to
/// variable renaming.
pub fn canonical_names(vars: &[Symbol]) -> Substitution {
    vars.iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Term::Var(sym(&format!("_V{i}")))))
        .collect()
}
