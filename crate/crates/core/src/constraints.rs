//! Qualification constraint stores.
//!
//! A store holds two kinds of constraints over qualification variables:
//! threshold constraints `α ∘ W ⊒ β`, which bound a pending goal atom's
//! qualification from below, and defining constraints
//! `W = d ∘ ⊓{W1, …, Wk}`, which fix a solved atom's qualification from
//! those of the atoms that replaced it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::domain::{Domain, QualValue};
use crate::syntax::QVar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QualConstraint {
    /// `alpha ∘ w ⊒ beta`
    Threshold { alpha: QualValue, w: QVar, beta: QualValue },
    /// `w = d ∘ ⊓{deps}`
    Defining { w: QVar, d: QualValue, deps: Vec<QVar> },
}

impl QualConstraint {
    /// The constrained variable (the left-hand side).
    pub fn var(&self) -> &QVar {
        match self {
            QualConstraint::Threshold { w, .. } | QualConstraint::Defining { w, .. } => w,
        }
    }

    pub fn display<'a>(&'a self, domain: &'a Domain) -> impl fmt::Display + 'a {
        ConstraintDisplay { c: self, domain }
    }
}

struct ConstraintDisplay<'a> {
    c: &'a QualConstraint,
    domain: &'a Domain,
}

impl fmt::Display for ConstraintDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.domain.op_symbol();
        match self.c {
            QualConstraint::Threshold { alpha, w, beta } if self.domain.is_top(alpha) => write!(f, "{w} >= {beta}"),
            QualConstraint::Threshold { alpha, w, beta } => write!(f, "{alpha} {op} {w} >= {beta}"),
            QualConstraint::Defining { w, d, deps } => {
                write!(f, "{w} = {d} {op} glb{{")?;
                for (i, dep) in deps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{dep}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// A substitution of values in `D ∖ {⊥}` for qualification variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QualSubstitution {
    map: BTreeMap<QVar, QualValue>,
}

impl QualSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, w: &QVar) -> Option<&QualValue> {
        self.map.get(w)
    }

    pub fn insert(&mut self, w: QVar, v: QualValue) -> Option<QualValue> {
        self.map.insert(w, v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QVar, &QualValue)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn restrict(&self, vars: &[QVar]) -> QualSubstitution {
        QualSubstitution {
            map: self
                .map
                .iter()
                .filter(|(w, _)| vars.contains(w))
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(QVar, QualValue)> for QualSubstitution {
    fn from_iter<I: IntoIterator<Item = (QVar, QualValue)>>(iter: I) -> Self {
        QualSubstitution {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for QualSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (w, v)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("store still has a threshold constraint for `{0}`")]
    NotSolved(QVar),
    #[error("`{0}` has no defining constraint")]
    Undefined(QVar),
    #[error("`{0}` has more than one constraint")]
    Duplicate(QVar),
    #[error("defining constraints are cyclic through `{0}`")]
    Cyclic(QVar),
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
}

/// `d ∘ α ⊒ β`: whether a clause with attenuation `d` may resolve an atom
/// whose threshold constraint is `α ∘ W ⊒ β`.
pub fn enabled(domain: &Domain, d: &QualValue, alpha: &QualValue, beta: &QualValue) -> bool {
    domain
        .attenuate(d, alpha)
        .and_then(|da| domain.leq(beta, &da))
        .unwrap_or(false)
}

/// Constraints in insertion order. Resolving a threshold replaces it in
/// place, so traces keep a stable layout.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConstraintStore {
    constraints: Vec<QualConstraint>,
}

impl ConstraintStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_constraints(constraints: Vec<QualConstraint>) -> Self {
        ConstraintStore { constraints }
    }

    pub fn constraints(&self) -> &[QualConstraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: QualConstraint) {
        self.constraints.push(c);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// `(α, β)` of the threshold constraint for `w`.
    pub fn threshold(&self, w: &QVar) -> Option<(&QualValue, &QualValue)> {
        self.constraints.iter().find_map(|c| match c {
            QualConstraint::Threshold { alpha, w: v, beta } if v == w => Some((alpha, beta)),
            _ => None,
        })
    }

    pub fn thresholds(&self) -> impl Iterator<Item = (&QualValue, &QVar, &QualValue)> {
        self.constraints.iter().filter_map(|c| match c {
            QualConstraint::Threshold { alpha, w, beta } => Some((alpha, w, beta)),
            _ => None,
        })
    }

    /// `dom(Δ)`: variables on the left of some constraint.
    pub fn dom(&self) -> BTreeSet<QVar> {
        self.constraints.iter().map(|c| c.var().clone()).collect()
    }

    /// `war(Δ)`: every variable mentioned anywhere.
    pub fn war(&self) -> BTreeSet<QVar> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            out.insert(c.var().clone());
            if let QualConstraint::Defining { deps, .. } = c {
                out.extend(deps.iter().cloned());
            }
        }
        out
    }

    /// Only defining constraints left.
    pub fn is_solved_form(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| matches!(c, QualConstraint::Defining { .. }))
    }

    /// The store after resolving the atom annotated by `w` with a clause of
    /// attenuation `d` whose body atoms are annotated by `fresh`: the
    /// threshold `α ∘ w ⊒ β` becomes `w = d ∘ ⊓{fresh}` and every fresh
    /// variable gets `(d ∘ α) ∘ wi ⊒ β`.
    ///
    /// Panics unless `w` has a threshold constraint and `enabled(d, α, β)`.
    pub fn resolve(&self, domain: &Domain, w: &QVar, d: &QualValue, fresh: &[QVar]) -> ConstraintStore {
        let (alpha, beta) = self.threshold(w).expect("resolved variable has a threshold constraint");
        assert!(enabled(domain, d, alpha, beta), "resolution step must be enabled");
        self.resolve_unchecked(domain, w, d, fresh)
    }

    /// As [`resolve`](Self::resolve) without the enablement assertion, for
    /// searches that run with pruning switched off.
    pub fn resolve_unchecked(&self, domain: &Domain, w: &QVar, d: &QualValue, fresh: &[QVar]) -> ConstraintStore {
        let (alpha, beta) = self.threshold(w).expect("resolved variable has a threshold constraint");
        let alpha = domain.attenuate(d, alpha).expect("attenuation within the program domain");
        let beta = beta.clone();
        let mut constraints = Vec::with_capacity(self.constraints.len() + fresh.len());
        for c in &self.constraints {
            match c {
                QualConstraint::Threshold { w: v, .. } if v == w => constraints.push(QualConstraint::Defining {
                    w: w.clone(),
                    d: d.clone(),
                    deps: fresh.to_vec(),
                }),
                other => constraints.push(other.clone()),
            }
        }
        for wi in fresh {
            constraints.push(QualConstraint::Threshold {
                alpha: alpha.clone(),
                w: wi.clone(),
                beta: beta.clone(),
            });
        }
        ConstraintStore { constraints }
    }

    fn defining_map(&self) -> Result<BTreeMap<&QVar, (&QualValue, &[QVar])>, ConstraintError> {
        let mut map = BTreeMap::new();
        for c in &self.constraints {
            match c {
                QualConstraint::Threshold { w, .. } => return Err(ConstraintError::NotSolved(w.clone())),
                QualConstraint::Defining { w, d, deps } => {
                    if map.insert(w, (d, deps.as_slice())).is_some() {
                        return Err(ConstraintError::Duplicate(w.clone()));
                    }
                }
            }
        }
        Ok(map)
    }

    /// `ω_Δ` for a solved store: every defined variable evaluated bottom-up
    /// as `d ∘ ⊓{ω(W1), …, ω(Wk)}`.
    pub fn omega(&self, domain: &Domain) -> Result<QualSubstitution, ConstraintError> {
        let defs = self.defining_map()?;
        let mut values: BTreeMap<QVar, QualValue> = BTreeMap::new();
        let mut on_path: BTreeSet<QVar> = BTreeSet::new();
        for w in defs.keys() {
            evaluate(domain, &defs, w, &mut values, &mut on_path)?;
        }
        Ok(QualSubstitution { map: values })
    }

    /// Whether `rho` satisfies every constraint. Variables missing from
    /// `rho` count as unsatisfied.
    pub fn check_solution(&self, domain: &Domain, rho: &QualSubstitution) -> bool {
        self.constraints.iter().all(|c| match c {
            QualConstraint::Threshold { alpha, w, beta } => rho
                .get(w)
                .filter(|v| !domain.is_bot(v))
                .and_then(|v| domain.attenuate(alpha, v).ok())
                .and_then(|av| domain.leq(beta, &av).ok())
                .unwrap_or(false),
            QualConstraint::Defining { w, d, deps } => {
                let Some(value) = rho.get(w) else { return false };
                let Some(dep_values) = deps.iter().map(|x| rho.get(x)).collect::<Option<Vec<_>>>() else {
                    return false;
                };
                !domain.is_bot(value)
                    && domain
                        .big_glb(dep_values)
                        .and_then(|g| domain.attenuate(d, &g))
                        .map(|expected| expected == *value)
                        .unwrap_or(false)
            }
        })
    }

    /// Admissibility for goal-shaped stores: exactly one constraint per
    /// variable in `war(Δ)`, acyclic definitions, no `⊥` constants, and
    /// `α ⊒ β` in every threshold (a threshold variable never has a
    /// defining constraint, so it can take the value `⊤`).
    pub fn is_admissible(&self, domain: &Domain) -> bool {
        let mut seen = BTreeSet::new();
        for c in &self.constraints {
            if !seen.insert(c.var()) {
                return false;
            }
            let ok = match c {
                QualConstraint::Threshold { alpha, beta, .. } => {
                    domain.contains(alpha)
                        && domain.contains(beta)
                        && !domain.is_bot(alpha)
                        && !domain.is_bot(beta)
                        && domain.leq(beta, alpha).unwrap_or(false)
                }
                QualConstraint::Defining { w, d, deps } => {
                    domain.contains(d) && !domain.is_bot(d) && !deps.contains(w)
                }
            };
            if !ok {
                return false;
            }
        }
        if self.war().iter().any(|w| !seen.contains(w)) {
            return false;
        }
        self.is_acyclic()
    }

    fn is_acyclic(&self) -> bool {
        let edges: BTreeMap<&QVar, &[QVar]> = self
            .constraints
            .iter()
            .filter_map(|c| match c {
                QualConstraint::Defining { w, deps, .. } => Some((w, deps.as_slice())),
                _ => None,
            })
            .collect();
        // 0 = unvisited, 1 = on the current path, 2 = finished
        let mut state: BTreeMap<&QVar, u8> = BTreeMap::new();
        fn visit<'a>(w: &'a QVar, edges: &BTreeMap<&'a QVar, &'a [QVar]>, state: &mut BTreeMap<&'a QVar, u8>) -> bool {
            match state.get(w) {
                Some(1) => return false,
                Some(2) => return true,
                _ => {}
            }
            state.insert(w, 1);
            if let Some(deps) = edges.get(w) {
                for dep in deps.iter() {
                    if !visit(dep, edges, state) {
                        return false;
                    }
                }
            }
            state.insert(w, 2);
            true
        }
        edges.keys().all(|w| visit(w, &edges, &mut state))
    }

    pub fn display<'a>(&'a self, domain: &'a Domain) -> impl fmt::Display + 'a {
        StoreDisplay { store: self, domain }
    }
}

fn evaluate(
    domain: &Domain,
    defs: &BTreeMap<&QVar, (&QualValue, &[QVar])>,
    w: &QVar,
    values: &mut BTreeMap<QVar, QualValue>,
    on_path: &mut BTreeSet<QVar>,
) -> Result<QualValue, ConstraintError> {
    if let Some(v) = values.get(w) {
        return Ok(v.clone());
    }
    let (d, deps) = defs.get(w).ok_or_else(|| ConstraintError::Undefined(w.clone()))?;
    if !on_path.insert(w.clone()) {
        return Err(ConstraintError::Cyclic(w.clone()));
    }
    let mut dep_values = Vec::with_capacity(deps.len());
    for dep in deps.iter() {
        dep_values.push(evaluate(domain, defs, dep, values, on_path)?);
    }
    on_path.remove(w);
    let value = domain.attenuate(d, &domain.big_glb(&dep_values)?)?;
    values.insert(w.clone(), value.clone());
    Ok(value)
}

struct StoreDisplay<'a> {
    store: &'a ConstraintStore,
    domain: &'a Domain,
}

impl fmt::Display for StoreDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.store.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.display(self.domain))?;
        }
        Ok(())
    }
}
