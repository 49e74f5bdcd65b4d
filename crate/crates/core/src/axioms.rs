//! Exhaustive checking of the qualification-domain axioms over a finite
//! sample of values.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::{Domain, QualValue};

/// The operation bundle a qualification domain provides.
///
/// [`Domain`] implements it; test harnesses can wrap a domain and replace
/// single operations to confirm that [`check_axioms`] notices.
pub trait QualificationDomain {
    type Value: Clone + PartialEq + fmt::Debug;

    fn bot(&self) -> Self::Value;
    fn top(&self) -> Self::Value;
    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool;
    fn glb(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn lub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn attenuate(&self, d: &Self::Value, e: &Self::Value) -> Self::Value;
}

/// Panics on values from another domain; [`check_axioms`] is only given
/// samples that [`Domain::contains`] accepts.
impl QualificationDomain for Domain {
    type Value = QualValue;

    fn bot(&self) -> QualValue {
        Domain::bot(self)
    }

    fn top(&self) -> QualValue {
        Domain::top(self)
    }

    fn leq(&self, a: &QualValue, b: &QualValue) -> bool {
        Domain::leq(self, a, b).expect("sample outside domain")
    }

    fn glb(&self, a: &QualValue, b: &QualValue) -> QualValue {
        Domain::glb(self, a, b).expect("sample outside domain")
    }

    fn lub(&self, a: &QualValue, b: &QualValue) -> QualValue {
        Domain::lub(self, a, b).expect("sample outside domain")
    }

    fn attenuate(&self, d: &QualValue, e: &QualValue) -> QualValue {
        Domain::attenuate(self, d, e).expect("sample outside domain")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    LeqReflexive,
    LeqAntisymmetric,
    LeqTransitive,
    BotIsLeast,
    TopIsGreatest,
    GlbIsLowerBound,
    GlbIsGreatest,
    LubIsUpperBound,
    LubIsLeast,
    AttenuationAssociative,
    AttenuationCommutative,
    AttenuationMonotone,
    /// `d ∘ ⊤ = d`
    TopIsIdentity,
    /// `d ∘ ⊥ = ⊥`
    BotAbsorbs,
    /// `d ∘ e ⊏ e` for `d, e ∉ {⊥, ⊤}`
    StrictDecrease,
    /// `d ∘ (e1 ⊓ e2) = (d ∘ e1) ⊓ (d ∘ e2)`
    Distributive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation<V> {
    pub axiom: Axiom,
    pub witnesses: Vec<V>,
}

/// Checks every lattice and attenuation law over all tuples drawn from
/// `samples` (plus `⊥` and `⊤`, added when missing). An empty result means
/// no violation was found.
pub fn check_axioms<D: QualificationDomain>(domain: &D, samples: &[D::Value]) -> Vec<AxiomViolation<D::Value>> {
    let bot = domain.bot();
    let top = domain.top();
    let mut values: Vec<D::Value> = Vec::with_capacity(samples.len() + 2);
    for v in samples.iter().chain([&bot, &top]) {
        if !values.contains(v) {
            values.push(v.clone());
        }
    }
    let n = values.len();
    let mut out = Vec::new();
    let mut report = |axiom, witnesses: &[&D::Value]| {
        out.push(AxiomViolation {
            axiom,
            witnesses: witnesses.iter().map(|v| (*v).clone()).collect(),
        })
    };

    let leq: Vec<Vec<bool>> = values
        .iter()
        .map(|a| values.iter().map(|b| domain.leq(a, b)).collect())
        .collect();
    let att: Vec<Vec<D::Value>> = values
        .iter()
        .map(|a| values.iter().map(|b| domain.attenuate(a, b)).collect())
        .collect();
    let glb: Vec<Vec<D::Value>> = values
        .iter()
        .map(|a| values.iter().map(|b| domain.glb(a, b)).collect())
        .collect();

    let (ib, it) = (index_of(&values, &bot), index_of(&values, &top));
    for i in 0..n {
        let d = &values[i];
        if !leq[i][i] {
            report(Axiom::LeqReflexive, &[d]);
        }
        if !leq[ib][i] {
            report(Axiom::BotIsLeast, &[d]);
        }
        if !leq[i][it] {
            report(Axiom::TopIsGreatest, &[d]);
        }
        if att[i][it] != *d {
            report(Axiom::TopIsIdentity, &[d]);
        }
        if att[i][ib] != bot {
            report(Axiom::BotAbsorbs, &[d]);
        }
    }

    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&values[i], &values[j]);
            if i != j && leq[i][j] && leq[j][i] {
                report(Axiom::LeqAntisymmetric, &[a, b]);
            }
            let g = &glb[i][j];
            if !(domain.leq(g, a) && domain.leq(g, b)) {
                report(Axiom::GlbIsLowerBound, &[a, b]);
            }
            let l = domain.lub(a, b);
            if !(domain.leq(a, &l) && domain.leq(b, &l)) {
                report(Axiom::LubIsUpperBound, &[a, b]);
            }
            if att[i][j] != att[j][i] {
                report(Axiom::AttenuationCommutative, &[a, b]);
            }
            let extreme = |v: &D::Value| *v == bot || *v == top;
            if !extreme(a) && !extreme(b) {
                let r = &att[i][j];
                if !(domain.leq(r, b) && r != b) {
                    report(Axiom::StrictDecrease, &[a, b]);
                }
            }
            for k in 0..n {
                let c = &values[k];
                if leq[i][j] && leq[j][k] && !leq[i][k] {
                    report(Axiom::LeqTransitive, &[a, b, c]);
                }
                // c below both a and b must lie below their glb
                if leq[k][i] && leq[k][j] && !domain.leq(c, g) {
                    report(Axiom::GlbIsGreatest, &[a, b, c]);
                }
                if leq[i][k] && leq[j][k] && !domain.leq(&l, c) {
                    report(Axiom::LubIsLeast, &[a, b, c]);
                }
                if domain.attenuate(&att[i][j], c) != domain.attenuate(a, &att[j][k]) {
                    report(Axiom::AttenuationAssociative, &[a, b, c]);
                }
                if leq[i][j] && !domain.leq(&att[i][k], &att[j][k]) {
                    report(Axiom::AttenuationMonotone, &[a, b, c]);
                }
                let lhs = domain.attenuate(a, &glb[j][k]);
                let rhs = domain.glb(&att[i][j], &att[i][k]);
                if lhs != rhs {
                    report(Axiom::Distributive, &[a, b, c]);
                }
            }
        }
    }
    out
}

fn index_of<V: PartialEq>(values: &[V], target: &V) -> usize {
    values.iter().position(|v| v == target).expect("extreme value sampled")
}

/// A grid of sample values for a domain: `⊥`, `⊤` and a fixed set of
/// interior points per chain component, crossed for products.
pub fn sample_grid(domain: &Domain) -> Vec<QualValue> {
    match domain {
        Domain::Bool => vec![QualValue::Bool(false), QualValue::Bool(true)],
        Domain::Cert => [(0, 1), (1, 10), (1, 4), (1, 3), (1, 2), (3, 4), (9, 10), (1, 1)]
            .iter()
            .map(|&(n, d)| QualValue::cert(n, d))
            .collect(),
        Domain::Weight => {
            let mut out: Vec<QualValue> = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1), (5, 1), (100, 1)]
                .iter()
                .map(|&(n, d)| QualValue::weight(n, d))
                .collect();
            out.push(QualValue::infinity());
            out
        }
        Domain::Product(l, r) => {
            let left = sample_grid(l);
            let right = sample_grid(r);
            left.iter()
                .flat_map(|a| right.iter().map(move |b| QualValue::pair(a.clone(), b.clone())))
                .collect()
        }
    }
}
