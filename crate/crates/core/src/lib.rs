//! Qualified logic programming over parametric qualification domains.
//!
//! Programs are definite Horn clauses whose arrows carry an attenuation
//! value from a [`Domain`]. Goals annotate each atom with a qualification
//! variable and a lower bound. The [`resolution`] module solves goals by
//! SLD resolution with qualification constraints, [`semantics`] provides an
//! independent proof-theoretic and fixpoint oracle, and [`translate`] turns
//! programs into plain constrained clauses.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod axioms;
pub mod constraints;
pub mod domain;
pub mod parser;
pub mod resolution;
pub mod semantics;
pub mod syntax;
pub mod translate;
pub mod unify;

pub use constraints::{ConstraintStore, QualConstraint, QualSubstitution};
pub use domain::{Domain, DomainError, QualValue, Weight};
pub use parser::{parse_answer, parse_atom, parse_goal, parse_program, parse_term, ParseError};
pub use resolution::{check_answer, solve, subsumes, ComputedAnswer, SearchConfig, SearchStatus, Selection, Solver, Verdict};
pub use semantics::{AnnotatedAtom, InterpretationFragment, ProofTree};
pub use syntax::{Atom, Clause, GoalItem, InitialGoal, Program, ProgramError, QVar, Term};
pub use translate::{emit_text, run_translated, translate_goal, translate_program, Dialect, TranslatedProgram};
pub use unify::{mgu, Substitution};
