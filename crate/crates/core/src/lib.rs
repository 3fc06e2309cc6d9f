//! Applicative matching logic, curried syntactic unification, and
//! certificates that the computed unifier is sound.
//!
//! The pieces, bottom up:
//!
//! * [`pattern`]: the pattern language and its notations.
//! * [`theory`]: signatures, definedness, equality and injectivity axioms.
//! * [`subst`]: substitutions and the predicate `ϕ^σ` they induce.
//! * [`unify`]: the rule-based unification engine over an abstract problem type.
//! * [`certify`]: sequent-style proof trees, their checker and generator.
//! * [`model`]: bounded finite models used as a semantic cross-check.
//! * [`surface`]: the ASCII syntax.

pub mod certify;
pub mod model;
pub mod pattern;
pub mod subst;
pub mod surface;
pub mod theory;
pub mod unify;

pub use pattern::{Pattern, Symbol, Var};
pub use subst::Substitution;
pub use theory::{Signature, Theory};
