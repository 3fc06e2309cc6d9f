//! Curried syntactic unification over an abstract problem type.

mod problem;
mod rules;

use thiserror::Error;

use crate::pattern::Pattern;

pub use problem::{ListProblem, Pair, ProblemKind, SetProblem, UnificationProblem};
pub use rules::{
    apply_rule, check_step, is_solved_form, measure, next_step, solve, solve_with, solved_reading, step, Measure,
    Rule, Strategy, TraceFault, UnifStep, UnifTrace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("step on failed problem")]
    StepOnFailed,
    #[error("operation on the failed problem")]
    FailedProblem,
    #[error("`{0}` is not a term pattern")]
    NotTerm(Pattern),
}
