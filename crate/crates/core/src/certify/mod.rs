//! Proof certificates for unification results.
//!
//! A certificate carries the unification trace together with two sequent
//! proof trees: one for `t1 = t2 ↔ ϕ^σ` and one for `t1 ∧ t2 ↔ t1 ∧ ϕ^σ`.
//! The checker trusts only the primitive sequent rules in [`RuleApp`] and the
//! finite list of schemas in [`DerivedRule`], each of which carries its own
//! side-condition check.

mod build;
mod certificate;
mod check;
mod derived;
mod format;

use std::fmt;

use crate::pattern::{Pattern, PatternContext, Var};
use crate::subst::Substitution;
use crate::theory::{Signature, Theory};
use crate::unify::{
    is_solved_form, solved_reading, ListProblem, Pair, ProblemKind, SetProblem, TraceFault, UnifStep, UnifTrace,
    UnificationProblem,
};

pub use build::{
    backward_proof, conj_reorder, conjunction_tree, forward_proof, iff_trans, imp_trans, modus_ponens, soundness_tree,
    weaken_to, ForwardStyle,
};
pub use certificate::{
    certify_pair, check_certificate, generate_certificate, Certificate, CertifyError, Rejection, FORMAT_VERSION,
};
pub use check::{check_rule, check_tree, TreeFault};
pub use derived::{is_predicate_pattern, DerivedRule};
pub use format::{decode_certificate, encode_certificate, FormatError, FormatErrorKind};

/// `Δ ⊢ ψ`. The ambient theory is fixed per certificate and not repeated in
/// every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub context: Vec<Pattern>,
    pub goal: Pattern,
}

impl Sequent {
    pub fn new(context: Vec<Pattern>, goal: Pattern) -> Self {
        Sequent { context, goal }
    }

    /// `⊢ ψ` with an empty context.
    pub fn theorem(goal: Pattern) -> Self {
        Sequent { context: Vec::new(), goal }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self.context.iter().map(|p| p.to_string()).collect();
        if ctx.is_empty() {
            write!(f, "|- {}", self.goal)
        } else {
            write!(f, "{} |- {}", ctx.join(", "), self.goal)
        }
    }
}

/// One primitive inference. Indices point into the conclusion's context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleApp {
    /// A derived schema applied with an empty context.
    Inherit(DerivedRule),
    Weaken { index: usize },
    /// `φ` is inserted at `index`; premises `Δ1 ⊢ φ` and `Δ1, φ, Δ2 ⊢ ψ`.
    Cut { index: usize, formula: Pattern },
    Hyp { index: usize },
    ImpL { index: usize },
    AndL { index: usize },
    OrL { index: usize },
    BotL { index: usize },
    ImpR,
    AndR,
    OrRL,
    OrRR,
    ForallL { index: usize, var: Var },
    ExistsL { index: usize, var: Var },
    ForallR { var: Var },
    ExistsR { var: Var },
    /// `Δ ⊢ ψ = ψ`.
    EqRefl,
    /// Hypothesis `φ1 = φ2` at `index`; goal `C[φ1]`, premise goal `C[φ2]`.
    EqRewrite { index: usize, context: PatternContext },
    /// Present so that certificates naming it decode, but never accepted as
    /// a free-standing step.
    Deduction,
}

impl RuleApp {
    pub fn name(&self) -> &'static str {
        match self {
            RuleApp::Inherit(_) => "Inherit",
            RuleApp::Weaken { .. } => "Weaken",
            RuleApp::Cut { .. } => "Cut",
            RuleApp::Hyp { .. } => "Hyp",
            RuleApp::ImpL { .. } => "ImpL",
            RuleApp::AndL { .. } => "AndL",
            RuleApp::OrL { .. } => "OrL",
            RuleApp::BotL { .. } => "BotL",
            RuleApp::ImpR => "ImpR",
            RuleApp::AndR => "AndR",
            RuleApp::OrRL => "OrRL",
            RuleApp::OrRR => "OrRR",
            RuleApp::ForallL { .. } => "ForallL",
            RuleApp::ExistsL { .. } => "ExistsL",
            RuleApp::ForallR { .. } => "ForallR",
            RuleApp::ExistsR { .. } => "ExistsR",
            RuleApp::EqRefl => "EqRefl",
            RuleApp::EqRewrite { .. } => "EqRewrite",
            RuleApp::Deduction => "Deduction",
        }
    }

    pub const NAMES: [&'static str; 19] = [
        "Inherit", "Weaken", "Cut", "Hyp", "ImpL", "AndL", "OrL", "BotL", "ImpR", "AndR", "OrRL", "OrRR", "ForallL",
        "ExistsL", "ForallR", "ExistsR", "EqRefl", "EqRewrite", "Deduction",
    ];

    /// The context index the rule refers to, if any.
    pub fn index(&self) -> Option<usize> {
        match self {
            RuleApp::Weaken { index }
            | RuleApp::Cut { index, .. }
            | RuleApp::Hyp { index }
            | RuleApp::ImpL { index }
            | RuleApp::AndL { index }
            | RuleApp::OrL { index }
            | RuleApp::BotL { index }
            | RuleApp::ForallL { index, .. }
            | RuleApp::ExistsL { index, .. }
            | RuleApp::EqRewrite { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub fn index_mut(&mut self) -> Option<&mut usize> {
        match self {
            RuleApp::Weaken { index }
            | RuleApp::Cut { index, .. }
            | RuleApp::Hyp { index }
            | RuleApp::ImpL { index }
            | RuleApp::AndL { index }
            | RuleApp::OrL { index }
            | RuleApp::BotL { index }
            | RuleApp::ForallL { index, .. }
            | RuleApp::ExistsL { index, .. }
            | RuleApp::EqRewrite { index, .. } => Some(index),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: RuleApp,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn new(conclusion: Sequent, rule: RuleApp, premises: Vec<ProofTree>) -> Self {
        ProofTree { conclusion, rule, premises }
    }

    /// A derived-schema leaf or node concluding `⊢ d.conclusion()`.
    pub fn derived(rule: DerivedRule, premises: Vec<ProofTree>) -> Result<Self, String> {
        let goal = rule.conclusion()?;
        Ok(ProofTree { conclusion: Sequent::theorem(goal), rule: RuleApp::Inherit(rule), premises })
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::depth).max().unwrap_or(0)
    }

    /// Pre-order traversal with the path of premise indices to each node.
    pub fn nodes(&self) -> Vec<(Vec<usize>, &ProofTree)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((path, node)) = stack.pop() {
            for (i, p) in node.premises.iter().enumerate().rev() {
                let mut child = path.clone();
                child.push(i);
                stack.push((child, p));
            }
            out.push((path, node));
        }
        out
    }

    pub fn node_at_mut(&mut self, path: &[usize]) -> Option<&mut ProofTree> {
        let mut node = self;
        for &i in path {
            node = node.premises.get_mut(i)?;
        }
        Some(node)
    }
}

/// What a check is allowed to assume: the signature fixes which terms are
/// constructor terms and the theory lists the axioms in `Γ`.
#[derive(Clone, Copy, Debug)]
pub struct CheckEnv<'a> {
    pub signature: &'a Signature,
    pub theory: &'a Theory,
}

/// A unification trace over either problem representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTrace {
    Set(UnifTrace<SetProblem>),
    List(UnifTrace<ListProblem>),
}

/// A single unification step over either problem representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyStep {
    Set(UnifStep<SetProblem>),
    List(UnifStep<ListProblem>),
}

macro_rules! each_trace {
    ($self:expr, $t:ident => $body:expr) => {
        match $self {
            AnyTrace::Set($t) => $body,
            AnyTrace::List($t) => $body,
        }
    };
}

macro_rules! each_step {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            AnyStep::Set($s) => $body,
            AnyStep::List($s) => $body,
        }
    };
}

impl AnyTrace {
    pub fn kind(&self) -> ProblemKind {
        match self {
            AnyTrace::Set(_) => ProblemKind::Set,
            AnyTrace::List(_) => ProblemKind::List,
        }
    }

    pub fn len(&self) -> usize {
        each_trace!(self, t => t.steps.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn replay(&self) -> Result<(), TraceFault> {
        each_trace!(self, t => t.replay())
    }

    pub fn initial_predicate(&self) -> Pattern {
        each_trace!(self, t => t.initial.predicate())
    }

    pub fn result_predicate(&self) -> Pattern {
        each_trace!(self, t => t.result.predicate())
    }

    pub fn initial_pairs(&self) -> Option<Vec<Pair>> {
        each_trace!(self, t => t.initial.pairs().map(<[Pair]>::to_vec))
    }

    pub fn result_pairs(&self) -> Option<Vec<Pair>> {
        each_trace!(self, t => t.result.pairs().map(<[Pair]>::to_vec))
    }

    pub fn result_failed(&self) -> bool {
        each_trace!(self, t => t.result.is_failed())
    }

    pub fn result_solved(&self) -> bool {
        each_trace!(self, t => is_solved_form(&t.result))
    }

    pub fn reading(&self) -> Option<Substitution> {
        each_trace!(self, t => solved_reading(&t.result))
    }

    /// Whether the trace starts from the one-pair problem `⟨t1, t2⟩`.
    pub fn starts_from(&self, t1: &Pattern, t2: &Pattern) -> bool {
        match self {
            AnyTrace::Set(t) => t.initial == SetProblem::singleton(t1.clone(), t2.clone()),
            AnyTrace::List(t) => t.initial == ListProblem::singleton(t1.clone(), t2.clone()),
        }
    }

    pub fn steps(&self) -> Vec<AnyStep> {
        match self {
            AnyTrace::Set(t) => t.steps.iter().cloned().map(AnyStep::Set).collect(),
            AnyTrace::List(t) => t.steps.iter().cloned().map(AnyStep::List).collect(),
        }
    }
}

impl AnyStep {
    pub fn rule(&self) -> crate::unify::Rule {
        each_step!(self, s => s.rule)
    }

    pub fn pair(&self) -> &Pair {
        each_step!(self, s => &s.pair)
    }

    pub fn is_valid(&self) -> bool {
        each_step!(self, s => crate::unify::check_step(s))
    }

    pub fn before_predicate(&self) -> Pattern {
        each_step!(self, s => s.before.predicate())
    }

    pub fn after_predicate(&self) -> Pattern {
        each_step!(self, s => s.after.predicate())
    }

    pub fn after_failed(&self) -> bool {
        each_step!(self, s => s.after.is_failed())
    }
}
