//! The trusted schemas. Each one states its conclusion as a function of its
//! parameters and checks its own side conditions against the environment.

use crate::pattern::{Pattern, PatternContext, Symbol, Var};
use crate::subst::Substitution;
use crate::theory::{as_defined, defined, equal, injectivity_instance, member};
use crate::unify::{Pair, Rule};

use super::{AnyStep, AnyTrace, CheckEnv};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivedRule {
    /// From `⊢ l ↔ r` conclude `C[l] ↔ C[r]`.
    Congruence { context: PatternContext, left: Pattern, right: Pattern },
    /// `φ → ⌈φ⌉`.
    DefinednessIntro { pattern: Pattern },
    /// `l ∈ r → l = r` for constructor terms.
    MemberToEq { left: Pattern, right: Pattern },
    /// `(c ∧ l ↔ c ∧ r) ↔ (c → (l ↔ r))`.
    CondEquiv { cond: Pattern, left: Pattern, right: Pattern },
    /// `(c ∧ l = c ∧ r) ↔ (c → l = r)` for a predicate `c`.
    CondEq { cond: Pattern, left: Pattern, right: Pattern },
    /// `l ∧ r ↔ l ∧ (l = r)` for constructor terms.
    TermConjToEq { left: Pattern, right: Pattern },
    /// `x = t → φ[t/x] = φ`.
    SubstEq { var: Var, term: Pattern, pattern: Pattern },
    /// `φσ ∧ ϕ^σ ↔ φ ∧ ϕ^σ`.
    SubstPredicate { pattern: Pattern, sigma: Substitution },
    /// `ϕ^P → ϕ^P'` for one valid step that does not fail.
    StepSound(AnyStep),
    /// `ϕ^P → ϕ^P'` along a whole trace that does not fail.
    ChainSound(AnyTrace),
    /// `t1 = t2 → ϕ^σ` where `σ` is read off the end of the trace.
    MguForward { left: Pattern, right: Pattern, trace: AnyTrace },
    /// `ϕ^σ → t1 = t2` for a unifier `σ`.
    UnifierBackward { left: Pattern, right: Pattern, sigma: Substitution },
    /// An injectivity axiom of the theory.
    Injectivity { symbol: Symbol, arity: usize },
    EqSymmetry { left: Pattern, right: Pattern },
    EqTransitivity { left: Pattern, middle: Pattern, right: Pattern },
    TopIntro,
}

impl DerivedRule {
    pub const NAMES: [&'static str; 16] = [
        "Congruence",
        "DefinednessIntro",
        "MemberToEq",
        "CondEquiv",
        "CondEq",
        "TermConjToEq",
        "SubstEq",
        "SubstPredicate",
        "StepSound",
        "ChainSound",
        "MguForward",
        "UnifierBackward",
        "Injectivity",
        "EqSymmetry",
        "EqTransitivity",
        "TopIntro",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DerivedRule::Congruence { .. } => "Congruence",
            DerivedRule::DefinednessIntro { .. } => "DefinednessIntro",
            DerivedRule::MemberToEq { .. } => "MemberToEq",
            DerivedRule::CondEquiv { .. } => "CondEquiv",
            DerivedRule::CondEq { .. } => "CondEq",
            DerivedRule::TermConjToEq { .. } => "TermConjToEq",
            DerivedRule::SubstEq { .. } => "SubstEq",
            DerivedRule::SubstPredicate { .. } => "SubstPredicate",
            DerivedRule::StepSound(_) => "StepSound",
            DerivedRule::ChainSound(_) => "ChainSound",
            DerivedRule::MguForward { .. } => "MguForward",
            DerivedRule::UnifierBackward { .. } => "UnifierBackward",
            DerivedRule::Injectivity { .. } => "Injectivity",
            DerivedRule::EqSymmetry { .. } => "EqSymmetry",
            DerivedRule::EqTransitivity { .. } => "EqTransitivity",
            DerivedRule::TopIntro => "TopIntro",
        }
    }

    pub fn conclusion(&self) -> Result<Pattern, String> {
        use DerivedRule::*;
        let c = |p: &Pattern| p.clone();
        Ok(match self {
            Congruence { context, left, right } => Pattern::iff(context.plug(left), context.plug(right)),
            DefinednessIntro { pattern } => Pattern::imp(c(pattern), defined(c(pattern))),
            MemberToEq { left, right } => Pattern::imp(member(c(left), c(right)), equal(c(left), c(right))),
            CondEquiv { cond, left, right } => Pattern::iff(
                Pattern::iff(Pattern::and(c(cond), c(left)), Pattern::and(c(cond), c(right))),
                Pattern::imp(c(cond), Pattern::iff(c(left), c(right))),
            ),
            CondEq { cond, left, right } => Pattern::iff(
                equal(Pattern::and(c(cond), c(left)), Pattern::and(c(cond), c(right))),
                Pattern::imp(c(cond), equal(c(left), c(right))),
            ),
            TermConjToEq { left, right } => {
                Pattern::iff(Pattern::and(c(left), c(right)), Pattern::and(c(left), equal(c(left), c(right))))
            }
            SubstEq { var, term, pattern } => {
                Pattern::imp(equal(Pattern::EVar(var.clone()), c(term)), equal(pattern.substitute(var, term), c(pattern)))
            }
            SubstPredicate { pattern, sigma } => Pattern::iff(
                Pattern::and(sigma.apply(pattern), sigma.predicate()),
                Pattern::and(c(pattern), sigma.predicate()),
            ),
            StepSound(step) => Pattern::imp(step.before_predicate(), step.after_predicate()),
            ChainSound(trace) => Pattern::imp(trace.initial_predicate(), trace.result_predicate()),
            MguForward { left, right, trace } => {
                let sigma = trace.reading().ok_or("trace does not end in solved form")?;
                Pattern::imp(equal(c(left), c(right)), sigma.predicate())
            }
            UnifierBackward { left, right, sigma } => Pattern::imp(sigma.predicate(), equal(c(left), c(right))),
            Injectivity { symbol, arity } => injectivity_instance(symbol, *arity).map_err(|e| e.to_string())?,
            EqSymmetry { left, right } => Pattern::imp(equal(c(left), c(right)), equal(c(right), c(left))),
            EqTransitivity { left, middle, right } => Pattern::imp(
                equal(c(left), c(middle)),
                Pattern::imp(equal(c(middle), c(right)), equal(c(left), c(right))),
            ),
            TopIntro => Pattern::top(),
        })
    }

    /// Theorems the schema consumes, each with an empty context.
    pub fn premises(&self) -> Result<Vec<Pattern>, String> {
        Ok(match self {
            DerivedRule::Congruence { left, right, .. } => vec![Pattern::iff(left.clone(), right.clone())],
            _ => Vec::new(),
        })
    }

    fn needs_definedness(&self) -> bool {
        !matches!(
            self,
            DerivedRule::Congruence { .. }
                | DerivedRule::CondEquiv { .. }
                | DerivedRule::Injectivity { .. }
                | DerivedRule::TopIntro
        )
    }

    /// Side conditions of the schema.
    pub fn check(&self, env: CheckEnv<'_>) -> Result<(), String> {
        use DerivedRule::*;
        if self.needs_definedness() && !env.theory.has_definedness() {
            return Err(format!("{} needs the definedness axiom", self.name()));
        }
        let constructor = |p: &Pattern| {
            if env.signature.is_constructor_term(p) {
                Ok(())
            } else {
                Err(format!("`{p}` is not a constructor term of the signature"))
            }
        };
        match self {
            MemberToEq { left, right } | TermConjToEq { left, right } => {
                constructor(left)?;
                constructor(right)
            }
            CondEq { cond, .. } => {
                if is_predicate_pattern(cond) {
                    Ok(())
                } else {
                    Err(format!("`{cond}` is not a predicate pattern"))
                }
            }
            SubstPredicate { sigma, .. } => {
                for (x, t) in sigma.bindings() {
                    if !t.is_term_pattern() {
                        return Err(format!("image of `{x}` is not a term"));
                    }
                }
                Ok(())
            }
            StepSound(step) => check_step_sound(env, step),
            ChainSound(trace) => check_chain(env, trace),
            MguForward { left, right, trace } => {
                if !trace.starts_from(left, right) {
                    return Err("trace does not start from the given pair".into());
                }
                check_chain(env, trace)?;
                if !trace.result_solved() {
                    return Err("trace does not end in solved form".into());
                }
                Ok(())
            }
            UnifierBackward { left, right, sigma } => {
                if sigma.is_unifier(left, right) {
                    Ok(())
                } else {
                    Err(format!("{sigma} does not unify the two sides"))
                }
            }
            Injectivity { symbol, arity } => {
                if env.theory.has_injectivity(symbol, *arity) {
                    Ok(())
                } else {
                    Err(format!("injectivity of `{symbol}` at arity {arity} is not in the theory"))
                }
            }
            Congruence { .. }
            | DefinednessIntro { .. }
            | CondEquiv { .. }
            | SubstEq { .. }
            | EqSymmetry { .. }
            | EqTransitivity { .. }
            | TopIntro => Ok(()),
        }
    }
}

/// Built from definedness, `⊥` and implication, possibly under `∃`. Such
/// patterns denote either the whole carrier or nothing.
pub fn is_predicate_pattern(p: &Pattern) -> bool {
    match p {
        Pattern::Bot => true,
        Pattern::Imp(a, b) => is_predicate_pattern(a) && is_predicate_pattern(b),
        Pattern::Exists(_, body) => is_predicate_pattern(body),
        _ => as_defined(p).is_some(),
    }
}

fn check_step_sound(env: CheckEnv<'_>, step: &AnyStep) -> Result<(), String> {
    if !step.is_valid() {
        return Err(format!("{} is not a valid step", step.rule()));
    }
    if step.after_failed() {
        return Err("step ends in bot".into());
    }
    if step.rule() == Rule::Decomposition {
        decomposition_justified(env, step.pair())?;
    }
    Ok(())
}

fn check_chain(env: CheckEnv<'_>, trace: &AnyTrace) -> Result<(), String> {
    trace.replay().map_err(|f| f.to_string())?;
    if trace.result_failed() {
        return Err("trace ends in bot".into());
    }
    for (i, step) in trace.steps().iter().enumerate() {
        check_step_sound(env, step).map_err(|e| format!("step {i}: {e}"))?;
    }
    Ok(())
}

/// Decomposition of `⟨f s1..sk, f u1..uk⟩` is sound when `f` has a declared
/// arity `n ≥ k` and its injectivity axiom at `n` is in the theory.
fn decomposition_justified(env: CheckEnv<'_>, pair: &Pair) -> Result<(), String> {
    let (lh, la) = pair.left.spine();
    let (rh, ra) = pair.right.spine();
    let (Pattern::Sym(f), Pattern::Sym(g)) = (lh, rh) else {
        return Err("decomposition needs symbol heads on both sides".into());
    };
    if f != g || la.len() != ra.len() {
        return Err(format!("decomposition of `{}` against `{}` is not justified", pair.left, pair.right));
    }
    let n = env.signature.declared_arity(f).ok_or_else(|| format!("`{f}` is not declared"))?;
    if la.len() > n {
        return Err(format!("`{f}` is applied beyond its arity {n}"));
    }
    if !env.theory.has_injectivity(f, n) {
        return Err(format!("injectivity of `{f}` at arity {n} is not in the theory"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{Signature, Theory};
    use crate::unify::{solve, ListProblem, SetProblem, UnificationProblem, UnifStep};

    fn pv(n: &str) -> Pattern {
        Pattern::var(n)
    }
    fn g(p: Pattern) -> Pattern {
        Pattern::app(Pattern::sym("g"), p)
    }

    fn setup() -> (Signature, Theory) {
        let sig = Signature::with(&[("g", Some(1)), ("f", Some(2)), ("a", Some(0))]).unwrap();
        let theory = Theory::for_signature(&sig);
        (sig, theory)
    }

    #[test]
    fn predicate_patterns() {
        assert!(is_predicate_pattern(&equal(pv("x"), pv("y"))));
        assert!(is_predicate_pattern(&Pattern::top()));
        assert!(is_predicate_pattern(&Pattern::and(equal(pv("x"), pv("y")), member(pv("x"), pv("z")))));
        assert!(!is_predicate_pattern(&pv("x")));
        assert!(!is_predicate_pattern(&Pattern::and(pv("x"), Pattern::top())));
    }

    #[test]
    fn constructor_gates() {
        let (sig, theory) = setup();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let ok = DerivedRule::TermConjToEq { left: g(pv("x")), right: Pattern::sym("a") };
        assert!(ok.check(env).is_ok());
        let bad = DerivedRule::TermConjToEq { left: g(pv("x")), right: Pattern::sym("h") };
        assert!(bad.check(env).is_err());
        let head_var = DerivedRule::MemberToEq { left: Pattern::app(pv("y"), pv("x")), right: pv("x") };
        assert!(head_var.check(env).is_err());
        let over = DerivedRule::MemberToEq { left: g(pv("x")), right: Pattern::app(g(pv("x")), pv("y")) };
        assert!(over.check(env).is_err());
    }

    #[test]
    fn step_schema_requires_injectivity() {
        let (sig, theory) = setup();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let before = SetProblem::singleton(g(pv("x")), g(Pattern::sym("a")));
        let step: UnifStep<SetProblem> = crate::unify::step(&before, 0, Rule::Decomposition).unwrap().unwrap();
        let rule = DerivedRule::StepSound(AnyStep::Set(step.clone()));
        assert!(rule.check(env).is_ok());
        let weak = Theory::new(vec![crate::theory::Axiom::Definedness]);
        let env = CheckEnv { signature: &sig, theory: &weak };
        assert!(rule.check(env).is_err());

        let mut forged = step;
        forged.after = SetProblem::empty();
        let env = CheckEnv { signature: &sig, theory: &theory };
        assert!(DerivedRule::StepSound(AnyStep::Set(forged)).check(env).is_err());
    }

    #[test]
    fn chain_and_mgu_schemas() {
        let (sig, theory) = setup();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let t1 = Pattern::apply(Pattern::sym("f"), [pv("x"), g(pv("y"))]);
        let t2 = Pattern::apply(Pattern::sym("f"), [g(Pattern::sym("a")), Pattern::sym("a")]);
        let (trace, sigma) = solve(&t1, &t2).unwrap();
        assert!(sigma.is_none());
        let rule = DerivedRule::ChainSound(AnyTrace::Set(trace));
        assert!(rule.check(env).is_err());

        let t2 = Pattern::apply(Pattern::sym("f"), [g(Pattern::sym("a")), g(pv("z"))]);
        let (trace, sigma) = crate::unify::solve_with::<ListProblem>(&t1, &t2, Default::default()).unwrap();
        let sigma = sigma.unwrap();
        let trace = AnyTrace::List(trace);
        let fwd = DerivedRule::MguForward { left: t1.clone(), right: t2.clone(), trace: trace.clone() };
        assert!(fwd.check(env).is_ok());
        assert_eq!(fwd.conclusion().unwrap(), Pattern::imp(equal(t1.clone(), t2.clone()), sigma.predicate()));
        let swapped = DerivedRule::MguForward { left: t2.clone(), right: t1.clone(), trace };
        assert!(swapped.check(env).is_err());
        let back = DerivedRule::UnifierBackward { left: t1.clone(), right: t2.clone(), sigma: Substitution::new() };
        assert!(back.check(env).is_err());
        assert!(DerivedRule::UnifierBackward { left: t1, right: t2, sigma }.check(env).is_ok());
    }
}
