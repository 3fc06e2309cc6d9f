use std::fmt;

use thiserror::Error;

use crate::pattern::Pattern;
use crate::subst::Substitution;
use crate::theory::{equal, Signature, Theory};
use crate::unify::{solve_with, ListProblem, ProblemKind, Rule, SetProblem, Strategy, UnifyError};

use super::build::{conjunction_tree, soundness_tree};
use super::{check_tree, AnyTrace, CheckEnv, ForwardStyle, ProofTree, Sequent};

pub const FORMAT_VERSION: u64 = 1;

/// Everything a third party needs to re-check a unification result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub version: u64,
    pub signature: Signature,
    pub theory: Theory,
    pub left: Pattern,
    pub right: Pattern,
    pub sigma: Substitution,
    pub trace: AnyTrace,
    /// `⊢ t1 = t2 ↔ ϕ^σ`.
    pub soundness: ProofTree,
    /// `⊢ t1 ∧ t2 ↔ t1 ∧ ϕ^σ`.
    pub conjunction: ProofTree,
}

impl Certificate {
    pub fn soundness_claim(&self) -> Pattern {
        Pattern::iff(equal(self.left.clone(), self.right.clone()), self.sigma.predicate())
    }

    pub fn conjunction_claim(&self) -> Pattern {
        Pattern::iff(
            Pattern::and(self.left.clone(), self.right.clone()),
            Pattern::and(self.left.clone(), self.sigma.predicate()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error("not unifiable ({0})")]
    NotUnifiable(Rule),
    #[error("`{0}` is not a constructor term of the signature")]
    NotConstructorTerm(Pattern),
    #[error("could not build proof: {0}")]
    Build(String),
}

/// Why a certificate was not accepted, with the part of the certificate
/// that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub part: String,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.part, self.reason)
    }
}

impl std::error::Error for Rejection {}

fn reject(part: &str, reason: impl Into<String>) -> Rejection {
    Rejection { part: part.to_string(), reason: reason.into() }
}

/// Runs unification and, on success, builds a certificate over the theory
/// generated by `sig`.
pub fn certify_pair(
    sig: &Signature,
    t1: &Pattern,
    t2: &Pattern,
    kind: ProblemKind,
    strategy: Strategy,
    style: ForwardStyle,
) -> Result<Certificate, CertifyError> {
    for t in [t1, t2] {
        if !sig.is_constructor_term(t) {
            return Err(CertifyError::NotConstructorTerm(t.clone()));
        }
    }
    let trace = match kind {
        ProblemKind::Set => AnyTrace::Set(solve_with::<SetProblem>(t1, t2, strategy)?.0),
        ProblemKind::List => AnyTrace::List(solve_with::<ListProblem>(t1, t2, strategy)?.0),
    };
    generate_certificate(sig, &Theory::for_signature(sig), t1, t2, trace, style)
}

/// Builds both proof trees for a finished, successful trace.
pub fn generate_certificate(
    sig: &Signature,
    theory: &Theory,
    t1: &Pattern,
    t2: &Pattern,
    trace: AnyTrace,
    style: ForwardStyle,
) -> Result<Certificate, CertifyError> {
    let Some(sigma) = trace.reading() else {
        let rule = trace
            .steps()
            .last()
            .filter(|s| s.after_failed())
            .map(|s| s.rule())
            .ok_or_else(|| CertifyError::Build("trace does not end in solved form".into()))?;
        return Err(CertifyError::NotUnifiable(rule));
    };
    let soundness = soundness_tree(t1, t2, &trace, &sigma, style).map_err(CertifyError::Build)?;
    let conjunction = conjunction_tree(t1, t2, &sigma, soundness.clone()).map_err(CertifyError::Build)?;
    Ok(Certificate {
        version: FORMAT_VERSION,
        signature: sig.clone(),
        theory: theory.clone(),
        left: t1.clone(),
        right: t2.clone(),
        sigma,
        trace,
        soundness,
        conjunction,
    })
}

/// Accepts a certificate only if its trace replays to a solved problem that
/// reads back as the claimed unifier and both trees check against the
/// claimed conclusions.
pub fn check_certificate(cert: &Certificate) -> Result<(), Rejection> {
    if cert.version != FORMAT_VERSION {
        return Err(reject("version", format!("unsupported version {}", cert.version)));
    }
    if !cert.theory.has_definedness() {
        return Err(reject("theory", "the definedness axiom is missing"));
    }
    for t in [&cert.left, &cert.right] {
        if !t.is_term_pattern() {
            return Err(reject("terms", format!("`{t}` is not a term")));
        }
    }
    cert.trace.replay().map_err(|f| reject("trace", f.to_string()))?;
    if !cert.trace.starts_from(&cert.left, &cert.right) {
        return Err(reject("trace", "does not start from the certified pair"));
    }
    if cert.trace.result_failed() {
        return Err(reject("trace", "ends in bot"));
    }
    if !cert.trace.result_solved() {
        return Err(reject("trace", "does not end in solved form"));
    }
    if cert.trace.reading().as_ref() != Some(&cert.sigma) {
        return Err(reject("sigma", "is not the substitution the trace ends with"));
    }
    if !cert.sigma.is_unifier(&cert.left, &cert.right) {
        return Err(reject("sigma", "does not unify the two terms"));
    }
    let env = CheckEnv { signature: &cert.signature, theory: &cert.theory };
    for (part, tree, claim) in [
        ("soundness", &cert.soundness, cert.soundness_claim()),
        ("conjunction", &cert.conjunction, cert.conjunction_claim()),
    ] {
        if tree.conclusion != Sequent::theorem(claim.clone()) {
            return Err(reject(part, format!("proves `{}` instead of `{claim}`", tree.conclusion)));
        }
        check_tree(env, tree).map_err(|f| reject(part, f.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::RuleApp;
    use crate::surface::{parse_signature, parse_term};

    fn example_sig() -> Signature {
        parse_signature("symbol f arity 3\nsymbol g arity 1\n").unwrap()
    }

    fn example_terms(sig: &Signature) -> (Pattern, Pattern) {
        (parse_term("f x (g 1) (g z)", sig).unwrap(), parse_term("f (g y) (g y) (g (g x))", sig).unwrap())
    }

    #[test]
    fn example_certificates_check() {
        let sig = example_sig();
        let (t1, t2) = example_terms(&sig);
        for kind in [ProblemKind::Set, ProblemKind::List] {
            for strategy in [Strategy::PairFirst, Strategy::RuleFirst] {
                for style in [ForwardStyle::Chain, ForwardStyle::Steps] {
                    let cert = certify_pair(&sig, &t1, &t2, kind, strategy, style).unwrap();
                    check_certificate(&cert).unwrap();
                }
            }
        }
    }

    #[test]
    fn tampering_is_rejected() {
        let sig = example_sig();
        let (t1, t2) = example_terms(&sig);
        let cert = certify_pair(&sig, &t1, &t2, ProblemKind::Set, Strategy::PairFirst, ForwardStyle::Chain).unwrap();

        let mut bad = cert.clone();
        bad.sigma = Substitution::new();
        assert_eq!(check_certificate(&bad).unwrap_err().part, "sigma");

        let mut bad = cert.clone();
        bad.theory = Theory::new(vec![crate::theory::Axiom::Definedness]);
        assert!(check_certificate(&bad).is_err());

        let mut bad = cert.clone();
        let hyp = bad
            .soundness
            .nodes()
            .into_iter()
            .find(|(_, n)| matches!(n.rule, RuleApp::EqRewrite { .. }))
            .map(|(p, _)| p)
            .unwrap();
        let target = bad.soundness.node_at_mut(&hyp).unwrap();
        *target.rule.index_mut().unwrap() += 1;
        let err = check_certificate(&bad).unwrap_err();
        assert_eq!(err.part, "soundness");
    }

    #[test]
    fn failures_do_not_certify() {
        let sig = example_sig();
        let t1 = parse_term("g x", &sig).unwrap();
        let t2 = parse_term("x", &sig).unwrap();
        let err = certify_pair(&sig, &t1, &t2, ProblemKind::Set, Strategy::PairFirst, ForwardStyle::Chain);
        assert_eq!(err.unwrap_err(), CertifyError::NotUnifiable(Rule::OccursCheck));
        let h = parse_term("h x", &sig).unwrap();
        assert!(matches!(
            certify_pair(&sig, &h, &t2, ProblemKind::Set, Strategy::PairFirst, ForwardStyle::Chain),
            Err(CertifyError::NotConstructorTerm(_))
        ));
    }
}
