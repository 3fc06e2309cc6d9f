//! Algebraic laws of substitutions, the unification engine, the surface
//! syntax and the certificate codec.

use mlunify::certify::{
    certify_pair, check_certificate, decode_certificate, encode_certificate, ForwardStyle,
};
use mlunify::pattern::{Pattern, Var};
use mlunify::subst::Substitution;
use mlunify::surface::{parse_pattern, parse_term, print_pattern};
use mlunify::theory::{equal, Signature};
use mlunify::unify::{
    check_step, is_solved_form, measure, solve_with, ListProblem, ProblemKind, SetProblem,
    Strategy as Order, UnificationProblem,
};
use proptest::prelude::*;

const VARS: [&str; 4] = ["x", "y", "z", "w"];

fn sig() -> Signature {
    Signature::with(&[("a", Some(0)), ("b", Some(0)), ("g", Some(1)), ("f", Some(2))]).unwrap()
}

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(&VARS[..]).prop_map(Var::new)
}

/// Saturated first-order terms over `a`, `b`, `g/1`, `f/2`.
fn term() -> impl Strategy<Value = Pattern> {
    let leaf = prop_oneof![
        prop::sample::select(&VARS[..]).prop_map(Pattern::var),
        prop::sample::select(&["a", "b"][..]).prop_map(Pattern::sym),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Pattern::app(Pattern::sym("g"), t)),
            (inner.clone(), inner).prop_map(|(t, u)| Pattern::apply(Pattern::sym("f"), [t, u])),
        ]
    })
}

fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::vec((var(), term()), 0..3).prop_map(Substitution::from_bindings)
}

fn strategy() -> impl Strategy<Value = Order> {
    prop_oneof![Just(Order::PairFirst), Just(Order::RuleFirst)]
}

fn both_kinds_agree(t1: &Pattern, t2: &Pattern, strategy: Order) -> (Option<Substitution>, Option<Substitution>) {
    let (_, s) = solve_with::<SetProblem>(t1, t2, strategy).unwrap();
    let (_, l) = solve_with::<ListProblem>(t1, t2, strategy).unwrap();
    (s, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compose_is_sequential_application(s1 in substitution(), s2 in substitution(), t in term()) {
        prop_assert_eq!(s1.compose(&s2).apply(&t), s2.apply(&s1.apply(&t)));
    }

    #[test]
    fn compose_is_associative(s1 in substitution(), s2 in substitution(), s3 in substitution(), t in term()) {
        let left = s1.compose(&s2).compose(&s3);
        let right = s1.compose(&s2.compose(&s3));
        prop_assert_eq!(left.apply(&t), right.apply(&t));
    }

    #[test]
    fn substitution_never_adds_foreign_variables(s in substitution(), t in term()) {
        let out = s.apply(&t);
        for v in out.free_vars() {
            let from_images = s.bindings().any(|(_, img)| img.occurs(&v));
            prop_assert!(t.occurs(&v) || from_images);
        }
    }

    #[test]
    fn solver_result_is_an_idempotent_unifier(t1 in term(), t2 in term(), st in strategy()) {
        let (trace, sigma) = solve_with::<SetProblem>(&t1, &t2, st).unwrap();
        prop_assert!(trace.replay().is_ok());
        prop_assert!(trace.steps.iter().all(check_step));
        prop_assert!(is_solved_form(&trace.result));
        if let Some(s) = sigma {
            prop_assert!(s.is_unifier(&t1, &t2));
            prop_assert!(s.is_idempotent());
            prop_assert!(trace.failing_rule().is_none());
        } else {
            prop_assert!(trace.result.is_failed());
            prop_assert!(trace.failing_rule().is_some_and(|r| r.is_failure()));
        }
    }

    #[test]
    fn every_step_decreases_the_measure(t1 in term(), t2 in term(), st in strategy()) {
        let (trace, _) = solve_with::<ListProblem>(&t1, &t2, st).unwrap();
        for s in &trace.steps {
            prop_assert!(measure(&s.after) < measure(&s.before), "{} at {}", s.rule, s.before);
        }
    }

    #[test]
    fn problem_types_and_strategies_agree(t1 in term(), t2 in term(), st in strategy()) {
        let (s, l) = both_kinds_agree(&t1, &t2, st);
        prop_assert_eq!(s.is_some(), l.is_some());
        if let (Some(s), Some(l)) = (s, l) {
            prop_assert!(s.more_general(&l).is_some());
            prop_assert!(l.more_general(&s).is_some());
        }
    }

    #[test]
    fn every_instance_of_the_unifier_factors_through_it(t1 in term(), t2 in term(), s in substitution()) {
        let (_, sigma) = solve_with::<SetProblem>(&t1, &t2, Order::PairFirst).unwrap();
        if let Some(sigma) = sigma {
            let theta = sigma.compose(&s);
            prop_assert!(theta.is_unifier(&t1, &t2));
            let witness = sigma.more_general(&theta);
            prop_assert!(witness.is_some());
            prop_assert!(sigma.compose(&witness.unwrap()).extensionally_equal(&theta));
        }
    }

    #[test]
    fn solving_is_symmetric_in_unifiability(t1 in term(), t2 in term()) {
        let (_, a) = solve_with::<SetProblem>(&t1, &t2, Order::PairFirst).unwrap();
        let (_, b) = solve_with::<SetProblem>(&t2, &t1, Order::PairFirst).unwrap();
        prop_assert_eq!(a.is_some(), b.is_some());
    }

    #[test]
    fn list_insert_conjoins_in_front(t1 in term(), t2 in term(), u1 in term(), u2 in term()) {
        let p = ListProblem::singleton(u1, u2);
        let q = p.insert(t1.clone(), t2.clone()).unwrap();
        prop_assert_eq!(q.predicate(), Pattern::and(equal(t1, t2), p.predicate()));
    }

    #[test]
    fn terms_print_and_parse_back(t in term()) {
        let text = print_pattern(&t);
        prop_assert_eq!(parse_term(&text, &sig()).unwrap(), t);
    }

    #[test]
    fn printing_is_a_fixed_point(t1 in term(), t2 in term(), x in var()) {
        let p = Pattern::forall(&x, Pattern::imp(equal(t1.clone(), t2), Pattern::exists(&x, t1)));
        let once = print_pattern(&p);
        let twice = print_pattern(&parse_pattern(&once, &sig()).unwrap());
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_survive_the_codec(t in term(), s in substitution(), st in strategy(), list in any::<bool>(), steps in any::<bool>()) {
        let (t1, t2) = (t.clone(), s.apply(&t));
        let (_, unifier) = solve_with::<SetProblem>(&t1, &t2, st).unwrap();
        prop_assume!(unifier.is_some());
        let kind = if list { ProblemKind::List } else { ProblemKind::Set };
        let style = if steps { ForwardStyle::Steps } else { ForwardStyle::Chain };
        let cert = certify_pair(&sig(), &t1, &t2, kind, st, style).unwrap();
        prop_assert!(check_certificate(&cert).is_ok());
        let text = serde_json::to_string(&encode_certificate(&cert)).unwrap();
        let back = decode_certificate(&text).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert!(check_certificate(&back).is_ok());
    }
}
