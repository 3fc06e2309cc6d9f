use std::collections::BTreeSet;
use std::fmt;

use crate::pattern::{Pattern, Var};
use crate::theory::as_equal;

use super::{CheckEnv, ProofTree, RuleApp, Sequent};

/// The first node that failed to check, addressed by premise indices from
/// the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFault {
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for TreeFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        let at = if path.is_empty() { "root".to_string() } else { path.join(".") };
        write!(f, "node {at} ({}): {}", self.rule, self.reason)
    }
}

/// Checks every node of `tree`, reporting the first failing one in pre-order.
pub fn check_tree(env: CheckEnv<'_>, tree: &ProofTree) -> Result<(), TreeFault> {
    for (path, node) in tree.nodes() {
        let premises: Vec<&Sequent> = node.premises.iter().map(|p| &p.conclusion).collect();
        if let Err(reason) = check_rule(env, &node.conclusion, &node.rule, &premises) {
            return Err(TreeFault { path, rule: node.rule.name().to_string(), reason });
        }
    }
    Ok(())
}

fn expect_premises(premises: &[&Sequent], expected: &[Sequent]) -> Result<(), String> {
    if premises.len() != expected.len() {
        return Err(format!("expected {} premises, found {}", expected.len(), premises.len()));
    }
    for (i, (got, want)) in premises.iter().zip(expected).enumerate() {
        if *got != want {
            return Err(format!("premise {i} should be `{want}`, found `{got}`"));
        }
    }
    Ok(())
}

fn at(ctx: &[Pattern], index: usize) -> Result<&Pattern, String> {
    ctx.get(index).ok_or_else(|| format!("context index {index} out of range ({} hypotheses)", ctx.len()))
}

fn without(ctx: &[Pattern], index: usize) -> Vec<Pattern> {
    let mut out = ctx.to_vec();
    out.remove(index);
    out
}

fn replaced(ctx: &[Pattern], index: usize, with: &[Pattern]) -> Vec<Pattern> {
    let mut out = ctx[..index].to_vec();
    out.extend_from_slice(with);
    out.extend_from_slice(&ctx[index + 1..]);
    out
}

fn free_in(ctx: &[Pattern], extra: &[&Pattern]) -> BTreeSet<Var> {
    ctx.iter().chain(extra.iter().copied()).flat_map(Pattern::free_vars).collect()
}

fn exists_body(p: &Pattern) -> Option<&Pattern> {
    match p {
        Pattern::Exists(_, body) => Some(body),
        _ => None,
    }
}

/// Whether `premises` justify `conclusion` by one application of `rule`.
pub fn check_rule(env: CheckEnv<'_>, conclusion: &Sequent, rule: &RuleApp, premises: &[&Sequent]) -> Result<(), String> {
    let ctx = &conclusion.context;
    let goal = &conclusion.goal;
    let same_goal = |c: Vec<Pattern>| Sequent::new(c, goal.clone());
    match rule {
        RuleApp::Inherit(d) => {
            if !ctx.is_empty() {
                return Err("derived rules conclude sequents with an empty context".into());
            }
            let want = d.conclusion()?;
            if goal != &want {
                return Err(format!("conclusion should be `{want}`"));
            }
            d.check(env)?;
            let expected: Vec<Sequent> = d.premises()?.into_iter().map(Sequent::theorem).collect();
            expect_premises(premises, &expected)
        }
        RuleApp::Weaken { index } => {
            at(ctx, *index)?;
            expect_premises(premises, &[same_goal(without(ctx, *index))])
        }
        RuleApp::Cut { index, formula } => {
            if *index > ctx.len() {
                return Err(format!("cut position {index} out of range"));
            }
            let left = Sequent::new(ctx[..*index].to_vec(), formula.clone());
            let mut with = ctx[..*index].to_vec();
            with.push(formula.clone());
            with.extend_from_slice(&ctx[*index..]);
            expect_premises(premises, &[left, same_goal(with)])
        }
        RuleApp::Hyp { index } => {
            if at(ctx, *index)? != goal {
                return Err(format!("hypothesis {index} is not the goal"));
            }
            expect_premises(premises, &[])
        }
        RuleApp::ImpL { index } => {
            let (a, b) = at(ctx, *index)?.as_imp().ok_or("hypothesis is not an implication")?;
            let first = Sequent::new(without(ctx, *index), a.clone());
            expect_premises(premises, &[first, same_goal(replaced(ctx, *index, &[b.clone()]))])
        }
        RuleApp::AndL { index } => {
            let (a, b) = at(ctx, *index)?.as_and().ok_or("hypothesis is not a conjunction")?;
            expect_premises(premises, &[same_goal(replaced(ctx, *index, &[a.clone(), b.clone()]))])
        }
        RuleApp::OrL { index } => {
            let (a, b) = at(ctx, *index)?.as_or().ok_or("hypothesis is not a disjunction")?;
            expect_premises(
                premises,
                &[same_goal(replaced(ctx, *index, &[a.clone()])), same_goal(replaced(ctx, *index, &[b.clone()]))],
            )
        }
        RuleApp::BotL { index } => {
            if at(ctx, *index)? != &Pattern::Bot {
                return Err(format!("hypothesis {index} is not bot"));
            }
            expect_premises(premises, &[])
        }
        RuleApp::ImpR => {
            let (a, b) = goal.as_imp().ok_or("goal is not an implication")?;
            let mut with = ctx.clone();
            with.push(a.clone());
            expect_premises(premises, &[Sequent::new(with, b.clone())])
        }
        RuleApp::AndR => {
            let (a, b) = goal.as_and().ok_or("goal is not a conjunction")?;
            expect_premises(premises, &[Sequent::new(ctx.clone(), a.clone()), Sequent::new(ctx.clone(), b.clone())])
        }
        RuleApp::OrRL | RuleApp::OrRR => {
            let (a, b) = goal.as_or().ok_or("goal is not a disjunction")?;
            let pick = if matches!(rule, RuleApp::OrRL) { a } else { b };
            expect_premises(premises, &[Sequent::new(ctx.clone(), pick.clone())])
        }
        RuleApp::ForallL { index, var } => {
            let (_, body) = at(ctx, *index)?.as_forall().ok_or("hypothesis is not universally quantified")?;
            let opened = body.open_with(&Pattern::EVar(var.clone()));
            expect_premises(premises, &[same_goal(replaced(ctx, *index, &[opened]))])
        }
        RuleApp::ExistsL { index, var } => {
            let body = exists_body(at(ctx, *index)?).ok_or("hypothesis is not existentially quantified")?;
            if free_in(ctx, &[goal]).contains(var) {
                return Err(format!("eigenvariable `{var}` is not fresh"));
            }
            let opened = body.open_with(&Pattern::EVar(var.clone()));
            expect_premises(premises, &[same_goal(replaced(ctx, *index, &[opened]))])
        }
        RuleApp::ForallR { var } => {
            let (_, body) = goal.as_forall().ok_or("goal is not universally quantified")?;
            if free_in(ctx, &[goal]).contains(var) {
                return Err(format!("eigenvariable `{var}` is not fresh"));
            }
            let opened = body.open_with(&Pattern::EVar(var.clone()));
            expect_premises(premises, &[Sequent::new(ctx.clone(), opened)])
        }
        RuleApp::ExistsR { var } => {
            let body = exists_body(goal).ok_or("goal is not existentially quantified")?;
            let opened = body.open_with(&Pattern::EVar(var.clone()));
            expect_premises(premises, &[Sequent::new(ctx.clone(), opened)])
        }
        RuleApp::EqRefl => {
            if !env.theory.has_definedness() {
                return Err("reflexivity needs the definedness axiom".into());
            }
            match as_equal(goal) {
                Some((a, b)) if a == b => expect_premises(premises, &[]),
                _ => Err("goal is not an equation between identical sides".into()),
            }
        }
        RuleApp::EqRewrite { index, context } => {
            if !env.theory.has_definedness() {
                return Err("rewriting needs the definedness axiom".into());
            }
            let (lhs, rhs) = as_equal(at(ctx, *index)?).ok_or("hypothesis is not an equation")?;
            if &context.plug(lhs) != goal {
                return Err("goal is not the context filled with the left side".into());
            }
            expect_premises(premises, &[Sequent::new(ctx.clone(), context.plug(rhs))])
        }
        RuleApp::Deduction => Err("deduction is not a free-standing step".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternContext;
    use crate::theory::{equal, Signature, Theory};

    fn pv(n: &str) -> Pattern {
        Pattern::var(n)
    }

    fn env_parts() -> (Signature, Theory) {
        let sig = Signature::with(&[("g", Some(1)), ("1", Some(0))]).unwrap();
        let theory = Theory::for_signature(&sig);
        (sig, theory)
    }

    #[test]
    fn hypothesis_and_implication() {
        let (sig, theory) = env_parts();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let (a, b) = (pv("a"), pv("b"));
        let goal = Sequent::new(vec![], Pattern::imp(a.clone(), a.clone()));
        let leaf = Sequent::new(vec![a.clone()], a.clone());
        assert!(check_rule(env, &goal, &RuleApp::ImpR, &[&leaf]).is_ok());
        assert!(check_rule(env, &leaf, &RuleApp::Hyp { index: 0 }, &[]).is_ok());
        assert!(check_rule(env, &leaf, &RuleApp::Hyp { index: 1 }, &[]).is_err());
        let wrong = Sequent::new(vec![b.clone()], a.clone());
        assert!(check_rule(env, &wrong, &RuleApp::Hyp { index: 0 }, &[]).is_err());

        let mp = Sequent::new(vec![a.clone(), Pattern::imp(a.clone(), b.clone())], b.clone());
        let p1 = Sequent::new(vec![a.clone()], a.clone());
        let p2 = Sequent::new(vec![a.clone(), b.clone()], b.clone());
        assert!(check_rule(env, &mp, &RuleApp::ImpL { index: 1 }, &[&p1, &p2]).is_ok());
        assert!(check_rule(env, &mp, &RuleApp::ImpL { index: 1 }, &[&p2, &p1]).is_err());
    }

    #[test]
    fn quantifier_side_conditions() {
        let (sig, theory) = env_parts();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let x = Var::new("x");
        let body = Pattern::app(Pattern::sym("g"), pv("x"));
        let goal = Sequent::new(vec![pv("y")], Pattern::forall(&x, body.clone()));
        let fresh = Var::new("w");
        let premise = Sequent::new(vec![pv("y")], Pattern::app(Pattern::sym("g"), pv("w")));
        assert!(check_rule(env, &goal, &RuleApp::ForallR { var: fresh }, &[&premise]).is_ok());
        let clash = Sequent::new(vec![pv("y")], Pattern::app(Pattern::sym("g"), pv("y")));
        assert!(check_rule(env, &goal, &RuleApp::ForallR { var: Var::new("y") }, &[&clash]).is_err());
        let ex = Sequent::new(vec![], Pattern::exists(&x, body));
        assert!(check_rule(env, &ex, &RuleApp::ExistsR { var: Var::new("y") }, &[&Sequent::theorem(clash.goal)]).is_ok());
    }

    #[test]
    fn equality_rules() {
        let (sig, theory) = env_parts();
        let env = CheckEnv { signature: &sig, theory: &theory };
        let one = Pattern::sym("1");
        let gx = Pattern::app(Pattern::sym("g"), pv("x"));
        let g1 = Pattern::app(Pattern::sym("g"), one.clone());
        let refl = Sequent::theorem(equal(g1.clone(), g1.clone()));
        assert!(check_rule(env, &refl, &RuleApp::EqRefl, &[]).is_ok());
        assert!(check_rule(env, &Sequent::theorem(equal(gx.clone(), g1.clone())), &RuleApp::EqRefl, &[]).is_err());

        let hyp = equal(pv("x"), one.clone());
        let goal = Sequent::new(vec![hyp.clone()], equal(gx.clone(), g1.clone()));
        let context = PatternContext::abstracting(&goal.goal, &Var::new("x"));
        let premise = Sequent::new(vec![hyp], equal(g1.clone(), g1.clone()));
        let rule = RuleApp::EqRewrite { index: 0, context };
        assert!(check_rule(env, &goal, &rule, &[&premise]).is_ok());

        let bare = Theory::new(Vec::new());
        let env = CheckEnv { signature: &sig, theory: &bare };
        assert!(check_rule(env, &refl, &RuleApp::EqRefl, &[]).is_err());
        assert!(check_rule(env, &goal, &rule, &[&premise]).is_err());
        assert!(check_rule(env, &goal, &RuleApp::Deduction, &[&premise]).is_err());
    }
}
