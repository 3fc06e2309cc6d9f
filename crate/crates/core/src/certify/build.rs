//! Proof combinators over the primitive rules, and the generator for the
//! two certificate trees.

use crate::pattern::{Pattern, PatternContext};
use crate::subst::Substitution;
use crate::theory::{as_equal, equal};
use crate::unify::{Pair, ProblemKind};

use super::{AnyTrace, DerivedRule, ProofTree, RuleApp, Sequent};

/// How the forward direction `t1 = t2 → ϕ^σ` is justified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ForwardStyle {
    /// One schema instance for the whole trace.
    #[default]
    Chain,
    /// One schema instance per step, glued by transitivity.
    Steps,
}

fn node(context: Vec<Pattern>, goal: Pattern, rule: RuleApp, premises: Vec<ProofTree>) -> ProofTree {
    ProofTree::new(Sequent::new(context, goal), rule, premises)
}

fn theorem_goal(p: &ProofTree) -> Result<&Pattern, String> {
    if !p.conclusion.context.is_empty() {
        return Err("expected a proof with an empty context".into());
    }
    Ok(&p.conclusion.goal)
}

fn hyp(context: &[Pattern], goal: &Pattern) -> Result<ProofTree, String> {
    let index = context.iter().position(|h| h == goal).ok_or_else(|| format!("no hypothesis `{goal}`"))?;
    Ok(node(context.to_vec(), goal.clone(), RuleApp::Hyp { index }, Vec::new()))
}

/// Lifts `⊢ ψ` to `Δ ⊢ ψ` by weakening one hypothesis at a time.
pub fn weaken_to(proof: ProofTree, context: &[Pattern]) -> ProofTree {
    let goal = proof.conclusion.goal.clone();
    let mut tree = proof;
    for k in 1..=context.len() {
        tree = node(context[..k].to_vec(), goal.clone(), RuleApp::Weaken { index: k - 1 }, vec![tree]);
    }
    tree
}

/// From `⊢ X → Y` and `X` at `hyp_index` of `context`, proves `Δ ⊢ Y`.
pub fn modus_ponens(context: &[Pattern], implication: ProofTree, hyp_index: usize) -> Result<ProofTree, String> {
    let imp = theorem_goal(&implication)?.clone();
    let (x, y) = imp.as_imp().ok_or("expected an implication")?;
    if context.get(hyp_index) != Some(x) {
        return Err(format!("hypothesis {hyp_index} is not `{x}`"));
    }
    let n = context.len();
    let mut with_imp = context.to_vec();
    with_imp.push(imp.clone());
    let mut with_y = context.to_vec();
    with_y.push(y.clone());
    let use_imp = node(
        with_imp,
        y.clone(),
        RuleApp::ImpL { index: n },
        vec![
            node(context.to_vec(), x.clone(), RuleApp::Hyp { index: hyp_index }, Vec::new()),
            node(with_y, y.clone(), RuleApp::Hyp { index: n }, Vec::new()),
        ],
    );
    Ok(node(
        context.to_vec(),
        y.clone(),
        RuleApp::Cut { index: n, formula: imp },
        vec![weaken_to(implication, context), use_imp],
    ))
}

/// From `⊢ A → B` and `⊢ B → C`, proves `⊢ A → C`.
pub fn imp_trans(p: ProofTree, q: ProofTree) -> Result<ProofTree, String> {
    let (a, b) = theorem_goal(&p)?.as_imp().ok_or("expected an implication")?;
    let (b2, c) = theorem_goal(&q)?.as_imp().ok_or("expected an implication")?;
    if b != b2 {
        return Err("implications do not chain".into());
    }
    let (a, b, c) = (a.clone(), b.clone(), c.clone());
    let first = modus_ponens(&[a.clone()], p, 0)?;
    let second = modus_ponens(&[a.clone(), b.clone()], q, 1)?;
    let body = node(vec![a.clone()], c.clone(), RuleApp::Cut { index: 1, formula: b }, vec![first, second]);
    Ok(node(Vec::new(), Pattern::imp(a, c.clone()), RuleApp::ImpR, vec![body]))
}

/// One direction of a proved equivalence.
fn iff_part(p: ProofTree, second: bool) -> Result<ProofTree, String> {
    let iff = theorem_goal(&p)?.clone();
    let (fwd, bwd) = iff.as_and().ok_or("expected an equivalence")?;
    let (fwd, bwd) = (fwd.clone(), bwd.clone());
    let want = if second { bwd.clone() } else { fwd.clone() };
    let split = node(
        vec![iff.clone()],
        want.clone(),
        RuleApp::AndL { index: 0 },
        vec![node(vec![fwd, bwd], want.clone(), RuleApp::Hyp { index: usize::from(second) }, Vec::new())],
    );
    Ok(node(Vec::new(), want, RuleApp::Cut { index: 0, formula: iff }, vec![p, split]))
}

/// From `⊢ A ↔ B` and `⊢ B ↔ C`, proves `⊢ A ↔ C`.
pub fn iff_trans(p: ProofTree, q: ProofTree) -> Result<ProofTree, String> {
    let (a, _) = theorem_goal(&p)?.as_iff().ok_or("expected an equivalence")?;
    let (_, c) = theorem_goal(&q)?.as_iff().ok_or("expected an equivalence")?;
    let goal = Pattern::iff(a.clone(), c.clone());
    let fwd = imp_trans(iff_part(p.clone(), false)?, iff_part(q.clone(), false)?)?;
    let bwd = imp_trans(iff_part(q, true)?, iff_part(p, true)?)?;
    Ok(node(Vec::new(), goal, RuleApp::AndR, vec![fwd, bwd]))
}

/// `Δ ⊢ ψ` where `Δ[index]` is the right-nested conjunction of `items`;
/// the conjunction is split with one AndL per item, then `inner` proves the
/// goal from the flattened context.
fn split_conj(
    context: Vec<Pattern>,
    index: usize,
    items: &[Pattern],
    goal: &Pattern,
    inner: impl FnOnce(&[Pattern]) -> Result<ProofTree, String>,
) -> Result<ProofTree, String> {
    let mut contexts = vec![context];
    for k in 0..items.len().saturating_sub(1) {
        let ctx = contexts.last().unwrap();
        let mut next = ctx[..index + k].to_vec();
        next.push(items[k].clone());
        next.push(Pattern::conj(items[k + 1..].iter().cloned()));
        next.extend_from_slice(&ctx[index + k + 1..]);
        contexts.push(next);
    }
    let mut tree = inner(contexts.last().unwrap())?;
    for k in (0..contexts.len() - 1).rev() {
        tree = node(contexts[k].clone(), goal.clone(), RuleApp::AndL { index: index + k }, vec![tree]);
    }
    Ok(tree)
}

/// `Δ ⊢ conj(items)` where every item is a hypothesis.
fn prove_conj(context: &[Pattern], items: &[Pattern]) -> Result<ProofTree, String> {
    match items {
        [] => {
            let mut with_bot = context.to_vec();
            with_bot.push(Pattern::Bot);
            let n = context.len();
            let leaf = node(with_bot, Pattern::Bot, RuleApp::BotL { index: n }, Vec::new());
            Ok(node(context.to_vec(), Pattern::top(), RuleApp::ImpR, vec![leaf]))
        }
        [only] => hyp(context, only),
        [first, rest @ ..] => Ok(node(
            context.to_vec(),
            Pattern::conj(items.iter().cloned()),
            RuleApp::AndR,
            vec![hyp(context, first)?, prove_conj(context, rest)?],
        )),
    }
}

/// `⊢ conj(from) → conj(to)` when every item of `to` is among `from`.
pub fn conj_reorder(from: &[Pattern], to: &[Pattern]) -> Result<ProofTree, String> {
    let a = Pattern::conj(from.iter().cloned());
    let b = Pattern::conj(to.iter().cloned());
    let body = split_conj(vec![a.clone()], 0, from, &b, |ctx| prove_conj(ctx, to))?;
    Ok(node(Vec::new(), Pattern::imp(a, b), RuleApp::ImpR, vec![body]))
}

fn equations(pairs: &[Pair]) -> Vec<Pattern> {
    pairs.iter().map(Pair::equation).collect()
}

/// The conjuncts of `ϕ^P` for the final problem of `trace`, in the order
/// the predicate nests them.
fn result_items(trace: &AnyTrace) -> Result<Vec<Pattern>, String> {
    let pairs = trace.result_pairs().ok_or("trace ends in bot")?;
    let mut items = equations(&pairs);
    if trace.kind() == ProblemKind::List {
        items.reverse();
    }
    Ok(items)
}

fn sigma_items(sigma: &Substitution) -> Vec<Pattern> {
    sigma.bindings().map(|(x, t)| equal(Pattern::EVar(x.clone()), t.clone())).collect()
}

/// `⊢ t1 = t2 → ϕ^σ`.
pub fn forward_proof(trace: &AnyTrace, sigma: &Substitution, style: ForwardStyle) -> Result<ProofTree, String> {
    let chain = match style {
        ForwardStyle::Chain => ProofTree::derived(DerivedRule::ChainSound(trace.clone()), Vec::new())?,
        ForwardStyle::Steps => {
            let mut acc: Option<ProofTree> = None;
            for step in trace.steps() {
                let leaf = ProofTree::derived(DerivedRule::StepSound(step), Vec::new())?;
                acc = Some(match acc {
                    None => leaf,
                    Some(prev) => imp_trans(prev, leaf)?,
                });
            }
            match acc {
                Some(tree) => tree,
                None => {
                    let start = trace.initial_predicate();
                    return conj_reorder(&[start], &sigma_items(sigma));
                }
            }
        }
    };
    let to = sigma_items(sigma);
    if theorem_goal(&chain)?.as_imp().map(|(_, b)| b) == Some(&Pattern::conj(to.iter().cloned())) {
        return Ok(chain);
    }
    imp_trans(chain, conj_reorder(&result_items(trace)?, &to)?)
}

/// `⊢ ϕ^σ → t1 = t2` from the primitive rules: split `ϕ^σ` into its
/// equations, rewrite each variable of the goal with its binding, close by
/// reflexivity. Needs `σ` in solved form.
pub fn backward_proof(t1: &Pattern, t2: &Pattern, sigma: &Substitution) -> Result<ProofTree, String> {
    let items = sigma_items(sigma);
    let phi = sigma.predicate();
    let goal = equal(t1.clone(), t2.clone());
    let body = split_conj(vec![phi.clone()], 0, &items, &goal, |ctx| {
        let mut goals = vec![goal.clone()];
        let mut rules = Vec::new();
        for (i, (x, t)) in sigma.bindings().enumerate() {
            let current = goals.last().unwrap();
            if !current.occurs(x) {
                continue;
            }
            let context = PatternContext::abstracting(current, x);
            let next = context.plug(t);
            rules.push(RuleApp::EqRewrite { index: i, context });
            goals.push(next);
        }
        match as_equal(goals.last().unwrap()) {
            Some((a, b)) if a == b => {}
            _ => return Err("bindings do not make the two sides identical".into()),
        }
        let mut tree = node(ctx.to_vec(), goals.pop().unwrap(), RuleApp::EqRefl, Vec::new());
        while let Some(rule) = rules.pop() {
            tree = node(ctx.to_vec(), goals.pop().unwrap(), rule, vec![tree]);
        }
        Ok(tree)
    })?;
    Ok(node(Vec::new(), Pattern::imp(phi, goal), RuleApp::ImpR, vec![body]))
}

/// `⊢ t1 = t2 ↔ ϕ^σ`.
pub fn soundness_tree(
    t1: &Pattern,
    t2: &Pattern,
    trace: &AnyTrace,
    sigma: &Substitution,
    style: ForwardStyle,
) -> Result<ProofTree, String> {
    let fwd = forward_proof(trace, sigma, style)?;
    let bwd = match backward_proof(t1, t2, sigma) {
        Ok(tree) => tree,
        Err(_) => ProofTree::derived(
            DerivedRule::UnifierBackward { left: t1.clone(), right: t2.clone(), sigma: sigma.clone() },
            Vec::new(),
        )?,
    };
    let goal = Pattern::iff(equal(t1.clone(), t2.clone()), sigma.predicate());
    Ok(node(Vec::new(), goal, RuleApp::AndR, vec![fwd, bwd]))
}

/// `⊢ t1 ∧ t2 ↔ t1 ∧ ϕ^σ` on top of a proof of `⊢ t1 = t2 ↔ ϕ^σ`.
pub fn conjunction_tree(t1: &Pattern, t2: &Pattern, sigma: &Substitution, soundness: ProofTree) -> Result<ProofTree, String> {
    let to_eq = ProofTree::derived(DerivedRule::TermConjToEq { left: t1.clone(), right: t2.clone() }, Vec::new())?;
    let t1c = t1.clone();
    let context = PatternContext::with_fresh_hole(move |h| Pattern::and(t1c, h));
    let lift = ProofTree::derived(
        DerivedRule::Congruence { context, left: equal(t1.clone(), t2.clone()), right: sigma.predicate() },
        vec![soundness],
    )?;
    iff_trans(to_eq, lift)
}
