use std::collections::BTreeSet;
use std::fmt;

use crate::pattern::{Pattern, Var};
use crate::subst::Substitution;

use super::problem::{Pair, SetProblem, UnificationProblem};
use super::UnifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Delete,
    Decomposition,
    SymbolClashL,
    SymbolClashR,
    OccursCheck,
    Orient,
    Elimination,
}

impl Rule {
    /// Priority order used by both strategies.
    pub const ALL: [Rule; 7] = [
        Rule::Delete,
        Rule::Decomposition,
        Rule::SymbolClashL,
        Rule::SymbolClashR,
        Rule::OccursCheck,
        Rule::Orient,
        Rule::Elimination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Delete => "Delete",
            Rule::Decomposition => "Decomposition",
            Rule::SymbolClashL => "SymbolClashL",
            Rule::SymbolClashR => "SymbolClashR",
            Rule::OccursCheck => "OccursCheck",
            Rule::Orient => "Orient",
            Rule::Elimination => "Elimination",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Whether the rule ends in `⊥`.
    pub fn is_failure(self) -> bool {
        matches!(self, Rule::SymbolClashL | Rule::SymbolClashR | Rule::OccursCheck)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Order in which pairs and rules are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Take the first pair any rule applies to, trying rules by priority.
    #[default]
    PairFirst,
    /// Take the highest-priority rule that applies anywhere, at its
    /// leftmost pair. This reproduces the textbook derivation order.
    RuleFirst,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::PairFirst => "pair-first",
            Strategy::RuleFirst => "rule-first",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "pair-first" => Some(Strategy::PairFirst),
            "rule-first" => Some(Strategy::RuleFirst),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnifStep<P> {
    pub rule: Rule,
    /// Position of the rewritten pair in `before.pairs()`.
    pub index: usize,
    pub pair: Pair,
    pub before: P,
    pub after: P,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnifTrace<P> {
    pub initial: P,
    pub steps: Vec<UnifStep<P>>,
    pub result: P,
}

/// The Table-2 relation at one pair: `Ok(None)` when the rule or its side
/// condition does not apply.
pub fn apply_rule<P: UnificationProblem>(p: &P, index: usize, rule: Rule) -> Result<Option<P>, UnifyError> {
    let pairs = p.pairs().ok_or(UnifyError::StepOnFailed)?;
    let Some(pair) = pairs.get(index) else { return Ok(None) };
    let (l, r) = (&pair.left, &pair.right);
    let result = match rule {
        Rule::Delete => (l == r).then(|| p.rewrite(index, Vec::new(), None)),
        Rule::Decomposition => match (l, r) {
            (Pattern::App(t1, t2), Pattern::App(u1, u2)) => Some(p.rewrite(
                index,
                vec![Pair::new((**t1).clone(), (**u1).clone()), Pair::new((**t2).clone(), (**u2).clone())],
                None,
            )),
            _ => None,
        },
        Rule::SymbolClashL => clashes(l, r).then(P::failed),
        Rule::SymbolClashR => clashes(r, l).then(P::failed),
        Rule::OccursCheck => match l {
            Pattern::EVar(x) if r != l && r.occurs(x) => Some(P::failed()),
            _ => None,
        },
        Rule::Orient => (matches!(r, Pattern::EVar(_)) && !matches!(l, Pattern::EVar(_)))
            .then(|| p.rewrite(index, vec![Pair::new(r.clone(), l.clone())], None)),
        Rule::Elimination => match l {
            Pattern::EVar(x) if !r.occurs(x) => Some(p.rewrite(index, vec![pair.clone()], Some((x, r)))),
            _ => None,
        },
    };
    Ok(result)
}

/// `⟨f, t⟩` with `t` a different symbol or an application.
fn clashes(f: &Pattern, t: &Pattern) -> bool {
    match f {
        Pattern::Sym(_) => t != f && !matches!(t, Pattern::EVar(_)),
        _ => false,
    }
}

pub fn step<P: UnificationProblem>(p: &P, index: usize, rule: Rule) -> Result<Option<UnifStep<P>>, UnifyError> {
    Ok(apply_rule(p, index, rule)?.map(|after| UnifStep {
        rule,
        index,
        pair: p.pairs().expect("checked by apply_rule")[index].clone(),
        before: p.clone(),
        after,
    }))
}

/// Whether `s.after` is exactly what `s.rule` produces from `s.before` at
/// the recorded pair.
pub fn check_step<P: UnificationProblem>(s: &UnifStep<P>) -> bool {
    let Some(pairs) = s.before.pairs() else { return false };
    if pairs.get(s.index) != Some(&s.pair) {
        return false;
    }
    matches!(apply_rule(&s.before, s.index, s.rule), Ok(Some(after)) if after == s.after)
}

/// Restriction of the relation used by the driver: Elimination only when
/// the variable still occurs in another pair, so no step is vacuous.
fn allowed<P: UnificationProblem>(p: &P, index: usize, rule: Rule) -> bool {
    if rule != Rule::Elimination {
        return true;
    }
    let pairs = p.pairs().unwrap_or(&[]);
    match &pairs[index].left {
        Pattern::EVar(x) => pairs.iter().enumerate().any(|(i, q)| i != index && q.occurs(x)),
        _ => false,
    }
}

/// The step the strategy takes next, or `None` when the problem is
/// terminal.
pub fn next_step<P: UnificationProblem>(p: &P, strategy: Strategy) -> Result<Option<UnifStep<P>>, UnifyError> {
    let n = p.pairs().ok_or(UnifyError::StepOnFailed)?.len();
    let try_at = |index: usize, rule: Rule| -> Result<Option<UnifStep<P>>, UnifyError> {
        if !allowed(p, index, rule) {
            return Ok(None);
        }
        step(p, index, rule)
    };
    match strategy {
        Strategy::PairFirst => {
            for index in 0..n {
                for rule in Rule::ALL {
                    if let Some(s) = try_at(index, rule)? {
                        return Ok(Some(s));
                    }
                }
            }
        }
        Strategy::RuleFirst => {
            for rule in Rule::ALL {
                for index in 0..n {
                    if let Some(s) = try_at(index, rule)? {
                        return Ok(Some(s));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Runs the strategy to a terminal problem. Returns the solved-form reading
/// when the result is not `⊥`.
pub fn solve_with<P: UnificationProblem>(
    t1: &Pattern,
    t2: &Pattern,
    strategy: Strategy,
) -> Result<(UnifTrace<P>, Option<Substitution>), UnifyError> {
    for t in [t1, t2] {
        if !t.is_term_pattern() {
            return Err(UnifyError::NotTerm(t.clone()));
        }
    }
    let initial = P::singleton(t1.clone(), t2.clone());
    let mut current = initial.clone();
    let mut steps = Vec::new();
    while !current.is_failed() {
        let Some(s) = next_step(&current, strategy)? else { break };
        current = s.after.clone();
        steps.push(s);
    }
    let sigma = solved_reading(&current);
    Ok((UnifTrace { initial, steps, result: current }, sigma))
}

/// Set-based problems under the pair-first strategy.
pub fn solve(t1: &Pattern, t2: &Pattern) -> Result<(UnifTrace<SetProblem>, Option<Substitution>), UnifyError> {
    solve_with(t1, t2, Strategy::PairFirst)
}

/// `⊥`, or variables on the left, pairwise distinct, none of them on any
/// right-hand side.
pub fn is_solved_form<P: UnificationProblem>(p: &P) -> bool {
    let Some(pairs) = p.pairs() else { return true };
    let mut lefts = BTreeSet::new();
    for pair in pairs {
        match &pair.left {
            Pattern::EVar(x) if lefts.insert(x.clone()) => {}
            _ => return false,
        }
    }
    pairs.iter().all(|pair| lefts.iter().all(|x| !pair.right.occurs(x)))
}

/// The substitution a solved, non-failed problem stands for.
pub fn solved_reading<P: UnificationProblem>(p: &P) -> Option<Substitution> {
    if p.is_failed() || !is_solved_form(p) {
        return None;
    }
    Some(
        p.pairs()?
            .iter()
            .map(|pair| (pair.left.as_var().expect("solved form").clone(), pair.right.clone()))
            .collect(),
    )
}

/// Lexicographic termination measure of the driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub unsolved_vars: usize,
    pub size: usize,
    pub misoriented: usize,
}

/// A variable is solved when it is the left side of exactly one pair and
/// occurs nowhere else. `⊥` is the bottom of the order.
pub fn measure<P: UnificationProblem>(p: &P) -> Measure {
    let Some(pairs) = p.pairs() else {
        return Measure { unsolved_vars: 0, size: 0, misoriented: 0 };
    };
    let mut vars = BTreeSet::new();
    for pair in pairs {
        vars.extend(pair.left.free_vars());
        vars.extend(pair.right.free_vars());
    }
    let solved = |x: &Var| {
        let mut owner = None;
        for (i, pair) in pairs.iter().enumerate() {
            if pair.left.as_var() == Some(x) && !pair.right.occurs(x) && owner.is_none() {
                owner = Some(i);
            } else if pair.occurs(x) {
                return false;
            }
        }
        owner.is_some()
    };
    Measure {
        unsolved_vars: vars.iter().filter(|x| !solved(x)).count(),
        size: pairs.iter().map(Pair::size).sum(),
        misoriented: pairs
            .iter()
            .filter(|pair| matches!(pair.right, Pattern::EVar(_)) && !matches!(pair.left, Pattern::EVar(_)))
            .count(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFault {
    /// Index of the offending step, or the step count for faults in the
    /// final problem.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for TraceFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

impl<P: UnificationProblem> UnifTrace<P> {
    /// Replays every step and checks that the steps chain from `initial` to
    /// `result`. Whether `result` is terminal is a separate question.
    pub fn replay(&self) -> Result<(), TraceFault> {
        let mut current = &self.initial;
        for (i, s) in self.steps.iter().enumerate() {
            let fault = |reason: &str| TraceFault { step: i, reason: reason.to_string() };
            if &s.before != current {
                return Err(fault("does not start where the previous step ended"));
            }
            if !check_step(s) {
                return Err(fault(&format!("{} is not a valid step at pair {}", s.rule, s.index)));
            }
            current = &s.after;
        }
        let end = TraceFault { step: self.steps.len(), reason: String::new() };
        if current != &self.result {
            return Err(TraceFault { reason: "final problem does not match the last step".into(), ..end });
        }
        Ok(())
    }

    /// The rule that produced `⊥`, if the run failed.
    pub fn failing_rule(&self) -> Option<Rule> {
        self.steps.last().filter(|s| s.after.is_failed()).map(|s| s.rule)
    }

    pub fn measures(&self) -> Vec<Measure> {
        std::iter::once(measure(&self.initial)).chain(self.steps.iter().map(|s| measure(&s.after))).collect()
    }
}
