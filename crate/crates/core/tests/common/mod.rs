//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mlunify::pattern::{Pattern, Var};
use mlunify::subst::Substitution;
use mlunify::theory::{self, Signature};
use rand::seq::SliceRandom;
use rand::Rng;

/// A first-order vocabulary: symbols with their arities, and variables.
#[derive(Clone, Debug)]
pub struct Vocab {
    pub symbols: Vec<(&'static str, usize)>,
    pub vars: Vec<&'static str>,
}

impl Vocab {
    pub fn new(symbols: &[(&'static str, usize)], vars: &[&'static str]) -> Self {
        Vocab { symbols: symbols.to_vec(), vars: vars.to_vec() }
    }

    pub fn signature(&self) -> Signature {
        let decls: Vec<(&str, Option<usize>)> = self.symbols.iter().map(|(s, n)| (*s, Some(*n))).collect();
        Signature::with(&decls).unwrap()
    }

    fn constants(&self) -> Vec<&'static str> {
        self.symbols.iter().filter(|(_, n)| *n == 0).map(|(s, _)| *s).collect()
    }

    fn functions(&self) -> Vec<(&'static str, usize)> {
        self.symbols.iter().copied().filter(|(_, n)| *n > 0).collect()
    }

    /// A random saturated term of depth at most `depth`.
    pub fn term(&self, rng: &mut impl Rng, depth: usize) -> Pattern {
        let leaf = depth == 0 || rng.gen_bool(0.3);
        if leaf {
            if !self.vars.is_empty() && rng.gen_bool(0.5) {
                return Pattern::var(self.vars.choose(rng).unwrap());
            }
            return Pattern::sym(self.constants().choose(rng).unwrap());
        }
        let (f, n) = *self.functions().choose(rng).unwrap();
        let args: Vec<Pattern> = (0..n).map(|_| self.term(rng, depth - 1)).collect();
        Pattern::apply(Pattern::sym(f), args)
    }

    /// A random ground term of depth at most `depth`.
    pub fn ground(&self, rng: &mut impl Rng, depth: usize) -> Pattern {
        let no_vars = Vocab { symbols: self.symbols.clone(), vars: Vec::new() };
        no_vars.term(rng, depth)
    }

    /// Two generalizations of one term, so always unifiable. Both sides
    /// share one table from fresh variables to the subterms they replace.
    pub fn unifiable_pair(&self, rng: &mut impl Rng, depth: usize) -> (Pattern, Pattern) {
        let base = self.term(rng, depth);
        let used = base.free_vars();
        let mut spare: Vec<Var> = self.vars.iter().map(Var::new).filter(|v| !used.contains(v)).collect();
        spare.shuffle(rng);
        let mut chosen = Vec::new();
        let left = self.generalize_in(rng, &base, &mut chosen, &mut spare);
        let right = self.generalize_in(rng, &base, &mut chosen, &mut spare);
        (left, right)
    }

    fn generalize_in(
        &self,
        rng: &mut impl Rng,
        t: &Pattern,
        chosen: &mut Vec<(Pattern, Var)>,
        spare: &mut Vec<Var>,
    ) -> Pattern {
        if let Some((_, v)) = chosen.iter().find(|(s, _)| s == t) {
            return Pattern::EVar(v.clone());
        }
        if !matches!(t, Pattern::EVar(_)) && rng.gen_bool(0.2) {
            if let Some(v) = spare.pop() {
                chosen.push((t.clone(), v.clone()));
                return Pattern::EVar(v);
            }
        }
        let (head, args) = t.spine();
        if args.is_empty() {
            return t.clone();
        }
        let args: Vec<Pattern> = args.into_iter().map(|a| self.generalize_in(rng, a, chosen, spare)).collect();
        Pattern::apply(head.clone(), args)
    }

    /// Every saturated term with at most `max_nodes` nodes, counting each
    /// symbol, variable and application node once.
    pub fn all_terms(&self, max_nodes: usize) -> Vec<Pattern> {
        let mut by_size: Vec<Vec<Pattern>> = vec![Vec::new(); max_nodes + 1];
        for n in 1..=max_nodes {
            let mut out = Vec::new();
            if n == 1 {
                out.extend(self.constants().iter().map(Pattern::sym));
                out.extend(self.vars.iter().map(Pattern::var));
            }
            for (f, k) in self.functions() {
                // f a1..ak has 1 + k application nodes plus the argument sizes.
                if n < 1 + k {
                    continue;
                }
                for args in compositions(&by_size, n - 1 - k, k) {
                    out.push(Pattern::apply(Pattern::sym(f), args));
                }
            }
            by_size[n] = out;
        }
        by_size.into_iter().flatten().collect()
    }

    /// Ground terms of depth at most `depth`, constants having depth zero.
    pub fn ground_terms(&self, depth: usize) -> Vec<Pattern> {
        let mut level: Vec<Pattern> = self.constants().iter().map(Pattern::sym).collect();
        for _ in 0..depth {
            let mut next: Vec<Pattern> = self.constants().iter().map(Pattern::sym).collect();
            for (f, k) in self.functions() {
                for args in product(&level, k) {
                    next.push(Pattern::apply(Pattern::sym(f), args));
                }
            }
            level = next;
        }
        level
    }
}

/// All ways to pick `k` terms from `by_size` with sizes summing to `total`.
fn compositions(by_size: &[Vec<Pattern>], total: usize, k: usize) -> Vec<Vec<Pattern>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        if first >= by_size.len() {
            break;
        }
        for rest in compositions(by_size, total - first, k - 1) {
            for t in &by_size[first] {
                let mut v = vec![t.clone()];
                v.extend(rest.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

fn product(items: &[Pattern], k: usize) -> Vec<Vec<Pattern>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Pattern>| {
                items.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// A random pattern of the full language, sugar included.
pub fn random_pattern(rng: &mut impl Rng, vocab: &Vocab, depth: usize, binders: &mut Vec<Var>) -> Pattern {
    let leaf = depth == 0 || rng.gen_bool(0.15);
    if leaf {
        return match rng.gen_range(0..6) {
            0 => Pattern::Bot,
            1 => Pattern::top(),
            2 if !binders.is_empty() => Pattern::EVar(binders.choose(rng).unwrap().clone()),
            3 | 4 => Pattern::var(vocab.vars.choose(rng).unwrap()),
            _ => Pattern::sym(vocab.symbols.choose(rng).unwrap().0),
        };
    }
    let d = depth - 1;
    let sub = |rng: &mut _, binders: &mut Vec<Var>| random_pattern(rng, vocab, d, binders);
    match rng.gen_range(0..16) {
        0 | 1 => Pattern::app(sub(rng, binders), sub(rng, binders)),
        2 => Pattern::imp(sub(rng, binders), sub(rng, binders)),
        3 => Pattern::not(sub(rng, binders)),
        4 => Pattern::and(sub(rng, binders), sub(rng, binders)),
        5 => Pattern::or(sub(rng, binders), sub(rng, binders)),
        6 => Pattern::iff(sub(rng, binders), sub(rng, binders)),
        7 | 8 => {
            let x = Var::new(["x", "y", "u", "w"].choose(rng).unwrap());
            binders.push(x.clone());
            let body = sub(rng, binders);
            binders.pop();
            if rng.gen_bool(0.5) {
                Pattern::exists(&x, body)
            } else {
                Pattern::forall(&x, body)
            }
        }
        9 => theory::defined(sub(rng, binders)),
        10 => theory::total(sub(rng, binders)),
        11 => theory::equal(sub(rng, binders), sub(rng, binders)),
        12 => theory::member(sub(rng, binders), sub(rng, binders)),
        13 => theory::subset(sub(rng, binders), sub(rng, binders)),
        14 => Pattern::app(Pattern::sym(vocab.symbols.choose(rng).unwrap().0), sub(rng, binders)),
        _ => Pattern::app(Pattern::var(vocab.vars.choose(rng).unwrap()), sub(rng, binders)),
    }
}

pub fn vars_of(ts: &[&Pattern]) -> Vec<Var> {
    let set: BTreeSet<Var> = ts.iter().flat_map(|t| t.free_vars()).collect();
    set.into_iter().collect()
}

/// The symbol-occurrence count used as the size bound of the term model.
pub fn leaf_count(t: &Pattern) -> usize {
    match t {
        Pattern::App(f, a) => leaf_count(f) + leaf_count(a),
        _ => 1,
    }
}

/// Ground instance of a substitution's images with every remaining
/// variable sent to `c`.
pub fn ground_with(s: &Substitution, t: &Pattern, c: &Pattern) -> Pattern {
    let t = s.apply(t);
    let vars: Vec<(Var, Pattern)> = t.free_vars().into_iter().map(|v| (v, c.clone())).collect();
    Substitution::from_bindings(vars).apply(&t)
}
