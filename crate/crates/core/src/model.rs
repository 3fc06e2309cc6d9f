//! Finite models with a definedness element, used as a semantic oracle.
//!
//! Sets of elements are bitsets. Application of a pair of elements yields
//! the empty set, a single element, the whole carrier, or an arbitrary
//! subset stored on the side.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::pattern::{Pattern, Symbol, Var};
use crate::theory::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("variable `{0}` has no value")]
    Unbound(Var),
    #[error("symbol `{0}` has no interpretation")]
    Uninterpreted(Symbol),
    #[error("the signature has no nullary constructor, so there are no ground terms")]
    NoNullary,
    #[error("carrier would exceed {limit} elements")]
    CarrierTooLarge { limit: usize },
    #[error("{vars} free variables over {carrier} elements is too many valuations")]
    TooManyValuations { vars: usize, carrier: usize },
    #[error("pattern is not locally closed")]
    Dangling,
}

pub const MAX_CARRIER: usize = 4096;
const MAX_VALUATIONS: f64 = 5e9;

/// A subset of the carrier.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ElemSet {
    words: Vec<u64>,
}

impl ElemSet {
    fn empty(n: usize) -> Self {
        ElemSet { words: vec![0; n.div_ceil(64)] }
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        s.fill(n);
        s
    }

    fn singleton(n: usize, e: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(e);
        s
    }

    fn fill(&mut self, n: usize) {
        for w in &mut self.words {
            *w = u64::MAX;
        }
        self.mask(n);
    }

    fn clear(&mut self) {
        for w in &mut self.words {
            *w = 0;
        }
    }

    fn mask(&mut self, n: usize) {
        if n % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (n % 64)) - 1;
            }
        }
    }

    fn insert(&mut self, e: usize) {
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn is_full(&self, n: usize) -> bool {
        self.len() == n
    }

    fn assign(&mut self, other: &ElemSet) {
        self.words.copy_from_slice(&other.words);
    }

    /// `self := ¬a ∪ b`.
    fn assign_imp(&mut self, a: &ElemSet, b: &ElemSet, n: usize) {
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = !x | y;
        }
        self.mask(n);
    }
}

const APP_EMPTY: u32 = u32::MAX;
const APP_FULL: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
pub struct FiniteModel {
    labels: Vec<String>,
    /// `n × n` codes: an element index, `APP_EMPTY`, `APP_FULL`, or
    /// `n + i` for `extra[i]`.
    app: Vec<u32>,
    extra: Vec<ElemSet>,
    interp: BTreeMap<Symbol, ElemSet>,
    terms: HashMap<Pattern, usize>,
}

impl FiniteModel {
    /// A model from an explicit table. `interp` must cover the definedness
    /// symbol.
    pub fn from_table(
        labels: Vec<String>,
        app: impl Fn(usize, usize) -> Vec<usize>,
        interp: BTreeMap<Symbol, Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        if n > MAX_CARRIER {
            return Err(ModelError::CarrierTooLarge { limit: MAX_CARRIER });
        }
        let mut table = Vec::with_capacity(n * n);
        let mut extra = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let out: BTreeSet<usize> = app(a, b).into_iter().collect();
                table.push(match out.len() {
                    0 => APP_EMPTY,
                    1 => *out.iter().next().unwrap() as u32,
                    k if k == n => APP_FULL,
                    _ => {
                        let mut s = ElemSet::empty(n);
                        out.iter().for_each(|e| s.insert(*e));
                        extra.push(s);
                        (n + extra.len() - 1) as u32
                    }
                });
            }
        }
        let interp = interp
            .into_iter()
            .map(|(s, es)| {
                let mut set = ElemSet::empty(n);
                es.into_iter().for_each(|e| set.insert(e));
                (s, set)
            })
            .collect();
        Ok(FiniteModel { labels, app: table, extra, interp, terms: HashMap::new() })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    /// The element a ground term denotes in a term model.
    pub fn element_of(&self, t: &Pattern) -> Option<usize> {
        self.terms.get(t).copied()
    }

    pub fn full(&self) -> ElemSet {
        ElemSet::full(self.size())
    }

    fn app_into(&self, out: &mut ElemSet, a: &ElemSet, b: &ElemSet) {
        let n = self.size();
        out.clear();
        for x in a.iter() {
            for y in b.iter() {
                match self.app[x * n + y] {
                    APP_EMPTY => {}
                    APP_FULL => {
                        out.fill(n);
                        return;
                    }
                    c if (c as usize) < n => out.insert(c as usize),
                    c => out.union_with(&self.extra[c as usize - n]),
                }
            }
        }
    }

    /// Human-readable carrier and application table.
    pub fn dump(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "e{i} = {l}");
        }
        for a in 0..n {
            for b in 0..n {
                let code = self.app[a * n + b];
                if code == APP_EMPTY {
                    continue;
                }
                let target = match code {
                    APP_FULL => "M".to_string(),
                    c if (c as usize) < n => format!("e{c}"),
                    c => format!("{:?}", self.extra[c as usize - n].iter().collect::<Vec<_>>()),
                };
                let _ = writeln!(out, "e{a} . e{b} = {target}");
            }
        }
        out
    }
}

/// The bounded term model: ground applicative terms over the constructors
/// of `sig` with at most `max_size` symbol occurrences, partial
/// applications included, plus a definedness element `d`. Application that
/// would leave the bound is empty. Symbols without an arity are constants.
pub fn make_term_model(sig: &Signature, max_size: usize) -> Result<FiniteModel, ModelError> {
    if !sig.has_nullary() {
        return Err(ModelError::NoNullary);
    }
    let ctors: Vec<(Symbol, usize)> = sig.symbols().map(|(s, a)| (s.clone(), a.unwrap_or(0))).collect();
    // Saturated terms bucketed by size.
    let mut saturated: Vec<Vec<Pattern>> = vec![Vec::new(); max_size + 1];
    for size in 1..=max_size {
        for (f, arity) in &ctors {
            let mut found = Vec::new();
            args_of_total(&saturated, *arity, size - 1, &mut Vec::new(), &mut found);
            for args in found {
                saturated[size].push(Pattern::apply(Pattern::Sym(f.clone()), args));
            }
        }
        if saturated.iter().map(Vec::len).sum::<usize>() > MAX_CARRIER {
            return Err(ModelError::CarrierTooLarge { limit: MAX_CARRIER });
        }
    }
    // Element table: (term, size, missing arguments).
    let mut elems: Vec<(Pattern, usize, usize)> = Vec::new();
    for (size, bucket) in saturated.iter().enumerate() {
        elems.extend(bucket.iter().map(|t| (t.clone(), size, 0)));
    }
    for (f, arity) in &ctors {
        for k in 0..*arity {
            for total in 0..max_size {
                let mut found = Vec::new();
                args_of_total(&saturated, k, total, &mut Vec::new(), &mut found);
                for args in found {
                    elems.push((Pattern::apply(Pattern::Sym(f.clone()), args), total + 1, arity - k));
                }
            }
        }
        if elems.len() >= MAX_CARRIER {
            return Err(ModelError::CarrierTooLarge { limit: MAX_CARRIER });
        }
    }
    let n = elems.len() + 1;
    let d = elems.len();
    let index: HashMap<Pattern, usize> = elems.iter().enumerate().map(|(i, (t, _, _))| (t.clone(), i)).collect();
    let mut labels: Vec<String> = elems.iter().map(|(t, _, _)| t.to_string()).collect();
    labels.push("d".to_string());
    let app = |a: usize, b: usize| -> Vec<usize> {
        if a == d {
            return (0..n).collect();
        }
        if b == d {
            return Vec::new();
        }
        let (fa, sa, missing) = &elems[a];
        let (fb, sb, bmissing) = &elems[b];
        if *missing == 0 || *bmissing != 0 || sa + sb > max_size {
            return Vec::new();
        }
        vec![index[&Pattern::app(fa.clone(), fb.clone())]]
    };
    let mut interp: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
    interp.insert(Symbol::definedness(), vec![d]);
    for (f, _) in &ctors {
        if let Some(e) = index.get(&Pattern::Sym(f.clone())) {
            interp.insert(f.clone(), vec![*e]);
        }
    }
    let mut m = FiniteModel::from_table(labels, app, interp)?;
    m.terms = index;
    Ok(m)
}

/// All argument vectors of `k` saturated terms whose sizes sum to `total`.
fn args_of_total(by_size: &[Vec<Pattern>], k: usize, total: usize, prefix: &mut Vec<Pattern>, out: &mut Vec<Vec<Pattern>>) {
    if k == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    // Every remaining argument needs at least one symbol.
    for size in 1..=total.saturating_sub(k - 1) {
        for t in by_size.get(size).into_iter().flatten() {
            prefix.push(t.clone());
            args_of_total(by_size, k - 1, total - size, prefix, out);
            prefix.pop();
        }
    }
}

pub type Valuation = BTreeMap<Var, usize>;

/// Direct recursive evaluation.
pub fn eval(m: &FiniteModel, v: &Valuation, p: &Pattern) -> Result<ElemSet, ModelError> {
    eval_in(m, v, p, &mut Vec::new())
}

fn eval_in(m: &FiniteModel, v: &Valuation, p: &Pattern, bound: &mut Vec<usize>) -> Result<ElemSet, ModelError> {
    let n = m.size();
    Ok(match p {
        Pattern::EVar(x) => ElemSet::singleton(n, *v.get(x).ok_or_else(|| ModelError::Unbound(x.clone()))?),
        Pattern::Sym(s) => m.interp.get(s).cloned().ok_or_else(|| ModelError::Uninterpreted(s.clone()))?,
        Pattern::Bound(i) => {
            let e = bound.len().checked_sub(1 + i).map(|k| bound[k]).ok_or(ModelError::Dangling)?;
            ElemSet::singleton(n, e)
        }
        Pattern::Bot => ElemSet::empty(n),
        Pattern::App(a, b) => {
            let (a, b) = (eval_in(m, v, a, bound)?, eval_in(m, v, b, bound)?);
            let mut out = ElemSet::empty(n);
            m.app_into(&mut out, &a, &b);
            out
        }
        Pattern::Imp(a, b) => {
            let (a, b) = (eval_in(m, v, a, bound)?, eval_in(m, v, b, bound)?);
            let mut out = ElemSet::empty(n);
            out.assign_imp(&a, &b, n);
            out
        }
        Pattern::Exists(_, body) => {
            let mut out = ElemSet::empty(n);
            for e in 0..n {
                bound.push(e);
                let r = eval_in(m, v, body, bound);
                bound.pop();
                out.union_with(&r?);
                if out.is_full(n) {
                    break;
                }
            }
            out
        }
    })
}

/// Whether `p` denotes the whole carrier under every valuation.
pub fn validates(m: &FiniteModel, p: &Pattern) -> Result<bool, ModelError> {
    Ok(countervaluation(m, p, &[])?.is_none())
}

/// Validity restricted to valuations under which every term subpattern of
/// `p` denotes a single element, that is, valuations that keep the terms
/// inside the size bound.
pub fn validates_in_bound(m: &FiniteModel, p: &Pattern) -> Result<bool, ModelError> {
    Ok(countervaluation(m, p, &term_subpatterns(p))?.is_none())
}

/// Validity restricted to valuations under which each guard denotes a
/// single element.
pub fn validates_guarded(m: &FiniteModel, p: &Pattern, guards: &[Pattern]) -> Result<bool, ModelError> {
    Ok(countervaluation(m, p, guards)?.is_none())
}

/// Maximal subpatterns in the term fragment that contain a free variable.
pub fn term_subpatterns(p: &Pattern) -> Vec<Pattern> {
    fn go(p: &Pattern, out: &mut Vec<Pattern>) {
        if p.is_term_pattern() && p.is_locally_closed() {
            if !p.free_vars().is_empty() {
                out.push(p.clone());
            }
            return;
        }
        match p {
            Pattern::App(a, b) | Pattern::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
            Pattern::Exists(_, body) => go(body, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

/// First valuation (over the free variables of `p` and of the guards, in
/// name order) that satisfies the guards but not `p`.
pub fn countervaluation(m: &FiniteModel, p: &Pattern, guards: &[Pattern]) -> Result<Option<Valuation>, ModelError> {
    let mut vars: BTreeSet<Var> = p.free_vars();
    for g in guards {
        vars.extend(g.free_vars());
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    if (m.size() as f64).powi(vars.len() as i32) > MAX_VALUATIONS {
        return Err(ModelError::TooManyValuations { vars: vars.len(), carrier: m.size() });
    }
    let mut staged = Staged::compile(m, &vars, p, guards)?;
    Ok(staged.search().map(|vals| vars.into_iter().zip(vals).collect()))
}

enum Node {
    Var(usize),
    Const(ElemSet),
    App(usize, usize),
    Imp(usize, usize),
    /// A subpattern under a binder, evaluated directly.
    Opaque(Pattern),
}

/// Evaluator that recomputes a node only when the last variable it depends
/// on changes, and prunes valuations as soon as a guard fails.
struct Staged<'a> {
    m: &'a FiniteModel,
    vars: &'a [Var],
    nodes: Vec<Node>,
    /// Nodes per level; level `j` depends on variables `0..j` only.
    by_level: Vec<Vec<usize>>,
    guards_by_level: Vec<Vec<usize>>,
    root: usize,
    bufs: Vec<ElemSet>,
    vals: Vec<usize>,
}

impl<'a> Staged<'a> {
    fn compile(m: &'a FiniteModel, vars: &'a [Var], p: &Pattern, guards: &[Pattern]) -> Result<Self, ModelError> {
        let mut st = Staged {
            m,
            vars,
            nodes: Vec::new(),
            by_level: vec![Vec::new(); vars.len() + 1],
            guards_by_level: vec![Vec::new(); vars.len() + 1],
            root: 0,
            bufs: Vec::new(),
            vals: vec![0; vars.len()],
        };
        let mut memo = HashMap::new();
        let mut levels = Vec::new();
        st.root = st.add(p, &mut memo, &mut levels)?;
        // Every application inside a guard must also stay in bound, which
        // lets the search give up on a valuation prefix early.
        let mut guard_nodes = BTreeSet::new();
        for g in guards {
            let mut subterms = Vec::new();
            g.visit(&mut |q| {
                if matches!(q, Pattern::App(..)) && q.is_locally_closed() {
                    subterms.push(q.clone());
                }
            });
            subterms.push(g.clone());
            for q in subterms {
                guard_nodes.insert(st.add(&q, &mut memo, &mut levels)?);
            }
        }
        for node in guard_nodes {
            st.guards_by_level[levels[node]].push(node);
        }
        let n = m.size();
        st.bufs = st.nodes.iter().map(|_| ElemSet::empty(n)).collect();
        for (i, level) in levels.iter().enumerate() {
            st.by_level[*level].push(i);
        }
        Ok(st)
    }

    fn add(&mut self, p: &Pattern, memo: &mut HashMap<Pattern, usize>, levels: &mut Vec<usize>) -> Result<usize, ModelError> {
        if let Some(i) = memo.get(p) {
            return Ok(*i);
        }
        let level_of_vars = |vars: &BTreeSet<Var>, all: &[Var]| {
            vars.iter().map(|x| all.iter().position(|y| y == x).unwrap() + 1).max().unwrap_or(0)
        };
        let (node, level) = match p {
            Pattern::EVar(x) => {
                let i = self.vars.iter().position(|y| y == x).ok_or_else(|| ModelError::Unbound(x.clone()))?;
                (Node::Var(i), i + 1)
            }
            Pattern::Sym(_) | Pattern::Bot => (Node::Const(eval(self.m, &Valuation::new(), p)?), 0),
            Pattern::App(a, b) | Pattern::Imp(a, b) => {
                let (ia, ib) = (self.add(a, memo, levels)?, self.add(b, memo, levels)?);
                let level = levels[ia].max(levels[ib]);
                let node = if matches!(p, Pattern::App(..)) { Node::App(ia, ib) } else { Node::Imp(ia, ib) };
                (node, level)
            }
            Pattern::Exists(..) => (Node::Opaque(p.clone()), level_of_vars(&p.free_vars(), self.vars)),
            Pattern::Bound(_) => return Err(ModelError::Dangling),
        };
        self.nodes.push(node);
        levels.push(level);
        memo.insert(p.clone(), self.nodes.len() - 1);
        Ok(self.nodes.len() - 1)
    }

    fn compute_level(&mut self, level: usize) {
        let n = self.m.size();
        for k in 0..self.by_level[level].len() {
            let i = self.by_level[level][k];
            let (done, rest) = self.bufs.split_at_mut(i);
            let out = &mut rest[0];
            match &self.nodes[i] {
                Node::Var(j) => {
                    out.clear();
                    out.insert(self.vals[*j]);
                }
                Node::Const(s) => out.assign(s),
                Node::App(a, b) => self.m.app_into(out, &done[*a], &done[*b]),
                Node::Imp(a, b) => out.assign_imp(&done[*a], &done[*b], n),
                Node::Opaque(p) => {
                    let v: Valuation = self.vars.iter().cloned().zip(self.vals.iter().copied()).collect();
                    // Free variables were all registered, so this cannot fail.
                    *out = eval(self.m, &v, p).expect("opaque subpattern evaluates");
                }
            }
        }
    }

    fn guards_hold(&self, level: usize) -> bool {
        self.guards_by_level[level].iter().all(|g| self.bufs[*g].len() == 1)
    }

    fn search(&mut self) -> Option<Vec<usize>> {
        self.compute_level(0);
        if !self.guards_hold(0) {
            return None;
        }
        self.descend(1)
    }

    fn descend(&mut self, level: usize) -> Option<Vec<usize>> {
        if level > self.vars.len() {
            let n = self.m.size();
            return (!self.bufs[self.root].is_full(n)).then(|| self.vals.clone());
        }
        for e in 0..self.m.size() {
            self.vals[level - 1] = e;
            self.compute_level(level);
            if !self.guards_hold(level) {
                continue;
            }
            if let Some(found) = self.descend(level + 1) {
                return Some(found);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_pattern;
    use crate::theory::{defined, equal, injectivity_instance, total};

    fn small() -> (Signature, FiniteModel) {
        let sig = Signature::with(&[("c", Some(0)), ("g", Some(1))]).unwrap();
        let m = make_term_model(&sig, 3).unwrap();
        (sig, m)
    }

    #[test]
    fn carrier_of_small_models() {
        let sig = Signature::with(&[("c", Some(0))]).unwrap();
        let m = make_term_model(&sig, 1).unwrap();
        assert_eq!(m.labels, vec!["c", "d"]);
        let (_, m) = small();
        let labels: BTreeSet<&str> = m.labels.iter().map(String::as_str).collect();
        assert_eq!(labels, BTreeSet::from(["c", "g", "g c", "g (g c)", "d"]));
        let none = Signature::with(&[("g", Some(1))]).unwrap();
        assert_eq!(make_term_model(&none, 3).unwrap_err(), ModelError::NoNullary);
    }

    #[test]
    fn basic_evaluation() {
        let (sig, m) = small();
        let v = Valuation::from([(Var::new("x"), 0)]);
        assert!(eval(&m, &v, &Pattern::Bot).unwrap().is_empty());
        let ex = parse_pattern("ex x . x", &sig).unwrap();
        assert!(eval(&m, &v, &ex).unwrap().is_full(m.size()));
        for e in 0..m.size() {
            let v = Valuation::from([(Var::new("x"), e)]);
            assert!(eval(&m, &v, &equal(Pattern::var("x"), Pattern::var("x"))).unwrap().is_full(m.size()));
        }
        assert_eq!(eval(&m, &Valuation::new(), &Pattern::var("q")), Err(ModelError::Unbound(Var::new("q"))));
    }

    #[test]
    fn validity() {
        let (_, m) = small();
        assert!(validates(&m, &Pattern::top()).unwrap());
        assert!(!validates(&m, &Pattern::Bot).unwrap());
        assert!(validates(&m, &defined(Pattern::var("x"))).unwrap());
        assert!(!validates(&m, &total(Pattern::var("x"))).unwrap());
    }

    #[test]
    fn injectivity_holds_in_bound() {
        let (_, m) = small();
        let inst = injectivity_instance(&Symbol::new("g"), 1).unwrap();
        // Strip the binders and check the matrix on in-bound valuations.
        let (_, b1) = inst.as_forall().unwrap();
        let matrix = b1.open_with(&Pattern::var("x1"));
        let (_, b2) = matrix.as_forall().unwrap();
        let matrix = b2.open_with(&Pattern::var("y1"));
        assert!(validates_in_bound(&m, &matrix).unwrap());
    }

    #[test]
    fn guards_prune_out_of_bound_valuations() {
        let (sig, m) = small();
        // g (g x) = g (g y) -> x = y only fails when both sides leave the bound.
        let p = parse_pattern("g (g x) = g (g y) -> x = y", &sig).unwrap();
        assert!(!validates(&m, &p).unwrap());
        assert!(validates_in_bound(&m, &p).unwrap());
    }

    #[test]
    fn staged_agrees_with_direct_evaluation() {
        let (sig, m) = small();
        let p = parse_pattern("(x = g y \\/ ceil(x /\\ y)) -> ex z . z = x", &sig).unwrap();
        let staged = validates(&m, &p).unwrap();
        let mut direct = true;
        for a in 0..m.size() {
            for b in 0..m.size() {
                let v = Valuation::from([(Var::new("x"), a), (Var::new("y"), b)]);
                direct &= eval(&m, &v, &p).unwrap().is_full(m.size());
            }
        }
        assert_eq!(staged, direct);
    }
}
