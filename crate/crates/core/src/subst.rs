//! Finite substitutions of term patterns for element variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::pattern::{Pattern, Var};
use crate::theory::equal;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Pattern>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity bindings `x ↦ x` are dropped. Later bindings of the same
    /// variable win.
    pub fn from_bindings(bindings: impl IntoIterator<Item = (Var, Pattern)>) -> Self {
        let mut s = Substitution::new();
        for (x, t) in bindings {
            s.bind(x, t);
        }
        s
    }

    pub fn singleton(x: Var, t: Pattern) -> Self {
        Self::from_bindings([(x, t)])
    }

    pub fn bind(&mut self, x: Var, t: Pattern) {
        if t.as_var() == Some(&x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn get(&self, x: &Var) -> Option<&Pattern> {
        self.map.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Var, &Pattern)> {
        self.map.iter()
    }

    /// Simultaneous replacement of every domain variable.
    pub fn apply(&self, p: &Pattern) -> Pattern {
        if self.map.is_empty() {
            return p.clone();
        }
        p.map_vars(&mut |x| self.map.get(x).cloned())
    }

    /// The substitution that acts as `self` followed by `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, t) in &self.map {
            out.bind(x.clone(), other.apply(t));
        }
        for (x, t) in &other.map {
            if !self.map.contains_key(x) {
                out.bind(x.clone(), t.clone());
            }
        }
        out
    }

    pub fn equal_on<'a>(&self, other: &Substitution, terms: impl IntoIterator<Item = &'a Pattern>) -> bool {
        terms.into_iter().all(|t| self.apply(t) == other.apply(t))
    }

    /// Extensional equality, decided on the union of both domains.
    pub fn extensionally_equal(&self, other: &Substitution) -> bool {
        let vars: Vec<Pattern> = self.joint_domain(other).into_iter().map(Pattern::EVar).collect();
        self.equal_on(other, &vars)
    }

    fn joint_domain(&self, other: &Substitution) -> BTreeSet<Var> {
        self.map.keys().chain(other.map.keys()).cloned().collect()
    }

    /// A witness `θ` with `self θ = other`, if one exists. Found by matching
    /// each image under `self` against the image under `other`.
    pub fn more_general(&self, other: &Substitution) -> Option<Substitution> {
        let mut theta: BTreeMap<Var, Pattern> = BTreeMap::new();
        for x in self.joint_domain(other) {
            let pat = Pattern::EVar(x.clone());
            let from = self.apply(&pat);
            let to = other.apply(&pat);
            if !match_into(&from, &to, &mut theta) {
                return None;
            }
        }
        let witness = Substitution::from_bindings(theta);
        // Matching against variables outside both domains can still go wrong
        // for non-idempotent inputs, so confirm the witness.
        self.compose(&witness).extensionally_equal(other).then_some(witness)
    }

    pub fn is_unifier(&self, t1: &Pattern, t2: &Pattern) -> bool {
        self.apply(t1) == self.apply(t2)
    }

    /// `x1 = t1 ∧ (... ∧ xn = tn)` in variable-name order; `⊤` when empty.
    pub fn predicate(&self) -> Pattern {
        Pattern::conj(self.map.iter().map(|(x, t)| equal(Pattern::EVar(x.clone()), t.clone())))
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self).extensionally_equal(self)
    }
}

/// One-sided syntactic matching: extends `theta` so that `pattern θ = target`.
fn match_into(pattern: &Pattern, target: &Pattern, theta: &mut BTreeMap<Var, Pattern>) -> bool {
    match (pattern, target) {
        (Pattern::EVar(x), _) => match theta.get(x) {
            Some(bound) => bound == target,
            None => {
                theta.insert(x.clone(), target.clone());
                true
            }
        },
        (Pattern::App(f, a), Pattern::App(g, b)) => match_into(f, g, theta) && match_into(a, b, theta),
        _ => pattern == target,
    }
}

impl FromIterator<(Var, Pattern)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Pattern)>>(iter: I) -> Self {
        Substitution::from_bindings(iter)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_substitution(self))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
