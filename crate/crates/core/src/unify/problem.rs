use std::fmt;

use crate::pattern::{Pattern, Var};
use crate::theory::equal;

use super::UnifyError;

/// An equation `⟨left, right⟩` between two term patterns.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub left: Pattern,
    pub right: Pattern,
}

impl Pair {
    pub fn new(left: Pattern, right: Pattern) -> Self {
        Pair { left, right }
    }

    pub fn equation(&self) -> Pattern {
        equal(self.left.clone(), self.right.clone())
    }

    pub fn substitute(&self, x: &Var, t: &Pattern) -> Pair {
        Pair::new(self.left.substitute(x, t), self.right.substitute(x, t))
    }

    pub fn occurs(&self, x: &Var) -> bool {
        self.left.occurs(x) || self.right.occurs(x)
    }

    pub fn size(&self) -> usize {
        self.left.size() + self.right.size()
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.left, self.right)
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Set,
    List,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Set => "set",
            ProblemKind::List => "list",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "set" => Some(ProblemKind::Set),
            "list" => Some(ProblemKind::List),
            _ => None,
        }
    }
}

/// The abstract unification problem: built from a single pair, extended by
/// insertion and substitution, and observed through its predicate `ϕ^P`.
pub trait UnificationProblem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + Sized {
    const KIND: ProblemKind;

    /// Builds a problem holding exactly these pairs. The set instance
    /// normalizes order and duplicates.
    fn from_pairs(pairs: Vec<Pair>) -> Self;

    fn failed() -> Self;

    fn singleton(t1: Pattern, t2: Pattern) -> Self {
        Self::from_pairs(vec![Pair::new(t1, t2)])
    }

    fn empty() -> Self {
        Self::from_pairs(Vec::new())
    }

    /// Pairs in canonical order, or `None` for `⊥`.
    fn pairs(&self) -> Option<&[Pair]>;

    /// `P ◁ ⟨t1, t2⟩`.
    fn insert(&self, t1: Pattern, t2: Pattern) -> Result<Self, UnifyError>;

    /// `ϕ^P`.
    fn predicate(&self) -> Pattern;

    /// Replaces the pair at `index` by `replacement`, first applying
    /// `[t/x]` to every other pair when `elim` is given. This is the one
    /// primitive all Table-2 rules are expressed with.
    fn rewrite(&self, index: usize, replacement: Vec<Pair>, elim: Option<(&Var, &Pattern)>) -> Self;

    fn is_failed(&self) -> bool {
        self.pairs().is_none()
    }

    /// `P[t/x]`.
    fn subst(&self, x: &Var, t: &Pattern) -> Result<Self, UnifyError> {
        let pairs = self.pairs().ok_or(UnifyError::FailedProblem)?;
        Ok(Self::from_pairs(pairs.iter().map(|p| p.substitute(x, t)).collect()))
    }

    fn len(&self) -> usize {
        self.pairs().map_or(0, <[Pair]>::len)
    }
}

/// Pairs kept as a sorted duplicate-free sequence; `None` is `⊥`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetProblem(Option<Vec<Pair>>);

impl UnificationProblem for SetProblem {
    const KIND: ProblemKind = ProblemKind::Set;

    fn from_pairs(mut pairs: Vec<Pair>) -> Self {
        pairs.sort();
        pairs.dedup();
        SetProblem(Some(pairs))
    }

    fn failed() -> Self {
        SetProblem(None)
    }

    fn pairs(&self) -> Option<&[Pair]> {
        self.0.as_deref()
    }

    fn insert(&self, t1: Pattern, t2: Pattern) -> Result<Self, UnifyError> {
        let pairs = self.0.as_ref().ok_or(UnifyError::FailedProblem)?;
        let pair = Pair::new(t1, t2);
        let mut out = pairs.clone();
        if let Err(at) = out.binary_search(&pair) {
            out.insert(at, pair);
        }
        Ok(SetProblem(Some(out)))
    }

    /// Conjunction of the equations in canonical order, nested to the right.
    fn predicate(&self) -> Pattern {
        match &self.0 {
            None => Pattern::Bot,
            Some(pairs) => Pattern::conj(pairs.iter().map(Pair::equation)),
        }
    }

    fn rewrite(&self, index: usize, replacement: Vec<Pair>, elim: Option<(&Var, &Pattern)>) -> Self {
        let Some(pairs) = &self.0 else { return SetProblem::failed() };
        let mut out: Vec<Pair> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, p)| match elim {
                Some((x, t)) => p.substitute(x, t),
                None => p.clone(),
            })
            .collect();
        out.extend(replacement);
        SetProblem::from_pairs(out)
    }
}

/// Pairs in insertion order, duplicates allowed; `None` is `⊥`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ListProblem(Option<Vec<Pair>>);

impl UnificationProblem for ListProblem {
    const KIND: ProblemKind = ProblemKind::List;

    fn from_pairs(pairs: Vec<Pair>) -> Self {
        ListProblem(Some(pairs))
    }

    fn failed() -> Self {
        ListProblem(None)
    }

    fn pairs(&self) -> Option<&[Pair]> {
        self.0.as_deref()
    }

    fn insert(&self, t1: Pattern, t2: Pattern) -> Result<Self, UnifyError> {
        let pairs = self.0.as_ref().ok_or(UnifyError::FailedProblem)?;
        let mut out = pairs.clone();
        out.push(Pair::new(t1, t2));
        Ok(ListProblem(Some(out)))
    }

    /// The most recent equation first, so that inserting `⟨t1, t2⟩` into a
    /// nonempty problem yields exactly `t1 = t2 ∧ ϕ^P`.
    fn predicate(&self) -> Pattern {
        match &self.0 {
            None => Pattern::Bot,
            Some(pairs) => Pattern::conj(pairs.iter().rev().map(Pair::equation)),
        }
    }

    /// The replacement pairs take the place of the rewritten one.
    fn rewrite(&self, index: usize, replacement: Vec<Pair>, elim: Option<(&Var, &Pattern)>) -> Self {
        let Some(pairs) = &self.0 else { return ListProblem::failed() };
        let touch = |p: &Pair| match elim {
            Some((x, t)) => p.substitute(x, t),
            None => p.clone(),
        };
        let mut out = Vec::with_capacity(pairs.len() + replacement.len());
        out.extend(pairs[..index.min(pairs.len())].iter().map(touch));
        out.extend(replacement);
        if index < pairs.len() {
            out.extend(pairs[index + 1..].iter().map(touch));
        }
        ListProblem(Some(out))
    }
}

fn fmt_problem(pairs: Option<&[Pair]>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(&crate::surface::print_problem(pairs))
}

impl fmt::Display for SetProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_problem(self.pairs(), f)
    }
}

impl fmt::Debug for SetProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetProblem({self})")
    }
}

impl fmt::Display for ListProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_problem(self.pairs(), f)
    }
}

impl fmt::Debug for ListProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ListProblem({self})")
    }
}
