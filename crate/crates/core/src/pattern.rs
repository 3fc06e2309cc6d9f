//! Pattern syntax of applicative matching logic.
//!
//! Binders are stored locally nameless: a bound occurrence is a de Bruijn
//! index and the binder only keeps its surface name as a printing hint. Two
//! patterns that differ only in bound names are therefore equal under the
//! derived `Eq`, and substitution never has to rename anything.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Prefix reserved for machine-generated names. The parser refuses it in
/// user input, so generated names can never collide with user names.
pub const RESERVED_PREFIX: char = '_';

/// Name of the definedness symbol in the surface syntax.
pub const DEFINEDNESS: &str = "ceil";

static FRESH_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn definedness() -> Self {
        Symbol::new(DEFINEDNESS)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_definedness(&self) -> bool {
        &*self.0 == DEFINEDNESS
    }

    /// Numerals are constant symbols that never need declaring.
    pub fn is_numeral(&self) -> bool {
        !self.0.is_empty() && self.0.bytes().all(|b| b.is_ascii_digit())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

/// Element variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    /// A variable no parser input can mention. Safe to call from any thread.
    pub fn fresh(stem: &str) -> Self {
        let n = FRESH_COUNTER.fetch_add(1, Ordering::Relaxed);
        Var::new(format!("{RESERVED_PREFIX}{stem}{n}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var({})", self.0)
    }
}

/// The user's name for a binder. It takes no part in comparison or hashing.
#[derive(Clone)]
pub struct BinderName(pub Var);

impl PartialEq for BinderName {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for BinderName {}
impl PartialOrd for BinderName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for BinderName {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}
impl std::hash::Hash for BinderName {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

/// A pattern. The variant order fixes the canonical ordering used by
/// set-based unification problems: symbols, then variables, then
/// applications.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Sym(Symbol),
    EVar(Var),
    App(Arc<Pattern>, Arc<Pattern>),
    Bot,
    Imp(Arc<Pattern>, Arc<Pattern>),
    Exists(BinderName, Arc<Pattern>),
    /// Occurrence of the binder `n` levels up. Never appears in a pattern
    /// handed out by the public constructors outside its binder.
    Bound(usize),
}

/// Connectives defined as notation over the core syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sugar {
    Not,
    Or,
    And,
    Top,
    Iff,
    Forall,
}

impl Pattern {
    pub fn var(name: impl AsRef<str>) -> Self {
        Pattern::EVar(Var::new(name))
    }

    pub fn sym(name: impl AsRef<str>) -> Self {
        Pattern::Sym(Symbol::new(name))
    }

    pub fn app(f: Pattern, a: Pattern) -> Self {
        Pattern::App(Arc::new(f), Arc::new(a))
    }

    /// `head a1 ... an`, associating to the left.
    pub fn apply(head: Pattern, args: impl IntoIterator<Item = Pattern>) -> Self {
        args.into_iter().fold(head, Pattern::app)
    }

    pub fn bot() -> Self {
        Pattern::Bot
    }

    pub fn imp(a: Pattern, b: Pattern) -> Self {
        Pattern::Imp(Arc::new(a), Arc::new(b))
    }

    /// `∃x. body`, binding the free occurrences of `x` in `body`.
    pub fn exists(x: &Var, body: Pattern) -> Self {
        Pattern::Exists(BinderName(x.clone()), Arc::new(body.close(x, 0)))
    }

    pub fn not(a: Pattern) -> Self {
        Pattern::imp(a, Pattern::Bot)
    }

    pub fn or(a: Pattern, b: Pattern) -> Self {
        Pattern::imp(Pattern::not(a), b)
    }

    pub fn and(a: Pattern, b: Pattern) -> Self {
        Pattern::not(Pattern::or(Pattern::not(a), Pattern::not(b)))
    }

    pub fn top() -> Self {
        Pattern::not(Pattern::Bot)
    }

    pub fn iff(a: Pattern, b: Pattern) -> Self {
        Pattern::and(Pattern::imp(a.clone(), b.clone()), Pattern::imp(b, a))
    }

    pub fn forall(x: &Var, body: Pattern) -> Self {
        Pattern::not(Pattern::exists(x, Pattern::not(body)))
    }

    /// Right-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Pattern>) -> Self {
        let mut items: Vec<Pattern> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Pattern::top();
        };
        while let Some(p) = items.pop() {
            acc = Pattern::and(p, acc);
        }
        acc
    }

    pub fn as_not(&self) -> Option<&Pattern> {
        match self {
            Pattern::Imp(a, b) if **b == Pattern::Bot => Some(a),
            _ => None,
        }
    }

    pub fn as_or(&self) -> Option<(&Pattern, &Pattern)> {
        match self {
            Pattern::Imp(a, b) => Some((a.as_not()?, b)),
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Pattern, &Pattern)> {
        let (na, nb) = self.as_not()?.as_or()?;
        Some((na.as_not()?, nb.as_not()?))
    }

    pub fn is_top(&self) -> bool {
        self.as_not() == Some(&Pattern::Bot)
    }

    pub fn as_iff(&self) -> Option<(&Pattern, &Pattern)> {
        let (l, r) = self.as_and()?;
        match (l, r) {
            (Pattern::Imp(a, b), Pattern::Imp(b2, a2)) if a == a2 && b == b2 => Some((a, b)),
            _ => None,
        }
    }

    /// Recognizes `∀x. φ`, returning the binder hint and the body with the
    /// bound occurrences still as indices.
    pub fn as_forall(&self) -> Option<(&Var, &Pattern)> {
        match self.as_not()? {
            Pattern::Exists(name, body) => Some((&name.0, body.as_not()?)),
            _ => None,
        }
    }

    pub fn as_imp(&self) -> Option<(&Pattern, &Pattern)> {
        match self {
            Pattern::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<(&Pattern, &Pattern)> {
        match self {
            Pattern::App(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Pattern::EVar(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self {
            Pattern::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// The most specific notation this node was built with, if any.
    pub fn sugar(&self) -> Option<Sugar> {
        if self.is_top() {
            Some(Sugar::Top)
        } else if self.as_forall().is_some() {
            Some(Sugar::Forall)
        } else if self.as_iff().is_some() {
            Some(Sugar::Iff)
        } else if self.as_and().is_some() {
            Some(Sugar::And)
        } else if self.as_not().is_some() {
            Some(Sugar::Not)
        } else if self.as_or().is_some() {
            Some(Sugar::Or)
        } else {
            None
        }
    }

    /// Splits `h a1 ... an` into its head and arguments.
    pub fn spine(&self) -> (&Pattern, Vec<&Pattern>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Pattern::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Pattern::EVar(x) => {
                out.insert(x.clone());
            }
            Pattern::App(a, b) | Pattern::Imp(a, b) => {
                a.collect_free_vars(out);
                b.collect_free_vars(out);
            }
            Pattern::Exists(_, body) => body.collect_free_vars(out),
            Pattern::Sym(_) | Pattern::Bot | Pattern::Bound(_) => {}
        }
    }

    pub fn occurs(&self, x: &Var) -> bool {
        match self {
            Pattern::EVar(y) => y == x,
            Pattern::App(a, b) | Pattern::Imp(a, b) => a.occurs(x) || b.occurs(x),
            Pattern::Exists(_, body) => body.occurs(x),
            Pattern::Sym(_) | Pattern::Bot | Pattern::Bound(_) => false,
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |p| {
            if let Pattern::Sym(s) = p {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Pre-order traversal of every node.
    pub fn visit(&self, f: &mut impl FnMut(&Pattern)) {
        f(self);
        match self {
            Pattern::App(a, b) | Pattern::Imp(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Pattern::Exists(_, body) => body.visit(f),
            _ => {}
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Pattern::App(a, b) | Pattern::Imp(a, b) => 1 + a.size() + b.size(),
            Pattern::Exists(_, body) => 1 + body.size(),
            _ => 1,
        }
    }

    /// Variables, symbols and applications only.
    pub fn is_term(&self) -> bool {
        match self {
            Pattern::EVar(_) | Pattern::Sym(_) => true,
            Pattern::App(a, b) => a.is_term() && b.is_term(),
            _ => false,
        }
    }

    /// A term that does not mention the definedness symbol. This is the
    /// fragment unification works on.
    pub fn is_term_pattern(&self) -> bool {
        match self {
            Pattern::EVar(_) => true,
            Pattern::Sym(s) => !s.is_definedness(),
            Pattern::App(a, b) => a.is_term_pattern() && b.is_term_pattern(),
            _ => false,
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        fn go(p: &Pattern, depth: usize) -> bool {
            match p {
                Pattern::Bound(i) => *i < depth,
                Pattern::App(a, b) | Pattern::Imp(a, b) => go(a, depth) && go(b, depth),
                Pattern::Exists(_, body) => go(body, depth + 1),
                _ => true,
            }
        }
        go(self, 0)
    }

    /// `self[q/x]`. Capture cannot happen because bound occurrences are
    /// indices, so `q` is copied under binders unchanged.
    pub fn substitute(&self, x: &Var, q: &Pattern) -> Pattern {
        if !self.occurs(x) {
            return self.clone();
        }
        self.map_vars(&mut |y| (y == x).then(|| q.clone()))
    }

    /// Rebuilds the pattern, replacing each free variable for which `f`
    /// returns a pattern. Replacements are not revisited, so a family of
    /// replacements acts simultaneously.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Pattern>) -> Pattern {
        match self {
            Pattern::EVar(y) => f(y).unwrap_or_else(|| self.clone()),
            Pattern::App(a, b) => Pattern::App(Arc::new(a.map_vars(f)), Arc::new(b.map_vars(f))),
            Pattern::Imp(a, b) => Pattern::Imp(Arc::new(a.map_vars(f)), Arc::new(b.map_vars(f))),
            Pattern::Exists(n, body) => Pattern::Exists(n.clone(), Arc::new(body.map_vars(f))),
            Pattern::Sym(_) | Pattern::Bot | Pattern::Bound(_) => self.clone(),
        }
    }

    /// Replaces free `x` by the bound index appropriate at `depth`.
    fn close(&self, x: &Var, depth: usize) -> Pattern {
        match self {
            Pattern::EVar(y) if y == x => Pattern::Bound(depth),
            Pattern::App(a, b) => Pattern::App(Arc::new(a.close(x, depth)), Arc::new(b.close(x, depth))),
            Pattern::Imp(a, b) => Pattern::Imp(Arc::new(a.close(x, depth)), Arc::new(b.close(x, depth))),
            Pattern::Exists(n, body) => Pattern::Exists(n.clone(), Arc::new(body.close(x, depth + 1))),
            _ => self.clone(),
        }
    }

    /// Instantiates the outermost dangling index with `q`. Used on the body
    /// of an `Exists` node.
    pub fn open_with(&self, q: &Pattern) -> Pattern {
        fn go(p: &Pattern, q: &Pattern, depth: usize) -> Pattern {
            match p {
                Pattern::Bound(i) if *i == depth => q.clone(),
                Pattern::App(a, b) => Pattern::App(Arc::new(go(a, q, depth)), Arc::new(go(b, q, depth))),
                Pattern::Imp(a, b) => Pattern::Imp(Arc::new(go(a, q, depth)), Arc::new(go(b, q, depth))),
                Pattern::Exists(n, body) => Pattern::Exists(n.clone(), Arc::new(go(body, q, depth + 1))),
                _ => p.clone(),
            }
        }
        go(self, q, 0)
    }

    /// For `∃x. φ` returns `(hint, φ[y/x])`.
    pub fn open_exists(&self, y: &Var) -> Option<Pattern> {
        match self {
            Pattern::Exists(_, body) => Some(body.open_with(&Pattern::EVar(y.clone()))),
            _ => None,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_pattern(self))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// Context whose path from the root to the hole goes through applications
/// only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AppContext {
    Hole,
    /// The hole is in the function position: `C[□] p`.
    Left(Box<AppContext>, Pattern),
    /// The hole is in the argument position: `p C[□]`.
    Right(Pattern, Box<AppContext>),
}

impl AppContext {
    pub fn plug(&self, p: &Pattern) -> Pattern {
        match self {
            AppContext::Hole => p.clone(),
            AppContext::Left(c, q) => Pattern::app(c.plug(p), q.clone()),
            AppContext::Right(q, c) => Pattern::app(q.clone(), c.plug(p)),
        }
    }

    pub fn to_pattern_context(&self) -> PatternContext {
        let hole = Var::fresh("h");
        let body = self.plug(&Pattern::EVar(hole.clone()));
        PatternContext { hole, body }
    }
}

/// A pattern with a distinguished hole variable. Plugging is substitution
/// on that variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternContext {
    pub hole: Var,
    pub body: Pattern,
}

impl PatternContext {
    pub fn new(hole: Var, body: Pattern) -> Self {
        PatternContext { hole, body }
    }

    /// Builds a context around a fresh hole.
    pub fn with_fresh_hole(build: impl FnOnce(Pattern) -> Pattern) -> Self {
        let hole = Var::fresh("h");
        let body = build(Pattern::EVar(hole.clone()));
        PatternContext { hole, body }
    }

    /// `φ[□/x]` for a fresh hole `□`.
    pub fn abstracting(p: &Pattern, x: &Var) -> Self {
        let hole = Var::fresh("h");
        let body = p.substitute(x, &Pattern::EVar(hole.clone()));
        PatternContext { hole, body }
    }

    pub fn plug(&self, p: &Pattern) -> Pattern {
        self.body.substitute(&self.hole, p)
    }

    /// Whether the hole occurs at all.
    pub fn is_proper(&self) -> bool {
        self.body.occurs(&self.hole)
    }
}
