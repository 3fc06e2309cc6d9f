//! Signatures, the definedness notations, and the ambient theory Γ.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::pattern::{Pattern, Symbol, Var, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("symbol `{0}` is reserved")]
    ReservedSymbol(String),
    #[error("`{0}` is not a valid symbol name")]
    BadSymbolName(String),
    #[error("symbol `{name}` declared with arity {old} and again with arity {new}")]
    ArityConflict { name: String, old: usize, new: usize },
    #[error("nullary symbol `{0}` has no injectivity axiom")]
    NullaryInjectivity(String),
}

pub(crate) const KEYWORDS: &[&str] = &["ex", "all", "bot", "top", "ceil", "floor", "in", "subset", "empty"];

/// Declared constant symbols, each with an optional arity hint. The
/// definedness symbol is always present and cannot be redeclared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Symbol, Option<usize>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Convenience constructor for tests and examples.
    pub fn with(decls: &[(&str, Option<usize>)]) -> Result<Self, TheoryError> {
        let mut sig = Signature::new();
        for (name, arity) in decls {
            sig.declare(name, *arity)?;
        }
        Ok(sig)
    }

    pub fn declare(&mut self, name: &str, arity: Option<usize>) -> Result<Symbol, TheoryError> {
        if name == crate::pattern::DEFINEDNESS || KEYWORDS.contains(&name) {
            return Err(TheoryError::ReservedSymbol(name.to_string()));
        }
        if name.starts_with(RESERVED_PREFIX) {
            return Err(TheoryError::ReservedSymbol(name.to_string()));
        }
        if !is_identifier(name) && !name.bytes().all(|b| b.is_ascii_digit()) || name.is_empty() {
            return Err(TheoryError::BadSymbolName(name.to_string()));
        }
        let sym = Symbol::new(name);
        match self.symbols.get(&sym) {
            Some(Some(old)) => match arity {
                Some(new) if new != *old => {
                    return Err(TheoryError::ArityConflict { name: name.to_string(), old: *old, new })
                }
                _ => {}
            },
            _ => {
                self.symbols.insert(sym.clone(), arity);
            }
        }
        Ok(sym)
    }

    /// Whether an identifier denotes a symbol here. Numerals and the
    /// definedness symbol always do.
    pub fn is_symbol(&self, name: &str) -> bool {
        let sym = Symbol::new(name);
        sym.is_definedness() || sym.is_numeral() || self.symbols.contains_key(&sym)
    }

    pub fn arity(&self, sym: &Symbol) -> Option<usize> {
        if sym.is_numeral() && !self.symbols.contains_key(sym) {
            return Some(0);
        }
        self.symbols.get(sym).copied().flatten()
    }

    /// The arity a symbol is used with: its hint, zero for numerals and for
    /// symbols declared without a hint, `None` if undeclared.
    pub fn declared_arity(&self, sym: &Symbol) -> Option<usize> {
        match self.symbols.get(sym) {
            Some(a) => Some(a.unwrap_or(0)),
            None if sym.is_numeral() => Some(0),
            None => None,
        }
    }

    /// Declared user symbols in name order.
    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, Option<usize>)> {
        self.symbols.iter().map(|(s, a)| (s, *a))
    }

    /// Symbols with a declared arity of at least one.
    pub fn constructors(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.symbols.iter().filter_map(|(s, a)| a.filter(|n| *n > 0).map(|n| (s, n)))
    }

    /// Whether some symbol can stand alone as a ground term. Symbols
    /// declared without an arity count as constants.
    pub fn has_nullary(&self) -> bool {
        self.symbols.iter().any(|(s, a)| matches!(a, None | Some(0)) || s.is_numeral())
    }

    /// Declares every numeral occurring in `p` as a nullary symbol.
    pub fn declare_literals(&mut self, p: &Pattern) {
        for s in p.symbols() {
            if s.is_numeral() {
                self.symbols.entry(s).or_insert(Some(0));
            }
        }
    }

    /// Whether every symbol in `p` other than definedness is declared or a
    /// numeral.
    pub fn covers(&self, p: &Pattern) -> bool {
        p.symbols().iter().all(|s| s.is_definedness() || s.is_numeral() || self.symbols.contains_key(s))
    }

    /// Whether `p` is built from variables and declared symbols applied to at
    /// most as many arguments as their arity. Such terms denote single
    /// elements in the intended term-algebra models.
    pub fn is_constructor_term(&self, p: &Pattern) -> bool {
        if !p.is_term_pattern() {
            return false;
        }
        let (head, args) = p.spine();
        match head {
            Pattern::EVar(_) => args.is_empty(),
            Pattern::Sym(s) => match self.declared_arity(s) {
                Some(n) => args.len() <= n && args.iter().all(|a| self.is_constructor_term(a)),
                None => false,
            },
            _ => false,
        }
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == RESERVED_PREFIX => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn defined(p: Pattern) -> Pattern {
    Pattern::app(Pattern::Sym(Symbol::definedness()), p)
}

pub fn total(p: Pattern) -> Pattern {
    Pattern::not(defined(Pattern::not(p)))
}

/// `p = q`, read as totality of the equivalence.
pub fn equal(p: Pattern, q: Pattern) -> Pattern {
    total(Pattern::iff(p, q))
}

pub fn not_equal(p: Pattern, q: Pattern) -> Pattern {
    Pattern::not(equal(p, q))
}

pub fn member(p: Pattern, q: Pattern) -> Pattern {
    defined(Pattern::and(p, q))
}

pub fn not_member(p: Pattern, q: Pattern) -> Pattern {
    Pattern::not(member(p, q))
}

pub fn subset(p: Pattern, q: Pattern) -> Pattern {
    total(Pattern::imp(p, q))
}

pub fn not_subset(p: Pattern, q: Pattern) -> Pattern {
    Pattern::not(subset(p, q))
}

pub fn as_defined(p: &Pattern) -> Option<&Pattern> {
    match p {
        Pattern::App(f, a) if matches!(&**f, Pattern::Sym(s) if s.is_definedness()) => Some(a),
        _ => None,
    }
}

pub fn as_total(p: &Pattern) -> Option<&Pattern> {
    as_defined(p.as_not()?)?.as_not()
}

pub fn as_equal(p: &Pattern) -> Option<(&Pattern, &Pattern)> {
    as_total(p)?.as_iff()
}

pub fn as_member(p: &Pattern) -> Option<(&Pattern, &Pattern)> {
    as_defined(p)?.as_and()
}

pub fn as_subset(p: &Pattern) -> Option<(&Pattern, &Pattern)> {
    as_total(p)?.as_imp()
}

/// `∀x1..xn y1..yn. f x1..xn = f y1..yn → x1 = y1 ∧ ... ∧ xn = yn`.
pub fn injectivity_instance(f: &Symbol, n: usize) -> Result<Pattern, TheoryError> {
    if n == 0 {
        return Err(TheoryError::NullaryInjectivity(f.name().to_string()));
    }
    let xs: Vec<Var> = (1..=n).map(|i| Var::new(format!("x{i}"))).collect();
    let ys: Vec<Var> = (1..=n).map(|i| Var::new(format!("y{i}"))).collect();
    let evars = |vs: &[Var]| vs.iter().map(|v| Pattern::EVar(v.clone())).collect::<Vec<_>>();
    let head = Pattern::Sym(f.clone());
    let lhs = equal(Pattern::apply(head.clone(), evars(&xs)), Pattern::apply(head, evars(&ys)));
    let rhs = Pattern::conj(evars(&xs).into_iter().zip(evars(&ys)).map(|(x, y)| equal(x, y)));
    let mut body = Pattern::imp(lhs, rhs);
    for v in xs.iter().chain(ys.iter()).rev() {
        body = Pattern::forall(v, body);
    }
    Ok(body)
}

/// One axiom scheme of a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axiom {
    Definedness,
    Injectivity { symbol: Symbol, arity: usize },
    User(Pattern),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Definedness => write!(f, "definedness"),
            Axiom::Injectivity { symbol, arity } => write!(f, "injectivity {symbol} {arity}"),
            Axiom::User(p) => write!(f, "axiom {p}"),
        }
    }
}

/// A theory Γ given by schema descriptors. Membership instantiates the
/// schemes on demand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    axioms: Vec<Axiom>,
}

impl Theory {
    pub fn new(axioms: Vec<Axiom>) -> Self {
        Theory { axioms }
    }

    /// Definedness plus injectivity for every declared constructor.
    pub fn for_signature(sig: &Signature) -> Self {
        let mut axioms = vec![Axiom::Definedness];
        axioms.extend(
            sig.constructors()
                .map(|(s, n)| Axiom::Injectivity { symbol: s.clone(), arity: n }),
        );
        Theory { axioms }
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn has_definedness(&self) -> bool {
        self.axioms.contains(&Axiom::Definedness)
    }

    pub fn has_injectivity(&self, symbol: &Symbol, arity: usize) -> bool {
        self.axioms
            .iter()
            .any(|a| matches!(a, Axiom::Injectivity { symbol: s, arity: n } if s == symbol && *n == arity))
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.axioms.iter().any(|a| match a {
            Axiom::Definedness => matches!(as_defined(p), Some(Pattern::EVar(_))),
            Axiom::Injectivity { symbol, arity } => {
                injectivity_instance(symbol, *arity).map(|i| &i == p).unwrap_or(false)
            }
            Axiom::User(q) => q == p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notations_expand() {
        let x = Pattern::var("x");
        let y = Pattern::var("y");
        assert_eq!(defined(x.clone()), Pattern::app(Pattern::sym("ceil"), x.clone()));
        assert_eq!(equal(x.clone(), x.clone()), total(Pattern::iff(x.clone(), x.clone())));
        assert_eq!(member(x.clone(), y.clone()), defined(Pattern::and(x.clone(), y.clone())));
        assert_eq!(subset(Pattern::Bot, y.clone()), total(Pattern::imp(Pattern::Bot, y.clone())));
        assert_eq!(as_equal(&equal(x.clone(), y.clone())), Some((&x, &y)));
        assert_eq!(as_member(&member(x.clone(), y.clone())), Some((&x, &y)));
        assert_eq!(as_subset(&subset(x.clone(), y.clone())), Some((&x, &y)));
    }

    #[test]
    fn injectivity_unary() {
        let g = Symbol::new("g");
        let (x1, y1) = (Var::new("x1"), Var::new("y1"));
        let gx = Pattern::app(Pattern::sym("g"), Pattern::var("x1"));
        let gy = Pattern::app(Pattern::sym("g"), Pattern::var("y1"));
        let expected = Pattern::forall(
            &x1,
            Pattern::forall(
                &y1,
                Pattern::imp(equal(gx, gy), equal(Pattern::var("x1"), Pattern::var("y1"))),
            ),
        );
        assert_eq!(injectivity_instance(&g, 1).unwrap(), expected);
    }

    #[test]
    fn injectivity_ternary_by_hand() {
        let f = Symbol::new("f");
        let inst = injectivity_instance(&f, 3).unwrap();
        let mut body = &inst;
        for _ in 0..6 {
            let (_, b) = body.as_forall().expect("six universal binders");
            body = b;
        }
        let (_, rhs) = body.as_imp().unwrap();
        // x1 = y1 /\ (x2 = y2 /\ x3 = y3), written with bound indices.
        let (first, rest) = rhs.as_and().unwrap();
        assert!(as_equal(first).is_some());
        let (second, third) = rest.as_and().unwrap();
        assert!(as_equal(second).is_some() && as_equal(third).is_some());
        assert!(inst.free_vars().is_empty());
        assert!(matches!(injectivity_instance(&f, 0), Err(TheoryError::NullaryInjectivity(_))));
    }

    #[test]
    fn signature_rules() {
        let mut sig = Signature::new();
        sig.declare("f", Some(2)).unwrap();
        assert!(sig.declare("ceil", None).is_err());
        assert!(sig.declare("_x", None).is_err());
        assert!(sig.declare("f", Some(3)).is_err());
        assert!(sig.is_symbol("f") && sig.is_symbol("17") && !sig.is_symbol("x"));
        assert_eq!(sig.arity(&Symbol::new("17")), Some(0));
        let theory = Theory::for_signature(&sig);
        assert!(theory.has_definedness());
        assert!(theory.contains(&injectivity_instance(&Symbol::new("f"), 2).unwrap()));
        assert!(theory.contains(&defined(Pattern::var("z"))));
        assert!(!theory.contains(&defined(Pattern::sym("f"))));
    }
}
