use std::collections::BTreeSet;

use crate::pattern::{Pattern, Var};
use crate::subst::Substitution;
use crate::theory::{self, Signature, KEYWORDS};
use crate::unify::Pair;

pub fn print_pattern(p: &Pattern) -> String {
    print_pattern_in(p, None)
}

/// Like [`print_pattern`], but binder names also avoid every symbol of `sig`
/// so that the text parses back under that signature.
pub fn print_pattern_in(p: &Pattern, sig: Option<&Signature>) -> String {
    let mut printer = Printer { sig, out: String::new() };
    printer.go(p, 0, true);
    printer.out
}

pub fn print_problem(pairs: Option<&[Pair]>) -> String {
    match pairs {
        None => "bot".to_string(),
        Some([]) => "empty".to_string(),
        Some(pairs) => pairs.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" <| "),
    }
}

pub fn print_substitution(s: &Substitution) -> String {
    let body: Vec<String> = s.bindings().map(|(x, t)| format!("{x} |-> {t}")).collect();
    format!("{{{}}}", body.join(", "))
}

/// What a node prints as, most specific notation first.
enum View<'a> {
    Atom(String),
    Binder(&'static str, &'a Var, &'a Pattern),
    Infix(&'static str, &'a Pattern, &'a Pattern),
    Not(&'a Pattern),
    App(&'a Pattern, &'a Pattern),
    Call(&'static str, &'a Pattern),
}

fn view(p: &Pattern) -> View<'_> {
    match p {
        Pattern::Sym(s) => View::Atom(s.name().to_string()),
        Pattern::EVar(x) => View::Atom(x.name().to_string()),
        Pattern::Bot => View::Atom("bot".into()),
        Pattern::Bound(i) => View::Atom(format!("?{i}")),
        Pattern::Exists(name, body) => View::Binder("ex", &name.0, body),
        Pattern::App(f, a) => {
            if let Some((l, r)) = theory::as_member(p) {
                View::Infix("in", l, r)
            } else if let Some(inner) = theory::as_defined(p) {
                View::Call("ceil", inner)
            } else {
                View::App(f, a)
            }
        }
        Pattern::Imp(a, b) => {
            if p.is_top() {
                View::Atom("top".into())
            } else if let Some((l, r)) = theory::as_equal(p) {
                View::Infix("=", l, r)
            } else if let Some((l, r)) = theory::as_subset(p) {
                View::Infix("subset", l, r)
            } else if let Some(inner) = theory::as_total(p) {
                View::Call("floor", inner)
            } else if let Some((x, body)) = p.as_forall() {
                View::Binder("all", x, body)
            } else if let Some((l, r)) = p.as_iff() {
                View::Infix("<->", l, r)
            } else if let Some((l, r)) = p.as_and() {
                View::Infix("/\\", l, r)
            } else if let Some(inner) = p.as_not() {
                View::Not(inner)
            } else if let Some((l, r)) = p.as_or().filter(|_| !is_notation(a)) {
                View::Infix("\\/", l, r)
            } else {
                View::Infix("->", a, b)
            }
        }
    }
}

/// Negation-shaped notations. An implication out of one of these reads
/// better as `->` than as a disjunction.
fn is_notation(p: &Pattern) -> bool {
    p.is_top()
        || theory::as_equal(p).is_some()
        || theory::as_subset(p).is_some()
        || theory::as_total(p).is_some()
        || p.as_forall().is_some()
}

/// Binding strength of the node, and of its left and right operands.
fn levels(op: &str) -> (u8, u8, u8) {
    match op {
        "<->" => (1, 2, 2),
        "->" => (2, 3, 2),
        "\\/" => (3, 3, 4),
        "/\\" => (4, 4, 5),
        _ => (5, 6, 6),
    }
}

struct Printer<'a> {
    sig: Option<&'a Signature>,
    out: String,
}

impl Printer<'_> {
    /// `ctx` is the weakest binding strength allowed without parentheses.
    /// `rightmost` says nothing follows this node up to the enclosing
    /// parenthesis, which lets a binder stand unparenthesized.
    fn go(&mut self, p: &Pattern, ctx: u8, rightmost: bool) {
        let v = view(p);
        let level = match &v {
            View::Binder(..) => 0,
            View::Infix(op, ..) => levels(op).0,
            View::Not(_) => 6,
            // `ceil` is an ordinary symbol to the parser, so `ceil(p)` is an
            // application and needs parentheses as an argument.
            View::App(..) | View::Call("ceil", _) => 7,
            View::Atom(_) | View::Call(..) => 8,
        };
        let paren = if level == 0 { !rightmost } else { level < ctx };
        if paren {
            self.out.push('(');
        }
        let rm = paren || rightmost;
        match v {
            View::Atom(s) => self.out.push_str(&s),
            View::Binder(kw, hint, body) => {
                let name = self.pick_name(hint, body);
                let opened = body.open_with(&Pattern::EVar(name.clone()));
                self.out.push_str(&format!("{kw} {name} . "));
                self.go(&opened, 0, rm);
            }
            View::Infix(op, l, r) => {
                let (_, lc, rc) = levels(op);
                self.go(l, lc, false);
                self.out.push_str(&format!(" {op} "));
                self.go(r, rc, rm);
            }
            View::Not(a) => {
                self.out.push('!');
                self.go(a, 6, rm);
            }
            View::App(f, a) => {
                self.go(f, 7, false);
                self.out.push(' ');
                self.go(a, 8, false);
            }
            View::Call(kw, a) => {
                self.out.push_str(kw);
                self.out.push('(');
                self.go(a, 0, true);
                self.out.push(')');
            }
        }
        if paren {
            self.out.push(')');
        }
    }

    /// Keeps the user's binder name unless it would capture or collide.
    fn pick_name(&self, hint: &Var, body: &Pattern) -> Var {
        let mut taken: BTreeSet<String> = body.free_vars().into_iter().map(|v| v.name().to_string()).collect();
        taken.extend(body.symbols().into_iter().map(|s| s.name().to_string()));
        let usable = |name: &str| {
            !taken.contains(name)
                && !KEYWORDS.contains(&name)
                && !name.starts_with(crate::pattern::RESERVED_PREFIX)
                && !self.sig.is_some_and(|s| s.is_symbol(name))
        };
        if usable(hint.name()) {
            return hint.clone();
        }
        let stem = hint.name().trim_start_matches('_').trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() || !stem.starts_with(|c: char| c.is_ascii_alphabetic()) { "x" } else { stem };
        (1..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| usable(n))
            .map(Var::new)
            .expect("unbounded supply of names")
    }
}
