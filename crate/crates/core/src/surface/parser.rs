use crate::pattern::{Pattern, Var};
use crate::subst::Substitution;
use crate::theory::{self, Signature, KEYWORDS};
use crate::unify::{Pair, UnificationProblem};

use super::lexer::{lex, Pos, Tok};
use super::ParseError;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept machine-generated names such as `_h3`. Only certificate files
    /// need this.
    pub allow_reserved: bool,
}

pub fn parse_pattern(src: &str, sig: &Signature) -> Result<Pattern, ParseError> {
    parse_pattern_with(src, sig, ParseOptions::default())
}

pub fn parse_pattern_with(src: &str, sig: &Signature, opts: ParseOptions) -> Result<Pattern, ParseError> {
    let mut p = Parser::new(src, sig, opts)?;
    let out = p.expr()?;
    p.finish()?;
    Ok(out)
}

/// Parses a pattern and insists it is in the term fragment.
pub fn parse_term(src: &str, sig: &Signature) -> Result<Pattern, ParseError> {
    let t = parse_pattern(src, sig)?;
    if !t.is_term_pattern() {
        return Err(ParseError::new(1, 1, format!("`{}` is not a term pattern", src.trim())));
    }
    Ok(t)
}

/// `bot`, `empty`, or `<t1, u1> <| <t2, u2> <| ...`.
pub fn parse_problem<P: UnificationProblem>(src: &str, sig: &Signature) -> Result<P, ParseError> {
    parse_problem_with(src, sig, ParseOptions::default())
}

pub fn parse_problem_with<P: UnificationProblem>(
    src: &str,
    sig: &Signature,
    opts: ParseOptions,
) -> Result<P, ParseError> {
    let mut p = Parser::new(src, sig, opts)?;
    let problem = match p.peek() {
        Tok::Ident(k) if k == "bot" => {
            p.bump();
            P::failed()
        }
        Tok::Ident(k) if k == "empty" => {
            p.bump();
            P::empty()
        }
        _ => {
            let mut pairs = vec![p.pair()?];
            while p.eat(&Tok::Insert) {
                pairs.push(p.pair()?);
            }
            P::from_pairs(pairs)
        }
    };
    p.finish()?;
    Ok(problem)
}

/// `{x |-> t, ...}`.
pub fn parse_substitution(src: &str, sig: &Signature) -> Result<Substitution, ParseError> {
    parse_substitution_with(src, sig, ParseOptions::default())
}

pub fn parse_substitution_with(src: &str, sig: &Signature, opts: ParseOptions) -> Result<Substitution, ParseError> {
    let mut p = Parser::new(src, sig, opts)?;
    p.expect(&Tok::LBrace)?;
    let mut bindings = Vec::new();
    if !p.eat(&Tok::RBrace) {
        loop {
            let x = p.variable_name()?;
            p.expect(&Tok::MapsTo)?;
            let t = p.expr()?;
            bindings.push((x, t));
            if p.eat(&Tok::RBrace) {
                break;
            }
            p.expect(&Tok::Comma)?;
        }
    }
    p.finish()?;
    Ok(Substitution::from_bindings(bindings))
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    sig: &'a Signature,
    opts: ParseOptions,
}

const RELATIONS: [&str; 2] = ["in", "subset"];

impl<'a> Parser<'a> {
    fn new(src: &str, sig: &'a Signature, opts: ParseOptions) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, at: 0, sig, opts })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let pos = self.pos();
        ParseError::new(pos.line, pos.column, msg)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::RParen => Err(self.error("unbalanced `)`")),
            _ => Err(self.unexpected("end of input")),
        }
    }

    fn pair(&mut self) -> Result<Pair, ParseError> {
        self.expect(&Tok::Lt)?;
        let l = self.expr()?;
        self.expect(&Tok::Comma)?;
        let r = self.expr()?;
        self.expect(&Tok::Gt)?;
        Ok(Pair::new(l, r))
    }

    fn check_reserved(&self, name: &str) -> Result<(), ParseError> {
        if name.starts_with(crate::pattern::RESERVED_PREFIX) && !self.opts.allow_reserved {
            return Err(self.error(format!("`{name}` uses the reserved prefix `_`")));
        }
        Ok(())
    }

    fn variable_name(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) && !self.sig.is_symbol(&name) => {
                self.check_reserved(&name)?;
                self.bump();
                Ok(Var::new(name))
            }
            Tok::Ident(name) => Err(self.error(format!("`{name}` is not a variable"))),
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn at_binder(&self) -> bool {
        self.is_keyword("ex") || self.is_keyword("all")
    }

    fn expr(&mut self) -> Result<Pattern, ParseError> {
        if self.at_binder() {
            self.binder()
        } else {
            self.iff()
        }
    }

    fn binder(&mut self) -> Result<Pattern, ParseError> {
        let universal = self.is_keyword("all");
        self.bump();
        let x = self.variable_name()?;
        self.expect(&Tok::Dot)?;
        let body = self.expr()?;
        Ok(if universal { Pattern::forall(&x, body) } else { Pattern::exists(&x, body) })
    }

    /// A right operand: either a binder or whatever `next` parses.
    fn operand(&mut self, next: fn(&mut Self) -> Result<Pattern, ParseError>) -> Result<Pattern, ParseError> {
        if self.at_binder() {
            self.binder()
        } else {
            next(self)
        }
    }

    fn iff(&mut self) -> Result<Pattern, ParseError> {
        let l = self.imp()?;
        if !self.eat(&Tok::Iff) {
            return Ok(l);
        }
        let r = self.operand(Self::imp)?;
        if self.peek() == &Tok::Iff {
            return Err(self.error("`<->` does not associate; add parentheses"));
        }
        Ok(Pattern::iff(l, r))
    }

    fn imp(&mut self) -> Result<Pattern, ParseError> {
        let l = self.or()?;
        if !self.eat(&Tok::Arrow) {
            return Ok(l);
        }
        let r = self.operand(Self::imp)?;
        Ok(Pattern::imp(l, r))
    }

    fn or(&mut self) -> Result<Pattern, ParseError> {
        let mut l = self.and()?;
        while self.eat(&Tok::Or) {
            let r = self.operand(Self::and)?;
            l = Pattern::or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Pattern, ParseError> {
        let mut l = self.rel()?;
        while self.eat(&Tok::And) {
            let r = self.operand(Self::rel)?;
            l = Pattern::and(l, r);
        }
        Ok(l)
    }

    fn at_relation(&self) -> bool {
        self.peek() == &Tok::Eq || RELATIONS.iter().any(|k| self.is_keyword(k))
    }

    fn rel(&mut self) -> Result<Pattern, ParseError> {
        let l = self.unary()?;
        if !self.at_relation() {
            return Ok(l);
        }
        let op = self.bump();
        let r = self.operand(Self::unary)?;
        if self.at_relation() {
            return Err(self.error("relations do not associate; add parentheses"));
        }
        Ok(match op {
            Tok::Eq => theory::equal(l, r),
            Tok::Ident(k) if k == "in" => theory::member(l, r),
            _ => theory::subset(l, r),
        })
    }

    fn unary(&mut self) -> Result<Pattern, ParseError> {
        if self.eat(&Tok::Bang) {
            let a = self.operand(Self::unary)?;
            return Ok(Pattern::not(a));
        }
        self.app()
    }

    fn starts_primary(&self) -> bool {
        match self.peek() {
            Tok::Int(_) | Tok::LParen => true,
            Tok::Ident(s) => !matches!(s.as_str(), "ex" | "all" | "in" | "subset" | "empty"),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Pattern, ParseError> {
        if !self.starts_primary() {
            return Err(self.unexpected("a pattern"));
        }
        let mut p = self.primary()?;
        while self.starts_primary() {
            let a = self.primary()?;
            p = Pattern::app(p, a);
        }
        Ok(p)
    }

    fn primary(&mut self) -> Result<Pattern, ParseError> {
        match self.bump() {
            Tok::Int(n) => Ok(Pattern::sym(n)),
            Tok::LParen => {
                let p = self.expr()?;
                if self.peek() != &Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(p)
            }
            Tok::Ident(name) => match name.as_str() {
                "bot" => Ok(Pattern::Bot),
                "top" => Ok(Pattern::top()),
                "ceil" => Ok(Pattern::Sym(crate::pattern::Symbol::definedness())),
                "floor" => {
                    self.expect(&Tok::LParen)?;
                    let p = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    Ok(theory::total(p))
                }
                _ if self.sig.is_symbol(&name) => Ok(Pattern::sym(name)),
                _ => {
                    self.at -= 1;
                    let x = self.variable_name()?;
                    Ok(Pattern::EVar(x))
                }
            },
            _ => unreachable!("guarded by starts_primary"),
        }
    }
}
