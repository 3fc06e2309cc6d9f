//! JSON encoding of certificates.
//!
//! Patterns are stored as surface text and re-parsed against the embedded
//! signature. Decoding distinguishes two kinds of failure: a document that is
//! not a certificate at all (bad JSON, missing structure, unknown version,
//! unparsable pattern text) and one that is well formed but names a rule
//! that does not exist or gives it unusable parameters. Only the second kind
//! is a verdict about the proof.

use std::fmt;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::pattern::{Pattern, PatternContext, Symbol, Var};
use crate::subst::Substitution;
use crate::surface::{parse_pattern_with, parse_problem_with, print_pattern_in, print_problem, ParseOptions};
use crate::theory::{is_identifier, Axiom, Signature, Theory};
use crate::unify::{ListProblem, Rule, SetProblem, UnifStep, UnifTrace, UnificationProblem};

use super::{AnyStep, AnyTrace, Certificate, DerivedRule, ProofTree, RuleApp, Sequent, FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatErrorKind {
    /// Not a certificate of a supported version.
    Malformed,
    /// A certificate, but one naming an unknown rule or giving a rule
    /// unusable parameters.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    pub kind: FormatErrorKind,
    /// JSON path of the offending value.
    pub path: String,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

fn malformed(path: &str, message: impl Into<String>) -> FormatError {
    FormatError { kind: FormatErrorKind::Malformed, path: path.to_string(), message: message.into() }
}

fn invalid(path: &str, message: impl Into<String>) -> FormatError {
    FormatError { kind: FormatErrorKind::Invalid, path: path.to_string(), message: message.into() }
}

// ---------------------------------------------------------------- encoding

struct Enc<'a> {
    sig: &'a Signature,
}

impl Enc<'_> {
    fn pat(&self, p: &Pattern) -> Value {
        Value::String(print_pattern_in(p, Some(self.sig)))
    }

    fn problem<P: UnificationProblem>(&self, p: &P) -> Value {
        Value::String(print_problem(p.pairs()))
    }

    fn sigma(&self, s: &Substitution) -> Value {
        let map: Map<String, Value> = s.bindings().map(|(x, t)| (x.name().to_string(), self.pat(t))).collect();
        Value::Object(map)
    }

    fn context(&self, c: &PatternContext) -> Value {
        json!({ "hole": c.hole.name(), "body": self.pat(&c.body) })
    }

    fn trace<P: UnificationProblem>(&self, t: &UnifTrace<P>) -> Value {
        let steps: Vec<Value> = t
            .steps
            .iter()
            .map(|s| {
                json!({
                    "rule": s.rule.name(),
                    "index": s.index,
                    "pair": print_problem(Some(std::slice::from_ref(&s.pair))),
                    "after": self.problem(&s.after),
                })
            })
            .collect();
        json!({
            "problem": P::KIND.name(),
            "initial": self.problem(&t.initial),
            "steps": steps,
            "result": self.problem(&t.result),
        })
    }

    fn any_trace(&self, t: &AnyTrace) -> Value {
        match t {
            AnyTrace::Set(t) => self.trace(t),
            AnyTrace::List(t) => self.trace(t),
        }
    }

    fn step<P: UnificationProblem>(&self, s: &UnifStep<P>) -> Value {
        json!({
            "problem": P::KIND.name(),
            "rule": s.rule.name(),
            "index": s.index,
            "pair": print_problem(Some(std::slice::from_ref(&s.pair))),
            "before": self.problem(&s.before),
            "after": self.problem(&s.after),
        })
    }

    fn derived(&self, d: &DerivedRule) -> Value {
        use DerivedRule::*;
        let mut m = Map::new();
        m.insert("name".into(), json!(d.name()));
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        match d {
            Congruence { context, left, right } => {
                put("context", self.context(context));
                put("left", self.pat(left));
                put("right", self.pat(right));
            }
            DefinednessIntro { pattern } => put("pattern", self.pat(pattern)),
            MemberToEq { left, right } | TermConjToEq { left, right } | EqSymmetry { left, right } => {
                put("left", self.pat(left));
                put("right", self.pat(right));
            }
            CondEquiv { cond, left, right } | CondEq { cond, left, right } => {
                put("cond", self.pat(cond));
                put("left", self.pat(left));
                put("right", self.pat(right));
            }
            SubstEq { var, term, pattern } => {
                put("var", json!(var.name()));
                put("term", self.pat(term));
                put("pattern", self.pat(pattern));
            }
            SubstPredicate { pattern, sigma } => {
                put("pattern", self.pat(pattern));
                put("sigma", self.sigma(sigma));
            }
            StepSound(AnyStep::Set(s)) => put("step", self.step(s)),
            StepSound(AnyStep::List(s)) => put("step", self.step(s)),
            ChainSound(trace) => put("trace", self.any_trace(trace)),
            MguForward { left, right, trace } => {
                put("left", self.pat(left));
                put("right", self.pat(right));
                put("trace", self.any_trace(trace));
            }
            UnifierBackward { left, right, sigma } => {
                put("left", self.pat(left));
                put("right", self.pat(right));
                put("sigma", self.sigma(sigma));
            }
            Injectivity { symbol, arity } => {
                put("symbol", json!(symbol.name()));
                put("arity", json!(arity));
            }
            EqTransitivity { left, middle, right } => {
                put("left", self.pat(left));
                put("middle", self.pat(middle));
                put("right", self.pat(right));
            }
            TopIntro => {}
        }
        Value::Object(m)
    }

    fn tree(&self, t: &ProofTree) -> Value {
        let mut m = Map::new();
        m.insert("context".into(), Value::Array(t.conclusion.context.iter().map(|p| self.pat(p)).collect()));
        m.insert("goal".into(), self.pat(&t.conclusion.goal));
        m.insert("rule".into(), json!(t.rule.name()));
        if let Some(i) = t.rule.index() {
            m.insert("index".into(), json!(i));
        }
        match &t.rule {
            RuleApp::Inherit(d) => {
                m.insert("derived".into(), self.derived(d));
            }
            RuleApp::Cut { formula, .. } => {
                m.insert("formula".into(), self.pat(formula));
            }
            RuleApp::ForallL { var, .. }
            | RuleApp::ExistsL { var, .. }
            | RuleApp::ForallR { var }
            | RuleApp::ExistsR { var } => {
                m.insert("var".into(), json!(var.name()));
            }
            RuleApp::EqRewrite { context, .. } => {
                m.insert("context_of_rewrite".into(), self.context(context));
            }
            _ => {}
        }
        if !t.premises.is_empty() {
            m.insert("premises".into(), Value::Array(t.premises.iter().map(|p| self.tree(p)).collect()));
        }
        Value::Object(m)
    }
}

fn encode_axiom(a: &Axiom, sig: &Signature) -> Value {
    match a {
        Axiom::User(p) => json!(format!("axiom {}", print_pattern_in(p, Some(sig)))),
        other => json!(other.to_string()),
    }
}

/// The certificate as a JSON value.
pub fn encode_certificate(cert: &Certificate) -> Value {
    let enc = Enc { sig: &cert.signature };
    let signature: Vec<Value> = cert
        .signature
        .symbols()
        .map(|(s, a)| match a {
            Some(n) => json!({ "symbol": s.name(), "arity": n }),
            None => json!({ "symbol": s.name() }),
        })
        .collect();
    json!({
        "format_version": cert.version,
        "signature": signature,
        "theory": cert.theory.axioms().iter().map(|a| encode_axiom(a, &cert.signature)).collect::<Vec<_>>(),
        "left": enc.pat(&cert.left),
        "right": enc.pat(&cert.right),
        "sigma": enc.sigma(&cert.sigma),
        "trace": enc.any_trace(&cert.trace),
        "soundness": enc.tree(&cert.soundness),
        "conjunction": enc.tree(&cert.conjunction),
    })
}

// ---------------------------------------------------------------- decoding

type Fail = fn(&str, String) -> FormatError;

fn fail_malformed(path: &str, m: String) -> FormatError {
    malformed(path, m)
}

fn fail_invalid(path: &str, m: String) -> FormatError {
    invalid(path, m)
}

struct Dec<'a> {
    sig: &'a Signature,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn get<'v>(v: &'v Value, path: &str, key: &str, fail: Fail) -> Result<&'v Value, FormatError> {
    v.as_object()
        .ok_or_else(|| fail(path, "expected an object".into()))?
        .get(key)
        .ok_or_else(|| fail(&join(path, key), "missing".into()))
}

fn get_str<'v>(v: &'v Value, path: &str, key: &str, fail: Fail) -> Result<&'v str, FormatError> {
    get(v, path, key, fail)?.as_str().ok_or_else(|| fail(&join(path, key), "expected a string".into()))
}

fn get_usize(v: &Value, path: &str, key: &str, fail: Fail) -> Result<usize, FormatError> {
    get(v, path, key, fail)?
        .as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| fail(&join(path, key), "expected a non-negative integer".into()))
}

fn get_array<'v>(v: &'v Value, path: &str, key: &str, fail: Fail) -> Result<&'v [Value], FormatError> {
    get(v, path, key, fail)?.as_array().map(Vec::as_slice).ok_or_else(|| fail(&join(path, key), "expected an array".into()))
}

fn get_var(v: &Value, path: &str, key: &str, fail: Fail) -> Result<Var, FormatError> {
    let name = get_str(v, path, key, fail)?;
    if is_identifier(name) {
        Ok(Var::new(name))
    } else {
        Err(fail(&join(path, key), format!("`{name}` is not a variable name")))
    }
}

impl Dec<'_> {
    fn opts() -> ParseOptions {
        ParseOptions { allow_reserved: true }
    }

    fn pattern_text(&self, text: &str, path: &str) -> Result<Pattern, FormatError> {
        parse_pattern_with(text, self.sig, Self::opts()).map_err(|e| malformed(path, format!("bad pattern: {e}")))
    }

    fn pat(&self, v: &Value, path: &str, key: &str, fail: Fail) -> Result<Pattern, FormatError> {
        let text = get_str(v, path, key, fail)?;
        self.pattern_text(text, &join(path, key))
    }

    fn problem<P: UnificationProblem>(&self, v: &Value, path: &str, key: &str, fail: Fail) -> Result<P, FormatError> {
        let text = get_str(v, path, key, fail)?;
        parse_problem_with::<P>(text, self.sig, Self::opts())
            .map_err(|e| malformed(&join(path, key), format!("bad problem: {e}")))
    }

    fn sigma(&self, v: &Value, path: &str, key: &str, fail: Fail) -> Result<Substitution, FormatError> {
        let here = join(path, key);
        let obj = get(v, path, key, fail)?.as_object().ok_or_else(|| fail(&here, "expected an object".into()))?;
        let mut out = Substitution::new();
        for (name, t) in obj {
            if !is_identifier(name) {
                return Err(fail(&here, format!("`{name}` is not a variable name")));
            }
            let text = t.as_str().ok_or_else(|| fail(&join(&here, name), "expected a string".into()))?;
            out.bind(Var::new(name), self.pattern_text(text, &join(&here, name))?);
        }
        Ok(out)
    }

    fn context(&self, v: &Value, path: &str, key: &str, fail: Fail) -> Result<PatternContext, FormatError> {
        let here = join(path, key);
        let c = get(v, path, key, fail)?;
        Ok(PatternContext::new(get_var(c, &here, "hole", fail)?, self.pat(c, &here, "body", fail)?))
    }

    fn pair<P: UnificationProblem>(&self, v: &Value, path: &str, fail: Fail) -> Result<crate::unify::Pair, FormatError> {
        let single: ListProblem = self.problem(v, path, "pair", fail)?;
        match single.pairs() {
            Some([pair]) => Ok(pair.clone()),
            _ => Err(fail(&join(path, "pair"), "expected exactly one pair".into())),
        }
    }

    fn rule_name(v: &Value, path: &str, fail: Fail) -> Result<Rule, FormatError> {
        let name = get_str(v, path, "rule", fail)?;
        Rule::from_name(name).ok_or_else(|| invalid(&join(path, "rule"), format!("unknown unification rule `{name}`")))
    }

    fn trace<P: UnificationProblem>(&self, v: &Value, path: &str, fail: Fail) -> Result<UnifTrace<P>, FormatError> {
        let initial: P = self.problem(v, path, "initial", fail)?;
        let mut current = initial.clone();
        let mut steps = Vec::new();
        for (i, s) in get_array(v, path, "steps", fail)?.iter().enumerate() {
            let here = format!("{}[{i}]", join(path, "steps"));
            let after: P = self.problem(s, &here, "after", fail)?;
            steps.push(UnifStep {
                rule: Self::rule_name(s, &here, fail)?,
                index: get_usize(s, &here, "index", fail)?,
                pair: self.pair::<P>(s, &here, fail)?,
                before: current,
                after: after.clone(),
            });
            current = after;
        }
        let result = self.problem(v, path, "result", fail)?;
        Ok(UnifTrace { initial, steps, result })
    }

    fn any_trace(&self, v: &Value, path: &str, fail: Fail) -> Result<AnyTrace, FormatError> {
        let here = join(path, "trace");
        let t = get(v, path, "trace", fail)?;
        match get_str(t, &here, "problem", fail)? {
            "set" => Ok(AnyTrace::Set(self.trace(t, &here, fail)?)),
            "list" => Ok(AnyTrace::List(self.trace(t, &here, fail)?)),
            other => Err(fail(&join(&here, "problem"), format!("unknown problem kind `{other}`"))),
        }
    }

    fn step<P: UnificationProblem>(&self, s: &Value, path: &str) -> Result<UnifStep<P>, FormatError> {
        let fail: Fail = fail_invalid;
        Ok(UnifStep {
            rule: Self::rule_name(s, path, fail)?,
            index: get_usize(s, path, "index", fail)?,
            pair: self.pair::<P>(s, path, fail)?,
            before: self.problem(s, path, "before", fail)?,
            after: self.problem(s, path, "after", fail)?,
        })
    }

    fn derived(&self, v: &Value, path: &str) -> Result<DerivedRule, FormatError> {
        use DerivedRule::*;
        let f: Fail = fail_invalid;
        let name = get_str(v, path, "name", f)?;
        let pat = |key: &str| self.pat(v, path, key, f);
        Ok(match name {
            "Congruence" => Congruence { context: self.context(v, path, "context", f)?, left: pat("left")?, right: pat("right")? },
            "DefinednessIntro" => DefinednessIntro { pattern: pat("pattern")? },
            "MemberToEq" => MemberToEq { left: pat("left")?, right: pat("right")? },
            "CondEquiv" => CondEquiv { cond: pat("cond")?, left: pat("left")?, right: pat("right")? },
            "CondEq" => CondEq { cond: pat("cond")?, left: pat("left")?, right: pat("right")? },
            "TermConjToEq" => TermConjToEq { left: pat("left")?, right: pat("right")? },
            "SubstEq" => SubstEq { var: get_var(v, path, "var", f)?, term: pat("term")?, pattern: pat("pattern")? },
            "SubstPredicate" => SubstPredicate { pattern: pat("pattern")?, sigma: self.sigma(v, path, "sigma", f)? },
            "StepSound" => {
                let here = join(path, "step");
                let s = get(v, path, "step", f)?;
                match get_str(s, &here, "problem", f)? {
                    "set" => StepSound(AnyStep::Set(self.step::<SetProblem>(s, &here)?)),
                    "list" => StepSound(AnyStep::List(self.step::<ListProblem>(s, &here)?)),
                    other => return Err(invalid(&join(&here, "problem"), format!("unknown problem kind `{other}`"))),
                }
            }
            "ChainSound" => ChainSound(self.any_trace(v, path, f)?),
            "MguForward" => MguForward { left: pat("left")?, right: pat("right")?, trace: self.any_trace(v, path, f)? },
            "UnifierBackward" => {
                UnifierBackward { left: pat("left")?, right: pat("right")?, sigma: self.sigma(v, path, "sigma", f)? }
            }
            "Injectivity" => Injectivity {
                symbol: Symbol::new(get_str(v, path, "symbol", f)?),
                arity: get_usize(v, path, "arity", f)?,
            },
            "EqSymmetry" => EqSymmetry { left: pat("left")?, right: pat("right")? },
            "EqTransitivity" => EqTransitivity { left: pat("left")?, middle: pat("middle")?, right: pat("right")? },
            "TopIntro" => TopIntro,
            other => return Err(invalid(&join(path, "name"), format!("unknown derived rule `{other}`"))),
        })
    }

    fn rule(&self, v: &Value, path: &str) -> Result<RuleApp, FormatError> {
        let f: Fail = fail_invalid;
        let name = get_str(v, path, "rule", fail_malformed)?;
        let index = || get_usize(v, path, "index", f);
        let var = || get_var(v, path, "var", f);
        Ok(match name {
            "Inherit" => {
                let here = join(path, "derived");
                RuleApp::Inherit(self.derived(get(v, path, "derived", f)?, &here)?)
            }
            "Weaken" => RuleApp::Weaken { index: index()? },
            "Cut" => RuleApp::Cut { index: index()?, formula: self.pat(v, path, "formula", f)? },
            "Hyp" => RuleApp::Hyp { index: index()? },
            "ImpL" => RuleApp::ImpL { index: index()? },
            "AndL" => RuleApp::AndL { index: index()? },
            "OrL" => RuleApp::OrL { index: index()? },
            "BotL" => RuleApp::BotL { index: index()? },
            "ImpR" => RuleApp::ImpR,
            "AndR" => RuleApp::AndR,
            "OrRL" => RuleApp::OrRL,
            "OrRR" => RuleApp::OrRR,
            "ForallL" => RuleApp::ForallL { index: index()?, var: var()? },
            "ExistsL" => RuleApp::ExistsL { index: index()?, var: var()? },
            "ForallR" => RuleApp::ForallR { var: var()? },
            "ExistsR" => RuleApp::ExistsR { var: var()? },
            "EqRefl" => RuleApp::EqRefl,
            "EqRewrite" => {
                RuleApp::EqRewrite { index: index()?, context: self.context(v, path, "context_of_rewrite", f)? }
            }
            "Deduction" => RuleApp::Deduction,
            other => return Err(invalid(&join(path, "rule"), format!("unknown sequent rule `{other}`"))),
        })
    }

    fn tree(&self, v: &Value, path: &str) -> Result<ProofTree, FormatError> {
        let f: Fail = fail_malformed;
        let context = get_array(v, path, "context", f)?
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let here = format!("{}[{i}]", join(path, "context"));
                let text = h.as_str().ok_or_else(|| malformed(&here, "expected a string"))?;
                self.pattern_text(text, &here)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let goal = self.pat(v, path, "goal", f)?;
        let rule = self.rule(v, path)?;
        let premises = match v.get("premises") {
            None => Vec::new(),
            Some(Value::Array(ps)) => ps
                .iter()
                .enumerate()
                .map(|(i, p)| self.tree(p, &format!("{}[{i}]", join(path, "premises"))))
                .collect::<Result<Vec<_>, _>>()?,
            Some(_) => return Err(malformed(&join(path, "premises"), "expected an array")),
        };
        Ok(ProofTree { conclusion: Sequent::new(context, goal), rule, premises })
    }
}

fn decode_signature(v: &Value) -> Result<Signature, FormatError> {
    let f: Fail = fail_malformed;
    let mut sig = Signature::new();
    for (i, entry) in get_array(v, "", "signature", f)?.iter().enumerate() {
        let here = format!("signature[{i}]");
        let name = get_str(entry, &here, "symbol", f)?;
        let arity = match entry.get("arity") {
            None => None,
            Some(_) => Some(get_usize(entry, &here, "arity", f)?),
        };
        sig.declare(name, arity).map_err(|e| malformed(&here, e.to_string()))?;
    }
    Ok(sig)
}

fn decode_theory(v: &Value, dec: &Dec<'_>) -> Result<Theory, FormatError> {
    let f: Fail = fail_malformed;
    let mut axioms = Vec::new();
    for (i, entry) in get_array(v, "", "theory", f)?.iter().enumerate() {
        let here = format!("theory[{i}]");
        let text = entry.as_str().ok_or_else(|| malformed(&here, "expected a string"))?;
        let words: Vec<&str> = text.split_whitespace().collect();
        let axiom = match words.as_slice() {
            ["definedness"] => Axiom::Definedness,
            ["injectivity", name, n] => {
                let arity = n.parse().map_err(|_| malformed(&here, format!("bad arity `{n}`")))?;
                Axiom::Injectivity { symbol: Symbol::new(*name), arity }
            }
            ["axiom", ..] => Axiom::User(dec.pattern_text(text.trim_start()["axiom".len()..].trim(), &here)?),
            _ => return Err(malformed(&here, format!("unknown axiom `{text}`"))),
        };
        axioms.push(axiom);
    }
    Ok(Theory::new(axioms))
}

const MAX_NESTING: usize = 16384;

/// Deepest bracket nesting of `text`, ignoring brackets inside strings.
fn nesting_depth(text: &str) -> usize {
    let (mut depth, mut max, mut in_string, mut escaped) = (0usize, 0, false, false);
    for b in text.bytes() {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'[' | b'{' => {
                depth += 1;
                max = max.max(depth);
            }
            b']' | b'}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    max
}

/// Parses certificate JSON text.
pub fn decode_certificate(text: &str) -> Result<Certificate, FormatError> {
    let depth = nesting_depth(text);
    if depth > MAX_NESTING {
        return Err(malformed("", format!("JSON nesting depth {depth} exceeds the limit of {MAX_NESTING}")));
    }
    // Proof trees nest deeper than serde_json's default limit of 128; the
    // scan above bounds the recursion instead.
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let v = Value::deserialize(&mut de)
        .and_then(|v| de.end().map(|()| v))
        .map_err(|e| malformed("", format!("invalid JSON: {e}")))?;
    let f: Fail = fail_malformed;
    let version = get(&v, "", "format_version", f)?
        .as_u64()
        .ok_or_else(|| malformed("format_version", "expected an integer"))?;
    if version != FORMAT_VERSION {
        return Err(malformed("format_version", format!("unsupported format version {version}")));
    }
    let signature = decode_signature(&v)?;
    let dec = Dec { sig: &signature };
    let theory = decode_theory(&v, &dec)?;
    let cert = Certificate {
        version,
        theory,
        left: dec.pat(&v, "", "left", f)?,
        right: dec.pat(&v, "", "right", f)?,
        sigma: dec.sigma(&v, "", "sigma", f)?,
        trace: dec.any_trace(&v, "", f)?,
        soundness: dec.tree(get(&v, "", "soundness", f)?, "soundness")?,
        conjunction: dec.tree(get(&v, "", "conjunction", f)?, "conjunction")?,
        signature: signature.clone(),
    };
    Ok(cert)
}
