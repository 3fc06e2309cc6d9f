//! Command-line driver for `mlunify`: argument definitions, the report types
//! printed with `--format structured`, and the command implementations.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mlunify::certify::{
    certify_pair, check_certificate, decode_certificate, encode_certificate, CertifyError, FormatErrorKind,
    ForwardStyle,
};
use mlunify::model::{countervaluation, make_term_model, term_subpatterns, ModelError};
use mlunify::surface::{parse_pattern, parse_signature, parse_term, print_problem};
use mlunify::unify::{
    solve_with, ListProblem, ProblemKind, SetProblem, Strategy, UnifTrace, UnificationProblem, UnifyError,
};
use mlunify::{Pattern, Signature, Substitution};

pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mlunify", version, about = "Syntactic unification with matching-logic proof certificates")]
pub struct Cli {
    /// Signature file: one `symbol <name> [arity <n>]` per line.
    #[arg(long, global = true, value_name = "PATH")]
    pub sig: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Set,
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    PairFirst,
    RuleFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Chain,
    Steps,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Unify two terms and print the most general unifier.
    Unify {
        lhs: String,
        rhs: String,
        /// Print every rewriting step.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = ProblemArg::Set)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::PairFirst)]
        strategy: StrategyArg,
    },
    /// Unify two terms and write a proof certificate.
    Certify {
        lhs: String,
        rhs: String,
        /// Certificate destination; standard output when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ProblemArg::Set)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::PairFirst)]
        strategy: StrategyArg,
        /// Justify the forward direction with one schema for the whole run or
        /// one per step.
        #[arg(long, value_enum, default_value_t = StyleArg::Chain)]
        style: StyleArg,
    },
    /// Check a certificate file.
    Check { cert: PathBuf },
    /// Decide validity of a pattern in the bounded term model.
    Eval {
        pattern: String,
        /// Largest term size, counted in symbol occurrences.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Quantify over every valuation instead of only those keeping the
        /// pattern's terms inside the bound.
        #[arg(long)]
        all_valuations: bool,
    },
}

/// One line of a unification trace: the rule, the pair it rewrote and the
/// problem it produced.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub rule: String,
    pub pair: String,
    pub problem: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Unifiable { mgu: BTreeMap<String, String> },
    Failed { rule: String },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject { diagnostic: String },
    Malformed { diagnostic: String },
}

/// What `--format structured` prints, one JSON document per run.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Unify {
        format_version: u32,
        lhs: String,
        rhs: String,
        problem: String,
        strategy: String,
        outcome: Outcome,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trace: Option<Vec<TraceLine>>,
    },
    Certify {
        format_version: u32,
        out: Option<String>,
        outcome: Outcome,
        soundness_nodes: usize,
        conjunction_nodes: usize,
    },
    Check {
        format_version: u32,
        result: Verdict,
    },
    Eval {
        format_version: u32,
        pattern: String,
        bound: u32,
        carrier: usize,
        in_bound_only: bool,
        valid: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        countervaluation: Option<BTreeMap<String, String>>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn load_signature(path: Option<&PathBuf>) -> Result<Signature, Failure> {
    let Some(path) = path else { return Ok(Signature::new()) };
    let text =
        fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    parse_signature(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))
}

fn mgu_map(s: &Substitution) -> BTreeMap<String, String> {
    s.bindings().map(|(x, t)| (x.name().to_string(), t.to_string())).collect()
}

fn mgu_text(map: &BTreeMap<String, String>) -> String {
    let items: Vec<String> = map.iter().map(|(x, t)| format!("{x} |-> {t}")).collect();
    format!("{{{}}}", items.join(", "))
}

fn trace_lines<P: UnificationProblem>(t: &UnifTrace<P>) -> Vec<TraceLine> {
    t.steps
        .iter()
        .map(|s| TraceLine {
            rule: s.rule.name().to_string(),
            pair: s.pair.to_string(),
            problem: print_problem(s.after.pairs()),
        })
        .collect()
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::PairFirst => Strategy::PairFirst,
        StrategyArg::RuleFirst => Strategy::RuleFirst,
    }
}

fn problem_kind(p: ProblemArg) -> ProblemKind {
    match p {
        ProblemArg::Set => ProblemKind::Set,
        ProblemArg::List => ProblemKind::List,
    }
}

fn parse_terms(sig: &Signature, lhs: &str, rhs: &str) -> Result<(Pattern, Pattern), Failure> {
    let t1 = parse_term(lhs, sig).map_err(|e| input_error(format!("left term: {e}")))?;
    let t2 = parse_term(rhs, sig).map_err(|e| input_error(format!("right term: {e}")))?;
    Ok((t1, t2))
}

fn run_unify(
    sig: &Signature,
    lhs: &str,
    rhs: &str,
    kind: ProblemKind,
    strat: Strategy,
) -> Result<(Outcome, Vec<TraceLine>), Failure> {
    let (t1, t2) = parse_terms(sig, lhs, rhs)?;
    let to_failure = |e: UnifyError| input_error(e.to_string());
    let (lines, sigma, failing) = match kind {
        ProblemKind::Set => {
            let (t, s) = solve_with::<SetProblem>(&t1, &t2, strat).map_err(to_failure)?;
            (trace_lines(&t), s, t.failing_rule())
        }
        ProblemKind::List => {
            let (t, s) = solve_with::<ListProblem>(&t1, &t2, strat).map_err(to_failure)?;
            (trace_lines(&t), s, t.failing_rule())
        }
    };
    let outcome = match (sigma, failing) {
        (Some(s), _) => Outcome::Unifiable { mgu: mgu_map(&s) },
        (None, Some(rule)) => Outcome::Failed { rule: rule.name().to_string() },
        (None, None) => return Err(input_error("unification stopped without a solved form")),
    };
    Ok((outcome, lines))
}

fn emit(out: &mut dyn Write, format: OutputFormat, report: &Report, text: &str) -> std::io::Result<()> {
    match format {
        OutputFormat::Structured => writeln!(out, "{}", serde_json::to_string_pretty(report).expect("reports serialize")),
        OutputFormat::Text => write!(out, "{text}"),
    }
}

/// Runs one parsed command line and returns the exit status: 0 for a
/// positive answer, 1 for a negative one, 2 for unusable input.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    input_error(format!("output error: {e}"))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    let sig = load_signature(cli.sig.as_ref())?;
    match &cli.command {
        Command::Unify { lhs, rhs, trace, problem, strategy: strat } => {
            let kind = problem_kind(*problem);
            let strat = strategy(*strat);
            let (outcome, lines) = run_unify(&sig, lhs, rhs, kind, strat)?;
            let mut text = String::new();
            if *trace {
                for l in &lines {
                    text.push_str(&format!("{}  {} -> {}\n", l.rule, l.pair, l.problem));
                }
            }
            let code = match &outcome {
                Outcome::Unifiable { mgu } => {
                    text.push_str(&format!("MGU: {}\n", mgu_text(mgu)));
                    0
                }
                Outcome::Failed { rule } => {
                    text.push_str(&format!("FAIL: {rule}\n"));
                    1
                }
            };
            let report = Report::Unify {
                format_version: REPORT_VERSION,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                problem: kind.name().to_string(),
                strategy: strat.name().to_string(),
                outcome,
                trace: trace.then_some(lines),
            };
            emit(out, cli.format, &report, &text).map_err(io_failure)?;
            Ok(code)
        }
        Command::Certify { lhs, rhs, out: path, problem, strategy: strat, style } => {
            let (t1, t2) = parse_terms(&sig, lhs, rhs)?;
            let mut sig = sig;
            sig.declare_literals(&t1);
            sig.declare_literals(&t2);
            let style = match style {
                StyleArg::Chain => ForwardStyle::Chain,
                StyleArg::Steps => ForwardStyle::Steps,
            };
            let cert = match certify_pair(&sig, &t1, &t2, problem_kind(*problem), strategy(*strat), style) {
                Ok(cert) => cert,
                Err(CertifyError::NotUnifiable(rule)) => {
                    let outcome = Outcome::Failed { rule: rule.name().to_string() };
                    let report = Report::Certify {
                        format_version: REPORT_VERSION,
                        out: None,
                        outcome,
                        soundness_nodes: 0,
                        conjunction_nodes: 0,
                    };
                    emit(out, cli.format, &report, &format!("FAIL: {rule}\n")).map_err(io_failure)?;
                    return Ok(1);
                }
                Err(e) => return Err(input_error(e.to_string())),
            };
            let json = serde_json::to_string_pretty(&encode_certificate(&cert)).expect("certificates serialize");
            match path {
                None => {
                    writeln!(out, "{json}").map_err(io_failure)?;
                }
                Some(p) => {
                    fs::write(p, format!("{json}\n"))
                        .map_err(|e| input_error(format!("cannot write {}: {e}", p.display())))?;
                    let mgu = mgu_map(&cert.sigma);
                    let text = format!("MGU: {}\ncertificate written to {}\n", mgu_text(&mgu), p.display());
                    let report = Report::Certify {
                        format_version: REPORT_VERSION,
                        out: Some(p.display().to_string()),
                        outcome: Outcome::Unifiable { mgu },
                        soundness_nodes: cert.soundness.node_count(),
                        conjunction_nodes: cert.conjunction.node_count(),
                    };
                    emit(out, cli.format, &report, &text).map_err(io_failure)?;
                }
            }
            Ok(0)
        }
        Command::Check { cert } => {
            let text = fs::read_to_string(cert).map_err(|e| input_error(format!("cannot read {}: {e}", cert.display())))?;
            let (verdict, code) = match decode_certificate(&text) {
                Err(e) if e.kind == FormatErrorKind::Malformed => (Verdict::Malformed { diagnostic: e.to_string() }, 2),
                Err(e) => (Verdict::Reject { diagnostic: e.to_string() }, 1),
                Ok(c) => match check_certificate(&c) {
                    Ok(()) => (Verdict::Accept, 0),
                    Err(r) => (Verdict::Reject { diagnostic: r.to_string() }, 1),
                },
            };
            let line = match &verdict {
                Verdict::Accept => "ACCEPT\n".to_string(),
                Verdict::Reject { diagnostic } => format!("REJECT: {diagnostic}\n"),
                Verdict::Malformed { diagnostic } => format!("MALFORMED: {diagnostic}\n"),
            };
            let report = Report::Check { format_version: REPORT_VERSION, result: verdict };
            emit(out, cli.format, &report, &line).map_err(io_failure)?;
            Ok(code)
        }
        Command::Eval { pattern, bound, all_valuations } => {
            let p = parse_pattern(pattern, &sig).map_err(|e| input_error(format!("pattern: {e}")))?;
            let mut model_sig = sig.clone();
            model_sig.declare_literals(&p);
            if cli.sig.is_none() && !model_sig.has_nullary() {
                model_sig.declare("0", Some(0)).expect("numerals are valid symbols");
            }
            if !model_sig.has_nullary() {
                return Err(input_error(ModelError::NoNullary.to_string()));
            }
            let model = make_term_model(&model_sig, *bound as usize).map_err(|e| input_error(e.to_string()))?;
            let guards = if *all_valuations { Vec::new() } else { term_subpatterns(&p) };
            let witness = countervaluation(&model, &p, &guards).map_err(|e| input_error(e.to_string()))?;
            let witness = witness.map(|v| {
                v.iter().map(|(x, e)| (x.name().to_string(), model.label(*e).to_string())).collect::<BTreeMap<_, _>>()
            });
            let text = match &witness {
                None => "VALID\n".to_string(),
                Some(w) => format!("NOT-VALID\ncountervaluation: {}\n", mgu_text(w)),
            };
            let valid = witness.is_none();
            let report = Report::Eval {
                format_version: REPORT_VERSION,
                pattern: p.to_string(),
                bound: *bound,
                carrier: model.size(),
                in_bound_only: !*all_valuations,
                valid: witness.is_none(),
                countervaluation: witness,
            };
            emit(out, cli.format, &report, &text).map_err(io_failure)?;
            Ok(if valid { 0 } else { 1 })
        }
    }
}
