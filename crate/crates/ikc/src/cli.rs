//! Command-line front end.

use crate::deriv::{
    bounded_typecheck, check_derivation, parse_derivation, subject_expand_beta, subject_reduce, CheckedJudgment,
    SearchResult,
};
use crate::env::Env;
use crate::error::Error;
use crate::parse::{parse_env, parse_term, parse_type};
use crate::props;
use crate::reduction::{all_steps, check_local_confluence, equiv, normalize, Equivalence, ReductionOutcome, Relation};
use crate::semantics::{
    closed_sample, completeness_on, oracle_membership, saturation_check, soundness_check, ExampleType,
};
use crate::types::subtype;
use clap::{Parser, Subcommand};
use std::io::Write;

pub const DEFAULT_FUEL: usize = 10_000;

const GRAMMAR: &str = "\
Inputs are file paths or inline text in these grammars:
  index := \"[\" nat* \"]\"
  term  := ident index | \"(lam \" ident index term \")\" | \"(app \" term term \")\"
  type  := ident | \"(w \" index \")\" | \"(-> \" type type \")\" | \"(^ \" type type \")\" | \"(e \" nat type \")\"
  env   := \"(\" (\"(\" ident index type \")\")* \")\"
  judg  := \"(judg \" term env type \")\"
  deriv := \"(ax \" ident type \")\" | \"(w \" term \")\" | \"(arrI \" ident index type deriv \")\"
         | \"(arrIW \" ident index deriv \")\" | \"(arrE \" deriv deriv \")\" | \"(interI \" deriv deriv \")\"
         | \"(exp \" nat deriv \")\" | \"(sub \" deriv env type \")\" | \"(interI' \" deriv deriv \")\" | \"(ax' \" ident type \")\"
Comments run from `;` to the end of the line.
Example types: Id0 Id1 D Nat0 Nat1 NatP0.  Relations: beta eta betaeta h.
Exit status: 0 positive verdict, 1 negative verdict, 2 input error.
IKC_FUEL overrides the default fuel.";

#[derive(Parser, Debug)]
#[command(name = "ikc", about = "Degree-indexed lambda calculus with expansion variables", after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Reduction relation: beta, eta, betaeta or h.
    #[arg(long, global = true, default_value = "beta")]
    rel: String,
    /// Step or search budget; defaults to IKC_FUEL or 10000.
    #[arg(long, global = true)]
    fuel: Option<usize>,
    /// Size bound for enumerations.
    #[arg(long, global = true)]
    size: Option<usize>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Environment for typecheck.
    #[arg(long, global = true)]
    env: Option<String>,
    /// Type for typecheck.
    #[arg(long = "type", global = true)]
    typ: Option<String>,
    /// Exploration depth for confluence and saturation.
    #[arg(long, global = true)]
    depth: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Parse a term and report its degree and free variables.
    CheckTerm { term: String },
    /// List every one-step reduct.
    Reduce { term: String },
    /// Leftmost-outermost normal form.
    Nf { term: String },
    /// Decide convertibility within the fuel.
    Equiv { left: String, right: String },
    /// Check local confluence from a term, or over all terms up to --size.
    Confluence { term: Option<String> },
    /// Decide U ⊑ V.
    Subtype { left: String, right: String },
    /// Check a derivation and print its conclusion.
    CheckDeriv { deriv: String },
    /// Transport a derivation to a reduct.
    Sr { deriv: String, reduct: String },
    /// Transport a derivation to a beta-expansion.
    Expand { deriv: String, expansion: String },
    /// Bounded derivation search; needs --type, --env defaults to the empty environment.
    Typecheck { term: String },
    /// Decide membership in an example type.
    Oracle { example: String, term: String },
    /// Check a closed derivation against the oracle of an example type.
    Soundness { deriv: String, example: String },
    /// Search derivations for every oracle member up to --size.
    Completeness { example: String },
    /// Check that the members among closed terms up to --size are closed under expansion.
    Saturation { example: String },
    /// Run the property suites.
    Props,
}

enum Fail {
    Input(Error),
    Negative(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Input(e)
    }
}

type Out<'a> = &'a mut dyn Write;

/// Reads `arg` from a file when one exists at that path, otherwise takes it as inline text.
fn source(arg: &str) -> std::result::Result<String, Error> {
    let p = std::path::Path::new(arg);
    if !arg.trim_start().starts_with('(') && p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Error::Syntax { pos: 0, msg: format!("cannot read {arg}: {e}") })
    } else {
        Ok(arg.to_string())
    }
}

fn fuel_default() -> usize {
    std::env::var("IKC_FUEL").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_FUEL)
}

/// Runs the command line `argv` (program name first) and returns the exit status.
pub fn run<I, S>(argv: I, out: Out) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(out, "{e}");
            if code == 2 {
                let _ = writeln!(out, "\n{GRAMMAR}");
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Fail::Negative(msg)) => {
            let _ = writeln!(out, "{msg}");
            1
        }
        Err(Fail::Input(e)) => {
            let _ = writeln!(out, "{}: {e}", e.kind());
            2
        }
    }
}

fn dispatch(cli: &Cli, out: Out) -> std::result::Result<bool, Fail> {
    let rel: Relation = cli.rel.parse()?;
    let fuel = cli.fuel.unwrap_or_else(fuel_default);
    let w = |out: Out, s: String| {
        let _ = writeln!(out, "{s}");
    };
    let term = |s: &str| -> std::result::Result<_, Error> { parse_term(&source(s)?) };
    let typ = |s: &str| -> std::result::Result<_, Error> { parse_type(&source(s)?) };
    let deriv = |s: &str| -> std::result::Result<_, Error> { parse_derivation(&source(s)?) };
    let example = |s: &str| -> std::result::Result<ExampleType, Error> { s.parse() };
    match &cli.verb {
        Verb::CheckTerm { term: t } => {
            let m = term(t)?;
            let fv: Vec<String> = m.free_vars().iter().map(|k| k.to_string()).collect();
            w(out, format!("{m}\tok\tdegree {} size {} free [{}]", m.degree(), m.size(), fv.join(" ")));
            Ok(true)
        }
        Verb::Reduce { term: t } => {
            let m = term(t)?;
            let steps = all_steps(&m, rel);
            for (rx, n) in &steps {
                w(out, format!("{n}\t{:?}\t{:?}", rx.kind, rx.path));
            }
            if steps.is_empty() {
                w(out, format!("{m}\tnormal\tno {rel} redex"));
            }
            Ok(true)
        }
        Verb::Nf { term: t } => match normalize(&term(t)?, rel, fuel) {
            ReductionOutcome::NormalForm(n) => {
                w(out, n.to_string());
                Ok(true)
            }
            ReductionOutcome::FuelExhausted { last, steps } => {
                Err(Fail::Negative(format!("{last}\tFuelExhausted\tafter {steps} steps")))
            }
        },
        Verb::Equiv { left, right } => {
            let v = equiv(&term(left)?, &term(right)?, rel, fuel);
            w(out, format!("{v:?}"));
            Ok(v == Equivalence::Equivalent)
        }
        Verb::Confluence { term: t } => {
            let depth = cli.depth.unwrap_or(3);
            match t {
                Some(t) => {
                    let m = term(t)?;
                    let rep = check_local_confluence(&m, rel, depth);
                    for (p, a, b) in &rep.unjoined {
                        w(out, format!("{p}\tunjoined\t{a} | {b}"));
                    }
                    w(out, format!("{m}\t{}\t{} nodes, {} peaks", if rep.ok() { "confluent" } else { "unjoined" }, rep.nodes, rep.peaks));
                    Ok(rep.ok())
                }
                None => {
                    let terms = props::term_sample(cli.size.unwrap_or(5));
                    let p = props::local_confluence(&terms, rel, depth);
                    report_prop(out, &p);
                    Ok(p.ok())
                }
            }
        }
        Verb::Subtype { left, right } => {
            let b = subtype(&typ(left)?, &typ(right)?);
            w(out, b.to_string());
            Ok(b)
        }
        Verb::CheckDeriv { deriv: d } => {
            let d = deriv(d)?;
            match check_derivation(&d) {
                Ok(j) => {
                    w(out, j.to_string());
                    Ok(true)
                }
                Err(e) => Err(Fail::Negative(format!("{}: {e}", e.kind()))),
            }
        }
        Verb::Sr { deriv: d, reduct } => {
            let (d, n) = (deriv(d)?, term(reduct)?);
            check_derivation(&d)?;
            transformed(out, subject_reduce(&d, &n, rel, fuel))
        }
        Verb::Expand { deriv: d, expansion } => {
            let (d, m) = (deriv(d)?, term(expansion)?);
            check_derivation(&d)?;
            transformed(out, subject_expand_beta(&d, &m, fuel))
        }
        Verb::Typecheck { term: t } => {
            let m = term(t)?;
            let g = match &cli.env {
                Some(e) => parse_env(&source(e)?)?,
                None => Env::new(),
            };
            let Some(u) = &cli.typ else {
                return Err(Fail::Input(Error::Syntax { pos: 0, msg: "typecheck needs --type".into() }));
            };
            let u = typ(u)?;
            let r = bounded_typecheck(&m, &g, &u, fuel);
            match &r {
                SearchResult::Found(d) => {
                    w(out, format!("{m}\tFound\t{}", check_derivation(d).expect("search output checks")));
                    w(out, d.to_string());
                }
                SearchResult::Refuted(why) => w(out, format!("{m}\tRefutedByGeneration\t{why}")),
                SearchResult::Unknown => w(out, format!("{m}\tUnknown\tfuel {fuel} exhausted")),
            }
            Ok(r.is_found())
        }
        Verb::Oracle { example: e, term: t } => {
            let (e, m) = (example(e)?, term(t)?);
            let v = oracle_membership(e, &m, fuel);
            let detail = match v.count {
                Some(n) if v.member => format!("{} (n = {n})", v.witness),
                _ => v.witness.clone(),
            };
            w(out, format!("{m}\t{}\t{detail}", v.label()));
            Ok(v.member)
        }
        Verb::Soundness { deriv: d, example: e } => {
            let (d, e) = (deriv(d)?, example(e)?);
            let cj = CheckedJudgment::new(d)?;
            let ok = soundness_check(&cj, e, fuel)?;
            let verdict = if ok { "sound" } else { "soundness violation" };
            w(out, format!("{}\t{verdict}\t{e}", cj.judgment.subject));
            Ok(ok)
        }
        Verb::Completeness { example: e } => {
            let e = example(e)?;
            let rep = completeness_on(e, &closed_sample(cli.size.unwrap_or(7)), fuel);
            for l in &rep.lines {
                w(out, l.clone());
            }
            w(out, format!(
                "# {e}: {} members, {} found, {} unknown, {} refuted, {} undecided",
                rep.members,
                rep.found,
                rep.unknown.len(),
                rep.refuted.len(),
                rep.undecided.len()
            ));
            Ok(rep.ok())
        }
        Verb::Saturation { example: e } => {
            let e = example(e)?;
            let within = closed_sample(cli.size.unwrap_or(9));
            let members: Vec<_> = within.iter().filter(|m| oracle_membership(e, m, fuel).member).cloned().collect();
            let rep = saturation_check(&members, &within, rel, cli.depth.unwrap_or(3));
            for (m, n) in &rep.violations {
                w(out, format!("{m}\tviolation\treduces to member {n}"));
            }
            w(out, format!(
                "# {e}: {} members, {} terms scanned, {} violations, lift over intersection {}",
                members.len(),
                within.len(),
                rep.violations.len(),
                if rep.lift_intersection_ok { "holds" } else { "fails" }
            ));
            Ok(rep.ok())
        }
        Verb::Props => {
            let outcomes = props::run_all(cli.size.unwrap_or(5), cli.seed, cli.depth.unwrap_or(3));
            for p in &outcomes {
                report_prop(out, p);
            }
            Ok(outcomes.iter().all(|p| p.ok()))
        }
    }
}

fn transformed(out: Out, r: crate::error::Result<crate::deriv::Derivation>) -> std::result::Result<bool, Fail> {
    match r {
        Ok(d) => {
            let j = check_derivation(&d).expect("transformers return checked derivations");
            let _ = writeln!(out, "{j}");
            let _ = writeln!(out, "{d}");
            Ok(true)
        }
        Err(e @ (Error::Precondition(_) | Error::TypeMismatch(_))) => Err(Fail::Input(e)),
        Err(e) => Err(Fail::Negative(format!("{}: {e}", e.kind()))),
    }
}

fn report_prop(out: Out, p: &props::PropOutcome) {
    let _ = writeln!(out, "{}\t{}\t{} cases, {} failures", p.name, if p.ok() { "pass" } else { "FAIL" }, p.cases, p.failed);
    for f in &p.failures {
        let _ = writeln!(out, "  {f}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let mut v = vec!["ikc"];
        v.extend_from_slice(args);
        let code = run(v, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn subtype_verdicts() {
        assert_eq!(go(&["subtype", "(^ a b)", "a"]).0, 0);
        assert_eq!(go(&["subtype", "a", "(^ a b)"]).0, 1);
        assert_eq!(go(&["subtype", "(^ a", "a"]).0, 2);
    }

    #[test]
    fn eta_counterexample() {
        let (code, out) = go(&["typecheck", "(lam y [] (lam x [] (app y[] x[])))", "--env", "()", "--type", "(-> a a)"]);
        assert_eq!(code, 1);
        assert!(out.contains("RefutedByGeneration"), "{out}");
        let (code, out) = go(&["typecheck", "(lam y [] y[])", "--type", "(-> a a)"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn reduction_verbs() {
        let (code, out) = go(&["nf", "(app (lam y [] y[]) (lam z [] z[]))"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "(lam z [] z[])");
        let (code, out) = go(&["equiv", "--rel", "betaeta", "(lam y [] y[])", "(lam y [] (lam x [] (app y[] x[])))"]);
        assert_eq!(code, 0, "{out}");
        let (code, _) = go(&["nf", "--fuel", "5", "(app (lam x [] (app x[] x[])) (lam x [] (app x[] x[])))"]);
        assert_eq!(code, 1);
        assert_eq!(go(&["reduce", "--rel", "nope", "x[]"]).0, 2);
    }

    #[test]
    fn oracle_and_usage() {
        assert_eq!(go(&["oracle", "D", "(lam y [] (app y[] y[]))"]).0, 0);
        assert_eq!(go(&["oracle", "D", "(lam y [] y[])"]).0, 1);
        assert_eq!(go(&["oracle", "Bogus", "(lam y [] y[])"]).0, 2);
        let (code, out) = go(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(out.contains("deriv :="));
    }

    #[test]
    fn derivation_verbs() {
        let d = "(arrI y [] a (ax y a))";
        let (code, out) = go(&["check-deriv", d]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "(judg (lam y [] y[]) () (-> a a))");
        assert_eq!(go(&["soundness", d, "Id0"]).0, 0);
        assert_eq!(go(&["soundness", d, "D"]).0, 2);
        let (code, out) = go(&["expand", d, "(app (lam z [] z[]) (lam y [] y[]))"]);
        assert_eq!(code, 0, "{out}");
        let (code, out) = go(&["check-deriv", "(arrE (ax y a) (ax y a))"]);
        assert_eq!(code, 1);
        assert!(out.contains("RuleError"), "{out}");
    }
}
