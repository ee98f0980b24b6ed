//! Command-line front end. `dispatch` parses arguments, runs one command and returns the
//! exit code: 0 for success or an affirmative verdict, 1 for a negative verdict, 2 for
//! usage and input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::automata::{contract_b, eval, CostAutomaton, Polarity};
use crate::bounded::{bounded_onthefly, run_semigroup_closure, Verdict, CLOSURE_LIMIT};
use crate::error::{Error, Result};
use crate::eval::{sem_inf, sem_sup};
use crate::format::{
    parse_automaton, parse_formula_file, parse_semigroup, serialize_automaton, serialize_semigroup, Expect,
};
use crate::formula::{Formula, Logic};
use crate::minimize::{is_aperiodic, syntactic_quotient, Aperiodicity};
use crate::semigroup::{classify, recognize, Expr, Recognizer};
use crate::translate::{ltl_to_b, nltl_to_s};
use crate::word::{Alphabet, Word};

#[derive(Parser, Debug)]
#[command(name = "costltl", version, about = "Cost LTL on finite words: evaluation, automata, boundedness, semigroups")]
pub struct Cli {
    /// Print bare results only.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Letters of the alphabet, e.g. `ab`.
    #[arg(long)]
    alphabet: String,
    #[arg(short = 'f', long = "formula")]
    formula: String,
}

impl FormulaArgs {
    fn load(&self) -> Result<Formula> {
        Formula::parse(&self.formula, &Alphabet::new(&self.alphabet)?)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Onthefly,
    Closure,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value of a formula on a word (inf semantics for U#, sup semantics for R#).
    Eval {
        #[command(flatten)]
        f: FormulaArgs,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Value of an automaton file on a word.
    EvalAut {
        #[arg(short = 'a', long = "automaton")]
        automaton: PathBuf,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Translate a U# formula to a B automaton.
    CompileB {
        #[command(flatten)]
        f: FormulaArgs,
        /// Keep one action per counter and report the constant K.
        #[arg(long)]
        contract: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Translate to an S automaton: the dual of a U# formula, or an R# formula with --nltl.
    CompileS {
        #[command(flatten)]
        f: FormulaArgs,
        #[arg(long)]
        nltl: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Decide boundedness of a U# formula, or of an S automaton given with -a.
    Bounded {
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(short = 'f', long = "formula", conflicts_with = "automaton")]
        formula: Option<String>,
        #[arg(short = 'a', long = "automaton")]
        automaton: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "onthefly")]
        method: MethodArg,
    },
    /// Stabilization semigroup files.
    Semigroup {
        #[command(subcommand)]
        action: SemigroupCommand,
    },
    /// Minimal quotient of a recognizer.
    Minimize {
        #[arg(short = 's', long = "semigroup")]
        semigroup: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Aperiodicity of a semigroup.
    Aperiodic {
        #[arg(short = 's', long = "semigroup")]
        semigroup: PathBuf,
    },
    /// Whether a recognizer's cost function is definable by a U# formula.
    Definable {
        #[arg(short = 's', long = "semigroup", conflicts_with = "formula")]
        semigroup: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(short = 'f', long = "formula")]
        formula: Option<String>,
    },
    /// Check every fixture in a directory and print a summary table.
    Corpus { dir: PathBuf },
}

#[derive(Subcommand, Debug)]
enum SemigroupCommand {
    /// Validate the axioms and, if present, the recognizer.
    Check {
        #[arg(short = 's', long = "semigroup")]
        semigroup: PathBuf,
    },
    /// Value of the recognized function on a nonempty word.
    Recognize {
        #[arg(short = 's', long = "semigroup")]
        semigroup: PathBuf,
        #[arg(short = 'w', long = "word")]
        word: String,
        #[arg(long)]
        height: Option<usize>,
    },
    /// Whether an ω♯-expression keeps values bounded.
    Classify {
        #[arg(short = 's', long = "semigroup")]
        semigroup: PathBuf,
        #[arg(short = 'e', long = "expr")]
        expr: String,
    },
}

/// Exit code and report.
struct Outcome {
    code: i32,
    text: String,
}

fn ok(text: impl Into<String>) -> Outcome {
    Outcome { code: 0, text: text.into() }
}

fn verdict(yes: bool, text: impl Into<String>) -> Outcome {
    Outcome { code: if yes { 0 } else { 1 }, text: text.into() }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))
}

fn write_or_return(output: &Option<PathBuf>, text: String) -> Result<Outcome> {
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", p.display())))?;
            Ok(ok(format!("wrote {}", p.display())))
        }
        None => Ok(ok(text.trim_end().to_string())),
    }
}

fn load_recognizer(path: &Path) -> Result<Recognizer> {
    parse_semigroup(&read(path)?)?
        .recognizer
        .ok_or_else(|| Error::Domain(format!("{} has no recognizer block", path.display())))
}

fn decide(aut: &CostAutomaton, method: MethodArg, porcelain: bool) -> Result<Outcome> {
    let fly = || bounded_onthefly(aut);
    let closure = || run_semigroup_closure(aut, CLOSURE_LIMIT);
    let (v, detail) = match method {
        MethodArg::Onthefly => {
            let r = fly()?;
            let d = format!("visited {} frame entries", r.visited);
            (r.verdict, d)
        }
        MethodArg::Closure => {
            let r = closure()?;
            let d = format!("{} run-semigroup elements", r.elements.len());
            (r.verdict, d)
        }
        MethodArg::Both => {
            let (a, b) = (fly()?, closure()?);
            if a.verdict.is_bounded() != b.verdict.is_bounded() {
                return Err(Error::Domain(format!(
                    "methods disagree: on-the-fly says {}, closure says {}",
                    a.verdict, b.verdict
                )));
            }
            (a.verdict, format!("both methods agree ({} elements)", b.elements.len()))
        }
    };
    let mut text = v.to_string();
    if !porcelain {
        if let Verdict::Unbounded(Some(w)) = &v {
            text += &format!("\nwitness: {w}");
        }
        text += &format!("\n{detail}");
    }
    Ok(verdict(v.is_bounded(), text))
}

fn run(cli: Cli) -> Result<Outcome> {
    let porcelain = cli.porcelain;
    match cli.command {
        Command::Eval { f, word } => {
            let phi = f.load()?;
            let u = Word::parse(phi.alphabet(), &word)?;
            let v = match phi.logic() {
                Logic::Nltl => sem_sup(&phi, &u),
                _ => sem_inf(&phi, &u),
            };
            Ok(ok(v.to_string()))
        }
        Command::EvalAut { automaton, word } => {
            let aut = parse_automaton(&read(&automaton)?)?;
            let u = Word::parse(&aut.alphabet, &word)?;
            Ok(ok(eval(&aut, &u)?.to_string()))
        }
        Command::CompileB { f, contract, output } => {
            let aut = ltl_to_b(&f.load()?)?;
            let text = if contract {
                let (c, k) = contract_b(&aut)?;
                format!("# K {k}\n{}", serialize_automaton(&c))
            } else {
                serialize_automaton(&aut)
            };
            write_or_return(&output, text)
        }
        Command::CompileS { f, nltl, output } => {
            let phi = f.load()?;
            let aut = if nltl { nltl_to_s(&phi)? } else { nltl_to_s(&phi.dualize()?)? };
            write_or_return(&output, serialize_automaton(&aut))
        }
        Command::Bounded { alphabet, formula, automaton, method } => {
            let aut = match (formula, automaton) {
                (Some(f), None) => {
                    let a = alphabet.ok_or_else(|| Error::Domain("--alphabet is required with -f".into()))?;
                    let phi = Formula::parse(&f, &Alphabet::new(&a)?)?;
                    nltl_to_s(&phi.dualize()?)?
                }
                (None, Some(p)) => parse_automaton(&read(&p)?)?,
                _ => return Err(Error::Domain("give exactly one of -f and -a".into())),
            };
            decide(&aut, method, porcelain)
        }
        Command::Semigroup { action } => match action {
            SemigroupCommand::Check { semigroup } => {
                let file = parse_semigroup(&read(&semigroup)?)?;
                let problems = file.semigroup.validate_axioms();
                if problems.is_empty() {
                    Ok(ok("OK"))
                } else {
                    Ok(verdict(false, problems.join("\n")))
                }
            }
            SemigroupCommand::Recognize { semigroup, word, height } => {
                let mut rec = load_recognizer(&semigroup)?;
                if let Some(h) = height {
                    rec.height = h;
                }
                let u = Word::parse(&rec.alphabet, &word)?;
                Ok(ok(recognize(&rec, &u)?.to_string()))
            }
            SemigroupCommand::Classify { semigroup, expr } => {
                let rec = load_recognizer(&semigroup)?;
                Ok(ok(classify(&rec, &Expr::parse(&expr)?)?.to_string()))
            }
        },
        Command::Minimize { semigroup, output } => {
            let q = syntactic_quotient(&load_recognizer(&semigroup)?)?;
            let rec = &q.recognizer;
            write_or_return(&output, serialize_semigroup(&rec.semigroup, Some(rec)))
        }
        Command::Aperiodic { semigroup } => {
            let sg = parse_semigroup(&read(&semigroup)?)?.semigroup;
            Ok(match is_aperiodic(&sg) {
                Aperiodicity::Aperiodic(_) if porcelain => verdict(true, "aperiodic"),
                Aperiodicity::Aperiodic(k) => verdict(true, format!("aperiodic\nindex {k}")),
                Aperiodicity::Periodic(_) if porcelain => verdict(false, "periodic"),
                Aperiodicity::Periodic(x) => verdict(false, format!("periodic\nwitness {}", sg.names[x])),
            })
        }
        Command::Definable { semigroup, alphabet, formula } => {
            let rec = match (semigroup, formula) {
                (Some(p), None) => load_recognizer(&p)?,
                (None, Some(f)) => {
                    let a = alphabet.ok_or_else(|| Error::Domain("--alphabet is required with -f".into()))?;
                    let phi = Formula::parse(&f, &Alphabet::new(&a)?)?;
                    let aut = nltl_to_s(&phi.dualize()?)?;
                    run_semigroup_closure(&aut, CLOSURE_LIMIT)?.to_recognizer(&aut)?
                }
                _ => return Err(Error::Domain("give exactly one of -s and -f".into())),
            };
            let q = syntactic_quotient(&rec)?;
            let sg = &q.recognizer.semigroup;
            let yes = matches!(is_aperiodic(sg), Aperiodicity::Aperiodic(_));
            let mut text = if yes { "definable".to_string() } else { "not definable".to_string() };
            if !porcelain {
                text += &format!("\nminimal quotient has {} elements", sg.len());
            }
            Ok(verdict(yes, text))
        }
        Command::Corpus { dir } => corpus(&dir),
    }
}

struct Row {
    file: String,
    case: String,
    result: String,
    pass: bool,
}

fn corpus(dir: &Path) -> Result<Outcome> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Domain(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    for p in &paths {
        let file = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = read(p)?;
        let row = |case: &str, result: String, pass: bool| Row { file: file.clone(), case: case.into(), result, pass };
        match p.extension().and_then(|e| e.to_str()) {
            Some("ltl") => match parse_formula_file(&text) {
                Err(e) => rows.push(row("parse", e.to_string(), false)),
                Ok(ff) => {
                    for entry in &ff.entries {
                        let res = Formula::parse(&entry.text, &ff.alphabet)
                            .and_then(|phi| nltl_to_s(&phi.dualize()?))
                            .and_then(|aut| Ok((bounded_onthefly(&aut)?, run_semigroup_closure(&aut, CLOSURE_LIMIT)?)));
                        match res {
                            Err(e) => rows.push(row(&entry.text, e.to_string(), false)),
                            Ok((a, b)) => {
                                let agree = a.verdict.is_bounded() == b.verdict.is_bounded();
                                let expected = entry.expect.map_or(true, |x| (x == Expect::Bounded) == a.verdict.is_bounded());
                                rows.push(row(&entry.text, a.verdict.to_string(), agree && expected));
                            }
                        }
                    }
                }
            },
            Some("aut") => match parse_automaton(&text) {
                Err(e) => rows.push(row("parse", e.to_string(), false)),
                Ok(aut) => {
                    rows.push(row("round-trip", String::new(), serialize_automaton(&aut) == text));
                    if aut.polarity == Polarity::S {
                        let a = bounded_onthefly(&aut)?;
                        let b = run_semigroup_closure(&aut, CLOSURE_LIMIT)?;
                        let agree = a.verdict.is_bounded() == b.verdict.is_bounded();
                        rows.push(row("bounded", a.verdict.to_string(), agree));
                    }
                }
            },
            Some("sg") => match parse_semigroup(&text) {
                Err(e) => rows.push(row("parse", e.to_string(), false)),
                Ok(sf) => {
                    let back = serialize_semigroup(&sf.semigroup, sf.recognizer.as_ref());
                    rows.push(row("round-trip", String::new(), back == text));
                    let problems = sf.semigroup.validate_axioms();
                    rows.push(row("axioms", format!("{} elements", sf.semigroup.len()), problems.is_empty()));
                    if let Some(rec) = &sf.recognizer {
                        match syntactic_quotient(rec) {
                            Ok(q) => rows.push(row("minimize", format!("{} classes", q.classes.len()), true)),
                            Err(e) => rows.push(row("minimize", e.to_string(), false)),
                        }
                    }
                }
            },
            _ => {}
        }
    }
    let width = |f: fn(&Row) -> &str| rows.iter().map(|r| f(r).chars().count()).max().unwrap_or(0);
    let (wf, wc, wr) = (width(|r| &r.file), width(|r| &r.case), width(|r| &r.result));
    let mut text = String::new();
    for r in &rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        text += &format!("{:wf$}  {:wc$}  {:wr$}  {status}\n", r.file, r.case, r.result);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    text += &format!("{} checks, {} failed", rows.len(), failed);
    Ok(verdict(failed == 0, text))
}

/// Runs one command line, writing the report to `out` and errors to `err`.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match run(cli) {
        Ok(o) => {
            let _ = writeln!(out, "{}", o.text);
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["costltl"];
        full.extend_from_slice(args);
        let code = dispatch(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_counts_letters() {
        let (code, out, _) = call(&["eval", "--alphabet", "ab", "-f", "!a U# END", "-w", "abab"]);
        assert_eq!((code, out.as_str()), (0, "2\n"));
    }

    #[test]
    fn bounded_exit_codes() {
        let (code, out, _) =
            call(&["--porcelain", "bounded", "--alphabet", "ab", "-f", "(a | X a | X F a) U# END"]);
        assert_eq!((code, out.as_str()), (1, "unbounded\n"));
        let (code, out, _) = call(&[
            "bounded",
            "--alphabet",
            "ab",
            "-f",
            "(b | X a | X F a) U# END",
            "--method",
            "both",
            "--porcelain",
        ]);
        assert_eq!((code, out.as_str()), (0, "bounded\n"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["eval", "--alphabet", "ab", "-f", "a U", "-w", "a"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["eval", "--alphabet", "ab", "-f", "a", "-w", "c"]).0, 2);
        assert_eq!(call(&["bounded", "-f", "a"]).0, 2);
    }

    #[test]
    fn compiled_automata_parse_back() {
        let (code, out, _) = call(&["compile-b", "--alphabet", "ab", "-f", "!a U# END", "--contract"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# K 1\n"));
        assert!(parse_automaton(&out).is_ok());
        let (code, out, _) = call(&["compile-s", "--alphabet", "ab", "-f", "(a U# b) | X a"]);
        assert_eq!(code, 0);
        assert_eq!(parse_automaton(&out).unwrap().polarity, Polarity::S);
    }

    #[test]
    fn formula_definability() {
        let (code, out, _) = call(&["--porcelain", "definable", "--alphabet", "ab", "-f", "!a U# END"]);
        assert_eq!((code, out.as_str()), (0, "definable\n"));
    }
}
