use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use glue_core::error::NormError;
use glue_core::nbe::{def_eq, nf_typed};
use glue_core::normal::readback_nf;
use glue_core::oracle::{naive_nf_traced, oracle_eq};
use glue_core::signature::{parse_ctx, parse_signature, Ctx, Signature};
use glue_core::suite::{self, SuiteConfig};
use glue_core::syntax::{infer_tm, parse_tm, Tm};

/// The signature used when `fuzz` is given no `-s`.
const DEFAULT_SIGNATURE: &str = "(signature (sorts a b) (ops (c () a) (f (a) a) (h (a b) b)))";

#[derive(Parser)]
#[command(name = "glue", version, about = "Normalize and compare terms of a free λ-theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a term.
    Check(Single),
    /// Print the η-long β-normal form of a term.
    Norm(Single),
    /// Decide definitional equality by normalization (exit 0 if equal, 1 if not).
    Eq(Pair),
    /// Decide definitional equality by rewriting (exit 0 if equal, 1 if not).
    OracleEq(Pair),
    /// Run the property suites on a random corpus.
    Fuzz(Fuzz),
}

#[derive(Args)]
struct Common {
    /// Signature file.
    #[arg(short = 's', long = "sig")]
    sig: PathBuf,
    /// Context, a list of types such as "(a (arr a b))".
    #[arg(short = 'c', long = "ctx", default_value = "()")]
    ctx: String,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Single {
    #[command(flatten)]
    common: Common,
    /// The term.
    #[arg(short = 't', long = "term")]
    term: String,
}

#[derive(Args)]
struct Pair {
    #[command(flatten)]
    common: Common,
    /// The first term (also accepted as -t1).
    #[arg(long = "t1")]
    t1: String,
    /// The second term (also accepted as -t2).
    #[arg(long = "t2")]
    t2: String,
    /// Include the rewrite steps of both terms.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct Fuzz {
    /// Signature file; a built-in two-sort signature if omitted.
    #[arg(short = 's', long = "sig")]
    sig: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus size.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long = "max-size", default_value_t = 30)]
    max_size: usize,
    #[arg(long = "max-depth", default_value_t = 3)]
    max_depth: usize,
    #[arg(long)]
    json: bool,
}

/// How a command failed: bad input (exit 2) or a broken invariant (exit 3).
enum Failure {
    Input(String),
    Internal(String),
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Failure {
        match e {
            NormError::Type(e) => Failure::Input(format!("type error: {e}")),
            e => Failure::Internal(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    // `-t1` and `-t2` are spelled with one dash in the documentation
    let args = std::env::args().map(|a| match a.as_str() {
        "-t1" => "--t1".to_owned(),
        "-t2" => "--t2".to_owned(),
        _ => a,
    });
    let cli = Cli::parse_from(args);
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Check(s) => {
            let (sig, ctx) = load(&s.common)?;
            let t = term("term", &s.term)?;
            let ty = infer_tm(&sig, &ctx, &t).map_err(|e| Failure::Input(format!("type error: {e}")))?;
            if s.common.json {
                println!("{}", json!({ "type": ty }));
            } else {
                println!("{ty}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Norm(s) => {
            let (sig, ctx) = load(&s.common)?;
            let t = term("term", &s.term)?;
            let (n, ty) = nf_typed(&sig, &ctx, &t)?;
            let rb = readback_nf(&n);
            if s.common.json {
                println!("{}", json!({ "type": ty, "nf": n, "term": rb.to_string() }));
            } else {
                println!("{rb}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eq(p) => {
            let (sig, ctx) = load(&p.common)?;
            let (t1, t2) = (term("t1", &p.t1)?, term("t2", &p.t2)?);
            let by_nf = def_eq(&sig, &ctx, &t1, &t2)?;
            let by_oracle = oracle_eq(&sig, &ctx, &t1, &t2)?;
            if by_nf != by_oracle {
                return Err(Failure::Internal(format!(
                    "normalization says {by_nf} but rewriting says {by_oracle}"
                )));
            }
            answer(by_nf, p.common.json, None)
        }
        Command::OracleEq(p) => {
            let (sig, ctx) = load(&p.common)?;
            let (t1, t2) = (term("t1", &p.t1)?, term("t2", &p.t2)?);
            let equal = oracle_eq(&sig, &ctx, &t1, &t2)?;
            if equal != def_eq(&sig, &ctx, &t1, &t2)? {
                return Err(Failure::Internal(format!(
                    "rewriting says {equal} but normalization disagrees"
                )));
            }
            let traces = if p.trace {
                Some(json!([naive_nf_traced(&sig, &ctx, &t1)?, naive_nf_traced(&sig, &ctx, &t2)?]))
            } else {
                None
            };
            answer(equal, p.common.json, traces)
        }
        Command::Fuzz(f) => {
            let src = match &f.sig {
                Some(path) => read(path)?,
                None => DEFAULT_SIGNATURE.to_owned(),
            };
            let sig = signature(f.sig.as_ref(), &src)?;
            if f.max_size == 0 || f.max_depth == 0 {
                return Err(Failure::Input("--max-size and --max-depth must be positive".into()));
            }
            let cfg = SuiteConfig {
                count: f.count,
                max_size: f.max_size,
                max_depth: f.max_depth,
                ..SuiteConfig::new(sig, f.seed)
            };
            let report = suite::run(&cfg);
            if f.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                println!("{report}");
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn answer(equal: bool, as_json: bool, traces: Option<serde_json::Value>) -> Result<ExitCode, Failure> {
    if as_json {
        let mut out = json!({ "equal": equal });
        if let Some(t) = traces {
            out["traces"] = t;
        }
        println!("{out}");
    } else {
        if let Some(t) = traces {
            eprintln!("{}", serde_json::to_string_pretty(&t).expect("traces serialize"));
        }
        println!("{equal}");
    }
    Ok(if equal { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn signature(path: Option<&PathBuf>, src: &str) -> Result<Signature, Failure> {
    parse_signature(src).map_err(|e| {
        let file = path.map_or("<built-in>".to_owned(), |p| p.display().to_string());
        Failure::Input(format!("{file}:{e}"))
    })
}

fn load(c: &Common) -> Result<(Signature, Ctx), Failure> {
    let sig = signature(Some(&c.sig), &read(&c.sig)?)?;
    let ctx = parse_ctx(&c.ctx).map_err(|e| Failure::Input(format!("context:{e}")))?;
    if let Some(bad) = ctx.iter().find(|ty| !sig.ty_well_formed(ty)) {
        return Err(Failure::Input(format!("context: type {bad} uses an undeclared sort")));
    }
    Ok((sig, ctx))
}

fn term(what: &str, src: &str) -> Result<Tm, Failure> {
    parse_tm(src).map_err(|e| Failure::Input(format!("{what}:{e}")))
}
