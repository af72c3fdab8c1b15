use std::io::{self, Read};
use std::path::Path as FsPath;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use shuffle_core::analysis::{
    betav_pv_oracle, betav_solv_oracle, halts, head_v_eval, obs_equiv_sample, potentially_valuable, solvable, Report,
};
use shuffle_core::harness::{reduction_graph, run_property_jobs, summary_table, PropertyId, TermGen};
use shuffle_core::reduction::{head_betav_run, normalize, RelationId, RunEnd, TraceError};
use shuffle_core::standardization::{
    check_standard, check_standard_head, check_standard_inner, check_strict_standard, normalize_strict,
};
use shuffle_core::syntax::{parse, print_with, Term};
use shuffle_core::{Outcome, Strategy, Trace};

#[derive(Parser)]
#[command(name = "shuffle", version, about = "Call-by-value λ-calculus with σ-rules")]
struct Cli {
    /// Print λ instead of a backslash.
    #[arg(long, global = true)]
    unicode: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term and print it back in canonical form.
    Parse {
        /// Term text, a file holding it, or `-` for stdin.
        term: String,
        #[arg(long)]
        json: bool,
    },
    /// Reduce a term with a strategy.
    Eval {
        term: String,
        #[arg(long, value_enum, default_value_t = StrategyName::HeadBetav)]
        strategy: StrategyName,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print only the trace, in the format read by `check`.
        #[arg(long)]
        emit_trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Annotate a sequence of terms, one per line, with rules and paths.
    Trace { file: String },
    /// Check a trace file.
    Check {
        file: String,
        #[arg(long, value_enum, default_value_t = Kind::TraceValid)]
        kind: Kind,
    },
    /// Build the graph of terms reachable from a term.
    Graph {
        term: String,
        /// Relation names, comma separated for a union.
        #[arg(long, default_value = "v")]
        rel: String,
        #[arg(long, default_value_t = 200)]
        cap: usize,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Semi-decide halting, potential valuability, solvability and friends.
    /// Prints one JSON line per term and query.
    Analyze {
        /// Terms, or files with one term per line.
        #[arg(required = true)]
        terms: Vec<String>,
        #[arg(long, value_enum, default_value_t = Query::All)]
        query: Query,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Second term for `obs-equiv`.
        #[arg(long)]
        other: Option<String>,
        #[arg(long, default_value_t = 5)]
        val_size: usize,
        #[arg(long, default_value_t = 2)]
        arg_count: usize,
        #[arg(long, default_value_t = 4)]
        arg_size: usize,
        #[arg(long, default_value_t = 200)]
        contexts: usize,
        #[arg(long, default_value_t = 5)]
        context_size: usize,
    },
    /// Run properties of the catalog over a term corpus.
    Fuzz {
        #[arg(long, value_parser = parse_property, conflicts_with = "all", required_unless_present = "all")]
        property: Vec<PropertyId>,
        #[arg(long)]
        all: bool,
        /// Override the corpus size bound.
        #[arg(long)]
        max_size: Option<usize>,
        /// Sample random terms with this seed instead of enumerating.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 2000)]
        fuel: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// JSON lines instead of the summary table.
        #[arg(long)]
        json: bool,
    },
}

fn parse_property(s: &str) -> Result<PropertyId, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    HeadBetav,
    HeadV,
    StrictStandard,
    Weak,
    Stratified,
    LeftmostV,
    ExhaustiveV,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    StandardHead,
    Strict,
    Inner,
    TraceValid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Query {
    Halts,
    HeadV,
    Pv,
    Solvable,
    PvOracle,
    SolvOracle,
    ObsEquiv,
    All,
}

/// An argument is read from a file when it names one, from stdin when it
/// is `-`, and taken literally otherwise.
fn read_input(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    if FsPath::new(arg).is_file() {
        return std::fs::read_to_string(arg).with_context(|| format!("reading {}", arg));
    }
    Ok(arg.to_string())
}

fn read_term(arg: &str) -> Result<Term> {
    let text = read_input(arg)?;
    parse(text.trim()).map_err(|e| anyhow!("{}: {}", arg, e))
}

/// The outer error is unreadable input; the inner one is a term list
/// whose neighbours are not related by a step.
fn read_trace(arg: &str) -> Result<Result<Trace, TraceError>> {
    let text = read_input(arg)?;
    let is_trace = text.lines().any(|l| l.trim_start().starts_with("term:"));
    if is_trace {
        return Trace::parse_text(&text).map(Ok).map_err(|e| anyhow!("{}", e));
    }
    let terms = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse(l).map_err(|e| anyhow!("'{}': {}", l, e)))
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() {
        bail!("{}: no terms", arg);
    }
    Ok(Trace::from_terms(&terms))
}

/// Failures that are answers rather than errors: exit status 1.
struct Negative;

fn main() -> ExitCode {
    // exit quietly when the reader of a pipe goes away
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Negative)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Result<(), Negative>> {
    let u = cli.unicode;
    match cli.cmd {
        Cmd::Parse { term, json } => {
            let t = read_term(&term)?;
            if json {
                let fv: Vec<String> = t.free_vars().iter().map(|x| x.to_string()).collect();
                let v = json!({
                    "term": print_with(&t, u),
                    "size": t.size(),
                    "free_vars": fv,
                    "value": t.is_value(),
                    "closed": t.is_closed(),
                });
                println!("{}", v);
            } else {
                println!("{}", print_with(&t, u));
            }
        }
        Cmd::Eval { term, strategy, fuel, emit_trace, json } => {
            let t = read_term(&term)?;
            let outcome = eval(&t, strategy, fuel);
            let trace = outcome.trace();
            if json {
                let (kind, last) = describe(&outcome);
                let v = json!({
                    "outcome": kind,
                    "term": last.map(|x| print_with(x, u)),
                    "steps": trace.len(),
                    "trace": trace.to_text(u),
                });
                println!("{}", v);
            } else {
                print!("{}", trace.to_text(u));
                if !emit_trace {
                    match &outcome {
                        Outcome::NormalForm { term, .. } => println!("# normal form: {}", print_with(term, u)),
                        Outcome::CycleDetected { entry, .. } => println!("# cycle at: {}", print_with(entry, u)),
                        Outcome::FuelExhausted { trace } => println!("# fuel exhausted after {} steps", trace.len()),
                    }
                }
            }
        }
        Cmd::Trace { file } => {
            let tr = read_trace(&file)?.map_err(|e| anyhow!("{}", e))?;
            print!("{}", tr.to_text(u));
        }
        Cmd::Check { file, kind } => {
            let tr = read_trace(&file)?;
            if let Err(e) = tr.as_ref().map_err(Clone::clone).and_then(|t| t.validate()) {
                println!("INVALID: {}", e);
                return Ok(Err(Negative));
            }
            let tr = tr.expect("validated above");
            let verdict = match kind {
                Kind::TraceValid => {
                    println!("VALID");
                    return Ok(Ok(()));
                }
                Kind::Standard => check_standard(&tr),
                Kind::StandardHead => check_standard_head(&tr),
                Kind::Strict => check_strict_standard(&tr),
                Kind::Inner => check_standard_inner(&tr),
            }
            .map_err(|e| anyhow!("{}", e))?;
            println!("{}", verdict);
            if !verdict.is_accepted() {
                return Ok(Err(Negative));
            }
        }
        Cmd::Graph { term, rel, cap, dot, json } => {
            let t = read_term(&term)?;
            let rels = rel
                .split(',')
                .map(|r| r.trim().parse::<RelationId>().map_err(|e| anyhow!("--rel: {}", e)))
                .collect::<Result<Vec<_>>>()?;
            let g = reduction_graph(&t, &rels, cap);
            if dot {
                print!("{}", g.to_dot(u));
            } else if json {
                println!("{}", g.to_json());
            } else {
                for (i, n) in g.nodes.iter().enumerate() {
                    println!("n{} {}", i, print_with(n, u));
                }
                for e in &g.edges {
                    let kind = if e.head { "head" } else { "internal" };
                    println!("n{} -> n{} {} @ {} ({})", e.from, e.to, e.rule, e.path, kind);
                }
                if g.truncated {
                    println!("# truncated at {} nodes", cap);
                }
            }
        }
        Cmd::Analyze { terms, query, fuel, other, val_size, arg_count, arg_size, contexts, context_size } => {
            let mut inputs = Vec::new();
            for a in &terms {
                if FsPath::new(a).is_file() {
                    for line in read_input(a)?.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                        inputs.push(parse(line).map_err(|e| anyhow!("'{}': {}", line, e))?);
                    }
                } else {
                    inputs.push(read_term(a)?);
                }
            }
            let other = other.as_deref().map(read_term).transpose()?;
            if query == Query::ObsEquiv && other.is_none() {
                bail!("--query obs-equiv needs --other");
            }
            let mut status = Ok(());
            for t in &inputs {
                let emit = |q: &str, v| println!("{}", serde_json::to_string(&Report::new(t, q, &v)).unwrap());
                let want = |q: Query| query == q || query == Query::All;
                if want(Query::Halts) {
                    emit("halts", halts(t, fuel));
                }
                if want(Query::HeadV) {
                    match head_v_eval(t, fuel) {
                        Ok(v) => emit("head-v", v),
                        Err(e) => {
                            eprintln!("consistency error on {}: {}", t, e);
                            status = Err(Negative);
                        }
                    }
                }
                if want(Query::Pv) {
                    emit("potentially-valuable", potentially_valuable(t, fuel));
                }
                if want(Query::Solvable) {
                    emit("solvable", solvable(t, fuel));
                }
                if want(Query::PvOracle) {
                    emit("betav-pv-oracle", betav_pv_oracle(t, val_size, fuel.min(2000)));
                }
                if want(Query::SolvOracle) {
                    emit("betav-solv-oracle", betav_solv_oracle(t, arg_count, arg_size, fuel.min(2000)));
                }
                if let Some(n) = &other {
                    if want(Query::ObsEquiv) {
                        emit("obs-equiv", obs_equiv_sample(t, n, contexts, context_size, fuel.min(2000)));
                    }
                }
            }
            return Ok(status);
        }
        Cmd::Fuzz { property, all, max_size, seed, count, fuel, jobs, json } => {
            let ids: Vec<PropertyId> = if all { PropertyId::ALL.to_vec() } else { property };
            let jobs = if jobs == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { jobs };
            let mut reports = Vec::new();
            for id in ids {
                let mut gen = id.default_gen();
                if let Some(m) = max_size {
                    gen.max_size = m;
                }
                if let Some(s) = seed {
                    gen = TermGen { mode: shuffle_core::harness::GenMode::Random { seed: s, count }, ..gen };
                }
                let r = run_property_jobs(id, &gen, fuel, jobs).map_err(|e| anyhow!("{}", e))?;
                if json {
                    println!("{}", r.to_json_line());
                }
                reports.push(r);
            }
            if !json {
                print!("{}", summary_table(&reports));
                for r in reports.iter().filter(|r| !r.passed()) {
                    for f in &r.failures {
                        println!("{}: {} :: {}", r.property, f.term, f.detail);
                    }
                }
            }
            if reports.iter().any(|r| !r.passed()) {
                return Ok(Err(Negative));
            }
        }
    }
    Ok(Ok(()))
}

fn eval(t: &Term, s: StrategyName, fuel: usize) -> Outcome {
    match s {
        StrategyName::HeadBetav => {
            let run = head_betav_run(t, fuel);
            match run.end {
                RunEnd::Normal => Outcome::NormalForm { term: run.trace.end().clone(), trace: run.trace },
                RunEnd::Cycle => Outcome::CycleDetected { entry: run.trace.end().clone(), trace: run.trace },
                RunEnd::Fuel => Outcome::FuelExhausted { trace: run.trace },
            }
        }
        StrategyName::HeadV => normalize(t, RelationId::HeadV, Strategy::Exhaustive, fuel),
        StrategyName::StrictStandard => normalize_strict(t, fuel),
        StrategyName::Weak => normalize(t, RelationId::Weak, Strategy::Leftmost, fuel),
        StrategyName::Stratified => normalize(t, RelationId::Stratified, Strategy::Leftmost, fuel),
        StrategyName::LeftmostV => normalize(t, RelationId::FULL_V, Strategy::Leftmost, fuel),
        StrategyName::ExhaustiveV => normalize(t, RelationId::FULL_V, Strategy::Exhaustive, fuel),
    }
}

fn describe(o: &Outcome) -> (&'static str, Option<&Term>) {
    match o {
        Outcome::NormalForm { term, .. } => ("normal-form", Some(term)),
        Outcome::CycleDetected { entry, .. } => ("cycle", Some(entry)),
        Outcome::FuelExhausted { .. } => ("fuel-exhausted", None),
    }
}
