//! `cqsj`: classify conjunctive queries, enumerate their answers with the
//! matching engine, check engines against the oracle, benchmark delay and
//! build gadget databases.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 inapplicable engine.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use cqsj_core::engines::{
    bench_delay, oracle_enumerate, open_engine, BenchError, DelayStats, EngineChoice, EngineError,
};
use cqsj_core::qmodel::{format_answer, parse_database, parse_query, serialize_database, AnswerTuple, Database, Query};
use cqsj_core::reductions::{encoding_trick, parse_graph, Gadget, ReductionError, Workload};
use cqsj_core::structure::classify;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cqsj", version, about = "Conjunctive queries with self-joins: classification and enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structural report and complexity verdicts of a query.
    Classify {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stream the answers of a query over a database.
    Enumerate {
        #[command(flatten)]
        run: RunArgs,
        /// Remove the duplicates a bespoke strategy may emit.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        dedup: bool,
        #[arg(long)]
        limit: Option<usize>,
        /// Print delay statistics (JSON) on stderr.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare an engine's answers with the oracle's.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
        /// Drop the engine's first answer (harness self-test).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Measure delay over generated databases of growing size.
    BenchDelay {
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value = "auto")]
        engine: EngineChoice,
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
        sizes: Vec<usize>,
        /// Database generator: uniform or loops.
        #[arg(long, default_value = "uniform")]
        gen: Workload,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Build a gadget database from a graph (or, for encoding-trick, from a
    /// database over the relabeled schema).
    Gadget {
        /// encoding-trick, triangle-untangle2, triangle-mirrorfig1,
        /// triangle-spike-q1 or utd-spike-q4.
        kind: String,
        #[arg(long)]
        input: PathBuf,
        /// The query, required by encoding-trick.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    db: PathBuf,
    /// auto, oracle, acyclic, untangle, mirror or bespoke:<id>.
    #[arg(long, default_value = "auto")]
    engine: EngineChoice,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn input(err: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, err: err.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::Inapplicable(_)
            | EngineError::NotAcyclic
            | EngineError::CyclicCore
            | EngineError::NotFull
            | EngineError::InvalidWitness(_) => 3,
            EngineError::WrongSchema(_) | EngineError::Structure(_) => 2,
            EngineError::CheaterViolation { .. } => 1,
        };
        Failure { code, err: e.into() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e)
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

fn load_query(path: &Path) -> Res<Query> {
    parse_query(&read(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::input)
}

fn load_db(path: &Path) -> Res<Database> {
    parse_database(&read(path)?)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::input)
}

/// Rejects databases whose relations clash in arity with the query.
fn check_schema(q: &Query, db: &Database) -> Res<()> {
    let have = db.schema();
    for (sym, arity) in q.schema() {
        if let Some(&a) = have.get(&sym) {
            if a != arity {
                return Err(Failure::input(anyhow!(
                    "relation {sym} has arity {a} in the database but {arity} in the query"
                )));
            }
        }
    }
    Ok(())
}

fn output(out: Option<&Path>) -> Res<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(Failure::input)?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn answer_json(a: &AnswerTuple) -> serde_json::Value {
    json!(a.values().iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

fn cmd_classify(query: &Path, as_json: bool) -> Res<()> {
    let q = load_query(query)?;
    let report = classify(&q);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

struct EnumerateOpts {
    dedup: bool,
    limit: Option<usize>,
    stats: bool,
    json: bool,
    out: Option<PathBuf>,
}

fn cmd_enumerate(run: &RunArgs, o: EnumerateOpts) -> Res<()> {
    let q = load_query(&run.query)?;
    let db = load_db(&run.db)?;
    check_schema(&q, &db)?;
    let opened = open_engine(&q, &db, run.engine, o.dedup)?;
    if let Some(w) = &opened.warning {
        eprintln!("warning: {w}");
    }
    let mut cur = opened.cursor;
    let pre = cur.preprocessing_ticks();
    let (mut last, mut max_gap, mut count) = (pre, 0, 0u64);
    let mut w = output(o.out.as_deref())?;
    let mut collected = Vec::new();
    while o.limit.is_none_or(|l| count < l as u64) {
        let Some(a) = cur.next_answer()? else {
            max_gap = max_gap.max(cur.ticks() - last);
            break;
        };
        let t = cur.ticks();
        max_gap = max_gap.max(t - last);
        last = t;
        count += 1;
        if o.json {
            collected.push(answer_json(&a));
        } else {
            writeln!(w, "{}", format_answer(&a))?;
        }
    }
    let stats = DelayStats { preprocessing_ticks: pre, max_gap, answers: count, wall_ms: 0 };
    if o.json {
        let mut doc = json!({ "engine": opened.engine.to_string(), "answers": collected });
        if o.stats {
            doc["stats"] = json!(stats);
        }
        writeln!(w, "{}", serde_json::to_string_pretty(&doc).expect("answers serialize"))?;
    } else if o.stats {
        eprintln!("{}", json!({ "engine": opened.engine.to_string(), "stats": stats }));
    }
    w.flush()?;
    Ok(())
}

fn cmd_verify(run: &RunArgs, as_json: bool, corrupt: bool) -> Res<bool> {
    let q = load_query(&run.query)?;
    let db = load_db(&run.db)?;
    check_schema(&q, &db)?;
    let opened = open_engine(&q, &db, run.engine, true)?;
    let engine = opened.engine.to_string();
    let mut got: Vec<AnswerTuple> = opened.cursor.collect::<Result<_, _>>()?;
    if corrupt && !got.is_empty() {
        got.remove(0);
    }
    let want = oracle_enumerate(&q, &db);
    let got_set: BTreeSet<AnswerTuple> = got.iter().cloned().collect();
    let duplicates = got.len() - got_set.len();
    let missing: Vec<&AnswerTuple> = want.difference(&got_set).collect();
    let extra: Vec<&AnswerTuple> = got_set.difference(&want).collect();
    let pass = missing.is_empty() && extra.is_empty() && duplicates == 0;
    if as_json {
        let doc = json!({
            "engine": engine,
            "pass": pass,
            "oracle_answers": want.len(),
            "engine_answers": got.len(),
            "duplicates": duplicates,
            "missing": missing.iter().map(|a| answer_json(a)).collect::<Vec<_>>(),
            "extra": extra.iter().map(|a| answer_json(a)).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        println!(
            "engine {engine}: {} answers, oracle: {} answers, duplicates: {duplicates}",
            got.len(),
            want.len()
        );
        for a in &missing {
            println!("- {}", format_answer(a));
        }
        for a in &extra {
            println!("+ {}", format_answer(a));
        }
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

fn cmd_bench(query: &Path, engine: EngineChoice, sizes: &[usize], gen: Workload, seed: u64, as_json: bool) -> Res<()> {
    let q = load_query(query)?;
    if sizes.is_empty() {
        return Err(Failure::input(anyhow!("--sizes needs at least one size")));
    }
    let report = bench_delay(&q, engine, sizes, gen, seed).map_err(|e| match e {
        BenchError::Generator(e) => Failure::input(e),
        BenchError::Engine(e) => e.into(),
    })?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    println!("engine: {}  generator: {}  seed: {}", report.engine, report.generator, report.seed);
    println!("{:>8} {:>14} {:>10} {:>10} {:>8}", "facts", "preprocessing", "max_gap", "answers", "wall_ms");
    for r in &report.rows {
        println!(
            "{:>8} {:>14} {:>10} {:>10} {:>8}",
            r.facts, r.stats.preprocessing_ticks, r.stats.max_gap, r.stats.answers, r.stats.wall_ms
        );
    }
    println!("verdict: {}", report.verdict);
    Ok(())
}

fn cmd_gadget(kind: &str, input: &Path, query: Option<&Path>, out: Option<&Path>, as_json: bool) -> Res<()> {
    let reduction = |e: ReductionError| Failure::input(e);
    let db = if kind == "encoding-trick" {
        let qpath = query.ok_or_else(|| Failure::input(anyhow!("encoding-trick needs --query")))?;
        let q = load_query(qpath)?;
        encoding_trick(&q, &load_db(input)?).map_err(reduction)?
    } else {
        let g = Gadget::from_id(kind).ok_or_else(|| Failure::input(anyhow!("unknown gadget kind {kind:?}")))?;
        let graph = parse_graph(&read(input)?).map_err(reduction)?;
        g.build(&graph).map_err(reduction)?
    };
    let mut w = output(out)?;
    write!(w, "{}", serialize_database(&db))?;
    w.flush()?;
    drop(w);
    if as_json {
        eprintln!("{}", json!({ "kind": kind, "facts": db.size() }));
    } else if out.is_some() {
        println!("{kind}: {} facts", db.size());
    } else {
        eprintln!("{kind}: {} facts", db.size());
    }
    Ok(())
}

fn run(cli: Cli) -> Res<bool> {
    match cli.command {
        Command::Classify { query, json } => cmd_classify(&query, json).map(|_| true),
        Command::Enumerate { run, dedup, limit, stats, json, out } => {
            cmd_enumerate(&run, EnumerateOpts { dedup, limit, stats, json, out }).map(|_| true)
        }
        Command::Verify { run, json, corrupt } => cmd_verify(&run, json, corrupt),
        Command::BenchDelay { query, engine, sizes, gen, seed, json } => {
            cmd_bench(&query, engine, &sizes, gen, seed, json).map(|_| true)
        }
        Command::Gadget { kind, input, query, out, json } => {
            cmd_gadget(&kind, &input, query.as_deref(), out.as_deref(), json).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
