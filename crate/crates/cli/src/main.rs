use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lsmart_core::ast::{indexify, ConstDef, Expr};
use lsmart_core::chain::{
    all_backed, all_consistent, check_invariant, gen_trace, run_scenario, ChainConfig, ChainState, Scenario, Trace,
    TraceConfig,
};
use lsmart_core::interp::{eval_closed, from_val};
use lsmart_core::kernel::{pretty_inductive, pretty_term};
use lsmart_core::programs::prelude;
use lsmart_core::soundness::{run_corpus, run_generated, GenConfig, DEFAULT_FUEL};
use lsmart_core::syntax::{load_json, load_source, parse_expr, pretty_expr, LoadError, Loaded};
use lsmart_core::translate::{decl_to_kernel, expr_to_term, translate_env};
use lsmart_core::with_stack;

#[derive(Parser)]
#[command(
    name = "lsmart",
    version,
    about = "Interpreter, kernel translation and chain simulator for a small contract language"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and load a module, reporting any ill-formed declaration.
    Check { file: PathBuf },
    /// Evaluate a definition applied to arguments and print the value.
    Run {
        file: PathBuf,
        #[arg(long)]
        entry: String,
        /// Arguments as source text, e.g. `"(CState 5z 7) 3"`.
        #[arg(long, default_value = "")]
        args: String,
        #[arg(long, env = "LSMART_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Print the kernel form of a definition, or of the whole module.
    Translate {
        file: PathBuf,
        #[arg(long)]
        entry: Option<String>,
    },
    /// Compare interpreter and kernel on a corpus and on generated programs.
    DiffEval {
        /// A corpus file or a directory of them.
        path: PathBuf,
        #[arg(long, env = "LSMART_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Number of generated programs to add.
        #[arg(long, default_value_t = 0)]
        gen: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        size: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a scenario file, or generated traces, checking the invariants.
    Chain {
        #[arg(required_unless_present = "generate", conflicts_with = "generate")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        generate: bool,
        /// Number of generated traces.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_blocks: usize,
        /// Deploy the faulty campaign instead.
        #[arg(long)]
        mutant: bool,
        /// Invariants to check (all by default).
        #[arg(long, value_enum)]
        invariant: Vec<Invariant>,
        /// Print each generated trace as JSON.
        #[arg(long)]
        dump: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Invariant {
    Consistent,
    Backed,
    Conservation,
}

impl Invariant {
    const ALL: [Invariant; 3] = [Invariant::Consistent, Invariant::Backed, Invariant::Conservation];

    fn name(self) -> &'static str {
        match self {
            Invariant::Consistent => "consistent_balance",
            Invariant::Backed => "cf_backed",
            Invariant::Conservation => "conservation",
        }
    }
}

enum Failure {
    /// Bad flags, unreadable or unparsable input.
    Usage(anyhow::Error),
    /// The input is fine but a check failed.
    Violation(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn violation(msg: impl Into<String>) -> Failure {
    Failure::Violation(anyhow!(msg.into()))
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let r = if path.extension().is_some_and(|x| x == "json") {
        load_json(prelude(), &text)
    } else {
        load_source(prelude(), &text)
    };
    r.map_err(|e| {
        let usage = matches!(e, LoadError::Parse(_) | LoadError::Json(_));
        let e = anyhow!("{}: {e}", path.display());
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Violation(e)
        }
    })
}

/// Names the module defines on top of the prelude.
fn own_constants(l: &Loaded) -> Vec<(&String, &ConstDef)> {
    l.env.constants.iter().filter(|(n, _)| prelude().constant(n).is_none()).collect()
}

fn own_inductives(l: &Loaded) -> usize {
    l.env.inductives.iter().filter(|d| prelude().inductive(&d.name).is_none()).count()
}

fn check(file: &Path) -> Outcome {
    let l = load(file)?;
    translate_env(&l.env).map_err(|e| violation(e.to_string()))?;
    println!(
        "{}: ok ({} inductives, {} definitions, {} tests)",
        file.display(),
        own_inductives(&l),
        own_constants(&l).len(),
        l.programs.len()
    );
    Ok(())
}

/// The entry applied to the arguments, with test programs usable as entries.
fn entry_expr(l: &Loaded, entry: &str, args: &str) -> Result<(lsmart_core::ast::GlobalEnv, Expr), Failure> {
    let mut env = l.env.clone();
    for d in &l.programs {
        if env.constant(&d.name).is_none() {
            env.add_constant(d.name.clone(), ConstDef::Expr { expr: d.expr.clone() });
        }
    }
    if env.constant(entry).is_none() {
        return Err(Failure::Usage(anyhow!("no definition named {entry}")));
    }
    let src = format!("{entry} {args}");
    let e = parse_expr(&src).with_context(|| format!("in arguments {args:?}"))?;
    let e = indexify(&env, &[], &e).with_context(|| format!("in arguments {args:?}"))?;
    Ok((env, e))
}

fn run(file: &Path, entry: &str, args: &str, fuel: usize) -> Outcome {
    let l = load(file)?;
    let (env, e) = entry_expr(&l, entry, args)?;
    let v = with_stack(|| eval_closed(&env, fuel, &e)).map_err(|err| violation(err.to_string()))?;
    match from_val(&v) {
        Some(back) => println!("{}", pretty_expr(&back)),
        None => println!("{v}"),
    }
    Ok(())
}

fn translate(file: &Path, entry: Option<&str>) -> Outcome {
    let l = load(file)?;
    let kenv = translate_env(&l.env).map_err(|e| violation(e.to_string()))?;
    match entry {
        Some(name) => {
            let e = match (l.env.constant(name), l.program(name)) {
                (Some(ConstDef::Expr { expr }), _) | (_, Some(expr)) => expr.clone(),
                (Some(ConstDef::Builtin { op }), _) => {
                    return Err(Failure::Usage(anyhow!("{name} is the builtin {op:?}")))
                }
                (None, None) => return Err(Failure::Usage(anyhow!("no definition named {name}"))),
            };
            let t = expr_to_term(&l.env, &e).map_err(|err| violation(err.to_string()))?;
            println!("{}", pretty_term(Some(&kenv), &t));
            println!("{}", serde_json::to_string_pretty(&t).context("serializing")?);
        }
        None => {
            for d in l.env.inductives.iter().filter(|d| prelude().inductive(&d.name).is_none()) {
                println!("{}", pretty_inductive(&decl_to_kernel(d)));
            }
            for (name, def) in own_constants(&l) {
                if let ConstDef::Expr { expr } = def {
                    let t = expr_to_term(&l.env, expr).map_err(|err| violation(err.to_string()))?;
                    println!("Definition {name} := {}.", pretty_term(Some(&kenv), &t));
                }
            }
        }
    }
    Ok(())
}

fn diff_eval(path: &Path, fuel: usize, gen: usize, seed: u64, size: usize, as_json: bool) -> Outcome {
    if !path.exists() {
        return Err(Failure::Usage(anyhow!("{} does not exist", path.display())));
    }
    let report = with_stack(|| {
        let mut report = run_corpus(prelude(), path, fuel);
        if gen > 0 {
            report.merge(run_generated(prelude(), &GenConfig { seed, count: gen, size }, fuel));
        }
        report
    });
    let s = report.summary();
    if as_json {
        let out = json!({ "summary": s, "report": report });
        println!("{}", serde_json::to_string_pretty(&out).context("serializing")?);
    } else {
        print!("{}", report.render());
    }
    if !s.clean() {
        return Err(violation("differential check failed"));
    }
    if s.inconclusive > 0 {
        return Err(violation(format!("{} programs ran out of fuel", s.inconclusive)));
    }
    Ok(())
}

fn scenario(path: &Path, cfg: &ChainConfig, as_json: bool) -> Outcome {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let sc: Scenario = serde_json::from_str(&text).with_context(|| format!("bad scenario {}", path.display()))?;
    let out = with_stack(|| run_scenario(&sc, cfg)).context("scenario")?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&out).context("serializing")?);
    } else {
        for b in &out.blocks {
            match &b.error {
                None => println!("slot {}: ok", b.slot),
                Some(e) => println!("slot {}: rejected: {e}", b.slot),
            }
        }
        for v in &out.violations {
            println!("violation: {v}");
        }
        let balances: Vec<String> = out.balances.iter().map(|(a, b)| format!("{a}={b}")).collect();
        println!("balances: {}", balances.join(" "));
        if let Some(g) = &out.generated {
            println!(
                "generated: {} traces, {} blocks ({} rejected and retried), {} funded, {} unfunded, {} invalid, {} atomicity violations",
                g.traces, g.blocks, g.failed_blocks, g.funded, g.unfunded, g.invalid_traces, g.atomicity_violations
            );
        }
    }
    if out.clean() {
        Ok(())
    } else {
        Err(violation("scenario broke an invariant"))
    }
}

fn holds(inv: Invariant, initial: &ChainState, st: &ChainState) -> bool {
    match inv {
        Invariant::Consistent => all_consistent(st),
        Invariant::Backed => all_backed(st),
        Invariant::Conservation => st.total_money() == initial.total_money(),
    }
}

/// The first broken invariant along a trace, as (name, state position).
fn first_violation(tr: &Trace, cfg: &ChainConfig, invs: &[Invariant]) -> anyhow::Result<Option<(&'static str, usize)>> {
    let mut first: Option<(&'static str, usize)> = None;
    for inv in invs {
        let found = check_invariant(tr, cfg, |st| holds(*inv, &tr.initial, st))
            .map_err(|(i, e)| anyhow!("block {i} does not replay: {e}"))?;
        if let Some((pos, _)) = found {
            if first.is_none_or(|(_, p)| pos < p) {
                first = Some((inv.name(), pos));
            }
        }
    }
    Ok(first)
}

struct GenOpts {
    seeds: u64,
    seed: u64,
    max_blocks: usize,
    mutant: bool,
    invariants: Vec<Invariant>,
    dump: bool,
    json: bool,
}

fn generated(o: &GenOpts, cfg: &ChainConfig) -> Outcome {
    let contract = if o.mutant { "crowdfunding_double" } else { "crowdfunding" };
    let rows = with_stack(|| -> anyhow::Result<Vec<serde_json::Value>> {
        let mut rows = Vec::new();
        for seed in o.seed..o.seed + o.seeds {
            let tc = TraceConfig { seed, max_blocks: o.max_blocks, contract: contract.into(), ..Default::default() };
            let (tr, st) = gen_trace(&tc, cfg);
            // state i + 1 follows block i
            let broken = first_violation(&tr, cfg, &o.invariants)?.map(|(name, pos)| (name, pos.saturating_sub(1)));
            let mut row = json!({
                "seed": seed,
                "blocks": tr.blocks.len(),
                "rejected_blocks": st.failed_blocks,
                "dropped_actions": st.dropped_actions,
                "atomicity_violations": st.atomicity_violations,
                "first_donating_block": st.first_donating_block,
                "violation": broken.map(|(name, block)| json!({ "invariant": name, "block": block })),
            });
            if o.dump {
                row["trace"] = tr.to_json(cfg);
            }
            rows.push(row);
        }
        Ok(rows)
    })?;
    let bad = rows.iter().filter(|r| !r["violation"].is_null() || r["atomicity_violations"] != 0).count();
    if o.json {
        let out = json!({ "contract": contract, "traces": rows.len(), "violating": bad, "results": rows });
        println!("{}", serde_json::to_string_pretty(&out).context("serializing")?);
    } else {
        for r in &rows {
            let status = match &r["violation"] {
                serde_json::Value::Null => "invariants hold".to_string(),
                v => format!("{} broken after block {}", v["invariant"].as_str().unwrap_or("?"), v["block"]),
            };
            let donation = match &r["first_donating_block"] {
                serde_json::Value::Null => "no donations".to_string(),
                b => format!("first donation in block {b}"),
            };
            println!(
                "seed {}: {} blocks, {} rejected, {donation}: {status}",
                r["seed"], r["blocks"], r["rejected_blocks"]
            );
            if o.dump {
                println!("{}", r["trace"]);
            }
        }
        println!("{contract}: {} traces, {bad} violating", rows.len());
    }
    if bad == 0 {
        Ok(())
    } else {
        Err(violation(format!("{bad} traces broke an invariant")))
    }
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { file } => check(&file),
        Command::Run { file, entry, args, fuel } => run(&file, &entry, &args, fuel),
        Command::Translate { file, entry } => translate(&file, entry.as_deref()),
        Command::DiffEval { path, fuel, gen, seed, size, json } => diff_eval(&path, fuel, gen, seed, size, json),
        Command::Chain { scenario: Some(path), json, .. } => scenario(&path, &ChainConfig::default(), json),
        Command::Chain { scenario: None, seeds, seed, max_blocks, mutant, invariant, dump, json, .. } => {
            let invariants = if invariant.is_empty() { Invariant::ALL.to_vec() } else { invariant };
            let o = GenOpts { seeds, seed, max_blocks, mutant, invariants, dump, json };
            generated(&o, &ChainConfig::default())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
