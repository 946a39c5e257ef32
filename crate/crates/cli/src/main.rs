mod dot;
mod expr;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pp_core::builders::{compile, Built, CompileOptions, ModuloMode};
use pp_core::model::{config_from_strings, format_config, materialize, Predicate, ProtocolDoc, EXPORT_STATE_LIMIT};
use pp_core::simulator::{batch_estimate, run_execution, run_input, RunOutcome, SchedulerConfig, SniperStrategy};
use pp_core::verifier::{
    check_inputs, default_budget, global_tolerance, initial_tolerance_via_out0, tolerance_report, ExecutionTrace,
    Exploration, ToleranceReport, VerifyError, VerifyOptions,
};
use pp_core::{Configuration, Exec, ModelError, Output, Protocol, StateId};

#[derive(Parser)]
#[command(name = "pp", version, about = "Population protocols with a sniper: build, verify, simulate")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a protocol and write it as a JSON document.
    Build {
        #[command(flatten)]
        src: Source,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tolerance reports for every initial configuration up to a population.
    Verify {
        #[command(flatten)]
        src: Source,
        /// Check all initial configurations with 1..=N agents.
        #[arg(short = 'n', long)]
        population: Option<u64>,
        /// Check this input instead (repeatable), e.g. `x=3,y=4`.
        #[arg(short, long)]
        input: Vec<String>,
        /// Succeed only if some configuration is not robust.
        #[arg(long)]
        expect_nonrobust: bool,
        /// Skip conservation-law checks on explored edges.
        #[arg(long)]
        no_laws: bool,
        /// Also recompute InTol from out_0 of the sniped initial configurations.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Tolerances of a single configuration.
    Tolerance {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        start: Start,
        /// Also print out_0..out_k.
        #[arg(short = 'k', long)]
        snipes: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Random executions under the uniform scheduler.
    Simulate {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        start: Start,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Random snipe budget per run.
        #[arg(short = 'k', long, default_value_t = 0)]
        snipes: usize,
        #[arg(short, long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Convergence window in steps (default 50 per agent).
        #[arg(long)]
        window: Option<u64>,
        /// Scripted snipes `step:state` separated by `;`.
        #[arg(long, conflicts_with = "replay")]
        script: Option<String>,
        /// Force the steps of a trace file, then continue at random.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Write the trace of a single run as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Petri-net diagram in Graphviz syntax.
    ExportDot {
        #[command(flatten)]
        src: Source,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a recorded trace step by step.
    Replay {
        #[command(flatten)]
        src: Source,
        /// Trace file: a trace, a tolerance report, or JSON lines.
        #[arg(short, long)]
        trace: PathBuf,
        /// Fail unless the final output is this.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Source {
    /// Builder expression, e.g. `tower(4)` or `product(and, E, E)`.
    #[arg(short, long, group = "source")]
    builder: Option<String>,
    /// Compile a predicate, e.g. `(>= (+ (* 3 x) (* 2 y)) 4)`.
    #[arg(short = 'P', long, group = "source")]
    predicate: Option<String>,
    /// Protocol document (JSON).
    #[arg(short, long, group = "source")]
    protocol: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModuloArg::Full)]
    modulo_mode: ModuloArg,
}

#[derive(Args)]
struct Start {
    /// Input vector over the predicate variables, e.g. `x=3,y=4`.
    #[arg(short, long, conflicts_with = "config")]
    input: Option<String>,
    /// Raw configuration `count*state` entries separated by `;`.
    #[arg(short, long)]
    config: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Node budget per query (default: PP_NODE_BUDGET or 5000000).
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads; 1 runs sequentially.
    #[arg(short, long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuloArg {
    Full,
    TowerOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Accept,
    Reject,
    Undecided,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = if matches!(e, ModelError::TooLarge(_)) { 3 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Budget { .. } => Failure { code: 3, msg: e.to_string() },
            VerifyError::Model(m) => m.into(),
            VerifyError::IllSpecified(_) => Failure { code: 1, msg: e.to_string() },
        }
    }
}

/// A protocol, with its predicate binding when there is one.
struct Loaded {
    proto: Arc<dyn Protocol>,
    built: Option<Built>,
}

impl Loaded {
    fn built(&self) -> Result<&Built, Failure> {
        self.built.as_ref().ok_or_else(|| usage("the protocol document has no predicate and input binding"))
    }
}

fn load(src: &Source) -> Result<Loaded, Failure> {
    if let Some(e) = &src.builder {
        let call = expr::parse(e).map_err(usage)?;
        let b = expr::eval(&call).map_err(|e| match e {
            expr::EvalError::Usage(m) => usage(m),
            expr::EvalError::Model(m) => m.into(),
        })?;
        return Ok(Loaded { proto: Arc::clone(&b.protocol), built: Some(b) });
    }
    if let Some(p) = &src.predicate {
        let pred = Predicate::parse(p, None)?;
        let modulo = match src.modulo_mode {
            ModuloArg::Full => ModuloMode::Full,
            ModuloArg::TowerOnly => ModuloMode::TowerOnly,
        };
        let b = compile(&pred, CompileOptions { modulo })?;
        return Ok(Loaded { proto: Arc::clone(&b.protocol), built: Some(b) });
    }
    if let Some(path) = &src.protocol {
        let text = read(path)?;
        let doc = ProtocolDoc::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let l = doc.load().map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let proto: Arc<dyn Protocol> = Arc::new(l.protocol);
        let built = l.predicate.map(|predicate| Built {
            protocol: Arc::clone(&proto),
            predicate,
            inputs: l.inputs,
            laws: Vec::new(),
        });
        return Ok(Loaded { proto, built });
    }
    Err(usage("one of --builder, --predicate or --protocol is required"))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_input(b: &Built, s: &str) -> Result<Vec<u64>, Failure> {
    let vars = &b.predicate.vars;
    let mut x = vec![0u64; vars.len()];
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.iter().all(|p| !p.contains('=')) {
        if parts.len() != vars.len() {
            return Err(usage(format!("input `{s}` needs {} values", vars.len())));
        }
        for (i, p) in parts.iter().enumerate() {
            x[i] = p.parse().map_err(|_| usage(format!("bad count `{p}`")))?;
        }
        return Ok(x);
    }
    for p in parts {
        let (v, n) = p.split_once('=').ok_or_else(|| usage(format!("expected var=count, got `{p}`")))?;
        let i = b
            .predicate
            .var_index(v.trim())
            .ok_or_else(|| usage(format!("unknown variable `{}` (have {})", v.trim(), vars.join(","))))?;
        x[i] = n.trim().parse().map_err(|_| usage(format!("bad count `{n}`")))?;
    }
    Ok(x)
}

fn parse_config(proto: &dyn Protocol, s: &str) -> Result<Configuration, Failure> {
    let entries: Vec<&str> = s.split(';').map(str::trim).filter(|e| !e.is_empty()).collect();
    Ok(config_from_strings(proto, &entries)?)
}

enum StartPoint {
    Input(Vec<u64>, Configuration),
    Raw(Configuration),
}

fn start_point(l: &Loaded, s: &Start) -> Result<StartPoint, Failure> {
    match (&s.input, &s.config) {
        (Some(i), _) => {
            let b = l.built()?;
            let x = parse_input(b, i)?;
            let c = b.initial_config(&x)?;
            Ok(StartPoint::Input(x, c))
        }
        (None, Some(c)) => {
            let c = parse_config(l.proto.as_ref(), c)?;
            match l.built.as_ref().and_then(|b| b.input_of(&c)) {
                Some(x) => Ok(StartPoint::Input(x, c)),
                None => Ok(StartPoint::Raw(c)),
            }
        }
        (None, None) => Err(usage("one of --input or --config is required")),
    }
}

fn exec_for(jobs: Option<usize>) -> Result<Exec, Failure> {
    match jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(1) => Ok(Exec::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            {
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new().num_threads(_n).build_global();
            }
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}

fn verify_options(run: &RunArgs, check_laws: bool) -> Result<VerifyOptions, Failure> {
    Ok(VerifyOptions { budget: run.budget.unwrap_or_else(default_budget), exec: exec_for(run.jobs)?, check_laws })
}

fn show_input(b: &Built, x: &[u64]) -> String {
    b.predicate.vars.iter().zip(x).map(|(v, n)| format!("{v}={n}")).collect::<Vec<_>>().join(",")
}

fn report_line(b: &Built, r: &ToleranceReport) -> String {
    let tol = r.tol.map_or("-".to_string(), |t| t.to_string());
    let mut s = format!(
        "{:<14} out0={:<9} expected={:<6} InTol={:<9} Tol={:<9} robust={}",
        show_input(b, &r.input),
        output_name(r.out0),
        output_name(r.expected),
        r.intol.to_string(),
        tol,
        if r.robust { "yes" } else { "no" },
    );
    if !r.well_specified {
        s.push_str("  ILL-SPECIFIED");
    }
    s
}

fn output_name(o: Output) -> &'static str {
    match o {
        Output::Accept => "accept",
        Output::Reject => "reject",
        Output::Undecided => "undecided",
    }
}

fn cmd_build(src: &Source, out: Option<&Path>, format: Format) -> Result<u8, Failure> {
    let l = load(src)?;
    let (pred, inputs) = match &l.built {
        Some(b) => (Some(&b.predicate), b.inputs.as_slice()),
        None => (None, &[][..]),
    };
    let doc = ProtocolDoc::from_protocol(l.proto.as_ref(), pred, inputs)?;
    let text = match format {
        Format::Json => doc.to_json() + "\n",
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "name: {}", doc.name);
            let _ = writeln!(s, "states: {}", doc.states.len());
            let _ = writeln!(s, "transitions: {}", doc.transitions.len());
            let _ = writeln!(s, "initial: {}", doc.initial.join(" "));
            if let Some(p) = &doc.predicate {
                let _ = writeln!(s, "predicate: {p}");
            }
            s
        }
    };
    emit(out, &text)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    src: &Source,
    population: Option<u64>,
    input: &[String],
    expect_nonrobust: bool,
    no_laws: bool,
    cross_check: bool,
    run: &RunArgs,
) -> Result<u8, Failure> {
    let l = load(src)?;
    let b = l.built()?;
    let opts = verify_options(run, !no_laws)?;
    let inputs = if !input.is_empty() {
        input.iter().map(|s| parse_input(b, s)).collect::<Result<Vec<_>, _>>()?
    } else if let Some(n) = population {
        b.initial_inputs(n)
    } else {
        return Err(usage("verify needs --population or --input"));
    };
    let res = check_inputs(b, inputs, &opts);
    let mut cross = Vec::new();
    if cross_check {
        for r in &res.reports {
            let via = initial_tolerance_via_out0(b, &r.input, opts.budget)?;
            if via != r.intol {
                cross.push(format!("{}: InTol {} but {} via out_0", show_input(b, &r.input), r.intol, via));
            }
        }
    }
    let proto = b.protocol.as_ref();
    match run.format {
        Format::Json => {
            let arr: Vec<Value> = res.reports.iter().map(|r| r.to_json(proto)).collect();
            println!("{}", serde_json::to_string_pretty(&Value::Array(arr)).unwrap());
        }
        Format::Text => {
            println!("protocol: {}", b.name());
            println!("predicate: {}", b.predicate);
            for r in &res.reports {
                println!("{}", report_line(b, r));
            }
            let nonrobust = res.non_robust().count();
            let ill = res.reports.iter().filter(|r| !r.well_specified).count();
            println!(
                "{} configurations: {} robust, {} not robust, {} ill-specified, {} failed",
                res.reports.len() + res.failures.len(),
                res.reports.len() - nonrobust,
                nonrobust,
                ill,
                res.failures.len()
            );
        }
    }
    for v in res.law_violations() {
        eprintln!("law violation: {v}");
    }
    for (x, e) in &res.failures {
        eprintln!("{}: {e}", show_input(b, x));
    }
    for c in &cross {
        eprintln!("cross-check: {c}");
    }
    if res.failures.iter().any(|(_, e)| matches!(e, VerifyError::Budget { .. })) {
        return Ok(3);
    }
    if !res.failures.is_empty() {
        return Ok(2);
    }
    let ill = res.reports.iter().any(|r| !r.well_specified);
    let nonrobust = res.non_robust().next().is_some();
    let laws = res.law_violations().next().is_some();
    let bad = ill || laws || !cross.is_empty() || (nonrobust != expect_nonrobust);
    Ok(if bad { 1 } else { 0 })
}

fn cmd_tolerance(src: &Source, start: &Start, snipes: Option<usize>, run: &RunArgs) -> Result<u8, Failure> {
    let l = load(src)?;
    let opts = verify_options(run, true)?;
    let sp = start_point(&l, start)?;
    let (mut v, text, bad) = match &sp {
        StartPoint::Input(x, _) => {
            let b = l.built()?;
            let r = tolerance_report(b, x, &opts)?;
            let line = report_line(b, &r);
            let mut text = format!("{line}\n");
            if let Some(w) = &r.counterexample {
                let _ = writeln!(text, "witness ({} snipes, {} moves):", w.snipes(), w.moves());
                text.push_str(&trace_text(b.protocol.as_ref(), w));
            }
            (r.to_json(b.protocol.as_ref()), text, !r.well_specified || !r.law_violations.is_empty())
        }
        StartPoint::Raw(c) => {
            let proto = l.proto.as_ref();
            let mut ex = Exploration::new(proto, c.clone(), &[], opts.budget)?;
            let out0 = ex.out0();
            let tol = if out0.is_decided() { Some(global_tolerance(&mut ex)?) } else { None };
            let witness = match tol {
                Some(pp_core::verifier::Tolerance::Finite(k)) => ex.witness_against(out0, k as usize + 1)?,
                Some(_) => None,
                None => ex.witness_against(Output::Undecided, 0)?,
            };
            let v = json!({
                "config": pp_core::model::config_to_strings(proto, c),
                "out0": out0,
                "tol": tol,
                "counterexample": witness.as_ref().map(|w| w.to_json(proto)),
                "nodes": ex.node_count(),
            });
            let text = format!(
                "{}  out0={}  Tol={}\n",
                format_config(proto, c),
                output_name(out0),
                tol.map_or("-".into(), |t| t.to_string())
            );
            (v, text, false)
        }
    };
    let mut text = text;
    if let Some(k) = snipes {
        let c = match &sp {
            StartPoint::Input(_, c) | StartPoint::Raw(c) => c.clone(),
        };
        let mut ex = Exploration::new(l.proto.as_ref(), c, &[], opts.budget)?;
        let mut outs = Vec::new();
        for i in 0..=k {
            outs.push(ex.out(i)?);
        }
        for (i, o) in outs.iter().enumerate() {
            let _ = writeln!(text, "out_{i} = {}", output_name(*o));
        }
        v["out_i"] = json!(outs);
    }
    match run.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&v).unwrap()),
        Format::Text => print!("{text}"),
    }
    Ok(if bad { 1 } else { 0 })
}

fn trace_text(proto: &dyn Protocol, t: &ExecutionTrace) -> String {
    let mut s = format!("  {}\n", format_config(proto, &t.start));
    for (step, c) in &t.steps {
        let label = match step {
            pp_core::verifier::Step::Move(m) => format!(
                "{}, {} -> {}, {}",
                proto.state_name(m.pre[0]),
                proto.state_name(m.pre[1]),
                proto.state_name(m.post[0]),
                proto.state_name(m.post[1])
            ),
            pp_core::verifier::Step::Snipe(q) => format!("snipe {}", proto.state_name(*q)),
        };
        let _ = writeln!(s, "  [{label}]\n  {}", format_config(proto, c));
    }
    s
}

fn outcome_json(proto: &dyn Protocol, o: &RunOutcome) -> Value {
    json!({
        "output": o.output,
        "converged": o.converged,
        "terminal": o.terminal,
        "steps": o.steps,
        "final_config": pp_core::model::config_to_strings(proto, &o.final_config),
        "final_input": o.final_input,
        "snipes": o.snipes.iter().map(|&(s, q)| json!([s, proto.state_name(q)])).collect::<Vec<_>>(),
        "skipped": o.skipped.iter().map(|&(s, q)| json!([s, proto.state_name(q)])).collect::<Vec<_>>(),
    })
}

fn parse_script(proto: &dyn Protocol, s: &str) -> Result<Vec<(u64, StateId)>, Failure> {
    let mut v = Vec::new();
    for e in s.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (step, name) = e.split_once(':').ok_or_else(|| usage(format!("expected step:state, got `{e}`")))?;
        let step = step.trim().parse().map_err(|_| usage(format!("bad step `{step}`")))?;
        let q = proto.state_id(name.trim()).ok_or_else(|| usage(format!("unknown state `{}`", name.trim())))?;
        v.push((step, q));
    }
    v.sort_by_key(|&(s, _)| s);
    Ok(v)
}

/// Accepts a trace object, a tolerance report (its counterexample), an array
/// of reports (the first counterexample), or JSON lines of `{config, step}`.
fn read_trace(proto: &dyn Protocol, path: &Path) -> Result<ExecutionTrace, Failure> {
    let text = read(path)?;
    let v: Value = match serde_json::from_str::<Value>(&text) {
        Ok(v) => v,
        Err(_) => {
            let steps = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str::<Value>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            json!({ "steps": steps })
        }
    };
    let v = if v.get("steps").is_some() {
        v
    } else if let Some(c) = v.get("counterexample").filter(|c| !c.is_null()) {
        c.clone()
    } else if let Some(c) =
        v.as_array().and_then(|a| a.iter().find_map(|r| r.get("counterexample").filter(|c| !c.is_null())))
    {
        c.clone()
    } else if v.as_array().is_some_and(|a| a.iter().all(|s| s.get("config").is_some())) {
        json!({ "steps": v })
    } else {
        return Err(usage(format!("{}: no trace found", path.display())));
    };
    ExecutionTrace::from_json(proto, &v).map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    src: &Source,
    start: &Start,
    trials: usize,
    snipes: usize,
    seed: u64,
    max_steps: u64,
    window: Option<u64>,
    script: Option<&str>,
    replay: Option<&Path>,
    trace: Option<&Path>,
    run: &RunArgs,
) -> Result<u8, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if max_steps == 0 {
        return Err(usage("--max-steps must be at least 1"));
    }
    let l = load(src)?;
    let proto = l.proto.as_ref();
    let sp = start_point(&l, start)?;
    let sched = SchedulerConfig { seed, max_steps, window, record_trace: trace.is_some() };
    let sniper = if let Some(s) = script {
        SniperStrategy::Scripted(parse_script(proto, s)?)
    } else if let Some(p) = replay {
        SniperStrategy::Replay(read_trace(proto, p)?)
    } else if snipes > 0 {
        SniperStrategy::RandomBudget(snipes)
    } else {
        SniperStrategy::None
    };
    if trials == 1 || !matches!(sniper, SniperStrategy::None | SniperStrategy::RandomBudget(_)) {
        if trials > 1 {
            return Err(usage("--script and --replay run a single execution"));
        }
        let o = match &sp {
            StartPoint::Input(x, _) => run_input(l.built()?, x, &sched, &sniper)?,
            StartPoint::Raw(c) => run_execution(proto, c, &sched, &sniper)?,
        };
        if let (Some(path), Some(t)) = (trace, &o.trace) {
            emit(Some(path), &t.to_json_lines(proto))?;
        }
        match run.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&outcome_json(proto, &o)).unwrap()),
            Format::Text => println!(
                "{}  after {} steps, {} snipes: {}{}",
                format_config(proto, &o.final_config),
                o.steps,
                o.snipes.len(),
                output_name(o.output),
                if o.converged { "" } else { " (not converged)" }
            ),
        }
        return Ok(0);
    }
    let StartPoint::Input(x, _) = &sp else {
        return Err(usage("batches need --input over the predicate variables"));
    };
    if trace.is_some() {
        return Err(usage("--trace records a single run; use --trials 1"));
    }
    let b = l.built()?;
    let exec = exec_for(run.jobs)?;
    let stats = batch_estimate(b, x, trials, &[snipes], &sched, exec)?;
    match run.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&stats).unwrap()),
        Format::Text => {
            println!("{}  predicate={}", show_input(b, x), stats.expected);
            for s in &stats.by_budget {
                println!(
                    "k={} trials={} converged={} correct={} correct_post={} mean_steps={:.1}",
                    s.snipes, s.trials, s.converged, s.correct_initial, s.correct_post, s.mean_steps
                );
            }
        }
    }
    Ok(0)
}

fn cmd_export_dot(src: &Source, out: Option<&Path>) -> Result<u8, Failure> {
    let l = load(src)?;
    let table = materialize(l.proto.as_ref(), EXPORT_STATE_LIMIT)?;
    emit(out, &dot::export_dot(&table))?;
    Ok(0)
}

/// Model errors with state ids replaced by names.
fn describe(proto: &dyn Protocol, e: &ModelError) -> String {
    let n = |q: StateId| proto.state_name(q);
    match e {
        ModelError::NotEnabled { pre, post } => {
            format!("{},{} -> {},{} is not enabled", n(pre[0]), n(pre[1]), n(post[0]), n(post[1]))
        }
        ModelError::Unoccupied(q) => format!("state {} is not occupied", n(*q)),
        _ => e.to_string(),
    }
}

fn cmd_replay(src: &Source, trace: &Path, expect: Option<Expect>, format: Format) -> Result<u8, Failure> {
    let l = load(src)?;
    let proto = l.proto.as_ref();
    let t = read_trace(proto, trace)?;
    let (result, err) = match t.replay(proto) {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(describe(proto, &e))),
    };
    let wanted = expect.map(|e| match e {
        Expect::Accept => Output::Accept,
        Expect::Reject => Output::Reject,
        Expect::Undecided => Output::Undecided,
    });
    let ok = result.is_some() && wanted.is_none_or(|w| Some(w) == result);
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "valid": err.is_none(),
                "error": err,
                "output": result,
                "final_config": pp_core::model::config_to_strings(proto, t.last()),
                "snipes": t.snipes(),
                "moves": t.moves(),
                "terminal": pp_core::model::is_terminal(proto, t.last()),
            }))
            .unwrap()
        ),
        Format::Text => match (&result, &err) {
            (Some(o), _) => println!(
                "valid: {} moves, {} snipes, final {} -> {}",
                t.moves(),
                t.snipes(),
                format_config(proto, t.last()),
                output_name(*o)
            ),
            (_, Some(e)) => println!("invalid: {e}"),
            _ => unreachable!(),
        },
    }
    Ok(if ok { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Build { src, out, format } => cmd_build(&src, out.as_deref(), format),
        Cmd::Verify { src, population, input, expect_nonrobust, no_laws, cross_check, run } => {
            cmd_verify(&src, population, &input, expect_nonrobust, no_laws, cross_check, &run)
        }
        Cmd::Tolerance { src, start, snipes, run } => cmd_tolerance(&src, &start, snipes, &run),
        Cmd::Simulate { src, start, trials, snipes, seed, max_steps, window, script, replay, trace, run } => {
            cmd_simulate(
                &src,
                &start,
                trials,
                snipes,
                seed,
                max_steps,
                window,
                script.as_deref(),
                replay.as_deref(),
                trace.as_deref(),
                &run,
            )
        }
        Cmd::ExportDot { src, out } => cmd_export_dot(&src, out.as_deref()),
        Cmd::Replay { src, trace, expect, format } => cmd_replay(&src, &trace, expect, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
