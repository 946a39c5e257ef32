//! Exact outputs and tolerances on bounded populations.
//!
//! Fair executions on a finite move graph end up in a bottom SCC and visit
//! all of it, so `out_0` is the unanimous output of the reachable BSCCs.
//! `out_i` repeats this over every configuration reachable with at most `i`
//! snipes.

mod explore;
pub mod graph;
mod tolerance;
mod trace;

use serde_json::{json, Value};
use thiserror::Error;

pub use explore::Exploration;
pub use tolerance::{initial_tolerance, Tolerance};
pub use trace::{ExecutionTrace, Step};

use crate::builders::Built;
use crate::exec::Exec;
use crate::model::{config_to_strings, Configuration, ModelError, Output, Protocol};

pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

/// `PP_NODE_BUDGET` if set and valid, else the default.
pub fn default_budget() -> usize {
    std::env::var("PP_NODE_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("node budget of {limit} configurations exceeded")]
    Budget { limit: usize },
    #[error("out_0 is undecided at {0}")]
    IllSpecified(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub budget: usize,
    pub exec: Exec,
    pub check_laws: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: default_budget(), exec: Exec::default(), check_laws: true }
    }
}

pub fn out0(proto: &dyn Protocol, c: &Configuration, budget: usize) -> Result<Output, VerifyError> {
    Ok(Exploration::new(proto, c.clone(), &[], budget)?.out0())
}

pub fn out_i(proto: &dyn Protocol, c: &Configuration, i: usize, budget: usize) -> Result<Output, VerifyError> {
    Exploration::new(proto, c.clone(), &[], budget)?.out(i)
}

/// Layers `0..=i` of snipe reachability from `c`.
pub fn reachable_with_snipes<'p>(
    proto: &'p dyn Protocol,
    c: &Configuration,
    i: usize,
    budget: usize,
) -> Result<Exploration<'p>, VerifyError> {
    let mut ex = Exploration::new(proto, c.clone(), &[], budget)?;
    ex.ensure(i)?;
    Ok(ex)
}

/// `Tol`: one less than the first `i` with `out_i != out_0`.
pub fn global_tolerance(ex: &mut Exploration<'_>) -> Result<Tolerance, VerifyError> {
    let o0 = ex.out0();
    if !o0.is_decided() {
        return Err(VerifyError::IllSpecified(format!("{:?}", ex.start())));
    }
    for i in 1..=ex.max_snipes() {
        if ex.out(i)? != o0 {
            return Ok(Tolerance::Finite(i as u64 - 1));
        }
    }
    Ok(Tolerance::Unbounded)
}

/// Everything the verifier knows about one initial configuration.
#[derive(Clone, Debug)]
pub struct ToleranceReport {
    pub input: Vec<u64>,
    pub config: Configuration,
    pub expected: Output,
    pub out0: Output,
    pub intol: Tolerance,
    /// `None` when `out0` is undecided.
    pub tol: Option<Tolerance>,
    pub robust: bool,
    pub well_specified: bool,
    /// For finite `Tol`: an execution with `Tol + 1` snipes ending in a
    /// bottom SCC whose output differs from `out0`.
    pub counterexample: Option<ExecutionTrace>,
    pub law_violations: Vec<String>,
    pub nodes: usize,
}

impl ToleranceReport {
    pub fn to_json(&self, proto: &dyn Protocol) -> Value {
        json!({
            "input": self.input,
            "config": config_to_strings(proto, &self.config),
            "expected": self.expected,
            "out0": self.out0,
            "intol": self.intol,
            "tol": self.tol,
            "robust": self.robust,
            "well_specified": self.well_specified,
            "counterexample": self.counterexample.as_ref().map(|t| t.to_json(proto)),
            "law_violations": self.law_violations,
            "nodes": self.nodes,
        })
    }
}

pub fn tolerance_report(b: &Built, x: &[u64], opts: &VerifyOptions) -> Result<ToleranceReport, VerifyError> {
    let config = b.initial_config(x)?;
    let expected = Output::from_bool(b.predicate.eval(x)?);
    let intol = initial_tolerance(&b.predicate, x)?;
    let laws: &[_] = if opts.check_laws { &b.laws } else { &[] };
    let mut ex = Exploration::new(b.protocol.as_ref(), config.clone(), laws, opts.budget)?;
    let out0 = ex.out0();
    let (tol, counterexample) = if out0.is_decided() {
        let tol = global_tolerance(&mut ex)?;
        let witness = match tol {
            Tolerance::Finite(k) => ex.witness_against(out0, k as usize + 1)?,
            Tolerance::Unbounded => None,
        };
        (Some(tol), witness)
    } else {
        (None, ex.witness_against(Output::Undecided, 0)?)
    };
    Ok(ToleranceReport {
        input: x.to_vec(),
        config,
        expected,
        out0,
        intol,
        tol,
        robust: tol == Some(intol),
        well_specified: out0 == expected,
        counterexample,
        law_violations: ex.violations().iter().cloned().collect(),
        nodes: ex.node_count(),
    })
}

#[derive(Clone, Debug, Default)]
pub struct RobustnessRun {
    pub reports: Vec<ToleranceReport>,
    /// Inputs whose exploration failed, e.g. on the node budget.
    pub failures: Vec<(Vec<u64>, VerifyError)>,
}

impl RobustnessRun {
    pub fn all_robust(&self) -> bool {
        self.failures.is_empty() && self.reports.iter().all(|r| r.robust)
    }

    pub fn all_well_specified(&self) -> bool {
        self.failures.is_empty() && self.reports.iter().all(|r| r.well_specified)
    }

    pub fn non_robust(&self) -> impl Iterator<Item = &ToleranceReport> {
        self.reports.iter().filter(|r| !r.robust)
    }

    pub fn law_violations(&self) -> impl Iterator<Item = &String> {
        self.reports.iter().flat_map(|r| r.law_violations.iter())
    }
}

/// Reports for every initial configuration with `1..=n` agents.
pub fn check_robustness(b: &Built, n: u64, opts: &VerifyOptions) -> RobustnessRun {
    check_inputs(b, b.initial_inputs(n), opts)
}

pub fn check_inputs(b: &Built, inputs: Vec<Vec<u64>>, opts: &VerifyOptions) -> RobustnessRun {
    let results = opts.exec.map(inputs, |x| {
        let r = tolerance_report(b, &x, opts);
        (x, r)
    });
    let mut run = RobustnessRun::default();
    for (x, r) in results {
        match r {
            Ok(rep) => run.reports.push(rep),
            Err(e) => run.failures.push((x, e)),
        }
    }
    run
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub input: Vec<u64>,
    pub expected: Output,
    pub got: Output,
}

#[derive(Clone, Debug, Default)]
pub struct WellSpecified {
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub failures: Vec<(Vec<u64>, VerifyError)>,
}

impl WellSpecified {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.failures.is_empty()
    }
}

/// Compares `out_0` with the predicate on every initial configuration with
/// `1..=n` agents.
pub fn check_well_specified(b: &Built, n: u64, opts: &VerifyOptions) -> WellSpecified {
    let inputs = b.initial_inputs(n);
    let results = opts.exec.map(inputs, |x| {
        let r = (|| -> Result<(Output, Output), VerifyError> {
            let c = b.initial_config(&x)?;
            let expected = Output::from_bool(b.predicate.eval(&x)?);
            Ok((expected, out0(b.protocol.as_ref(), &c, opts.budget)?))
        })();
        (x, r)
    });
    let mut ws = WellSpecified::default();
    for (x, r) in results {
        match r {
            Ok((expected, got)) => {
                ws.checked += 1;
                if expected != got {
                    ws.violations.push(Violation { input: x, expected, got });
                }
            }
            Err(e) => ws.failures.push((x, e)),
        }
    }
    ws
}

/// `InTol` recomputed from `out_0` of the sniped initial configurations
/// instead of the predicate.
pub fn initial_tolerance_via_out0(b: &Built, x: &[u64], budget: usize) -> Result<Tolerance, VerifyError> {
    let mut cache = std::collections::HashMap::new();
    let mut err = None;
    let t = tolerance::tolerance_by(x, |y| {
        let c = b.initial_config(y)?;
        if let Some(&o) = cache.get(&c) {
            return Ok(o == Output::Accept);
        }
        let o = match out0(b.protocol.as_ref(), &c, budget) {
            Ok(o) => o,
            Err(e) => {
                err = Some(e);
                Output::Undecided
            }
        };
        cache.insert(c, o);
        Ok(o == Output::Accept)
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(t),
    }
}
