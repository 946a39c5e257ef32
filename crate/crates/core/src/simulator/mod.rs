//! Random executions under a uniform pairwise scheduler, with an optional
//! sniper. Every run is determined by its seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builders::Built;
use crate::exec::Exec;
use crate::model::{
    is_terminal, output_of_support, successors, Configuration, ModelError, Output, Protocol, StateId, Transition,
};
use crate::verifier::{ExecutionTrace, Step};

#[derive(Clone, Copy, Debug)]
pub struct SchedulerConfig {
    pub seed: u64,
    pub max_steps: u64,
    /// Steps of constant decided output after which a run counts as
    /// converged; `None` means `50·|C0|`.
    pub window: Option<u64>,
    pub record_trace: bool,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig { seed: 0, max_steps: 1_000_000, window: None, record_trace: false }
    }
}

#[derive(Clone, Debug, Default)]
pub enum SniperStrategy {
    #[default]
    None,
    /// Snipe an agent in the given state right before the given step.
    Scripted(Vec<(u64, StateId)>),
    /// `k` snipes at uniform times in `[0, max_steps/2)` on uniformly chosen
    /// occupied states.
    RandomBudget(usize),
    /// Force the steps of a trace, then continue at random.
    Replay(ExecutionTrace),
}

impl SniperStrategy {
    pub fn budget(&self) -> usize {
        match self {
            SniperStrategy::None => 0,
            SniperStrategy::Scripted(v) => v.len(),
            SniperStrategy::RandomBudget(k) => *k,
            SniperStrategy::Replay(t) => t.snipes(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: Output,
    pub final_config: Configuration,
    /// Terminal, or constant decided output over the window.
    pub converged: bool,
    pub terminal: bool,
    pub steps: u64,
    /// `(step, state)` of each snipe carried out.
    pub snipes: Vec<(u64, StateId)>,
    /// Scripted snipes whose target state was empty.
    pub skipped: Vec<(u64, StateId)>,
    /// Input vector of the surviving agents, when the run started from one.
    pub final_input: Option<Vec<u64>>,
    pub trace: Option<ExecutionTrace>,
}

/// SplitMix64 mixing of `(master, stream)`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Run<'p> {
    proto: &'p dyn Protocol,
    agents: Vec<StateId>,
    origin: Vec<Option<usize>>,
    config: Configuration,
    trace: Option<ExecutionTrace>,
    snipes: Vec<(u64, StateId)>,
}

impl Run<'_> {
    fn set(&mut self, i: usize, q: StateId) {
        self.config.remove(self.agents[i], 1);
        self.config.add(q, 1);
        self.agents[i] = q;
    }

    fn interact(&mut self, i: usize, j: usize, a: StateId, b: StateId) {
        let t = Transition::new(self.agents[i], self.agents[j], a, b);
        self.set(i, a);
        self.set(j, b);
        if !t.is_silent() {
            if let Some(tr) = self.trace.as_mut() {
                tr.push(Step::Move(t), self.config.clone());
            }
        }
    }

    fn snipe_agent(&mut self, i: usize, step: u64) {
        let q = self.agents[i];
        self.config.remove(q, 1);
        self.agents.swap_remove(i);
        self.origin.swap_remove(i);
        self.snipes.push((step, q));
        if let Some(tr) = self.trace.as_mut() {
            tr.push(Step::Snipe(q), self.config.clone());
        }
    }

    fn agent_in(&self, q: StateId) -> Option<usize> {
        self.agents.iter().position(|&a| a == q)
    }

    fn output(&self) -> Output {
        output_of_support(self.proto, self.config.support())
    }
}

fn agents_of(c: &Configuration) -> Vec<StateId> {
    c.entries().iter().flat_map(|&(q, n)| std::iter::repeat_n(q, n as usize)).collect()
}

/// One random execution from `c0`.
pub fn run_execution(
    proto: &dyn Protocol,
    c0: &Configuration,
    sched: &SchedulerConfig,
    sniper: &SniperStrategy,
) -> Result<RunOutcome, ModelError> {
    let agents = agents_of(c0);
    let origin = vec![None; agents.len()];
    run_agents(proto, agents, origin, None, sched, sniper)
}

/// One random execution from the initial configuration of input `x`,
/// tracking which variable every agent came from.
pub fn run_input(
    b: &Built,
    x: &[u64],
    sched: &SchedulerConfig,
    sniper: &SniperStrategy,
) -> Result<RunOutcome, ModelError> {
    let c0 = b.initial_config(x)?;
    let mut agents = Vec::new();
    let mut origin = Vec::new();
    for (v, (&q, &n)) in b.inputs.iter().zip(x).enumerate() {
        for _ in 0..n {
            agents.push(q);
            origin.push(Some(v));
        }
    }
    debug_assert_eq!(Configuration::from_states(agents.iter().copied()), c0);
    run_agents(b.protocol.as_ref(), agents, origin, Some(x.len()), sched, sniper)
}

fn run_agents(
    proto: &dyn Protocol,
    agents: Vec<StateId>,
    origin: Vec<Option<usize>>,
    arity: Option<usize>,
    sched: &SchedulerConfig,
    sniper: &SniperStrategy,
) -> Result<RunOutcome, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sched.seed);
    let config = Configuration::from_states(agents.iter().copied());
    crate::model::check_states(proto, &config)?;
    let window = sched.window.unwrap_or(50 * agents.len() as u64).max(1);
    let mut run = Run {
        proto,
        agents,
        origin,
        trace: sched.record_trace.then(|| ExecutionTrace::new(config.clone())),
        config,
        snipes: Vec::new(),
    };

    // pending snipes as (time, target) with target None meaning random
    let mut pending: Vec<(u64, Option<StateId>)> = match sniper {
        SniperStrategy::Scripted(v) => v.iter().map(|&(t, q)| (t, Some(q))).collect(),
        SniperStrategy::RandomBudget(k) => {
            let hi = (sched.max_steps / 2).max(1);
            (0..*k).map(|_| (rng.gen_range(0..hi), None)).collect()
        }
        _ => Vec::new(),
    };
    pending.sort_by_key(|&(t, _)| t);
    pending.reverse();
    let mut skipped = Vec::new();

    let mut step = 0u64;
    if let SniperStrategy::Replay(tr) = sniper {
        if tr.start != run.config {
            return Err(ModelError::InvalidParameter("replayed trace starts elsewhere".into()));
        }
        for (s, expect) in &tr.steps {
            match *s {
                Step::Move(t) => {
                    let i = run
                        .agent_in(t.pre[0])
                        .ok_or(ModelError::NotEnabled { pre: [t.pre[0], t.pre[1]], post: [t.post[0], t.post[1]] })?;
                    let j = (0..run.agents.len())
                        .find(|&j| j != i && run.agents[j] == t.pre[1])
                        .ok_or(ModelError::NotEnabled { pre: [t.pre[0], t.pre[1]], post: [t.post[0], t.post[1]] })?;
                    if !successors(proto, t.pre[0], t.pre[1]).contains(&(t.post[0], t.post[1])) {
                        return Err(ModelError::NotEnabled { pre: [t.pre[0], t.pre[1]], post: [t.post[0], t.post[1]] });
                    }
                    run.interact(i, j, t.post[0], t.post[1]);
                    step += 1;
                }
                Step::Snipe(q) => {
                    let i = run.agent_in(q).ok_or(ModelError::Unoccupied(q))?;
                    run.snipe_agent(i, step);
                }
            }
            if run.config != *expect {
                return Err(ModelError::Format("replayed step disagrees with the trace".into()));
            }
        }
    }

    let mut stable = 0u64;
    let mut last = run.output();
    let mut terminal = false;
    let mut converged = false;
    loop {
        // snipes due now, or all remaining ones once the run has settled
        let settled = terminal || (last.is_decided() && stable >= window);
        while let Some(&(t, target)) = pending.last() {
            if t > step && !settled {
                break;
            }
            pending.pop();
            match target {
                Some(q) => match run.agent_in(q) {
                    Some(i) => run.snipe_agent(i, step),
                    None => skipped.push((t, q)),
                },
                None => {
                    let support: Vec<StateId> = run.config.support().collect();
                    if let Some(&q) = support.choose(&mut rng) {
                        let i = run.agent_in(q).unwrap();
                        run.snipe_agent(i, step);
                    }
                }
            }
            stable = 0;
            terminal = false;
            converged = false;
            last = run.output();
            if settled {
                break;
            }
        }
        if pending.is_empty() || pending.last().unwrap().0 > step {
            if terminal || run.agents.len() < 2 {
                terminal = true;
                converged = true;
                if pending.is_empty() {
                    break;
                }
                continue;
            }
            if last.is_decided() && stable >= window {
                converged = true;
                if pending.is_empty() {
                    break;
                }
                continue;
            }
        }
        if step >= sched.max_steps {
            break;
        }

        let n = run.agents.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (p, q) = (run.agents[i], run.agents[j]);
        let succ = successors(proto, p, q);
        let &(a, b) = succ.choose(&mut rng).expect("successors are never empty");
        let silent = Transition::new(p, q, a, b).is_silent();
        run.interact(i, j, a, b);
        step += 1;
        let now = run.output();
        if now == last {
            stable += 1;
        } else {
            stable = 0;
            last = now;
        }
        if silent && is_terminal(proto, &run.config) {
            terminal = true;
        }
    }

    let final_input = arity.map(|k| {
        let mut x = vec![0u64; k];
        for o in run.origin.iter().flatten() {
            x[*o] += 1;
        }
        x
    });
    let terminal = terminal || is_terminal(proto, &run.config);
    if let Some(tr) = run.trace.as_mut() {
        tr.terminal = terminal;
    }
    Ok(RunOutcome {
        output: run.output(),
        final_config: run.config,
        converged,
        terminal,
        steps: step,
        snipes: run.snipes,
        skipped,
        final_input,
        trace: run.trace,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BudgetStats {
    pub snipes: usize,
    pub trials: usize,
    pub converged: usize,
    /// Converged runs whose output is the predicate on the initial input.
    pub correct_initial: usize,
    /// Converged runs whose output is the predicate on the surviving input.
    pub correct_post: usize,
    /// Converged runs whose snipe count is at most `InTol` of the initial input.
    pub within_intol: usize,
    /// Of those, runs whose output is the predicate on the surviving input.
    pub within_intol_correct_post: usize,
    pub mean_steps: f64,
}

impl BudgetStats {
    pub fn converged_fraction(&self) -> f64 {
        ratio(self.converged, self.trials)
    }

    pub fn correct_fraction(&self) -> f64 {
        ratio(self.correct_initial, self.converged)
    }

    pub fn correct_post_fraction(&self) -> f64 {
        ratio(self.correct_post, self.converged)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BatchStats {
    pub input: Vec<u64>,
    pub expected: bool,
    pub by_budget: Vec<BudgetStats>,
}

/// Runs `trials` seeded executions of input `x` for each snipe budget in
/// `budgets` (0 is no sniper, `k > 0` is `RandomBudget(k)`).
pub fn batch_estimate(
    b: &Built,
    x: &[u64],
    trials: usize,
    budgets: &[usize],
    sched: &SchedulerConfig,
    exec: Exec,
) -> Result<BatchStats, ModelError> {
    let expected = b.predicate.eval(x)?;
    let intol = crate::verifier::initial_tolerance(&b.predicate, x)?;
    let mut by_budget = Vec::new();
    for &k in budgets {
        let jobs: Vec<usize> = (0..trials).collect();
        let sniper = if k == 0 { SniperStrategy::None } else { SniperStrategy::RandomBudget(k) };
        let outcomes = exec.map(jobs, |trial| {
            let s = SchedulerConfig {
                seed: derive_seed(sched.seed, (k as u64) << 32 | trial as u64),
                record_trace: false,
                ..*sched
            };
            run_input(b, x, &s, &sniper)
        });
        let mut st = BudgetStats { snipes: k, trials, ..Default::default() };
        let mut steps = 0u64;
        for o in outcomes {
            let o = o?;
            if !o.converged {
                continue;
            }
            st.converged += 1;
            steps += o.steps;
            if o.output == Output::from_bool(expected) {
                st.correct_initial += 1;
            }
            let post = b.predicate.eval(o.final_input.as_deref().unwrap_or(x))?;
            let post_ok = o.output == Output::from_bool(post);
            if post_ok {
                st.correct_post += 1;
            }
            if crate::verifier::Tolerance::Finite(o.snipes.len() as u64) <= intol {
                st.within_intol += 1;
                if post_ok {
                    st.within_intol_correct_post += 1;
                }
            }
        }
        st.mean_steps = if st.converged > 0 { steps as f64 / st.converged as f64 } else { 0.0 };
        by_budget.push(st);
    }
    Ok(BatchStats { input: x.to_vec(), expected, by_budget })
}
