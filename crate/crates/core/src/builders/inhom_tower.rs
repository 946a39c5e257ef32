use std::collections::HashMap;
use std::sync::Arc;

use super::{constant, param_list, vars_default, Built, ConservationLaw, LawKind};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, StateId, TableProtocol, Transition};

pub fn interval_name(s: i64, e: i64) -> String {
    format!("[{s},{e})")
}

/// The interval states of a tower with top floor `top`, restricted to a
/// given set of lengths. State ids follow `states` order.
#[derive(Clone, Debug)]
pub struct IntervalTable {
    pub top: i64,
    pub states: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), StateId>,
}

impl IntervalTable {
    pub fn new(top: i64, lens: &[i64]) -> Self {
        let mut ls: Vec<i64> = lens.iter().copied().filter(|&l| l >= 1 && l <= top).collect();
        ls.sort_unstable();
        ls.dedup();
        let mut states = Vec::new();
        for &l in &ls {
            for s in 0..=(top - l) {
                states.push((s, s + l));
            }
        }
        states.sort_unstable_by_key(|&(s, e)| (e - s, s));
        let index = states.iter().enumerate().map(|(i, &iv)| (iv, StateId(i as u64))).collect();
        IntervalTable { top, states, index }
    }

    pub fn id(&self, s: i64, e: i64) -> Option<StateId> {
        self.index.get(&(s, e)).copied()
    }

    pub fn interval(&self, q: StateId) -> (i64, i64) {
        self.states[q.index()]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Oriented outcomes of the step and accum rules for the pair `(p, q)`.
    pub fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let top = self.top;
        let (s1, e1) = self.interval(p);
        let (s2, e2) = self.interval(q);
        let mut out = Vec::new();
        let overlap = s1 < e2 && s2 < e1;
        if overlap && e1 < top && e2 < top {
            if s1 <= s2 {
                out.push((p, self.index[&(s2 + 1, e2 + 1)]));
            }
            if s2 <= s1 {
                out.push((self.index[&(s1 + 1, e1 + 1)], q));
            }
        }
        if e1 == top && e2 < top {
            out.push((p, self.index[&(top - (e2 - s2), top)]));
        }
        if e2 == top && e1 < top {
            out.push((self.index[&(top - (e1 - s1), top)], q));
        }
        out
    }

    pub fn table(&self, name: String, initial: Vec<StateId>) -> Result<TableProtocol, ModelError> {
        let n = self.states.len();
        let mut transitions = Vec::new();
        for a in 0..n {
            for b in a..n {
                let (p, q) = (StateId(a as u64), StateId(b as u64));
                for (x, y) in self.rules(p, q) {
                    transitions.push(Transition::new(p, q, x, y));
                }
            }
        }
        TableProtocol::new(
            name,
            self.states.iter().map(|&(s, e)| interval_name(s, e)).collect(),
            initial,
            OutputKind::Consensus,
            self.states
                .iter()
                .map(|&(_, e)| if e == self.top { Opinion::Accepting } else { Opinion::Rejecting })
                .collect(),
            transitions,
        )
    }
}

/// Tower whose agents occupy `a_i` consecutive floors. Decides
/// `Σ a_i·x_i >= t`; the top floor is `t - 1`, so intervals end at most at `t`
/// and an interval ending at `t` accepts.
pub fn inhom_tower(coeffs: &[i64], t: i64) -> Result<Built, ModelError> {
    if coeffs.is_empty() {
        return Err(ModelError::InvalidParameter("InhomTower needs at least one coefficient".into()));
    }
    if let Some(a) = coeffs.iter().find(|&&a| a <= 0) {
        return Err(ModelError::InvalidParameter(format!("InhomTower needs positive coefficients, got {a}")));
    }
    let vars = vars_default(coeffs.len());
    let predicate = Predicate::new(vars.clone(), PredicateSpec::threshold(coeffs.to_vec(), t))?;
    if t <= 0 {
        return Ok(constant(true, vars)?.with_predicate(predicate));
    }
    if t > 20_000 {
        return Err(ModelError::TooLarge(format!("InhomTower threshold {t}")));
    }
    let clamped: Vec<i64> = coeffs.iter().map(|&a| a.min(t)).collect();
    let iv = IntervalTable::new(t, &clamped);
    let inputs: Vec<StateId> = clamped.iter().map(|&a| iv.id(0, a).expect("initial interval")).collect();
    let table = iv.table(format!("InhomTower({};{t})", param_list(coeffs)), inputs.clone())?;
    let lens = iv.states.clone();
    Ok(Built {
        protocol: Arc::new(table),
        predicate,
        inputs,
        laws: vec![ConservationLaw::scalar("total interval length invariant", LawKind::Invariant, move |q| {
            let (s, e) = lens[q.index()];
            e - s
        })],
    })
}
