use std::collections::{HashMap, HashSet};

use super::config::StateId;
use super::error::ModelError;
use super::protocol::{moves, Opinion, OutputKind, Protocol, Transition};

/// A protocol with an explicit state table and transition list.
///
/// Only non-silent transitions are stored; each unordered preset is indexed
/// once and the remaining pairs are silently completed by [`successors`].
///
/// [`successors`]: super::protocol::successors
#[derive(Clone, Debug)]
pub struct TableProtocol {
    name: String,
    names: Vec<String>,
    by_name: HashMap<String, StateId>,
    initial: Vec<StateId>,
    kind: OutputKind,
    opinions: Vec<Opinion>,
    transitions: Vec<Transition>,
    by_pair: HashMap<(StateId, StateId), Vec<usize>>,
}

fn pair_key(p: StateId, q: StateId) -> (StateId, StateId) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

impl TableProtocol {
    /// Builds and audits a table protocol. Silent transitions are dropped and
    /// orientation-equivalent duplicates merged.
    pub fn new(
        name: impl Into<String>,
        names: Vec<String>,
        initial: Vec<StateId>,
        kind: OutputKind,
        opinions: Vec<Opinion>,
        transitions: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        let n = names.len() as u64;
        let mut by_name = HashMap::with_capacity(names.len());
        for (i, s) in names.iter().enumerate() {
            if by_name.insert(s.clone(), StateId(i as u64)).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        if opinions.len() != names.len() {
            return Err(ModelError::BadPartition(format!("{} opinions for {} states", opinions.len(), names.len())));
        }
        if kind == OutputKind::Consensus && opinions.contains(&Opinion::Neutral) {
            return Err(ModelError::NeutralInConsensus);
        }
        let mut init = initial;
        init.sort_unstable();
        init.dedup();
        if let Some(&q) = init.iter().find(|q| q.0 >= n) {
            return Err(ModelError::UnknownState(q));
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for t in transitions {
            for q in t.pre.iter().chain(t.post.iter()) {
                if q.0 >= n {
                    return Err(ModelError::UnknownState(*q));
                }
            }
            if t.is_silent() {
                continue;
            }
            let c = t.canonical();
            if seen.insert(c) {
                kept.push(c);
            }
        }
        kept.sort_unstable();
        let mut by_pair: HashMap<(StateId, StateId), Vec<usize>> = HashMap::new();
        for (i, t) in kept.iter().enumerate() {
            by_pair.entry(pair_key(t.pre[0], t.pre[1])).or_default().push(i);
        }
        Ok(TableProtocol {
            name: name.into(),
            names,
            by_name,
            initial: init,
            kind,
            opinions,
            transitions: kept,
            by_pair,
        })
    }

    /// Non-silent transitions in canonical orientation, sorted.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl Protocol for TableProtocol {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn num_states(&self) -> u64 {
        self.names.len() as u64
    }

    fn state_name(&self, q: StateId) -> String {
        self.names.get(q.index()).cloned().unwrap_or_else(|| q.to_string())
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    fn initial_states(&self) -> Vec<StateId> {
        self.initial.clone()
    }

    fn output_kind(&self) -> OutputKind {
        self.kind
    }

    fn opinion(&self, q: StateId) -> Opinion {
        self.opinions[q.index()]
    }

    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let Some(ids) = self.by_pair.get(&pair_key(p, q)) else {
            return Vec::new();
        };
        ids.iter()
            .map(|&i| {
                let t = &self.transitions[i];
                if t.pre == [p, q] {
                    (t.post[0], t.post[1])
                } else {
                    (t.post[1], t.post[0])
                }
            })
            .collect()
    }
}

/// Tabulates a lazily defined protocol. Fails when it has more than
/// `max_states` states, since every unordered pair is queried.
pub fn materialize(proto: &dyn Protocol, max_states: u64) -> Result<TableProtocol, ModelError> {
    let n = proto.num_states();
    if n > max_states {
        return Err(ModelError::TooLarge(format!("{} has {} states (limit {})", proto.name(), n, max_states)));
    }
    let names = (0..n).map(|i| proto.state_name(StateId(i))).collect();
    let opinions = (0..n).map(|i| proto.opinion(StateId(i))).collect();
    let mut transitions = Vec::new();
    for a in 0..n {
        for b in a..n {
            let (p, q) = (StateId(a), StateId(b));
            for (x, y) in moves(proto, p, q) {
                transitions.push(Transition::new(p, q, x, y));
            }
        }
    }
    TableProtocol::new(proto.name(), names, proto.initial_states(), proto.output_kind(), opinions, transitions)
}

/// Searches for a bijection between the state sets that maps initial states,
/// opinions and the non-silent transition relation onto each other. Intended
/// for small tables: candidates are enumerated per opinion class.
pub fn find_isomorphism(a: &TableProtocol, b: &TableProtocol) -> Option<Vec<StateId>> {
    let n = a.names.len();
    if n != b.names.len() || a.kind != b.kind || a.transitions.len() != b.transitions.len() {
        return None;
    }
    let init_a: HashSet<StateId> = a.initial.iter().copied().collect();
    let init_b: HashSet<StateId> = b.initial.iter().copied().collect();
    let target: HashSet<Transition> = b.transitions.iter().copied().collect();
    let mut map: Vec<Option<StateId>> = vec![None; n];
    let mut used = vec![false; n];

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        a: &TableProtocol,
        b: &TableProtocol,
        init_a: &HashSet<StateId>,
        init_b: &HashSet<StateId>,
        target: &HashSet<Transition>,
        map: &mut Vec<Option<StateId>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = map.len();
        if i == n {
            return a.transitions.iter().all(|t| {
                let f = |q: StateId| map[q.index()].unwrap();
                target.contains(&Transition::new(f(t.pre[0]), f(t.pre[1]), f(t.post[0]), f(t.post[1])).canonical())
            });
        }
        let qa = StateId(i as u64);
        for j in 0..n {
            let qb = StateId(j as u64);
            if used[j] || a.opinions[i] != b.opinions[j] || init_a.contains(&qa) != init_b.contains(&qb) {
                continue;
            }
            map[i] = Some(qb);
            used[j] = true;
            if go(i + 1, a, b, init_a, init_b, target, map, used) {
                return true;
            }
            used[j] = false;
            map[i] = None;
        }
        false
    }

    if go(0, a, b, &init_a, &init_b, &target, &mut map, &mut used) {
        Some(map.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}
