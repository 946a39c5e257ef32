use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::StateId;

/// The opinion an individual agent holds in a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opinion {
    Accepting,
    Neutral,
    Rejecting,
}

impl Opinion {
    pub fn flipped(self) -> Opinion {
        match self {
            Opinion::Accepting => Opinion::Rejecting,
            Opinion::Rejecting => Opinion::Accepting,
            Opinion::Neutral => Opinion::Neutral,
        }
    }
}

/// How agent opinions combine into a configuration output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    /// Two-way partition; decided only on unanimous support.
    Consensus,
    /// Three-way partition with neutral states; rejects when nobody accepts.
    Weak,
}

/// Output of a configuration, or of a configuration under fair executions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Accept,
    Reject,
    Undecided,
}

impl Output {
    pub fn from_bool(b: bool) -> Output {
        if b {
            Output::Accept
        } else {
            Output::Reject
        }
    }

    pub fn is_decided(self) -> bool {
        self != Output::Undecided
    }

    pub fn flipped(self) -> Output {
        match self {
            Output::Accept => Output::Reject,
            Output::Reject => Output::Accept,
            Output::Undecided => Output::Undecided,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Output::Accept => "accept",
            Output::Reject => "reject",
            Output::Undecided => "undecided",
        })
    }
}

/// A pairwise transition `pre[0], pre[1] -> post[0], post[1]`. The agent in
/// `pre[0]` moves to `post[0]`; for single-protocol semantics only the two
/// multisets matter, but products need the orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub pre: [StateId; 2],
    pub post: [StateId; 2],
}

impl Transition {
    pub fn new(p: StateId, q: StateId, p2: StateId, q2: StateId) -> Self {
        Transition { pre: [p, q], post: [p2, q2] }
    }

    pub fn identity(p: StateId, q: StateId) -> Self {
        Transition::new(p, q, p, q)
    }

    /// `pre = post` as multisets.
    pub fn is_silent(&self) -> bool {
        same_pair(self.pre, self.post)
    }

    pub fn swapped(&self) -> Transition {
        Transition::new(self.pre[1], self.pre[0], self.post[1], self.post[0])
    }

    /// The orientation-equivalent representative with the smaller preset first.
    pub fn canonical(&self) -> Transition {
        let s = self.swapped();
        if s < *self {
            s
        } else {
            *self
        }
    }
}

pub(crate) fn same_pair(a: [StateId; 2], b: [StateId; 2]) -> bool {
    (a[0] == b[0] && a[1] == b[1]) || (a[0] == b[1] && a[1] == b[0])
}

/// A generalized protocol with a consensus or weak-consensus output.
///
/// State sets may be far too large to tabulate (products, the modulo
/// constructions), so states are addressed by id and transitions are
/// produced on demand for a given pair of states.
pub trait Protocol: Send + Sync {
    fn name(&self) -> String;

    fn num_states(&self) -> u64;

    fn state_name(&self, q: StateId) -> String;

    /// Reverse lookup of [`Protocol::state_name`]. The default scans the
    /// whole state table.
    fn state_id(&self, name: &str) -> Option<StateId> {
        if self.num_states() > 1 << 22 {
            return None;
        }
        (0..self.num_states()).map(StateId).find(|&q| self.state_name(q) == name)
    }

    fn initial_states(&self) -> Vec<StateId>;

    fn output_kind(&self) -> OutputKind;

    fn opinion(&self, q: StateId) -> Opinion;

    /// Post-states, oriented as `(p', q')` for the agents in `(p, q)`, of the
    /// explicitly defined transitions with preset `{p, q}`. Silent completion
    /// is not included here; see [`successors`].
    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)>;
}

/// All oriented outcomes of an interaction between agents in `p` and `q`.
///
/// Rules whose post multiset equals the preset are normalised to the
/// identity, both orientations are offered when `p == q`, and the identity
/// is synthesised when no rule covers the pair.
pub fn successors(proto: &dyn Protocol, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
    let mut out: Vec<(StateId, StateId)> = Vec::new();
    for (a, b) in proto.rules(p, q) {
        if same_pair([a, b], [p, q]) {
            out.push((p, q));
        } else {
            out.push((a, b));
            if p == q {
                out.push((b, a));
            }
        }
    }
    if out.is_empty() {
        out.push((p, q));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Non-silent outcomes of an interaction between `p` and `q`.
pub fn moves(proto: &dyn Protocol, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
    successors(proto, p, q).into_iter().filter(|&(a, b)| !same_pair([a, b], [p, q])).collect()
}
