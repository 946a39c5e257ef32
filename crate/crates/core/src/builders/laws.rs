use std::fmt;
use std::sync::Arc;

use crate::model::{StateId, Transition};

type Check = dyn Fn(&Transition) -> bool + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    Invariant,
    InvariantMod(i64),
    NonIncreasing,
    NonDecreasing,
    StrictlyIncreasing,
}

/// A property of single move edges, usually a weighted sum over agents.
#[derive(Clone)]
pub struct ConservationLaw {
    pub name: String,
    check: Arc<Check>,
}

impl fmt::Debug for ConservationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConservationLaw({})", self.name)
    }
}

impl ConservationLaw {
    pub fn new<F>(name: impl Into<String>, check: F) -> Self
    where
        F: Fn(&Transition) -> bool + Send + Sync + 'static,
    {
        ConservationLaw { name: name.into(), check: Arc::new(check) }
    }

    /// `Σ weight(q)·C(q)` compared componentwise before and after a move.
    pub fn weighted<W>(name: impl Into<String>, kind: LawKind, weight: W) -> Self
    where
        W: Fn(StateId) -> Vec<i64> + Send + Sync + 'static,
    {
        Self::new(name, move |t: &Transition| {
            let before = sum2(&weight(t.pre[0]), &weight(t.pre[1]));
            let after = sum2(&weight(t.post[0]), &weight(t.post[1]));
            before.iter().zip(&after).all(|(&b, &a)| match kind {
                LawKind::Invariant => a == b,
                LawKind::InvariantMod(m) => (a - b).rem_euclid(m) == 0,
                LawKind::NonIncreasing => a <= b,
                LawKind::NonDecreasing => a >= b,
                LawKind::StrictlyIncreasing => a > b,
            })
        })
    }

    pub fn scalar<W>(name: impl Into<String>, kind: LawKind, weight: W) -> Self
    where
        W: Fn(StateId) -> i64 + Send + Sync + 'static,
    {
        Self::weighted(name, kind, move |q| vec![weight(q)])
    }

    /// True if the law holds on the move `t`. Silent moves always pass.
    pub fn holds(&self, t: &Transition) -> bool {
        t.is_silent() || (self.check)(t)
    }

    /// The same law read through a state projection, e.g. onto one
    /// component of a product. Moves that project to silent ones pass.
    pub fn lift<P>(&self, prefix: &str, project: P) -> ConservationLaw
    where
        P: Fn(StateId) -> StateId + Send + Sync + 'static,
    {
        let inner = self.clone();
        ConservationLaw::new(format!("{prefix}{}", self.name), move |t: &Transition| {
            let p = Transition::new(project(t.pre[0]), project(t.pre[1]), project(t.post[0]), project(t.post[1]));
            inner.holds(&p)
        })
    }
}

fn sum2(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}
