use std::sync::Arc;

use super::{vars_default, Built, ConservationLaw, LawKind};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, StateId, TableProtocol, Transition};

/// Levels `1..=t`; equal levels push one agent up, level `t` pulls others up.
/// State `StateId(x - 1)` is level `x`.
pub fn tower(t: i64) -> Result<Built, ModelError> {
    if t < 1 {
        return Err(ModelError::InvalidParameter(format!("Tower needs t >= 1, got {t}")));
    }
    if t > 1_000_000 {
        return Err(ModelError::TooLarge(format!("Tower threshold {t}")));
    }
    let q = |x: i64| StateId((x - 1) as u64);
    let mut transitions = Vec::new();
    for x in 1..t {
        transitions.push(Transition::new(q(x), q(x), q(x), q(x + 1)));
        transitions.push(Transition::new(q(x), q(t), q(t), q(t)));
    }
    let table = TableProtocol::new(
        format!("Tower({t})"),
        (1..=t).map(|x| x.to_string()).collect(),
        vec![q(1)],
        OutputKind::Consensus,
        (1..=t).map(|x| if x == t { Opinion::Accepting } else { Opinion::Rejecting }).collect(),
        transitions,
    )?;
    Ok(Built {
        protocol: Arc::new(table),
        predicate: Predicate::new(vars_default(1), PredicateSpec::threshold(vec![1], t))?,
        inputs: vec![q(1)],
        laws: vec![ConservationLaw::scalar("level sum strictly increases", LawKind::StrictlyIncreasing, |s| {
            s.0 as i64 + 1
        })],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let b = tower(4).unwrap();
        assert_eq!(b.protocol.num_states(), 4);
        let one = tower(1).unwrap();
        assert_eq!(one.protocol.num_states(), 1);
        assert_eq!(one.protocol.opinion(StateId(0)), Opinion::Accepting);
    }
}
