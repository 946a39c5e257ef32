use std::sync::Arc;

use super::{vars_default, Built, ConservationLaw};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, StateId, TableProtocol, Transition};

/// States `0..=t` count pebbles; two agents pool their pebbles, and once a
/// pair holds at least `t` both jump to `t`.
pub fn pebbles(t: i64) -> Result<Built, ModelError> {
    if t < 1 {
        return Err(ModelError::InvalidParameter(format!("Pebbles needs t >= 1, got {t}")));
    }
    if t > 100_000 {
        return Err(ModelError::TooLarge(format!("Pebbles threshold {t}")));
    }
    let q = |x: i64| StateId(x as u64);
    let mut transitions = Vec::new();
    for x in 0..=t {
        for y in x..=t {
            if x + y < t {
                transitions.push(Transition::new(q(x), q(y), q(x + y), q(0)));
            } else {
                transitions.push(Transition::new(q(x), q(y), q(t), q(t)));
            }
        }
    }
    let names = (0..=t).map(|x| x.to_string()).collect();
    let opinions = (0..=t).map(|x| if x == t { Opinion::Accepting } else { Opinion::Rejecting }).collect();
    let table =
        TableProtocol::new(format!("Pebbles({t})"), names, vec![q(1)], OutputKind::Consensus, opinions, transitions)?;
    let top = StateId(t as u64);
    let pebbles_law =
        ConservationLaw::new("pebbles: constant below saturation, else non-decreasing", move |tr: &Transition| {
            let w = |s: StateId| s.0 as i64;
            let before = w(tr.pre[0]) + w(tr.pre[1]);
            let after = w(tr.post[0]) + w(tr.post[1]);
            if tr.post == [top, top] {
                after >= before
            } else {
                after == before
            }
        });
    Ok(Built {
        protocol: Arc::new(table),
        predicate: Predicate::new(vars_default(1), PredicateSpec::threshold(vec![1], t))?,
        inputs: vec![q(1)],
        laws: vec![pebbles_law],
    })
}
