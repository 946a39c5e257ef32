use std::sync::Arc;

use super::{param_list, vars_default, Built, ConservationLaw, LawKind};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, StateId, TableProtocol, Transition};

/// Weak protocol for `Σ a_i·x_i >= 1`: an agent holds a signed pebble count,
/// and a negative holder absorbs a positive one's pebbles.
pub fn gen_majority(coeffs: &[i64]) -> Result<Built, ModelError> {
    let lo = coeffs.iter().copied().min().unwrap_or(0);
    let hi = coeffs.iter().copied().max().unwrap_or(0);
    if !(lo < 0 && 0 < hi) {
        return Err(ModelError::InvalidParameter(format!(
            "GenMajority needs coefficients of both signs, got ({})",
            param_list(coeffs)
        )));
    }
    if hi - lo > 100_000 {
        return Err(ModelError::TooLarge(format!("GenMajority range [{lo},{hi}]")));
    }
    let q = move |x: i64| StateId((x - lo) as u64);
    let mut transitions = Vec::new();
    for x in lo..0 {
        for y in 1..=hi {
            transitions.push(Transition::new(q(x), q(y), q(x + y), q(0)));
        }
    }
    let table = TableProtocol::new(
        format!("GenMajority({})", param_list(coeffs)),
        (lo..=hi).map(|x| x.to_string()).collect(),
        coeffs.iter().map(|&a| q(a)).collect(),
        OutputKind::Weak,
        (lo..=hi)
            .map(|x| match x.signum() {
                1 => Opinion::Accepting,
                0 => Opinion::Neutral,
                _ => Opinion::Rejecting,
            })
            .collect(),
        transitions,
    )?;
    Ok(Built {
        protocol: Arc::new(table),
        predicate: Predicate::new(vars_default(coeffs.len()), PredicateSpec::threshold(coeffs.to_vec(), 1))?,
        inputs: coeffs.iter().map(|&a| q(a)).collect(),
        laws: vec![ConservationLaw::scalar("pebble sum invariant", LawKind::Invariant, move |s| s.0 as i64 + lo)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::moves;

    #[test]
    fn only_two_non_silent_transitions() {
        let b = gen_majority(&[1, -2]).unwrap();
        let p = b.protocol.as_ref();
        let id = |n: &str| p.state_id(n).unwrap();
        let mut found = Vec::new();
        for a in 0..p.num_states() {
            for c in a..p.num_states() {
                for (x, y) in moves(p, StateId(a), StateId(c)) {
                    let mut pre = [p.state_name(StateId(a)), p.state_name(StateId(c))];
                    let mut post = [p.state_name(x), p.state_name(y)];
                    pre.sort();
                    post.sort();
                    found.push((pre, post));
                }
            }
        }
        found.sort();
        let s = |a: &str, b: &str| {
            let mut v = [a.to_string(), b.to_string()];
            v.sort();
            v
        };
        let mut want = vec![(s("1", "-2"), s("0", "-1")), (s("1", "-1"), s("0", "0"))];
        want.sort();
        assert_eq!(found, want);
        assert_eq!(p.opinion(id("0")), Opinion::Neutral);
        assert!(gen_majority(&[1, 2]).is_err());
    }
}
