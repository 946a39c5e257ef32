//! Single-step semantics: outputs, enabled transitions, moves and snipes.

use super::config::{Configuration, StateId};
use super::error::ModelError;
use super::protocol::{same_pair, successors, Opinion, Output, OutputKind, Protocol, Transition};

/// Output of a set of occupied states. The empty set rejects.
pub fn output_of_support<I>(proto: &dyn Protocol, support: I) -> Output
where
    I: IntoIterator<Item = StateId>,
{
    let (mut acc, mut rej, mut neu) = (false, false, false);
    for q in support {
        match proto.opinion(q) {
            Opinion::Accepting => acc = true,
            Opinion::Rejecting => rej = true,
            Opinion::Neutral => neu = true,
        }
    }
    match proto.output_kind() {
        OutputKind::Consensus => match (acc, rej, neu) {
            (_, _, true) => Output::Undecided,
            (true, false, _) => Output::Accept,
            (false, _, _) => Output::Reject,
            _ => Output::Undecided,
        },
        OutputKind::Weak => match (acc, rej) {
            (true, false) => Output::Accept,
            (false, _) => Output::Reject,
            (true, true) => Output::Undecided,
        },
    }
}

pub fn check_states(proto: &dyn Protocol, c: &Configuration) -> Result<(), ModelError> {
    match c.max_state() {
        Some(q) if q.0 >= proto.num_states() => Err(ModelError::UnknownState(q)),
        _ => Ok(()),
    }
}

pub fn output_of(proto: &dyn Protocol, c: &Configuration) -> Result<Output, ModelError> {
    check_states(proto, c)?;
    Ok(output_of_support(proto, c.support()))
}

/// Every transition whose preset fits into `c`, silent ones included unless
/// `non_silent_only` is set.
pub fn enabled_transitions(proto: &dyn Protocol, c: &Configuration, non_silent_only: bool) -> Vec<Transition> {
    let entries = c.entries();
    let mut out = Vec::new();
    for (i, &(p, np)) in entries.iter().enumerate() {
        for &(q, _) in &entries[i..] {
            if p == q && np < 2 {
                continue;
            }
            for (a, b) in successors(proto, p, q) {
                let t = Transition::new(p, q, a, b);
                if non_silent_only && t.is_silent() {
                    continue;
                }
                out.push(t);
            }
        }
    }
    out
}

pub fn is_enabled(c: &Configuration, pre: [StateId; 2]) -> bool {
    if pre[0] == pre[1] {
        c.count(pre[0]) >= 2
    } else {
        c.count(pre[0]) >= 1 && c.count(pre[1]) >= 1
    }
}

/// `C - pre(t) + post(t)` without checking membership of `t` in the protocol.
pub fn fire(c: &Configuration, t: &Transition) -> Result<Configuration, ModelError> {
    if !is_enabled(c, t.pre) {
        return Err(ModelError::NotEnabled { pre: t.pre, post: t.post });
    }
    if t.is_silent() {
        return Ok(c.clone());
    }
    let mut d = c.clone();
    d.remove(t.pre[0], 1);
    d.remove(t.pre[1], 1);
    d.add(t.post[0], 1);
    d.add(t.post[1], 1);
    Ok(d)
}

/// Applies a transition of `proto` to `c`. The transition must be one of the
/// protocol's outcomes for its preset (orientation is irrelevant).
pub fn apply_move(proto: &dyn Protocol, c: &Configuration, t: &Transition) -> Result<Configuration, ModelError> {
    let known = successors(proto, t.pre[0], t.pre[1]).into_iter().any(|(a, b)| same_pair([a, b], t.post));
    if !known {
        return Err(ModelError::NotEnabled { pre: t.pre, post: t.post });
    }
    fire(c, t)
}

pub fn apply_snipe(c: &Configuration, q: StateId) -> Result<Configuration, ModelError> {
    let mut d = c.clone();
    if c.count(q) == 0 || !d.remove(q, 1) {
        return Err(ModelError::Unoccupied(q));
    }
    Ok(d)
}

pub fn is_terminal(proto: &dyn Protocol, c: &Configuration) -> bool {
    let entries = c.entries();
    for (i, &(p, np)) in entries.iter().enumerate() {
        for &(q, _) in &entries[i..] {
            if p == q && np < 2 {
                continue;
            }
            if successors(proto, p, q).into_iter().any(|(a, b)| !same_pair([a, b], [p, q])) {
                return false;
            }
        }
    }
    true
}

/// Distinct configurations reachable in one non-silent move, each with one
/// transition producing it.
pub fn move_successors(proto: &dyn Protocol, c: &Configuration) -> Vec<(Transition, Configuration)> {
    let mut out: Vec<(Transition, Configuration)> = Vec::new();
    for t in enabled_transitions(proto, c, true) {
        let d = fire(c, &t).expect("enabled by construction");
        if !out.iter().any(|(_, e)| *e == d) {
            out.push((t, d));
        }
    }
    out
}

/// Renders a configuration as sorted `count×name` entries.
pub fn config_to_strings(proto: &dyn Protocol, c: &Configuration) -> Vec<String> {
    c.entries().iter().map(|&(q, n)| format!("{}×{}", n, proto.state_name(q))).collect()
}

/// Parses one `count×name` (or `count*name`, or a bare `name`) entry.
pub fn parse_config_entry(proto: &dyn Protocol, s: &str) -> Result<(StateId, u32), ModelError> {
    let s = s.trim();
    let (count, name) = match s.split_once('×').or_else(|| s.split_once('*')) {
        Some((n, name)) if n.trim().parse::<u32>().is_ok() => (n.trim().parse::<u32>().unwrap(), name.trim()),
        _ => (1, s),
    };
    let q = proto.state_id(name).ok_or_else(|| ModelError::UnknownStateName(name.to_string()))?;
    Ok((q, count))
}

pub fn config_from_strings<S: AsRef<str>>(proto: &dyn Protocol, entries: &[S]) -> Result<Configuration, ModelError> {
    let mut pairs = Vec::with_capacity(entries.len());
    for e in entries {
        pairs.push(parse_config_entry(proto, e.as_ref())?);
    }
    Ok(Configuration::from_counts(pairs))
}

/// `"2×a, 1×b"`; `⟨⟩` for the empty configuration.
pub fn format_config(proto: &dyn Protocol, c: &Configuration) -> String {
    if c.is_empty() {
        return "⟨⟩".to_string();
    }
    config_to_strings(proto, c).join(", ")
}
