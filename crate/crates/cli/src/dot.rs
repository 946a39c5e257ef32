//! Petri-net rendering in Graphviz syntax.

use std::collections::BTreeSet;
use std::fmt::Write;

use pp_core::model::TableProtocol;
use pp_core::{Opinion, Protocol, StateId, Transition};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Non-silent transitions up to orientation, each once.
pub fn net_transitions(p: &TableProtocol) -> Vec<Transition> {
    let set: BTreeSet<Transition> = p
        .transitions()
        .iter()
        .filter(|t| !t.is_silent())
        .map(|t| {
            let mut pre = t.pre;
            let mut post = t.post;
            pre.sort();
            post.sort();
            Transition::new(pre[0], pre[1], post[0], post[1])
        })
        .collect();
    set.into_iter().collect()
}

fn arcs(pair: [StateId; 2]) -> Vec<(StateId, usize)> {
    if pair[0] == pair[1] {
        vec![(pair[0], 2)]
    } else {
        vec![(pair[0], 1), (pair[1], 1)]
    }
}

pub fn export_dot(p: &TableProtocol) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&p.name()));
    out.push_str("  rankdir=LR;\n");
    let initial: BTreeSet<StateId> = p.initial_states().into_iter().collect();
    for (i, name) in p.names().iter().enumerate() {
        let q = StateId(i as u64);
        let (color, shape) = match p.opinion(q) {
            Opinion::Accepting => ("palegreen", "doublecircle"),
            Opinion::Rejecting => ("lightpink", "circle"),
            Opinion::Neutral => ("lightgrey", "circle"),
        };
        let pen = if initial.contains(&q) { ", penwidth=2" } else { "" };
        let _ = writeln!(out, "  p{i} [label={}, shape={shape}, style=filled, fillcolor={color}{pen}];", quote(name));
    }
    for (k, t) in net_transitions(p).iter().enumerate() {
        let _ = writeln!(out, "  t{k} [label=\"\", shape=box, width=0.3, height=0.1, style=filled, fillcolor=black];");
        for (q, n) in arcs(t.pre) {
            edge(&mut out, &format!("p{}", q.0), &format!("t{k}"), n);
        }
        for (q, n) in arcs(t.post) {
            edge(&mut out, &format!("t{k}"), &format!("p{}", q.0), n);
        }
    }
    out.push_str("}\n");
    out
}

fn edge(out: &mut String, from: &str, to: &str, n: usize) {
    if n == 1 {
        let _ = writeln!(out, "  {from} -> {to};");
    } else {
        let _ = writeln!(out, "  {from} -> {to} [label=\"{n}\"];");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pp_core::builders::tower;
    use pp_core::model::materialize;

    #[test]
    fn tower_four() {
        let b = tower(4).unwrap();
        let t = materialize(b.protocol.as_ref(), 100).unwrap();
        let dot = export_dot(&t);
        assert_eq!(dot.matches("shape=box").count(), 6);
        assert_eq!(dot.lines().filter(|l| l.contains("circle")).count(), 4);
        // (1,1) -> (1,2) consumes two agents from place 1
        assert!(dot.contains("-> t0 [label=\"2\"]"));
    }
}
