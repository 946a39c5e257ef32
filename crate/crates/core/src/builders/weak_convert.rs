use std::collections::HashSet;
use std::sync::Arc;

use super::Built;
use crate::model::{materialize, ModelError, Opinion, OutputKind, Protocol, StateId, TableProtocol, Transition};

/// A consensus protocol obtained from a weak one by giving neutral agents a
/// sign. Keeps the projection back onto the weak protocol's states.
#[derive(Clone, Debug)]
pub struct WeakConverted {
    pub table: TableProtocol,
    projection: Vec<StateId>,
}

impl WeakConverted {
    /// The weak-protocol state an agent simulates.
    pub fn project(&self, q: StateId) -> StateId {
        self.projection[q.index()]
    }

    pub fn projection(&self) -> &[StateId] {
        &self.projection
    }
}

impl Protocol for WeakConverted {
    fn name(&self) -> String {
        self.table.name()
    }
    fn num_states(&self) -> u64 {
        self.table.num_states()
    }
    fn state_name(&self, q: StateId) -> String {
        self.table.state_name(q)
    }
    fn state_id(&self, name: &str) -> Option<StateId> {
        self.table.state_id(name)
    }
    fn initial_states(&self) -> Vec<StateId> {
        self.table.initial_states()
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }
    fn opinion(&self, q: StateId) -> Opinion {
        self.table.opinion(q)
    }
    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        self.table.rules(p, q)
    }
}

pub fn weak_convert(weak: &Built) -> Result<Built, ModelError> {
    let p = weak.protocol.as_ref();
    if p.output_kind() != OutputKind::Weak {
        return Err(ModelError::InvalidParameter(format!("{} is not a weak protocol", p.name())));
    }
    let src = materialize(p, 20_000)?;
    let n = src.num_states();
    let names: HashSet<String> = src.names().iter().cloned().collect();
    let signed = |name: &str, plus: bool| {
        let short = format!("{}{}", if plus { '+' } else { '-' }, name);
        if names.contains(&short) {
            format!("({name},{})", if plus { '+' } else { '-' })
        } else {
            short
        }
    };

    // plus[q] / minus[q]: the signed copies of a neutral q; both are q itself otherwise
    let mut new_names = Vec::new();
    let mut opinions = Vec::new();
    let mut projection = Vec::new();
    let mut plus = vec![StateId(0); n as usize];
    let mut minus = vec![StateId(0); n as usize];
    for i in 0..n {
        let q = StateId(i);
        let name = src.state_name(q);
        match src.opinion(q) {
            Opinion::Neutral => {
                plus[i as usize] = StateId(new_names.len() as u64);
                new_names.push(signed(&name, true));
                opinions.push(Opinion::Accepting);
                projection.push(q);
                minus[i as usize] = StateId(new_names.len() as u64);
                new_names.push(signed(&name, false));
                opinions.push(Opinion::Rejecting);
                projection.push(q);
            }
            o => {
                let id = StateId(new_names.len() as u64);
                plus[i as usize] = id;
                minus[i as usize] = id;
                new_names.push(name);
                opinions.push(o);
                projection.push(q);
            }
        }
    }
    let neutral = |q: StateId| src.opinion(q) == Opinion::Neutral;
    let inj = |q: StateId| minus[q.index()];
    let preimages = |q: StateId| {
        if neutral(q) {
            vec![plus[q.index()], minus[q.index()]]
        } else {
            vec![plus[q.index()]]
        }
    };

    let mut transitions = Vec::new();
    // derived
    for t in src.transitions() {
        for &a in &preimages(t.pre[0]) {
            for &b in &preimages(t.pre[1]) {
                transitions.push(Transition::new(a, b, inj(t.post[0]), inj(t.post[1])));
            }
        }
    }
    let all: Vec<StateId> = (0..n).map(StateId).collect();
    for &qe in all.iter().filter(|&&q| neutral(q)) {
        for &qa in &all {
            match src.opinion(qa) {
                // witnessPos
                Opinion::Accepting => transitions.push(Transition::new(
                    plus[qa.index()],
                    minus[qe.index()],
                    plus[qa.index()],
                    plus[qe.index()],
                )),
                // witnessNeg
                Opinion::Rejecting => transitions.push(Transition::new(
                    plus[qa.index()],
                    plus[qe.index()],
                    plus[qa.index()],
                    minus[qe.index()],
                )),
                // convince
                Opinion::Neutral => transitions.push(Transition::new(
                    minus[qe.index()],
                    plus[qa.index()],
                    minus[qe.index()],
                    minus[qa.index()],
                )),
            }
        }
    }
    let initial: Vec<StateId> = src.initial_states().into_iter().map(inj).collect();
    let table = TableProtocol::new(
        format!("WeakConvert({})", src.name()),
        new_names,
        initial,
        OutputKind::Consensus,
        opinions,
        transitions,
    )?;
    let proj = Arc::new(projection.clone());
    let laws = weak
        .laws
        .iter()
        .map(|l| {
            let proj = Arc::clone(&proj);
            l.lift("", move |q| proj[q.index()])
        })
        .collect();
    Ok(Built {
        protocol: Arc::new(WeakConverted { table, projection }),
        predicate: weak.predicate.clone(),
        inputs: weak.inputs.iter().map(|&q| inj(q)).collect(),
        laws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::gen_majority;
    use crate::model::{apply_move, Configuration};

    #[test]
    fn neutral_states_split() {
        let w = weak_convert(&gen_majority(&[1, -2]).unwrap()).unwrap();
        let p = w.protocol.as_ref();
        let mut names: Vec<String> = (0..p.num_states()).map(|i| p.state_name(StateId(i))).collect();
        names.sort();
        assert_eq!(names, vec!["+0", "-0", "-1", "-2", "1"]);
        let pos = p.state_id("+0").unwrap();
        let neg = p.state_id("-0").unwrap();
        let c = Configuration::from_states([pos, neg]);
        let d = apply_move(p, &c, &Transition::new(neg, pos, neg, neg)).unwrap();
        assert_eq!(d, Configuration::from_counts([(neg, 2)]));
    }

    #[test]
    fn no_neutral_states_is_identity() {
        let t = TableProtocol::new(
            "w",
            vec!["a".into(), "r".into()],
            vec![StateId(0), StateId(1)],
            OutputKind::Weak,
            vec![Opinion::Accepting, Opinion::Rejecting],
            vec![Transition::new(StateId(0), StateId(1), StateId(1), StateId(1))],
        )
        .unwrap();
        let b = Built {
            protocol: Arc::new(t.clone()),
            predicate: crate::model::Predicate::new(
                vec!["x".into(), "y".into()],
                crate::model::PredicateSpec::threshold(vec![1, -1], 1),
            )
            .unwrap(),
            inputs: vec![StateId(0), StateId(1)],
            laws: vec![],
        };
        let w = weak_convert(&b).unwrap();
        let wt = materialize(w.protocol.as_ref(), 10).unwrap();
        assert_eq!(wt.transitions(), t.transitions());
        assert_eq!(wt.opinions(), t.opinions());
    }
}
