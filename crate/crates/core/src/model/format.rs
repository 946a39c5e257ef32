//! JSON protocol documents.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::StateId;
use super::error::ModelError;
use super::predicate::Predicate;
use super::protocol::{Opinion, OutputKind, Protocol, Transition};
use super::table::{materialize, TableProtocol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDoc {
    pub kind: OutputKind,
    #[serde(default)]
    pub accepting: Vec<String>,
    #[serde(default)]
    pub neutral: Vec<String>,
    #[serde(default)]
    pub rejecting: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolDoc {
    pub name: String,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub output: OutputDoc,
    pub transitions: Vec<[String; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    /// `[variable, initial state]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<[String; 2]>,
}

/// A protocol read from a document, with its optional predicate binding.
#[derive(Clone, Debug)]
pub struct LoadedProtocol {
    pub protocol: TableProtocol,
    pub predicate: Option<Predicate>,
    pub inputs: Vec<StateId>,
}

/// Largest lazily defined protocol that will be tabulated for export.
pub const EXPORT_STATE_LIMIT: u64 = 5_000;

impl ProtocolDoc {
    pub fn from_table(p: &TableProtocol, predicate: Option<&Predicate>, inputs: &[StateId]) -> ProtocolDoc {
        let names = p.names();
        let mut output =
            OutputDoc { kind: p.output_kind(), accepting: Vec::new(), neutral: Vec::new(), rejecting: Vec::new() };
        for (i, o) in p.opinions().iter().enumerate() {
            let bucket = match o {
                Opinion::Accepting => &mut output.accepting,
                Opinion::Neutral => &mut output.neutral,
                Opinion::Rejecting => &mut output.rejecting,
            };
            bucket.push(names[i].clone());
        }
        let nm = |q: StateId| names[q.index()].clone();
        ProtocolDoc {
            name: p.name(),
            states: names.to_vec(),
            initial: p.initial_states().into_iter().map(nm).collect(),
            output,
            transitions: p
                .transitions()
                .iter()
                .map(|t| [nm(t.pre[0]), nm(t.pre[1]), nm(t.post[0]), nm(t.post[1])])
                .collect(),
            predicate: predicate.map(Predicate::to_sexpr),
            inputs: match predicate {
                Some(pr) if pr.vars.len() == inputs.len() => {
                    pr.vars.iter().zip(inputs).map(|(v, &q)| [v.clone(), nm(q)]).collect()
                }
                _ => Vec::new(),
            },
        }
    }

    /// Tabulates `proto` (if it is small enough) and describes it.
    pub fn from_protocol(
        proto: &dyn Protocol,
        predicate: Option<&Predicate>,
        inputs: &[StateId],
    ) -> Result<ProtocolDoc, ModelError> {
        let table = materialize(proto, EXPORT_STATE_LIMIT)?;
        Ok(Self::from_table(&table, predicate, inputs))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<ProtocolDoc, ModelError> {
        serde_json::from_str(text)
            .map_err(|e| ModelError::Format(format!("line {} column {}: {}", e.line(), e.column(), e)))
    }

    pub fn load(&self) -> Result<LoadedProtocol, ModelError> {
        let mut index: HashMap<&str, StateId> = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.as_str(), StateId(i as u64)).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let look = |name: &str, what: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::Format(format!("{what} refers to unknown state `{name}`")))
        };
        let mut opinions: Vec<Option<Opinion>> = vec![None; self.states.len()];
        for (list, op) in [
            (&self.output.accepting, Opinion::Accepting),
            (&self.output.neutral, Opinion::Neutral),
            (&self.output.rejecting, Opinion::Rejecting),
        ] {
            for name in list {
                let q = look(name, "output")?;
                if opinions[q.index()].replace(op).is_some() {
                    return Err(ModelError::BadPartition(format!("state `{name}` listed in two output sets")));
                }
            }
        }
        let mut ops = Vec::with_capacity(opinions.len());
        for (i, o) in opinions.into_iter().enumerate() {
            ops.push(
                o.ok_or_else(|| ModelError::BadPartition(format!("state `{}` is in no output set", self.states[i])))?,
            );
        }
        let initial = self.initial.iter().map(|s| look(s, "initial")).collect::<Result<Vec<_>, _>>()?;
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (k, t) in self.transitions.iter().enumerate() {
            let what = format!("transition {k}");
            transitions.push(Transition::new(
                look(&t[0], &what)?,
                look(&t[1], &what)?,
                look(&t[2], &what)?,
                look(&t[3], &what)?,
            ));
        }
        let protocol =
            TableProtocol::new(self.name.clone(), self.states.clone(), initial, self.output.kind, ops, transitions)?;
        let mut predicate = None;
        let mut inputs = Vec::new();
        if let Some(text) = &self.predicate {
            let order: Vec<String> = self.inputs.iter().map(|[v, _]| v.clone()).collect();
            let pr = Predicate::parse(text, (!order.is_empty()).then_some(order.as_slice()))?;
            if self.inputs.len() != pr.vars.len() {
                return Err(ModelError::Format(format!(
                    "predicate has {} variables but {} input bindings are given",
                    pr.vars.len(),
                    self.inputs.len()
                )));
            }
            for [v, s] in &self.inputs {
                let q = look(s, &format!("input `{v}`"))?;
                if !protocol.initial_states().contains(&q) {
                    return Err(ModelError::Format(format!("input `{v}` is bound to non-initial state `{s}`")));
                }
                inputs.push(q);
            }
            predicate = Some(pr);
        }
        Ok(LoadedProtocol { protocol, predicate, inputs })
    }
}
