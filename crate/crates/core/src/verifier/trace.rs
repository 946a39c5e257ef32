use serde_json::{json, Value};

use crate::model::{
    apply_move, apply_snipe, config_from_strings, config_to_strings, is_terminal, output_of, Configuration, ModelError,
    Output, Protocol, StateId, Transition,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Move(Transition),
    Snipe(StateId),
}

/// A finite execution prefix: a start configuration and the labelled steps
/// taken from it, each with the configuration it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub start: Configuration,
    pub steps: Vec<(Step, Configuration)>,
    /// Whether the last configuration is terminal.
    pub terminal: bool,
}

impl ExecutionTrace {
    pub fn new(start: Configuration) -> Self {
        ExecutionTrace { start, steps: Vec::new(), terminal: false }
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().map(|(_, c)| c).unwrap_or(&self.start)
    }

    pub fn push(&mut self, step: Step, c: Configuration) {
        self.steps.push((step, c));
    }

    pub fn snipes(&self) -> usize {
        self.steps.iter().filter(|(s, _)| matches!(s, Step::Snipe(_))).count()
    }

    pub fn moves(&self) -> usize {
        self.steps.len() - self.snipes()
    }

    /// Re-executes every step through the core semantics and checks the
    /// recorded configurations and terminal flag. Returns the final output.
    pub fn replay(&self, proto: &dyn Protocol) -> Result<Output, ModelError> {
        let mut c = self.start.clone();
        for (i, (step, recorded)) in self.steps.iter().enumerate() {
            c = match step {
                Step::Move(t) => apply_move(proto, &c, t)?,
                Step::Snipe(q) => apply_snipe(&c, *q)?,
            };
            if c != *recorded {
                return Err(ModelError::Format(format!(
                    "trace step {} leads to a different configuration than recorded",
                    i + 1
                )));
            }
        }
        if self.terminal && !is_terminal(proto, &c) {
            return Err(ModelError::Format("trace claims a terminal end but moves remain".into()));
        }
        output_of(proto, &c)
    }

    pub fn to_json(&self, proto: &dyn Protocol) -> Value {
        let mut steps = vec![json!({ "config": config_to_strings(proto, &self.start), "step": null })];
        for (s, c) in &self.steps {
            steps.push(json!({ "config": config_to_strings(proto, c), "step": step_json(proto, s) }));
        }
        json!({ "terminal": self.terminal, "snipes": self.snipes(), "steps": steps })
    }

    /// One JSON object per line, start configuration first.
    pub fn to_json_lines(&self, proto: &dyn Protocol) -> String {
        let v = self.to_json(proto);
        let mut out = String::new();
        for s in v["steps"].as_array().into_iter().flatten() {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_json(proto: &dyn Protocol, v: &Value) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::Format(m.to_string());
        let steps = v["steps"].as_array().ok_or_else(|| bad("trace needs a `steps` array"))?;
        let cfg = |s: &Value, i: usize| -> Result<Configuration, ModelError> {
            let entries: Vec<String> = s["config"]
                .as_array()
                .ok_or_else(|| ModelError::Format(format!("step {i}: missing `config`")))?
                .iter()
                .map(|e| e.as_str().map(str::to_string))
                .collect::<Option<_>>()
                .ok_or_else(|| ModelError::Format(format!("step {i}: config entries must be strings")))?;
            config_from_strings(proto, &entries)
        };
        let first = steps.first().ok_or_else(|| bad("trace is empty"))?;
        let mut trace = ExecutionTrace::new(cfg(first, 0)?);
        for (i, s) in steps.iter().enumerate().skip(1) {
            let c = cfg(s, i)?;
            let step = parse_step(proto, &s["step"]).map_err(|e| ModelError::Format(format!("step {i}: {e}")))?;
            trace.push(step, c);
        }
        trace.terminal = v["terminal"].as_bool().unwrap_or(false);
        Ok(trace)
    }
}

fn step_json(proto: &dyn Protocol, s: &Step) -> Value {
    match s {
        Step::Move(t) => json!({ "move": [
            proto.state_name(t.pre[0]),
            proto.state_name(t.pre[1]),
            proto.state_name(t.post[0]),
            proto.state_name(t.post[1]),
        ] }),
        Step::Snipe(q) => json!({ "snipe": proto.state_name(*q) }),
    }
}

fn parse_step(proto: &dyn Protocol, v: &Value) -> Result<Step, ModelError> {
    let id = |v: &Value| -> Result<StateId, ModelError> {
        let name = v.as_str().ok_or_else(|| ModelError::Format("state names must be strings".into()))?;
        proto.state_id(name).ok_or_else(|| ModelError::UnknownStateName(name.to_string()))
    };
    if let Some(q) = v.get("snipe") {
        return Ok(Step::Snipe(id(q)?));
    }
    if let Some(m) = v.get("move").and_then(Value::as_array) {
        if m.len() == 4 {
            return Ok(Step::Move(Transition::new(id(&m[0])?, id(&m[1])?, id(&m[2])?, id(&m[3])?)));
        }
    }
    Err(ModelError::Format("step must be {\"move\": [p, q, p', q']} or {\"snipe\": q}".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::pebbles;

    #[test]
    fn json_round_trip_and_replay() {
        let b = pebbles(4).unwrap();
        let p = b.protocol.as_ref();
        let c0 = b.initial_config(&[2]).unwrap();
        let t = Transition::new(StateId(1), StateId(1), StateId(2), StateId(0));
        let c1 = apply_move(p, &c0, &t).unwrap();
        let c2 = apply_snipe(&c1, StateId(2)).unwrap();
        let mut tr = ExecutionTrace::new(c0);
        tr.push(Step::Move(t), c1);
        tr.push(Step::Snipe(StateId(2)), c2);
        tr.terminal = true;
        assert_eq!(tr.replay(p).unwrap(), Output::Reject);
        let back = ExecutionTrace::from_json(p, &tr.to_json(p)).unwrap();
        assert_eq!(back, tr);
        assert_eq!(tr.to_json_lines(p).lines().count(), 3);
        assert_eq!((tr.moves(), tr.snipes()), (1, 1));
    }

    #[test]
    fn replay_catches_tampering() {
        let b = pebbles(4).unwrap();
        let p = b.protocol.as_ref();
        let c0 = b.initial_config(&[2]).unwrap();
        let mut tr = ExecutionTrace::new(c0.clone());
        tr.push(Step::Snipe(StateId(1)), c0);
        assert!(tr.replay(p).is_err());
    }
}
