use std::sync::Arc;

use super::Built;
use crate::model::{ModelError, Opinion, OutputKind, Predicate, Protocol, StateId};

/// A consensus protocol with accepting and rejecting states exchanged.
pub struct Negated {
    inner: Arc<dyn Protocol>,
}

impl Negated {
    pub fn inner(&self) -> &Arc<dyn Protocol> {
        &self.inner
    }
}

impl Protocol for Negated {
    fn name(&self) -> String {
        format!("Not({})", self.inner.name())
    }
    fn num_states(&self) -> u64 {
        self.inner.num_states()
    }
    fn state_name(&self, q: StateId) -> String {
        self.inner.state_name(q)
    }
    fn state_id(&self, name: &str) -> Option<StateId> {
        self.inner.state_id(name)
    }
    fn initial_states(&self) -> Vec<StateId> {
        self.inner.initial_states()
    }
    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }
    fn opinion(&self, q: StateId) -> Opinion {
        self.inner.opinion(q).flipped()
    }
    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        self.inner.rules(p, q)
    }
}

pub fn negate(b: &Built) -> Result<Built, ModelError> {
    if b.protocol.output_kind() != OutputKind::Consensus {
        return Err(ModelError::InvalidParameter(format!(
            "cannot negate weak protocol {}; convert it first",
            b.protocol.name()
        )));
    }
    Ok(Built {
        protocol: Arc::new(Negated { inner: Arc::clone(&b.protocol) }),
        predicate: Predicate::new(b.predicate.vars.clone(), b.predicate.formula.clone().negated())?,
        inputs: b.inputs.clone(),
        laws: b.laws.clone(),
    })
}
