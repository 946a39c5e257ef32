//! Constructors for the catalogue protocols, each paired with the predicate
//! it decides and the conservation laws its moves obey.

mod big_modulo;
mod compile;
mod gen_majority;
mod inhom_tower;
mod laws;
mod modulo_combined;
mod negate;
mod pebbles;
mod product;
mod tower;
mod tower_cancel;
mod weak_convert;

use std::sync::Arc;

use crate::model::{Configuration, ModelError, Opinion, OutputKind, Predicate, Protocol, StateId, TableProtocol};

pub use big_modulo::{big_modulo, BigModulo, ModState};
pub use compile::{compile, threshold, CompileOptions, ModuloMode};
pub use gen_majority::gen_majority;
pub use inhom_tower::{inhom_tower, interval_name, IntervalTable};
pub use laws::{ConservationLaw, LawKind};
pub use modulo_combined::{modulo_combined, small_modulo, ModuloCombined, SmallModulo};
pub use negate::{negate, Negated};
pub use pebbles::pebbles;
pub use product::{product, BoolOp, Product};
pub use tower::tower;
pub use tower_cancel::inhom_tower_cancel;
pub use weak_convert::{weak_convert, WeakConverted};

/// A protocol together with the predicate it is meant to decide.
#[derive(Clone)]
pub struct Built {
    pub protocol: Arc<dyn Protocol>,
    pub predicate: Predicate,
    /// Initial state of each predicate variable, in variable order.
    pub inputs: Vec<StateId>,
    pub laws: Vec<ConservationLaw>,
}

impl std::fmt::Debug for Built {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Built")
            .field("protocol", &self.protocol.name())
            .field("predicate", &self.predicate.to_sexpr())
            .field("inputs", &self.inputs)
            .finish()
    }
}

impl Built {
    pub fn name(&self) -> String {
        self.protocol.name()
    }

    /// The initial configuration with `x[i]` agents in the state of variable `i`.
    pub fn initial_config(&self, x: &[u64]) -> Result<Configuration, ModelError> {
        if x.len() != self.inputs.len() {
            return Err(ModelError::Dimension { expected: self.inputs.len(), got: x.len() });
        }
        let mut pairs = Vec::with_capacity(x.len());
        for (&q, &n) in self.inputs.iter().zip(x) {
            let n = u32::try_from(n).map_err(|_| ModelError::InvalidParameter(format!("population {n} too large")))?;
            pairs.push((q, n));
        }
        Ok(Configuration::from_counts(pairs))
    }

    /// An input vector producing `c`, attributing agents to the first
    /// variable bound to their state. `None` if `c` is not initial.
    pub fn input_of(&self, c: &Configuration) -> Option<Vec<u64>> {
        let mut x = vec![0u64; self.inputs.len()];
        for &(q, n) in c.entries() {
            let i = self.inputs.iter().position(|&s| s == q)?;
            x[i] += u64::from(n);
        }
        Some(x)
    }

    /// Input vectors with `1 <= |x| <= max_agents`, one per distinct initial
    /// configuration, ordered by size and then lexicographically.
    pub fn initial_inputs(&self, max_agents: u64) -> Vec<Vec<u64>> {
        let k = self.inputs.len();
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for size in 1..=max_agents {
            let mut stack = vec![(Vec::with_capacity(k), size)];
            let mut level = Vec::new();
            while let Some((prefix, left)) = stack.pop() {
                if prefix.len() + 1 == k {
                    let mut x: Vec<u64> = prefix;
                    x.push(left);
                    level.push(x);
                    continue;
                }
                if k == 0 {
                    break;
                }
                for v in 0..=left {
                    let mut p = prefix.clone();
                    p.push(v);
                    stack.push((p, left - v));
                }
            }
            level.sort();
            for x in level {
                if let Ok(c) = self.initial_config(&x) {
                    if seen.insert(c) {
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    pub fn with_predicate(mut self, predicate: Predicate) -> Self {
        self.predicate = predicate;
        self
    }
}

pub(crate) fn vars_default(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".to_string()],
        2 => vec!["x".to_string(), "y".to_string()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

pub(crate) fn param_list(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// A single-state protocol with the given constant output.
pub fn constant(value: bool, vars: Vec<String>) -> Result<Built, ModelError> {
    let (name, op) = if value { ("true", Opinion::Accepting) } else { ("false", Opinion::Rejecting) };
    let table = TableProtocol::new(
        format!("Const({name})"),
        vec![name.to_string()],
        vec![StateId(0)],
        OutputKind::Consensus,
        vec![op],
        vec![],
    )?;
    let n = vars.len();
    let formula = crate::model::PredicateSpec::threshold(vec![0; n], if value { 0 } else { 1 });
    Ok(Built {
        protocol: Arc::new(table),
        predicate: Predicate::new(vars, formula)?,
        inputs: vec![StateId(0); n],
        laws: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_inputs_enumerates_compositions() {
        let b = tower(3).unwrap();
        let xs = b.initial_inputs(4);
        assert_eq!(xs, vec![vec![1], vec![2], vec![3], vec![4]]);
        let g = gen_majority(&[1, -2]).unwrap();
        let xs = g.initial_inputs(2);
        assert_eq!(xs, vec![vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(g.input_of(&g.initial_config(&[2, 1]).unwrap()), Some(vec![2, 1]));
    }

    #[test]
    fn constants() {
        let t = constant(true, vars_default(2)).unwrap();
        assert!(t.predicate.eval(&[0, 0]).unwrap());
        let f = constant(false, vars_default(1)).unwrap();
        assert!(!f.predicate.eval(&[9]).unwrap());
    }
}
