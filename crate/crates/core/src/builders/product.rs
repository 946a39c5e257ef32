use std::sync::Arc;

use super::Built;
use crate::model::{successors, ModelError, Opinion, OutputKind, Predicate, Protocol, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

/// Agents run two consensus protocols side by side; state `(a, b)` has id
/// `a * |Q_2| + b`.
pub struct Product {
    left: Arc<dyn Protocol>,
    right: Arc<dyn Protocol>,
    n2: u64,
    op: BoolOp,
}

impl Product {
    pub fn new(left: Arc<dyn Protocol>, right: Arc<dyn Protocol>, op: BoolOp) -> Result<Self, ModelError> {
        for p in [&left, &right] {
            if p.output_kind() != OutputKind::Consensus {
                return Err(ModelError::InvalidParameter(format!(
                    "product needs consensus protocols, {} is weak",
                    p.name()
                )));
            }
        }
        let n2 = right.num_states();
        left.num_states()
            .checked_mul(n2)
            .ok_or_else(|| ModelError::TooLarge("product state space overflows".into()))?;
        Ok(Product { left, right, n2, op })
    }

    pub fn pair(&self, a: StateId, b: StateId) -> StateId {
        StateId(a.0 * self.n2 + b.0)
    }

    pub fn split(&self, q: StateId) -> (StateId, StateId) {
        (StateId(q.0 / self.n2), StateId(q.0 % self.n2))
    }

    pub fn left(&self) -> &Arc<dyn Protocol> {
        &self.left
    }

    pub fn right(&self) -> &Arc<dyn Protocol> {
        &self.right
    }
}

/// Splits `"(a,b)"` at the comma that sits outside any brackets.
pub(crate) fn split_pair(name: &str) -> Option<(&str, &str)> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    let mut cut = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                if cut.is_some() {
                    return None;
                }
                cut = Some(i);
            }
            _ => {}
        }
    }
    let i = cut?;
    Some((&inner[..i], &inner[i + 1..]))
}

fn with_identity(p: &dyn Protocol, a: StateId, b: StateId) -> Vec<(StateId, StateId)> {
    let mut v = successors(p, a, b);
    if !v.contains(&(a, b)) {
        v.push((a, b));
    }
    v
}

impl Protocol for Product {
    fn name(&self) -> String {
        let op = match self.op {
            BoolOp::And => "And",
            BoolOp::Or => "Or",
        };
        format!("{op}({}, {})", self.left.name(), self.right.name())
    }

    fn num_states(&self) -> u64 {
        self.left.num_states() * self.n2
    }

    fn state_name(&self, q: StateId) -> String {
        let (a, b) = self.split(q);
        format!("({},{})", self.left.state_name(a), self.right.state_name(b))
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        let (a, b) = split_pair(name)?;
        Some(self.pair(self.left.state_id(a)?, self.right.state_id(b)?))
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut out = Vec::new();
        for a in self.left.initial_states() {
            for b in self.right.initial_states() {
                out.push(self.pair(a, b));
            }
        }
        out
    }

    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }

    fn opinion(&self, q: StateId) -> Opinion {
        let (a, b) = self.split(q);
        let x = self.left.opinion(a) == Opinion::Accepting;
        let y = self.right.opinion(b) == Opinion::Accepting;
        let v = match self.op {
            BoolOp::And => x && y,
            BoolOp::Or => x || y,
        };
        if v {
            Opinion::Accepting
        } else {
            Opinion::Rejecting
        }
    }

    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let (a1, b1) = self.split(p);
        let (a2, b2) = self.split(q);
        let left = with_identity(self.left.as_ref(), a1, a2);
        let right = with_identity(self.right.as_ref(), b1, b2);
        let mut out = Vec::with_capacity(left.len() * right.len());
        for &(x1, x2) in &left {
            for &(y1, y2) in &right {
                out.push((self.pair(x1, y1), self.pair(x2, y2)));
            }
        }
        out
    }
}

/// Product of two built protocols. Variables are matched by name; each
/// variable must be bound in both components.
pub fn product(a: &Built, b: &Built, op: BoolOp) -> Result<Built, ModelError> {
    let prod = Product::new(Arc::clone(&a.protocol), Arc::clone(&b.protocol), op)?;
    let mut vars = a.predicate.vars.clone();
    for v in &b.predicate.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let mut inputs = Vec::with_capacity(vars.len());
    let mut fa = Vec::new();
    let mut fb = Vec::new();
    for v in &vars {
        let ia = a.predicate.var_index(v);
        let ib = b.predicate.var_index(v);
        let (Some(ia), Some(ib)) = (ia, ib) else {
            return Err(ModelError::InvalidParameter(format!("variable `{v}` is not bound in both components")));
        };
        inputs.push(prod.pair(a.inputs[ia], b.inputs[ib]));
        fa.push(ia);
        fb.push(ib);
    }
    let pa = remap(&a.predicate.formula, &fa, vars.len());
    let pb = remap(&b.predicate.formula, &fb, vars.len());
    let formula = match op {
        BoolOp::And => pa.and(pb),
        BoolOp::Or => pa.or(pb),
    };
    let n2 = prod.n2;
    let mut laws = Vec::new();
    for l in &a.laws {
        laws.push(l.lift("left: ", move |q| StateId(q.0 / n2)));
    }
    for l in &b.laws {
        laws.push(l.lift("right: ", move |q| StateId(q.0 % n2)));
    }
    Ok(Built { protocol: Arc::new(prod), predicate: Predicate::new(vars, formula)?, inputs, laws })
}

/// Rewrites coefficient vectors so that component variable `idx[j]` becomes
/// joint variable `j`.
fn remap(f: &crate::model::PredicateSpec, idx: &[usize], n: usize) -> crate::model::PredicateSpec {
    use crate::model::PredicateSpec as P;
    let re = |coeffs: &[i64]| {
        let mut out = vec![0; n];
        for (j, &i) in idx.iter().enumerate() {
            out[j] = coeffs.get(i).copied().unwrap_or(0);
        }
        out
    };
    match f {
        P::Threshold { coeffs, t } => P::threshold(re(coeffs), *t),
        P::Modulo { coeffs, m, t } => P::modulo(re(coeffs), *m, *t),
        P::Not(a) => remap(a, idx, n).negated(),
        P::And(a, b) => remap(a, idx, n).and(remap(b, idx, n)),
        P::Or(a, b) => remap(a, idx, n).or(remap(b, idx, n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_names_split_outside_brackets() {
        assert_eq!(split_pair("([0,2),-1)"), Some(("[0,2)", "-1")));
        assert_eq!(split_pair("((a,b),[1,2))"), Some(("(a,b)", "[1,2)")));
        assert_eq!(split_pair("(a,b,c)"), None);
        assert_eq!(split_pair("ab"), None);
    }
}
