use std::sync::Arc;

use super::{param_list, vars_default, BigModulo, Built, ConservationLaw, IntervalTable, LawKind};
use crate::model::{
    successors, ModelError, Opinion, OutputKind, Predicate, PredicateSpec, Protocol, StateId, TableProtocol, Transition,
};

/// Tower part shared by the two modulo constructions: intervals up to the
/// top `3m²`, plus an `idle` state for agents whose coefficient is 0 mod m.
#[derive(Clone, Debug)]
struct Tower {
    iv: IntervalTable,
    table: TableProtocol,
}

impl Tower {
    fn new(lens: &[u64], top: i64) -> Result<Self, ModelError> {
        let lens: Vec<i64> = lens.iter().map(|&a| a as i64).collect();
        let iv = IntervalTable::new(top, &lens);
        let idle = StateId(iv.len() as u64);
        let mut names: Vec<String> = iv.states.iter().map(|&(s, e)| super::interval_name(s, e)).collect();
        names.push("idle".into());
        let mut transitions = Vec::new();
        for a in 0..iv.len() {
            for b in a..iv.len() {
                let (p, q) = (StateId(a as u64), StateId(b as u64));
                for (x, y) in iv.rules(p, q) {
                    transitions.push(Transition::new(p, q, x, y));
                }
            }
        }
        let mut opinions = vec![Opinion::Rejecting; names.len()];
        for (i, &(_, e)) in iv.states.iter().enumerate() {
            if e == top {
                opinions[i] = Opinion::Accepting;
            }
        }
        let table = TableProtocol::new("tower", names, vec![idle], OutputKind::Consensus, opinions, transitions)?;
        Ok(Tower { iv, table })
    }

    fn states(&self) -> u64 {
        self.iv.len() as u64 + 1
    }

    fn input(&self, a: u64) -> StateId {
        if a == 0 {
            StateId(self.iv.len() as u64)
        } else {
            self.iv.id(0, a as i64).expect("input interval")
        }
    }

    fn end(&self, q: StateId) -> u64 {
        if q.index() == self.iv.len() {
            0
        } else {
            self.iv.interval(q).1 as u64
        }
    }

    fn len(&self, q: StateId) -> i64 {
        if q.index() == self.iv.len() {
            0
        } else {
            let (s, e) = self.iv.interval(q);
            e - s
        }
    }
}

fn split_top(name: &str) -> Option<Vec<&str>> {
    let inner = name.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    Some(parts)
}

fn normalise(coeffs: &[i64], m: i64, t: i64) -> Result<Vec<u64>, ModelError> {
    if m < 2 {
        return Err(ModelError::InvalidParameter(format!("modulus must be >= 2, got {m}")));
    }
    if !(0 < t && t < m) {
        return Err(ModelError::InvalidParameter(format!("need 0 < t < m, got t = {t}, m = {m}")));
    }
    if coeffs.is_empty() {
        return Err(ModelError::InvalidParameter("need at least one coefficient".into()));
    }
    Ok(coeffs.iter().map(|&a| a.rem_euclid(m) as u64).collect())
}

/// Agents run a tower for `Σ a_i·x_i >= 3m²` and BigModulo side by side,
/// tracking the highest floor seen in `h`. States are `(q_T, h, q_M)` with id
/// `(q_T·(3m²+1) + h)·|Q_M| + q_M`.
pub struct ModuloCombined {
    tower: Tower,
    big: BigModulo,
    m: u64,
    t: u64,
    top: u64,
    nm: u64,
    total: u64,
    coeffs: Vec<u64>,
}

impl ModuloCombined {
    pub fn new(coeffs: &[i64], m: i64, t: i64) -> Result<Self, ModelError> {
        let norm = normalise(coeffs, m, t)?;
        let big = BigModulo::new(coeffs, m, t)?;
        let top = 3 * (m as u64) * (m as u64);
        let tower = Tower::new(&norm, top as i64)?;
        let nm = big.num_states();
        let total = tower
            .states()
            .checked_mul(top + 1)
            .and_then(|x| x.checked_mul(nm))
            .ok_or_else(|| ModelError::TooLarge(format!("ModuloCombined with m = {m}")))?;
        Ok(ModuloCombined { tower, big, m: m as u64, t: t as u64, top, nm, total, coeffs: norm })
    }

    pub fn encode(&self, qt: StateId, h: u64, qm: StateId) -> StateId {
        StateId((qt.0 * (self.top + 1) + h) * self.nm + qm.0)
    }

    pub fn decode(&self, q: StateId) -> (StateId, u64, StateId) {
        let qm = q.0 % self.nm;
        let rest = q.0 / self.nm;
        (StateId(rest / (self.top + 1)), rest % (self.top + 1), StateId(qm))
    }

    pub fn big_modulo(&self) -> &BigModulo {
        &self.big
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    fn input(&self, a: u64) -> StateId {
        self.encode(self.tower.input(a), a, self.big.input_state(a))
    }
}

impl Protocol for ModuloCombined {
    fn name(&self) -> String {
        let c: Vec<i64> = self.coeffs.iter().map(|&a| a as i64).collect();
        format!("ModuloCombined({};{},{})", param_list(&c), self.m, self.t)
    }

    fn num_states(&self) -> u64 {
        self.total
    }

    fn state_name(&self, q: StateId) -> String {
        let (qt, h, qm) = self.decode(q);
        format!("({},{},{})", self.tower.table.state_name(qt), h, self.big.state_name(qm))
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        let parts = split_top(name)?;
        let [a, b, c] = parts.as_slice() else {
            return None;
        };
        let h: u64 = b.trim().parse().ok().filter(|&h| h <= self.top)?;
        Some(self.encode(self.tower.table.state_id(a)?, h, self.big.state_id(c)?))
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.coeffs.iter().map(|&a| self.input(a)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }

    fn opinion(&self, q: StateId) -> Opinion {
        let (_, h, qm) = self.decode(q);
        if h < self.top {
            if h % self.m >= self.t {
                Opinion::Accepting
            } else {
                Opinion::Rejecting
            }
        } else {
            self.big.opinion(qm)
        }
    }

    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let (t1, h1, m1) = self.decode(p);
        let (t2, h2, m2) = self.decode(q);
        let tr = successors(&self.tower.table, t1, t2);
        let mr = successors(&self.big, m1, m2);
        let mut out = Vec::with_capacity(tr.len() * mr.len());
        for &(a, b) in &tr {
            let h = h1.max(h2).max(self.tower.end(a)).max(self.tower.end(b));
            for &(x, y) in &mr {
                out.push((self.encode(a, h, x), self.encode(b, h, y)));
            }
        }
        out
    }
}

/// ModuloCombined for `Σ a_i·x_i mod m >= t`.
pub fn modulo_combined(coeffs: &[i64], m: i64, t: i64) -> Result<Built, ModelError> {
    let mc = ModuloCombined::new(coeffs, m, t)?;
    let inputs = mc.coeffs.iter().map(|&a| mc.input(a)).collect();
    let (nm, top) = (mc.nm, mc.top);
    let tower = mc.tower.clone();
    let big = mc.big.clone();
    let laws = vec![
        ConservationLaw::scalar("tower length sum invariant", LawKind::Invariant, move |q| {
            tower.len(StateId(q.0 / nm / (top + 1)))
        }),
        ConservationLaw::weighted("per-copy token sum invariant mod m", LawKind::InvariantMod(m), move |q| {
            big.decode(StateId(q.0 % nm)).v.iter().map(|&x| x as i64).collect()
        }),
    ];
    Ok(Built {
        predicate: Predicate::new(vars_default(coeffs.len()), PredicateSpec::modulo(coeffs.to_vec(), m, t))?,
        inputs,
        laws,
        protocol: Arc::new(mc),
    })
}

/// The tower half of ModuloCombined alone: states `(q_T, h)` with id
/// `q_T·(3m²+1) + h`. Agrees with ModuloCombined on every population with
/// `Σ a_i·x_i < 3m²`, where the BigModulo half never influences an output.
/// Once the top is reached all agents reject.
pub struct SmallModulo {
    tower: Tower,
    m: u64,
    t: u64,
    top: u64,
    coeffs: Vec<u64>,
}

impl SmallModulo {
    fn encode(&self, qt: StateId, h: u64) -> StateId {
        StateId(qt.0 * (self.top + 1) + h)
    }

    fn decode(&self, q: StateId) -> (StateId, u64) {
        (StateId(q.0 / (self.top + 1)), q.0 % (self.top + 1))
    }

    fn input(&self, a: u64) -> StateId {
        self.encode(self.tower.input(a), a)
    }
}

impl Protocol for SmallModulo {
    fn name(&self) -> String {
        let c: Vec<i64> = self.coeffs.iter().map(|&a| a as i64).collect();
        format!("SmallModulo({};{},{})", param_list(&c), self.m, self.t)
    }

    fn num_states(&self) -> u64 {
        self.tower.states() * (self.top + 1)
    }

    fn state_name(&self, q: StateId) -> String {
        let (qt, h) = self.decode(q);
        format!("({},{})", self.tower.table.state_name(qt), h)
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        let parts = split_top(name)?;
        let [a, b] = parts.as_slice() else {
            return None;
        };
        let h: u64 = b.trim().parse().ok().filter(|&h| h <= self.top)?;
        Some(self.encode(self.tower.table.state_id(a)?, h))
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.coeffs.iter().map(|&a| self.input(a)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }

    fn opinion(&self, q: StateId) -> Opinion {
        let (_, h) = self.decode(q);
        if h < self.top && h % self.m >= self.t {
            Opinion::Accepting
        } else {
            Opinion::Rejecting
        }
    }

    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let (t1, h1) = self.decode(p);
        let (t2, h2) = self.decode(q);
        successors(&self.tower.table, t1, t2)
            .into_iter()
            .map(|(a, b)| {
                let h = h1.max(h2).max(self.tower.end(a)).max(self.tower.end(b));
                (self.encode(a, h), self.encode(b, h))
            })
            .collect()
    }
}

pub fn small_modulo(coeffs: &[i64], m: i64, t: i64) -> Result<Built, ModelError> {
    let norm = normalise(coeffs, m, t)?;
    let top = 3 * (m as u64) * (m as u64);
    let sm = SmallModulo { tower: Tower::new(&norm, top as i64)?, m: m as u64, t: t as u64, top, coeffs: norm };
    let inputs = sm.coeffs.iter().map(|&a| sm.input(a)).collect();
    let tower = sm.tower.clone();
    Ok(Built {
        predicate: Predicate::new(vars_default(coeffs.len()), PredicateSpec::modulo(coeffs.to_vec(), m, t))?,
        inputs,
        laws: vec![ConservationLaw::scalar("tower length sum invariant", LawKind::Invariant, move |q| {
            tower.len(StateId(q.0 / (top + 1)))
        })],
        protocol: Arc::new(sm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::moves;

    #[test]
    fn initial_state_layout() {
        let b = modulo_combined(&[1], 2, 1).unwrap();
        let p = b.protocol.as_ref();
        let name = p.state_name(b.inputs[0]);
        assert_eq!(name, "([0,1),1,(0,[1,1,1,1],[0,0,0,0]))");
        assert_eq!(p.state_id(&name), Some(b.inputs[0]));
        assert_eq!(p.opinion(b.inputs[0]), Opinion::Accepting);
    }

    #[test]
    fn top_defers_to_big_modulo() {
        let mc = ModuloCombined::new(&[1], 2, 1).unwrap();
        let qt = mc.tower.iv.id(11, 12).unwrap();
        let qm = mc.big.input_state(1);
        assert_eq!(mc.opinion(mc.encode(qt, 12, qm)), Opinion::Rejecting);
        assert_eq!(mc.opinion(mc.encode(qt, 11, qm)), Opinion::Accepting);
    }

    #[test]
    fn h_takes_the_max() {
        let mc = ModuloCombined::new(&[1], 2, 1).unwrap();
        let p = mc.input(1);
        for (a, b) in moves(&mc, p, p) {
            let (_, ha, _) = mc.decode(a);
            let (_, hb, _) = mc.decode(b);
            assert_eq!(ha, hb);
            assert_eq!(ha, 2);
        }
    }

    #[test]
    fn small_modulo_tracks_height() {
        let b = small_modulo(&[1, 0], 5, 1).unwrap();
        let p = b.protocol.as_ref();
        assert_eq!(p.state_name(b.inputs[0]), "([0,1),1)");
        assert_eq!(p.state_name(b.inputs[1]), "(idle,0)");
        let m = moves(p, b.inputs[0], b.inputs[1]);
        assert_eq!(m.len(), 1);
        assert_eq!(p.state_name(m[0].1), "(idle,1)");
    }
}
