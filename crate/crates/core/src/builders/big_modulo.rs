use std::sync::Arc;

use super::{param_list, vars_default, Built, ConservationLaw, LawKind};
use crate::model::{ModelError, Opinion, OutputKind, Predicate, PredicateSpec, Protocol, StateId};

/// Decoded BigModulo state: leader index (0 for none), one residue and one
/// output bit per copy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModState {
    pub leader: usize,
    pub v: Vec<u64>,
    pub r: Vec<bool>,
}

/// `2m` redundant leader-based copies of a modulo counter; the output is a
/// majority vote over the copies' result bits. States are numbered densely
/// as `leader + (2m+1)·(vcode + m^{2m}·rcode)`.
#[derive(Clone, Debug)]
pub struct BigModulo {
    m: u64,
    t: u64,
    copies: usize,
    vspace: u64,
    total: u64,
    coeffs: Vec<u64>,
}

pub const MAX_MODULUS: i64 = 7;

impl BigModulo {
    pub fn new(coeffs: &[i64], m: i64, t: i64) -> Result<Self, ModelError> {
        if m < 2 {
            return Err(ModelError::InvalidParameter(format!("BigModulo needs m >= 2, got {m}")));
        }
        if m > MAX_MODULUS {
            return Err(ModelError::TooLarge(format!(
                "BigModulo with m = {m} (ids are 64-bit; at most {MAX_MODULUS})"
            )));
        }
        if !(0 < t && t < m) {
            return Err(ModelError::InvalidParameter(format!("BigModulo needs 0 < t < m, got t = {t}, m = {m}")));
        }
        let mu = m as u64;
        let copies = 2 * m as usize;
        let vspace = mu.pow(copies as u32);
        let total = (copies as u64 + 1)
            .checked_mul(vspace)
            .and_then(|x| x.checked_mul(1u64 << copies))
            .ok_or_else(|| ModelError::TooLarge("BigModulo state space".into()))?;
        Ok(BigModulo {
            m: mu,
            t: t as u64,
            copies,
            vspace,
            total,
            coeffs: coeffs.iter().map(|&a| a.rem_euclid(m) as u64).collect(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn encode(&self, s: &ModState) -> StateId {
        let mut vcode = 0u64;
        for &x in s.v.iter().rev() {
            vcode = vcode * self.m + x;
        }
        let mut rcode = 0u64;
        for (j, &b) in s.r.iter().enumerate() {
            if b {
                rcode |= 1 << j;
            }
        }
        let width = self.copies as u64 + 1;
        StateId(s.leader as u64 + width * (vcode + self.vspace * rcode))
    }

    pub fn decode(&self, q: StateId) -> ModState {
        let width = self.copies as u64 + 1;
        let leader = (q.0 % width) as usize;
        let rest = q.0 / width;
        let mut vcode = rest % self.vspace;
        let rcode = rest / self.vspace;
        let mut v = Vec::with_capacity(self.copies);
        for _ in 0..self.copies {
            v.push(vcode % self.m);
            vcode /= self.m;
        }
        let r = (0..self.copies).map(|j| rcode >> j & 1 == 1).collect();
        ModState { leader, v, r }
    }

    /// Input state for a (normalised) coefficient.
    pub fn input_state(&self, a: u64) -> StateId {
        self.encode(&ModState { leader: 0, v: vec![a % self.m; self.copies], r: vec![false; self.copies] })
    }

    pub fn accepts(&self, s: &ModState) -> bool {
        s.r.iter().filter(|&&b| b).count() > self.m as usize
    }

    fn rules_decoded(&self, p: &ModState, q: &ModState) -> Vec<(ModState, ModState)> {
        let m = self.m;
        let mut out = Vec::new();
        // distrib
        if p.leader == 0 {
            for i in 1..=self.copies {
                if p.v[i - 1] >= 1 {
                    out.push((ModState { leader: i, ..p.clone() }, q.clone()));
                }
            }
        }
        if q.leader == 0 {
            for i in 1..=self.copies {
                if q.v[i - 1] >= 1 {
                    out.push((p.clone(), ModState { leader: i, ..q.clone() }));
                }
            }
        }
        let (i, j) = (p.leader, q.leader);
        // steal
        if i >= 1 && j >= 1 && i != j {
            let (mut v, mut w) = (p.v.clone(), q.v.clone());
            v[i - 1] = (p.v[i - 1] + q.v[i - 1]) % m;
            v[j - 1] = 0;
            w[j - 1] = (q.v[j - 1] + p.v[j - 1]) % m;
            w[i - 1] = 0;
            out.push((ModState { v, ..p.clone() }, ModState { v: w, ..q.clone() }));
        }
        // retire, either agent may keep the leadership
        if i >= 1 && i == j {
            let k = i - 1;
            let mut v = p.v.clone();
            let mut w = q.v.clone();
            v[k] = (p.v[k] + q.v[k]) % m;
            w[k] = 0;
            out.push((ModState { v, ..p.clone() }, ModState { leader: 0, v: w, ..q.clone() }));
            let mut v = p.v.clone();
            let mut w = q.v.clone();
            w[k] = (p.v[k] + q.v[k]) % m;
            v[k] = 0;
            out.push((ModState { leader: 0, v, ..p.clone() }, ModState { v: w, ..q.clone() }));
        }
        // result
        let bit = |s: &ModState| s.v[s.leader - 1] >= self.t;
        if i >= 1 && j >= 1 && i != j {
            let (mut r, mut s) = (p.r.clone(), q.r.clone());
            r[i - 1] = bit(p);
            s[i - 1] = bit(p);
            r[j - 1] = bit(q);
            s[j - 1] = bit(q);
            out.push((ModState { r, ..p.clone() }, ModState { r: s, ..q.clone() }));
        } else {
            for (lead, other, flip) in [(p, q, false), (q, p, true)] {
                if lead.leader == 0 {
                    continue;
                }
                let k = lead.leader - 1;
                let (mut r, mut s) = (lead.r.clone(), other.r.clone());
                r[k] = bit(lead);
                s[k] = bit(lead);
                let a = ModState { r, ..lead.clone() };
                let b = ModState { r: s, ..other.clone() };
                out.push(if flip { (b, a) } else { (a, b) });
            }
        }
        out
    }
}

impl Protocol for BigModulo {
    fn name(&self) -> String {
        format!(
            "BigModulo({};{},{})",
            param_list(&self.coeffs.iter().map(|&a| a as i64).collect::<Vec<_>>()),
            self.m,
            self.t
        )
    }

    fn num_states(&self) -> u64 {
        self.total
    }

    fn state_name(&self, q: StateId) -> String {
        let s = self.decode(q);
        let v: Vec<String> = s.v.iter().map(u64::to_string).collect();
        let r: Vec<&str> = s.r.iter().map(|&b| if b { "1" } else { "0" }).collect();
        format!("({},[{}],[{}])", s.leader, v.join(","), r.join(","))
    }

    fn state_id(&self, name: &str) -> Option<StateId> {
        let inner = name.strip_prefix('(')?.strip_suffix(')')?;
        let (lead, rest) = inner.split_once(',')?;
        let rest = rest.strip_prefix('[')?;
        let (v, rest) = rest.split_once("],[")?;
        let r = rest.strip_suffix(']')?;
        let leader: usize = lead.trim().parse().ok()?;
        let v: Vec<u64> = v.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?;
        let r: Vec<bool> = r
            .split(',')
            .map(|x| match x.trim() {
                "0" => Some(false),
                "1" => Some(true),
                _ => None,
            })
            .collect::<Option<_>>()?;
        if leader > self.copies || v.len() != self.copies || r.len() != self.copies || v.iter().any(|&x| x >= self.m) {
            return None;
        }
        Some(self.encode(&ModState { leader, v, r }))
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut v: Vec<StateId> = self.coeffs.iter().map(|&a| self.input_state(a)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn output_kind(&self) -> OutputKind {
        OutputKind::Consensus
    }

    fn opinion(&self, q: StateId) -> Opinion {
        if self.accepts(&self.decode(q)) {
            Opinion::Accepting
        } else {
            Opinion::Rejecting
        }
    }

    fn rules(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let (a, b) = (self.decode(p), self.decode(q));
        self.rules_decoded(&a, &b).into_iter().map(|(x, y)| (self.encode(&x), self.encode(&y))).collect()
    }
}

/// BigModulo for `Σ a_i·x_i mod m >= t`; coefficients are reduced mod `m`.
pub fn big_modulo(coeffs: &[i64], m: i64, t: i64) -> Result<Built, ModelError> {
    let bm = BigModulo::new(coeffs, m, t)?;
    let inputs = bm.coeffs.iter().map(|&a| bm.input_state(a)).collect();
    let law_model = bm.clone();
    Ok(Built {
        predicate: Predicate::new(vars_default(coeffs.len()), PredicateSpec::modulo(coeffs.to_vec(), m, t))?,
        inputs,
        laws: vec![ConservationLaw::weighted(
            "per-copy token sum invariant mod m",
            LawKind::InvariantMod(m),
            move |q| law_model.decode(q).v.iter().map(|&x| x as i64).collect(),
        )],
        protocol: Arc::new(bm),
    })
}
