use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{ModelError, Predicate};

/// A number of snipes, or no bound at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tolerance {
    Finite(u64),
    Unbounded,
}

impl Tolerance {
    pub fn finite(self) -> Option<u64> {
        match self {
            Tolerance::Finite(n) => Some(n),
            Tolerance::Unbounded => None,
        }
    }
}

impl Ord for Tolerance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Tolerance::Finite(a), Tolerance::Finite(b)) => a.cmp(b),
            (Tolerance::Finite(_), Tolerance::Unbounded) => Ordering::Less,
            (Tolerance::Unbounded, Tolerance::Finite(_)) => Ordering::Greater,
            (Tolerance::Unbounded, Tolerance::Unbounded) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Tolerance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Finite(n) => write!(f, "{n}"),
            Tolerance::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Tolerance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tolerance::Finite(n) => s.serialize_u64(*n),
            Tolerance::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Tolerance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Tolerance::Finite(n)),
            Raw::S(s) if s == "unbounded" => Ok(Tolerance::Unbounded),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad tolerance `{s}`"))),
        }
    }
}

/// All `y <= x` componentwise, grouped by `|x| - |y|`.
pub(crate) fn sub_vectors(x: &[u64]) -> Vec<Vec<Vec<u64>>> {
    let total: u64 = x.iter().sum();
    let mut by_gap = vec![Vec::new(); total as usize + 1];
    let mut y = vec![0u64; x.len()];
    loop {
        let size: u64 = y.iter().sum();
        by_gap[(total - size) as usize].push(y.clone());
        let mut i = 0;
        loop {
            if i == x.len() {
                return by_gap;
            }
            if y[i] < x[i] {
                y[i] += 1;
                break;
            }
            y[i] = 0;
            i += 1;
        }
    }
}

/// Largest `i` such that removing any `i` agents from the input keeps the
/// value of `value_of`, given for sub-vectors. `Unbounded` when even the
/// empty input agrees.
pub(crate) fn tolerance_by<F>(x: &[u64], mut value_of: F) -> Result<Tolerance, ModelError>
where
    F: FnMut(&[u64]) -> Result<bool, ModelError>,
{
    let v = value_of(x)?;
    for (gap, ys) in sub_vectors(x).into_iter().enumerate().skip(1) {
        for y in ys {
            if value_of(&y)? != v {
                return Ok(Tolerance::Finite(gap as u64 - 1));
            }
        }
    }
    Ok(Tolerance::Unbounded)
}

/// `InTol` from the predicate: initial snipes are just a smaller input.
pub fn initial_tolerance(pred: &Predicate, x: &[u64]) -> Result<Tolerance, ModelError> {
    let mut cache: HashMap<Vec<u64>, bool> = HashMap::new();
    tolerance_by(x, |y| {
        if let Some(&b) = cache.get(y) {
            return Ok(b);
        }
        let b = pred.eval(y)?;
        cache.insert(y.to_vec(), b);
        Ok(b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PredicateSpec;

    #[test]
    fn sub_vector_counts() {
        let s = sub_vectors(&[2, 1]);
        assert_eq!(s.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn threshold_tolerance() {
        let p = Predicate::new(vec!["x".into()], PredicateSpec::threshold(vec![1], 64)).unwrap();
        assert_eq!(initial_tolerance(&p, &[125]).unwrap(), Tolerance::Finite(61));
        assert_eq!(initial_tolerance(&p, &[10]).unwrap(), Tolerance::Unbounded);
    }

    #[test]
    fn ordering_and_serde() {
        assert!(Tolerance::Finite(100) < Tolerance::Unbounded);
        assert_eq!(serde_json::to_string(&Tolerance::Unbounded).unwrap(), "\"unbounded\"");
        let t: Tolerance = serde_json::from_str("7").unwrap();
        assert_eq!(t, Tolerance::Finite(7));
    }
}
