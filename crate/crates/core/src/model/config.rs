use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a state in a protocol's state table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub u64);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// A multiset of states, kept in sparse canonical form: entries sorted by
/// state with strictly positive counts. Equality and hashing operate on that
/// form, so two configurations are equal iff they hold the same agents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    entries: Vec<(StateId, u32)>,
}

impl Configuration {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a configuration from (state, count) pairs; duplicates are summed
    /// and zero counts dropped.
    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (StateId, u32)>,
    {
        let mut entries: Vec<(StateId, u32)> = counts.into_iter().filter(|&(_, n)| n > 0).collect();
        entries.sort_unstable_by_key(|&(q, _)| q);
        let mut merged: Vec<(StateId, u32)> = Vec::with_capacity(entries.len());
        for (q, n) in entries {
            match merged.last_mut() {
                Some((last, count)) if *last == q => *count += n,
                _ => merged.push((q, n)),
            }
        }
        Self { entries: merged }
    }

    pub fn from_states<I>(states: I) -> Self
    where
        I: IntoIterator<Item = StateId>,
    {
        Self::from_counts(states.into_iter().map(|q| (q, 1)))
    }

    pub fn size(&self) -> u64 {
        self.entries.iter().map(|&(_, n)| u64::from(n)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, q: StateId) -> u32 {
        match self.entries.binary_search_by_key(&q, |&(s, _)| s) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// Occupied states in ascending order.
    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|&(q, _)| q)
    }

    pub fn entries(&self) -> &[(StateId, u32)] {
        &self.entries
    }

    pub fn add(&mut self, q: StateId, n: u32) {
        if n == 0 {
            return;
        }
        match self.entries.binary_search_by_key(&q, |&(s, _)| s) {
            Ok(i) => self.entries[i].1 += n,
            Err(i) => self.entries.insert(i, (q, n)),
        }
    }

    /// Removes `n` agents from `q`; returns false (leaving `self` untouched)
    /// when fewer than `n` are present.
    pub fn remove(&mut self, q: StateId, n: u32) -> bool {
        match self.entries.binary_search_by_key(&q, |&(s, _)| s) {
            Ok(i) if self.entries[i].1 >= n => {
                self.entries[i].1 -= n;
                if self.entries[i].1 == 0 {
                    self.entries.remove(i);
                }
                true
            }
            Ok(_) => false,
            Err(_) => n == 0,
        }
    }

    /// Componentwise `self <= other`.
    pub fn is_sub_of(&self, other: &Configuration) -> bool {
        self.entries.iter().all(|&(q, n)| other.count(q) >= n)
    }

    pub fn plus(&self, other: &Configuration) -> Configuration {
        let mut out = self.clone();
        for &(q, n) in &other.entries {
            out.add(q, n);
        }
        out
    }

    /// Expands into one entry per agent, in ascending state order.
    pub fn agents(&self) -> Vec<StateId> {
        self.entries.iter().flat_map(|&(q, n)| std::iter::repeat_n(q, n as usize)).collect()
    }

    pub fn max_state(&self) -> Option<StateId> {
        self.entries.last().map(|&(q, _)| q)
    }
}

impl FromIterator<StateId> for Configuration {
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        Self::from_states(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: u64) -> StateId {
        StateId(i)
    }

    #[test]
    fn canonical_form_merges_and_drops_zero() {
        let a = Configuration::from_counts([(q(3), 1), (q(1), 2), (q(3), 2), (q(2), 0)]);
        let b = Configuration::from_counts([(q(1), 2), (q(3), 3)]);
        assert_eq!(a, b);
        assert_eq!(a.entries(), &[(q(1), 2), (q(3), 3)]);
        assert_eq!(a.size(), 5);
    }

    #[test]
    fn remove_respects_counts() {
        let mut c = Configuration::from_counts([(q(0), 1)]);
        assert!(!c.remove(q(0), 2));
        assert!(!c.remove(q(4), 1));
        assert!(c.remove(q(0), 1));
        assert!(c.is_empty());
    }

    #[test]
    fn sub_multiset() {
        let small = Configuration::from_counts([(q(0), 1), (q(2), 1)]);
        let big = Configuration::from_counts([(q(0), 2), (q(2), 1), (q(5), 1)]);
        assert!(small.is_sub_of(&big));
        assert!(!big.is_sub_of(&small));
        assert!(Configuration::empty().is_sub_of(&small));
    }
}
