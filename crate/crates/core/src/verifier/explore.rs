use std::collections::BTreeSet;

use indexmap::IndexSet;

use super::graph::{self, Csr};
use super::trace::{ExecutionTrace, Step};
use super::VerifyError;
use crate::builders::ConservationLaw;
use crate::model::{apply_snipe, is_terminal, move_successors, output_of, Configuration, Output, Protocol};

#[derive(Clone, Debug)]
struct Layer {
    lo: usize,
    hi: usize,
    /// Union of the BSCC bits in this layer.
    bits: u8,
    /// One node per BSCC with that component's bits.
    reps: Vec<(usize, u8)>,
}

/// Configurations reachable from a start configuration with moves and at
/// most `k` snipes, built one snipe layer at a time. Layer `k` holds exactly
/// the reachable configurations with `k` fewer agents, so layers are
/// disjoint and each is closed under moves.
pub struct Exploration<'p> {
    proto: &'p dyn Protocol,
    laws: &'p [ConservationLaw],
    budget: usize,
    nodes: IndexSet<Configuration>,
    parent: Vec<Option<(u32, Step)>>,
    edges: Csr,
    layers: Vec<Layer>,
    violations: BTreeSet<String>,
}

impl<'p> Exploration<'p> {
    /// Explores layer 0, the move closure of `start`.
    pub fn new(
        proto: &'p dyn Protocol,
        start: Configuration,
        laws: &'p [ConservationLaw],
        budget: usize,
    ) -> Result<Self, VerifyError> {
        crate::model::check_states(proto, &start)?;
        let mut ex = Exploration {
            proto,
            laws,
            budget,
            nodes: IndexSet::new(),
            parent: Vec::new(),
            edges: Csr::new(),
            layers: Vec::new(),
            violations: BTreeSet::new(),
        };
        ex.nodes.insert(start);
        ex.parent.push(None);
        ex.close_layer(0)?;
        Ok(ex)
    }

    pub fn start(&self) -> &Configuration {
        &self.nodes[0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of layers explored so far.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// The largest number of snipes that can change anything.
    pub fn max_snipes(&self) -> usize {
        self.start().size() as usize
    }

    pub fn layer(&self, k: usize) -> impl Iterator<Item = &Configuration> + '_ {
        let l = &self.layers[k];
        (l.lo..l.hi).map(move |i| &self.nodes[i])
    }

    pub fn layer_len(&self, k: usize) -> usize {
        let l = &self.layers[k];
        l.hi - l.lo
    }

    /// Fewest snipes needed to reach `c`, if explored.
    pub fn min_snipes(&self, c: &Configuration) -> Option<usize> {
        let i = self.nodes.get_index_of(c)?;
        self.layers.iter().position(|l| l.lo <= i && i < l.hi)
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        self.nodes.contains(c)
    }

    /// Law violations seen on explored move edges, one line each.
    pub fn violations(&self) -> &BTreeSet<String> {
        &self.violations
    }

    /// Explores layers up to and including `k` (capped at `max_snipes`).
    pub fn ensure(&mut self, k: usize) -> Result<(), VerifyError> {
        let k = k.min(self.max_snipes());
        while self.layers.len() <= k {
            let prev = self.layers.last().unwrap().clone();
            let lo = self.nodes.len();
            for i in prev.lo..prev.hi {
                let c = self.nodes[i].clone();
                for q in c.support().collect::<Vec<_>>() {
                    let d = apply_snipe(&c, q)?;
                    let (_, new) = self.nodes.insert_full(d);
                    if new {
                        self.parent.push(Some((i as u32, Step::Snipe(q))));
                    }
                }
            }
            self.check_budget()?;
            self.close_layer(lo)?;
        }
        Ok(())
    }

    /// `out_i`: unanimity of `out_0` over everything reachable with at most
    /// `i` snipes, i.e. over every BSCC in layers `0..=i`.
    pub fn out(&mut self, i: usize) -> Result<Output, VerifyError> {
        self.ensure(i)?;
        let upto = i.min(self.max_snipes());
        let bits = self.layers[..=upto].iter().fold(0, |b, l| b | l.bits);
        Ok(graph::from_bits(bits))
    }

    pub fn out0(&self) -> Output {
        graph::from_bits(self.layers[0].bits)
    }

    /// `out_0` of one explored node: unanimity over the BSCCs it reaches.
    pub fn out0_of(&self, c: &Configuration) -> Option<Output> {
        let start = self.nodes.get_index_of(c)?;
        let k = self.min_snipes(c)?;
        let l = &self.layers[k];
        let mut seen = vec![false; l.hi - l.lo];
        let mut stack = vec![start];
        seen[start - l.lo] = true;
        while let Some(v) = stack.pop() {
            for &w in self.edges.succ(v) {
                let w = w as usize;
                if !seen[w - l.lo] {
                    seen[w - l.lo] = true;
                    stack.push(w);
                }
            }
        }
        let (comp, _) = graph::scc(&self.edges, l.lo, l.hi);
        let mut bits = 0;
        for &(rep, b) in &l.reps {
            let c = comp[rep - l.lo];
            if (l.lo..l.hi).any(|v| seen[v - l.lo] && comp[v - l.lo] == c) {
                bits |= b;
            }
        }
        Some(graph::from_bits(bits))
    }

    /// A shortest-in-snipes execution from the start into a BSCC whose
    /// output is not `expected`, looking at layers `0..=upto`.
    pub fn witness_against(&mut self, expected: Output, upto: usize) -> Result<Option<ExecutionTrace>, VerifyError> {
        self.ensure(upto)?;
        let want = graph::bit(expected);
        for l in &self.layers[..=upto.min(self.max_snipes())] {
            if let Some(&(rep, _)) = l.reps.iter().find(|&&(_, b)| b != want) {
                return Ok(Some(self.trace_to(rep)));
            }
        }
        Ok(None)
    }

    fn trace_to(&self, node: usize) -> ExecutionTrace {
        let mut chain = Vec::new();
        let mut v = node;
        while let Some((p, step)) = self.parent[v] {
            chain.push((step, self.nodes[v].clone()));
            v = p as usize;
        }
        chain.reverse();
        let mut t = ExecutionTrace::new(self.nodes[v].clone());
        for (s, c) in chain {
            t.push(s, c);
        }
        t.terminal = is_terminal(self.proto, t.last());
        t
    }

    fn check_budget(&self) -> Result<(), VerifyError> {
        if self.nodes.len() > self.budget {
            Err(VerifyError::Budget { limit: self.budget })
        } else {
            Ok(())
        }
    }

    /// Move closure of the nodes from `lo` on, then its BSCC summary.
    fn close_layer(&mut self, lo: usize) -> Result<(), VerifyError> {
        let mut i = lo;
        while i < self.nodes.len() {
            let c = self.nodes[i].clone();
            for (t, d) in move_successors(self.proto, &c) {
                for law in self.laws {
                    if !law.holds(&t) {
                        let p = self.proto;
                        self.violations.insert(format!(
                            "{}: {},{} -> {},{}",
                            law.name,
                            p.state_name(t.pre[0]),
                            p.state_name(t.pre[1]),
                            p.state_name(t.post[0]),
                            p.state_name(t.post[1])
                        ));
                    }
                }
                let (j, new) = self.nodes.insert_full(d);
                if new {
                    self.parent.push(Some((i as u32, Step::Move(t))));
                    self.check_budget()?;
                }
                self.edges.targets.push(j as u32);
            }
            self.edges.finish_row();
            i += 1;
        }
        let hi = self.nodes.len();
        let (comp, ncomp) = graph::scc(&self.edges, lo, hi);
        let is_bottom = graph::bottom(&self.edges, lo, &comp, ncomp);
        let mut per_comp = vec![0u8; ncomp];
        let mut rep = vec![usize::MAX; ncomp];
        for (v, &c) in comp.iter().enumerate().take(hi - lo) {
            let c = c as usize;
            if is_bottom[c] {
                per_comp[c] |= graph::bit(output_of(self.proto, &self.nodes[lo + v])?);
                if rep[c] == usize::MAX {
                    rep[c] = lo + v;
                }
            }
        }
        let mut reps = Vec::new();
        let mut bits = 0;
        for c in 0..ncomp {
            if is_bottom[c] {
                let b = per_comp[c];
                let b = if b == graph::ACCEPT || b == graph::REJECT { b } else { graph::UNDECIDED };
                bits |= b;
                reps.push((rep[c], b));
            }
        }
        reps.sort_unstable();
        self.layers.push(Layer { lo, hi, bits, reps });
        Ok(())
    }
}
