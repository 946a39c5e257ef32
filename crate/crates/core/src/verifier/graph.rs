//! Strongly connected components on compact adjacency arrays.

use crate::model::Output;

/// Adjacency in compressed rows: the successors of node `i` are
/// `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Clone, Debug, Default)]
pub struct Csr {
    pub offsets: Vec<usize>,
    pub targets: Vec<u32>,
}

impl Csr {
    pub fn new() -> Self {
        Csr { offsets: vec![0], targets: Vec::new() }
    }

    pub fn from_lists(lists: &[Vec<usize>]) -> Self {
        let mut g = Csr::new();
        for l in lists {
            g.targets.extend(l.iter().map(|&j| j as u32));
            g.offsets.push(g.targets.len());
        }
        g
    }

    /// Closes the row of the next node.
    pub fn finish_row(&mut self) {
        self.offsets.push(self.targets.len());
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn succ(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Components of the subgraph on nodes `lo..hi`, which must have no edges
/// leaving the range. Returns the component of each node (relative to `lo`)
/// and the number of components. Iterative Tarjan.
pub fn scc(g: &Csr, lo: usize, hi: usize) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = hi - lo;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0usize;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, g.offsets[lo + root]));
        while let Some(&(v, pos)) = call.last() {
            let end = g.offsets[lo + v + 1];
            if pos < end {
                call.last_mut().unwrap().1 += 1;
                let w = g.targets[pos] as usize - lo;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, g.offsets[lo + w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp as u32;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// Which components have no edge to another component.
pub fn bottom(g: &Csr, lo: usize, comp: &[u32], ncomp: usize) -> Vec<bool> {
    let mut is_bottom = vec![true; ncomp];
    for (v, &c) in comp.iter().enumerate() {
        if g.succ(lo + v).iter().any(|&w| comp[w as usize - lo] != c) {
            is_bottom[c as usize] = false;
        }
    }
    is_bottom
}

pub const ACCEPT: u8 = 1;
pub const REJECT: u8 = 2;
pub const UNDECIDED: u8 = 4;

pub fn bit(o: Output) -> u8 {
    match o {
        Output::Accept => ACCEPT,
        Output::Reject => REJECT,
        Output::Undecided => UNDECIDED,
    }
}

/// The common output of a set of BSCCs given the union of their bits.
pub fn from_bits(bits: u8) -> Output {
    match bits {
        ACCEPT => Output::Accept,
        REJECT => Output::Reject,
        _ => Output::Undecided,
    }
}

/// Bits of one BSCC: a single decided output shared by all its nodes, or
/// undecided.
pub fn bscc_bits<I: IntoIterator<Item = Output>>(outputs: I) -> u8 {
    let mut b = 0;
    for o in outputs {
        b |= bit(o);
    }
    if b == ACCEPT || b == REJECT {
        b
    } else {
        UNDECIDED
    }
}

/// `out_0` from `start` in an explicit graph where each node carries the
/// configuration output: unanimity over all BSCCs reachable from `start`.
pub fn out0_explicit(g: &Csr, outputs: &[Output], start: usize) -> Output {
    let n = g.rows();
    let (comp, ncomp) = scc(g, 0, n);
    let is_bottom = bottom(g, 0, &comp, ncomp);
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = vec![false; ncomp];
    while let Some(v) = stack.pop() {
        reached[comp[v] as usize] = true;
        for &w in g.succ(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w as usize);
            }
        }
    }
    let mut per_comp = vec![0u8; ncomp];
    for v in 0..n {
        per_comp[comp[v] as usize] |= bit(outputs[v]);
    }
    let mut bits = 0;
    for c in 0..ncomp {
        if reached[c] && is_bottom[c] {
            let b = per_comp[c];
            bits |= if b == ACCEPT || b == REJECT { b } else { UNDECIDED };
        }
    }
    from_bits(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_of_a_small_graph() {
        // 0 -> 1 -> 2 -> 1, 0 -> 3
        let g = Csr::from_lists(&[vec![1, 3], vec![2], vec![1], vec![]]);
        let (comp, n) = scc(&g, 0, 4);
        assert_eq!(n, 3);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        let b = bottom(&g, 0, &comp, n);
        assert!(b[comp[1] as usize] && b[comp[3] as usize] && !b[comp[0] as usize]);
    }

    #[test]
    fn explicit_out0() {
        use Output::*;
        let g = Csr::from_lists(&[vec![1, 3], vec![2], vec![1], vec![]]);
        assert_eq!(out0_explicit(&g, &[Reject, Accept, Accept, Accept], 0), Accept);
        assert_eq!(out0_explicit(&g, &[Reject, Accept, Reject, Accept], 0), Undecided);
        assert_eq!(out0_explicit(&g, &[Accept, Reject, Reject, Accept], 3), Accept);
    }

    #[test]
    fn deep_chain_does_not_recurse() {
        let n = 200_000;
        let lists: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![] }).collect();
        let g = Csr::from_lists(&lists);
        let (_, k) = scc(&g, 0, n);
        assert_eq!(k, n);
    }
}
