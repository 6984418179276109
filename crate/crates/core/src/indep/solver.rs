//! Bit-parallel branch and bound for maximum independent sets.
//!
//! Works on the compatibility graph (distinct, non-adjacent pairs), where an
//! independent set is a clique. Candidate sets are partitioned greedily into
//! cliques of the original graph; each part contributes at most one vertex,
//! which bounds the subtree. Vertices are renumbered once by a smallest-last
//! degeneracy order of the compatibility graph so that ties always resolve to
//! the least index and runs are reproducible.

use std::time::{Duration, Instant};

use super::local;
use crate::bitset::BitSet;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Wall-clock budget for one solve.
    pub budget: Duration,
    /// Assume every vertex lies in some maximum independent set and fix
    /// vertex 0 at the root. Valid for Cayley graphs and their products.
    pub vertex_transitive: bool,
    /// A proven upper bound on the independence number; the search stops as
    /// soon as an incumbent reaches it.
    pub upper_bound: Option<usize>,
    /// An independent set to start from.
    pub seed: Option<Vec<usize>>,
    /// Perturbation rounds of local search run before branching.
    pub local_search: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: Duration::from_secs(300),
            vertex_transitive: false,
            upper_bound: None,
            seed: None,
            local_search: 20_000,
        }
    }
}

pub(crate) struct Outcome {
    pub best: Vec<usize>,
    pub complete: bool,
}

struct Search {
    compat: Vec<BitSet>,
    /// Original vertex id of each renumbered vertex.
    original: Vec<usize>,
    best: Vec<usize>,
    current: Vec<usize>,
    target: usize,
    deadline: Instant,
    nodes: u64,
    stop: Stop,
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Stop {
    No,
    Timeout,
    ReachedBound,
}

/// `adj` is the symmetrized adjacency matrix.
pub(crate) fn solve(adj: &[BitSet], opts: &SolverOptions) -> Outcome {
    let n = adj.len();
    let start = Instant::now();
    if n == 0 {
        return Outcome { best: Vec::new(), complete: true };
    }
    let order = degeneracy_order(adj);
    let mut position = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let compat: Vec<BitSet> = order
        .iter()
        .map(|&old| {
            let mut row = BitSet::full(n);
            for u in adj[old].iter() {
                row.remove(position[u]);
            }
            row.remove(position[old]);
            row
        })
        .collect();

    let mut search = Search {
        compat,
        original: order,
        best: Vec::new(),
        current: Vec::new(),
        target: opts.upper_bound.unwrap_or(n),
        deadline: start + opts.budget,
        nodes: 0,
        stop: Stop::No,
    };
    search.best = search.greedy();
    if let Some(seed) = &opts.seed {
        let renumbered: Vec<usize> = seed.iter().map(|&v| position[v]).collect();
        if renumbered.len() > search.best.len() && search.is_clique(&renumbered) {
            search.best = renumbered;
        }
    }
    if search.best.len() < search.target && opts.local_search > 0 {
        let start: Vec<usize> = search.best.iter().map(|&v| search.original[v]).collect();
        let found = local::search(adj, &start, opts.local_search, search.target, search.deadline);
        if found.len() > search.best.len() {
            search.best = found.iter().map(|&v| position[v]).collect();
        }
    }
    if search.best.len() >= search.target {
        search.stop = Stop::ReachedBound;
    } else if opts.vertex_transitive {
        let root = position[0];
        search.current.push(root);
        let candidates = search.compat[root].clone();
        if candidates.is_empty() {
            search.record();
        } else {
            search.expand(candidates);
        }
        search.current.pop();
    } else {
        search.expand(BitSet::full(n));
    }

    let mut best: Vec<usize> = search.best.iter().map(|&v| search.original[v]).collect();
    best.sort_unstable();
    Outcome { best, complete: search.stop != Stop::Timeout }
}

/// Smallest-last order of the compatibility graph, reversed so the densest
/// core comes first. Ties go to the least vertex id.
fn degeneracy_order(adj: &[BitSet]) -> Vec<usize> {
    let n = adj.len();
    let mut alive = BitSet::full(n);
    let mut degree: Vec<usize> = adj.iter().map(|row| n - 1 - row.count()).collect();
    let mut removed = Vec::with_capacity(n);
    for _ in 0..n {
        let v = alive.iter().min_by_key(|&v| (degree[v], v)).expect("vertices remain");
        alive.remove(v);
        removed.push(v);
        for u in alive.iter() {
            if !adj[v].contains(u) {
                degree[u] -= 1;
            }
        }
    }
    removed.reverse();
    removed
}

impl Search {
    fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| self.compat[a].contains(b)))
    }

    /// Greedy maximal independent set, scanning from the sparse end.
    fn greedy(&self) -> Vec<usize> {
        let n = self.compat.len();
        let mut chosen = Vec::new();
        let mut allowed = BitSet::full(n);
        for v in (0..n).rev() {
            if allowed.contains(v) {
                chosen.push(v);
                allowed.intersect_with(&self.compat[v]);
            }
        }
        chosen
    }

    fn record(&mut self) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
            if self.best.len() >= self.target {
                self.stop = Stop::ReachedBound;
            }
        }
    }

    /// Greedy partition of `candidates` into cliques of the original graph.
    /// Returns vertices in partition order with their part number, keeping
    /// only parts numbered at least `min_color`.
    fn color(&self, candidates: &BitSet, min_color: usize) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut uncolored = candidates.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.first() {
                uncolored.remove(v);
                open.remove(v);
                open.difference_with(&self.compat[v]);
                if color >= min_color {
                    order.push(v);
                    colors.push(color);
                }
            }
        }
        (order, colors)
    }

    fn expand(&mut self, mut candidates: BitSet) {
        self.nodes += 1;
        if self.nodes & 0x3ff == 0 && Instant::now() >= self.deadline {
            self.stop = Stop::Timeout;
        }
        if self.stop != Stop::No {
            return;
        }
        let min_color = (self.best.len() + 1).saturating_sub(self.current.len()).max(1);
        let (order, colors) = self.color(&candidates, min_color);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.best.len() || self.stop != Stop::No {
                return;
            }
            let v = order[i];
            self.current.push(v);
            let next = candidates.intersection(&self.compat[v]);
            if next.is_empty() {
                self.record();
            } else {
                self.expand(next);
            }
            self.current.pop();
            candidates.remove(v);
        }
    }
}
