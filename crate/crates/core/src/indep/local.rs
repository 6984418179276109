//! Iterated local search with (1,2)-swaps for large independent sets.
//!
//! A swap removes one solution vertex `x` and inserts two non-adjacent
//! vertices whose only solution neighbor is `x`. Perturbations force random
//! outside vertices into the solution. Seeded, so runs are reproducible.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;

const SEED: u64 = 0x5eed_1e55;

struct State<'a> {
    adj: &'a [BitSet],
    inside: BitSet,
    /// Number of solution neighbors of each vertex.
    tight: Vec<usize>,
    size: usize,
}

impl<'a> State<'a> {
    fn new(adj: &'a [BitSet], start: &[usize]) -> Self {
        let n = adj.len();
        let mut s = State { adj, inside: BitSet::new(n), tight: vec![0; n], size: 0 };
        for &v in start {
            s.add(v);
        }
        s
    }

    fn add(&mut self, v: usize) {
        self.inside.insert(v);
        self.size += 1;
        for u in self.adj[v].iter() {
            self.tight[u] += 1;
        }
    }

    fn drop(&mut self, v: usize) {
        self.inside.remove(v);
        self.size -= 1;
        for u in self.adj[v].iter() {
            self.tight[u] -= 1;
        }
    }

    fn fill_free(&mut self) {
        for v in 0..self.adj.len() {
            if !self.inside.contains(v) && self.tight[v] == 0 {
                self.add(v);
            }
        }
    }

    /// Applies (1,2)-swaps until none is left.
    fn improve(&mut self) {
        self.fill_free();
        loop {
            let mut swapped = false;
            let members: Vec<usize> = self.inside.iter().collect();
            for x in members {
                let one_tight: Vec<usize> = self.adj[x].iter().filter(|&u| self.tight[u] == 1).collect();
                let pair = one_tight.iter().enumerate().find_map(|(i, &a)| {
                    one_tight[i + 1..].iter().find(|&&b| !self.adj[a].contains(b)).map(|&b| (a, b))
                });
                if let Some((a, b)) = pair {
                    self.drop(x);
                    self.add(a);
                    self.add(b);
                    self.fill_free();
                    swapped = true;
                }
            }
            if !swapped {
                return;
            }
        }
    }

    fn force(&mut self, v: usize) {
        let clash: Vec<usize> = self.adj[v].iter().filter(|&u| self.inside.contains(u)).collect();
        for u in clash {
            self.drop(u);
        }
        self.add(v);
    }

    fn members(&self) -> Vec<usize> {
        self.inside.iter().collect()
    }
}

/// Returns the best set found, starting from `start`.
pub(crate) fn search(adj: &[BitSet], start: &[usize], iterations: usize, target: usize, deadline: Instant) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut state = State::new(adj, start);
    state.improve();
    let mut best = state.members();
    for it in 0..iterations {
        if best.len() >= target || (it & 0x3f == 0 && Instant::now() >= deadline) {
            break;
        }
        let previous = state.members();
        let strength = if rng.gen_ratio(1, 2 * best.len().max(1) as u32) { 2 + rng.gen_range(0..3) } else { 1 };
        for _ in 0..strength {
            let v = rng.gen_range(0..n);
            if !state.inside.contains(v) {
                state.force(v);
            }
        }
        state.improve();
        if state.size > best.len() {
            best = state.members();
        } else if state.size + 1 < previous.len() {
            state = State::new(adj, &previous);
        }
    }
    best
}
