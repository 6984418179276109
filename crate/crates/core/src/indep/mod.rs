//! Exact independence numbers, the explicit independent-set constructions for
//! Paley products, and Shannon-capacity bounds.

mod local;
mod solver;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use solver::SolverOptions;

use crate::error::{Error, Result};
use crate::graphs::{build_paley, complement, CayleyGraph, strong_product_all, tuple_index, GenericGraph, ProductGraph};
use crate::rings::{gcd, RingCtx, RingSpec};
use crate::theta;

/// An independent set together with a fingerprint of the graph it lives in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndepSet {
    pub vertices: Vec<usize>,
    pub size: usize,
    pub graph_fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<Vec<usize>>>,
}

impl IndepSet {
    pub fn new(g: &GenericGraph, mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        IndepSet { size: vertices.len(), vertices, graph_fingerprint: fingerprint(g), tuples: None }
    }

    /// Attaches the tuple decoding of each vertex for a product graph.
    pub fn with_tuples(mut self, product: &ProductGraph) -> Self {
        self.tuples = Some(self.vertices.iter().map(|&v| product.tuple(v)).collect());
        self
    }
}

/// SHA-256 over the vertex count and every sorted out-neighbor list, hex
/// encoded and truncated to 128 bits.
pub fn fingerprint(g: &GenericGraph) -> String {
    let mut hasher = Sha256::new();
    hasher.update((g.order() as u64).to_le_bytes());
    for v in 0..g.order() {
        let row = g.out_neighbors(v);
        hasher.update((row.len() as u64).to_le_bytes());
        for &u in row {
            hasher.update(u.to_le_bytes());
        }
    }
    hasher.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// True iff no ordered pair of distinct members is an arc.
pub fn verify_independent(g: &GenericGraph, set: &[usize]) -> Result<bool> {
    if let Some(&v) = set.iter().find(|&&v| v >= g.order()) {
        return Err(Error::VertexOutOfRange { vertex: v, order: g.order() });
    }
    Ok(set.iter().all(|&a| set.iter().all(|&b| a == b || !g.has_edge(a, b))))
}

/// Exact maximum independent set of the symmetrized graph.
pub fn max_independent_set(g: &GenericGraph) -> Result<IndepSet> {
    max_independent_set_with(g, &SolverOptions::default())
}

pub fn max_independent_set_with(g: &GenericGraph, opts: &SolverOptions) -> Result<IndepSet> {
    if let Some(seed) = &opts.seed {
        if !verify_independent(g, seed)? {
            return Err(Error::InvalidArgument("seed is not an independent set".into()));
        }
    }
    let outcome = solver::solve(&g.symmetrized_rows(), opts);
    let set = IndepSet::new(g, outcome.best);
    if outcome.complete {
        Ok(set)
    } else {
        Err(Error::Timeout { budget: opts.budget, incumbent: Box::new(set) })
    }
}

/// `ω(G) = α(Ḡ)`; the certificate is a clique of `G`.
pub fn clique_number(g: &GenericGraph) -> Result<IndepSet> {
    max_independent_set(&complement(g))
}

/// Options for [`alpha_product`] and [`capacity_bounds`].
#[derive(Clone, Debug)]
pub struct AlphaOptions {
    pub solver: SolverOptions,
    /// Stop as soon as the incumbent reaches `floor(ϑ(G)^n)`.
    pub theta_cutoff: bool,
    /// Stop as soon as the incumbent reaches `floor(|G| α(G^{⊠(n-1)}) / ω(G))`.
    pub slice_cutoff: bool,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        AlphaOptions { solver: SolverOptions::default(), theta_cutoff: true, slice_cutoff: true }
    }
}

impl AlphaOptions {
    /// Plain branch and bound with no external upper bounds.
    pub fn uncut() -> Self {
        AlphaOptions { theta_cutoff: false, slice_cutoff: false, ..Self::default() }
    }
}

/// `α(G ⊠ H) <= χ̄_f(G) α(H)`: for a clique `C` of `G` the slices of an
/// independent set over `C` are disjoint and jointly independent in `H`. For a
/// vertex-transitive undirected `G`, `χ̄_f(G) = |G| / ω(G)`.
pub fn slice_bound(order: usize, omega: usize, alpha_rest: usize) -> usize {
    order * alpha_rest / omega
}

fn tighten(bound: &mut Option<usize>, candidate: usize) {
    *bound = Some(bound.map_or(candidate, |b| b.min(candidate)));
}

fn field_ctx(q: u64) -> Result<Arc<RingCtx>> {
    Ok(Arc::new(RingCtx::new(RingSpec::field_of_order(q)?)?))
}

/// `r_{k,n}(R) = α(Paley_k(R)^{⊠n})`, with the certificate in tuple form.
pub fn alpha_product(ring: &Arc<RingCtx>, k: u32, n: usize, opts: &AlphaOptions) -> Result<IndepSet> {
    alpha_cayley_power(&build_paley(ring, k), n, opts)
}

/// `α(G^{⊠n})` for a Paley graph or Paley complement `G`.
pub fn alpha_cayley_power(g: &CayleyGraph, n: usize, opts: &AlphaOptions) -> Result<IndepSet> {
    let ring = g.ring();
    let base = g.to_generic();
    let product = ProductGraph::power(&base, n)?;
    let mut solver = opts.solver.clone();
    solver.vertex_transitive = true;
    if opts.theta_cutoff && g.is_symmetric() {
        if let Some(t) = theta_upper(g) {
            tighten(&mut solver.upper_bound, floor_with_slack(t.powi(n as i32)));
        }
    }
    if opts.slice_cutoff && g.is_symmetric() && n >= 2 {
        let omega = clique_number(&base)?.size;
        let mut inner = opts.clone();
        inner.solver.seed = None;
        inner.solver.upper_bound = None;
        if let Ok(rest) = alpha_cayley_power(g, n - 1, &inner) {
            tighten(&mut solver.upper_bound, slice_bound(base.order(), omega, rest.size));
        }
    }
    if solver.seed.is_none() && ring.is_field() {
        let k = g.k();
        let tuples: Option<Vec<Vec<usize>>> = if !g.is_complemented() && n == 2 && ring.power_index(k)? > 1 {
            Some(beta_pairs(ring, k)?.into_iter().map(|(x, y)| vec![x, y]).collect())
        } else if g.is_complemented() && n == k as usize && ring.power_index(k)? > 1 {
            Some(diagonal_tuples(ring, k)?)
        } else {
            None
        };
        solver.seed = tuples.map(|ts| ts.iter().map(|t| product.index(t)).collect());
    }
    match max_independent_set_with(product.graph(), &solver) {
        Ok(set) => Ok(set.with_tuples(&product)),
        Err(Error::Timeout { budget, incumbent }) => {
            Err(Error::Timeout { budget, incumbent: Box::new(incumbent.with_tuples(&product)) })
        }
        Err(e) => Err(e),
    }
}

/// Upper bound on ϑ(G) when one is available.
fn theta_upper(g: &CayleyGraph) -> Option<f64> {
    let ring = g.ring();
    if ring.is_field() {
        return theta::lovasz_theta(g).ok().map(|r| r.value);
    }
    match ring.spec() {
        RingSpec::ZMod { m } if !g.is_complemented() => theta::theta_zmod(m as u64, g.k()).ok().map(|r| r.value),
        _ => theta::theta_character_lp(g).ok().map(|r| r.value),
    }
}

fn floor_with_slack(x: f64) -> usize {
    (x + 1e-7).floor() as usize
}

fn beta_pairs(ring: &RingCtx, k: u32) -> Result<Vec<(usize, usize)>> {
    let beta = ring.non_kth_power(k)?;
    Ok(ring.elements().map(|x| (x.index(), ring.mul(beta, x).index())).collect())
}

/// `{(x, βx, ..., β^{k-1}x)}` for a generator β, independent in
/// `complement(Paley_k(F_q))^{⊠k}`.
pub fn diagonal_indep_set(q: u64, k: u32) -> Result<IndepSet> {
    let ring = field_ctx(q)?;
    let gbar = complement(&build_paley(&ring, k).to_generic());
    let product = ProductGraph::power(&gbar, k as usize)?;
    let vertices = diagonal_tuples(&ring, k)?.iter().map(|t| tuple_index(product.dims(), t)).collect();
    Ok(IndepSet::new(product.graph(), vertices).with_tuples(&product))
}

fn diagonal_tuples(ring: &RingCtx, k: u32) -> Result<Vec<Vec<usize>>> {
    let beta = ring.generator()?;
    Ok(ring.elements().map(|x| (0..k as u64).map(|j| ring.mul(ring.pow(beta, j), x).index()).collect()).collect())
}

/// `{(x, βx)}` for the least non-`k`-th power β, independent in
/// `Paley_k(F_q) ⊠ Paley_k(F_q)`.
pub fn beta_pair_set(q: u64, k: u32) -> Result<IndepSet> {
    let ring = field_ctx(q)?;
    let g = build_paley(&ring, k).to_generic();
    let product = strong_product_all(&[&g, &g])?;
    let vertices = beta_pairs(&ring, k)?.into_iter().map(|(x, y)| product.index(&[x, y])).collect();
    Ok(IndepSet::new(product.graph(), vertices).with_tuples(&product))
}

/// Cohen's clique lower bound for `Paley_k(F_q)`, natural logs,
/// `d = gcd(k, q - 1)`, clamped below at 1.
pub fn cohen_bound(q: u64, k: u32) -> Result<f64> {
    let (p, _) = crate::rings::prime_power(q).ok_or(Error::NotPrime(q))?;
    let d = gcd(k as u64, q - 1);
    if d < 2 {
        return Err(Error::AllPowers { k });
    }
    let (p, q, d) = (p as f64, q as f64, d as f64);
    let raw = p / ((p - 1.0) * d.ln()) * (0.5 * q.ln() - 2.0 * q.ln().ln()) - 1.0;
    Ok(raw.max(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerAlpha {
    pub n: usize,
    pub alpha: usize,
    /// False when the solver budget ran out and `alpha` is only a lower bound.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
    pub n_used: usize,
    pub powers: Vec<PowerAlpha>,
}

/// Sandwich `max_n α(G^{⊠n})^{1/n} <= Θ(G) <= ϑ(G)` for `G = Paley_k(R)` or
/// its complement.
pub fn capacity_bounds(
    ring: &Arc<RingCtx>,
    k: u32,
    max_n: usize,
    use_complement: bool,
    opts: &AlphaOptions,
) -> Result<CapacityBounds> {
    let paley = build_paley(ring, k);
    let cayley = if use_complement { paley.complement_cayley() } else { paley };
    let upper = theta::lovasz_theta(&cayley)?.value;
    let base = cayley.to_generic();
    let omega = clique_number(&base)?.size;

    let mut powers: Vec<PowerAlpha> = Vec::new();
    let mut best_sets: Vec<Vec<Vec<usize>>> = Vec::new();
    let (mut lower, mut n_used) = (0.0f64, 0);
    for n in 1..=max_n {
        let product = ProductGraph::power(&base, n)?;
        let mut seeds: Vec<Vec<Vec<usize>>> = Vec::new();
        if n >= 2 {
            // Independent sets multiply: (n-1)-set times 1-set.
            let prev = &best_sets[n - 2];
            let first = &best_sets[0];
            seeds.push(prev.iter().flat_map(|t| first.iter().map(move |s| [t.clone(), s.clone()].concat())).collect());
        }
        if !use_complement && n == 2 && ring.is_field() && ring.power_index(k)? > 1 {
            seeds.push(beta_pairs(ring, k)?.into_iter().map(|(x, y)| vec![x, y]).collect());
        }
        if use_complement && n == k as usize && ring.is_field() {
            seeds.push(diagonal_tuples(ring, k)?);
        }
        let seed = seeds.into_iter().max_by_key(Vec::len).map(|tuples| {
            tuples.iter().map(|t| product.index(t)).collect::<Vec<_>>()
        });
        let mut solver = opts.solver.clone();
        solver.vertex_transitive = true;
        solver.seed = seed;
        if opts.theta_cutoff {
            tighten(&mut solver.upper_bound, floor_with_slack(upper.powi(n as i32)));
        }
        if opts.slice_cutoff && n >= 2 && powers[n - 2].exact {
            tighten(&mut solver.upper_bound, slice_bound(base.order(), omega, powers[n - 2].alpha));
        }
        let (set, exact) = match max_independent_set_with(product.graph(), &solver) {
            Ok(set) => (set, true),
            Err(Error::Timeout { incumbent, .. }) => (*incumbent, false),
            Err(e) => return Err(e),
        };
        let rate = (set.size as f64).powf(1.0 / n as f64);
        if rate > lower + 1e-12 {
            lower = rate;
            n_used = n;
        }
        powers.push(PowerAlpha { n, alpha: set.size, exact });
        best_sets.push(set.vertices.iter().map(|&v| product.tuple(v)).collect());
    }
    assert!(lower <= upper + 1e-9, "capacity lower bound {lower} exceeds ϑ = {upper}");
    Ok(CapacityBounds { lower, upper, n_used, powers })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::GenericGraph;

    fn brute_alpha(g: &GenericGraph) -> usize {
        let n = g.order();
        let rows: Vec<u32> = (0..n)
            .map(|v| g.symmetrized_row(v).iter().fold(0u32, |acc, u| acc | 1 << u))
            .collect();
        (0u32..1 << n)
            .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || rows[v] & s == 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(max_independent_set(&GenericGraph::cycle(7)).unwrap().size, 3);
        assert_eq!(max_independent_set(&GenericGraph::complete(6)).unwrap().size, 1);
        assert_eq!(max_independent_set(&GenericGraph::empty(4)).unwrap().size, 4);
        assert_eq!(max_independent_set(&GenericGraph::empty(0)).unwrap().size, 0);
        let p13 = build_paley(&field_ctx(13).unwrap(), 2).to_generic();
        let set = max_independent_set(&p13).unwrap();
        assert_eq!(set.size, brute_alpha(&p13));
        assert_eq!(set.size, 3);
        assert!(verify_independent(&p13, &set.vertices).unwrap());
    }

    #[test]
    fn verify_examples() {
        let c7 = GenericGraph::cycle(7);
        assert!(verify_independent(&c7, &[0, 2, 4]).unwrap());
        assert!(!verify_independent(&c7, &[0, 1]).unwrap());
        assert!(matches!(verify_independent(&c7, &[9]), Err(Error::VertexOutOfRange { vertex: 9, order: 7 })));
    }

    #[test]
    fn directed_graphs_are_symmetrized() {
        // Paley_6(F_7): arcs x -> x - 1 only; symmetrized it is C_7.
        let g = build_paley(&field_ctx(7).unwrap(), 6).to_generic();
        assert_eq!(max_independent_set(&g).unwrap().size, 3);
        assert!(!verify_independent(&g, &[0, 1]).unwrap());
    }

    #[test]
    fn clique_examples() {
        assert_eq!(clique_number(&GenericGraph::cycle(7)).unwrap().size, 2);
        assert_eq!(clique_number(&GenericGraph::complete(5)).unwrap().size, 5);
        let p13 = build_paley(&field_ctx(13).unwrap(), 2).to_generic();
        assert_eq!(clique_number(&p13).unwrap().size, 3);
    }

    #[test]
    fn alpha_product_examples() {
        let opts = AlphaOptions::default();
        assert_eq!(alpha_product(&field_ctx(7).unwrap(), 3, 2, &opts).unwrap().size, 10);
        assert_eq!(alpha_product(&field_ctx(5).unwrap(), 2, 2, &opts).unwrap().size, 5);
        assert_eq!(alpha_product(&field_ctx(3).unwrap(), 2, 2, &opts).unwrap().size, 3);
        let set = alpha_product(&field_ctx(7).unwrap(), 3, 1, &opts).unwrap();
        assert_eq!(set.size, 3);
    }

    #[test]
    fn alpha_product_without_cutoff_agrees() {
        let opts = AlphaOptions::uncut();
        assert_eq!(alpha_product(&field_ctx(7).unwrap(), 3, 2, &opts).unwrap().size, 10);
        assert_eq!(alpha_product(&field_ctx(9).unwrap(), 2, 2, &opts).unwrap().size, 9);
    }

    #[test]
    fn timeout_carries_incumbent() {
        let ring = field_ctx(13).unwrap();
        let g = build_paley(&ring, 2).to_generic();
        let product = ProductGraph::power(&g, 2).unwrap();
        let opts = SolverOptions { budget: std::time::Duration::ZERO, ..Default::default() };
        match max_independent_set_with(product.graph(), &opts) {
            Err(Error::Timeout { incumbent, .. }) => {
                assert!(incumbent.size >= 1);
                assert!(verify_independent(product.graph(), &incumbent.vertices).unwrap());
            }
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_sets() {
        for (q, k, beta) in [(7u64, 3u32, 3usize), (5, 2, 2)] {
            let set = diagonal_indep_set(q, k).unwrap();
            assert_eq!(set.size, q as usize);
            let tuples = set.tuples.clone().unwrap();
            assert!(tuples.iter().all(|t| t[1] == t[0] * beta % q as usize));
            let ring = field_ctx(q).unwrap();
            let gbar = complement(&build_paley(&ring, k).to_generic());
            let product = ProductGraph::power(&gbar, k as usize).unwrap();
            assert_eq!(set.graph_fingerprint, fingerprint(product.graph()));
            assert!(verify_independent(product.graph(), &set.vertices).unwrap());
        }
        // gcd(3, 10) = 1: the complement is edgeless.
        assert_eq!(diagonal_indep_set(11, 3).unwrap().size, 11);
    }

    #[test]
    fn beta_pair_sets() {
        let set = beta_pair_set(5, 2).unwrap();
        let tuples = set.tuples.clone().unwrap();
        let expected: Vec<Vec<usize>> = vec![vec![0, 0], vec![1, 2], vec![2, 4], vec![3, 1], vec![4, 3]];
        assert_eq!(tuples, expected);
        for (q, k) in [(5u64, 2u32), (7, 3), (9, 2)] {
            let set = beta_pair_set(q, k).unwrap();
            assert_eq!(set.size, q as usize);
            let ring = field_ctx(q).unwrap();
            let g = build_paley(&ring, k).to_generic();
            let product = ProductGraph::power(&g, 2).unwrap();
            assert!(verify_independent(product.graph(), &set.vertices).unwrap());
        }
        assert!(matches!(beta_pair_set(11, 3), Err(Error::AllPowers { .. })));
    }

    #[test]
    fn cohen_examples() {
        // ½ ln 7 < 2 ln ln 7, so the raw value is negative.
        let raw = 7.0 / (6.0 * 3f64.ln()) * (0.5 * 7f64.ln() - 2.0 * 7f64.ln().ln()) - 1.0;
        assert!(raw < 0.0);
        assert_eq!(cohen_bound(7, 3).unwrap(), 1.0);
        let big = cohen_bound(1_000_003, 2).unwrap();
        assert!(big > 1.0);
        let mut last = 0.0;
        for q in [101u64, 1009, 10007, 100003, 1000003] {
            let v = cohen_bound(q, 2).unwrap();
            assert!(v >= last);
            last = v;
        }
        for q in [5u64, 13, 17, 29] {
            let g = build_paley(&field_ctx(q).unwrap(), 2).to_generic();
            assert!(cohen_bound(q, 2).unwrap() <= clique_number(&g).unwrap().size as f64);
        }
    }

    #[test]
    fn capacity_examples() {
        let opts = AlphaOptions::default();
        let c5 = capacity_bounds(&field_ctx(5).unwrap(), 2, 2, false, &opts).unwrap();
        assert!((c5.lower - 5f64.sqrt()).abs() < 1e-12);
        assert!((c5.upper - 5f64.sqrt()).abs() < 1e-9);
        let c7 = capacity_bounds(&field_ctx(7).unwrap(), 3, 2, false, &opts).unwrap();
        assert!((c7.lower - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(c7.n_used, 2);
        assert!((c7.upper - 3.3177).abs() < 1e-4);
    }

    #[test]
    fn capacity_complement_branch() {
        let opts = AlphaOptions {
            solver: SolverOptions { budget: std::time::Duration::from_secs(20), ..Default::default() },
            ..Default::default()
        };
        let b = capacity_bounds(&field_ctx(7).unwrap(), 3, 3, true, &opts).unwrap();
        assert!(b.lower >= 7f64.powf(1.0 / 3.0) - 1e-12);
        assert!(b.powers[2].alpha >= 7);
        assert!(b.lower <= b.upper + 1e-9);
    }
}
