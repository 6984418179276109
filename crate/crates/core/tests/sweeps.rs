//! Exhaustive sweeps of structural identities over small parameter ranges.

use std::sync::Arc;

use paley_core::graphs::{build_paley, crt_factor_check, CayleyGraph, GenericGraph, ProductGraph};
use paley_core::indep::{
    alpha_product, capacity_bounds, clique_number, cohen_bound, max_independent_set, verify_independent,
    AlphaOptions,
};
use paley_core::polyring::{enumerate_p, PolyFq};
use paley_core::rings::{gcd, is_prime, prime_power, RingCtx, RingSpec};
use paley_core::sarkozy::{
    build_sarkozy_power, difference_graph, greedy_construct, verify_no_f_difference, ExplicitSet, PolySet,
    SarkozyParams, Variant,
};
use paley_core::theta::{cayley_spectrum, lovasz_theta};

fn field(q: u64) -> Arc<RingCtx> {
    Arc::new(RingCtx::new(RingSpec::field_of_order(q).unwrap()).unwrap())
}

fn prime_powers(limit: u64) -> impl Iterator<Item = u64> {
    (2..=limit).filter(|&q| prime_power(q).is_some())
}

fn check_moments(g: &CayleyGraph) {
    let spec = cayley_spectrum(g).unwrap();
    let n = g.order() as f64;
    let sum: f64 = spec.iter().sum();
    let sq: f64 = spec.iter().map(|l| l * l).sum();
    assert!(sum.abs() < 1e-8 * n, "{:?} k={}: trace {sum}", g.ring().spec(), g.k());
    assert!((sq - n * g.degree() as f64).abs() < 1e-7 * n * n, "{:?} k={}: {sq}", g.ring().spec(), g.k());
    assert!((spec[spec.len() - 1] - g.degree() as f64).abs() < 1e-9);
}

#[test]
fn spectrum_moments_on_every_cayley_graph() {
    let mut checked = 0;
    for q in prime_powers(128) {
        let ring = field(q);
        for k in 2..=6 {
            let g = build_paley(&ring, k);
            if g.is_symmetric() {
                check_moments(&g);
                check_moments(&g.complement_cayley());
                checked += 2;
            }
        }
    }
    for m in 2..=120u32 {
        let ring = Arc::new(RingCtx::zmod(m).unwrap());
        for k in 2..=4 {
            let g = build_paley(&ring, k);
            if g.is_symmetric() {
                check_moments(&g);
                checked += 1;
            }
        }
    }
    assert!(checked > 200);
}

#[test]
fn crt_factorization_sweep() {
    let mut pairs = 0;
    for m in 2..=40u32 {
        for n in m + 1..=60 {
            if gcd(m as u64, n as u64) != 1 || m * n > 600 {
                continue;
            }
            for k in 2..=4 {
                assert!(crt_factor_check(m, n, k).unwrap(), "m={m} n={n} k={k}");
            }
            pairs += 1;
        }
    }
    assert!(pairs > 100);
}

#[test]
fn clique_at_most_independence_for_k_above_two() {
    for q in prime_powers(50) {
        let ring = field(q);
        for k in 3..=6 {
            let g = build_paley(&ring, k);
            if !g.is_symmetric() || g.degree() == 0 || g.degree() == q as usize - 1 {
                continue;
            }
            let base = g.to_generic();
            let omega = clique_number(&base).unwrap().size;
            let alpha = max_independent_set(&base).unwrap().size;
            assert!(omega <= alpha, "q={q} k={k}: ω={omega} α={alpha}");
            if let Ok(c) = cohen_bound(q, k) {
                assert!(c >= 1.0);
            }
        }
    }
}

#[test]
fn odd_cycle_sparse_bound() {
    for k in 1..=8u64 {
        let q = 2 * k + 1;
        let alpha = max_independent_set(&GenericGraph::cycle(q as usize)).unwrap().size;
        assert_eq!(alpha as u64, k);
        // q^{1 - ln 2 / ln q} is exactly q/2, so k = (q-1)/2 meets it only up
        // to the factor 1 - 1/q.
        let bound = (q as f64).powf(1.0 - 2f64.ln() / (q as f64).ln());
        assert!((bound - q as f64 / 2.0).abs() < 1e-9);
        assert!((alpha as f64 - bound * (1.0 - 1.0 / q as f64)).abs() < 1e-9, "k={k}");
        assert!((alpha as f64) < bound);
        if is_prime(q) && k >= 2 {
            // Paley_k(F_{2k+1}) is the cycle C_{2k+1}.
            assert_eq!(build_paley(&field(q), k as u32).to_generic(), GenericGraph::cycle(q as usize));
        }
    }
}

#[test]
fn superadditivity_and_sandwich() {
    let opts = AlphaOptions::default();
    for (q, k) in [(5u64, 2u32), (7, 3), (9, 2), (13, 2), (13, 4), (3, 2), (9, 4)] {
        let ring = field(q);
        let a1 = alpha_product(&ring, k, 1, &opts).unwrap().size;
        let a2 = alpha_product(&ring, k, 2, &opts).unwrap().size;
        assert!(a2 >= a1 * a1, "q={q} k={k}");
        // (r_{k,2})^{1/2} >= r_{k,1}.
        assert!((a2 as f64).sqrt() >= a1 as f64 - 1e-12);
        let g = build_paley(&ring, k);
        if g.is_symmetric() {
            let theta = lovasz_theta(&g).unwrap().value;
            assert!(a2 as f64 <= theta * theta + 1e-7, "q={q} k={k}");
            let b = capacity_bounds(&ring, k, 2, false, &opts).unwrap();
            assert!(b.lower <= b.upper + 1e-9);
        }
    }
}

#[test]
fn cut_and_uncut_solves_agree() {
    for (q, k) in [(5u64, 2u32), (7, 3), (9, 2), (13, 2), (13, 3), (9, 4)] {
        let ring = field(q);
        let cut = alpha_product(&ring, k, 2, &AlphaOptions::default()).unwrap();
        let uncut = alpha_product(&ring, k, 2, &AlphaOptions::uncut()).unwrap();
        assert_eq!(cut.size, uncut.size, "q={q} k={k}");
        let product = ProductGraph::power(&build_paley(&ring, k).to_generic(), 2).unwrap();
        assert!(verify_independent(product.graph(), &cut.vertices).unwrap());
    }
}

#[test]
fn difference_free_sets_stay_free_in_larger_spaces() {
    let opts = AlphaOptions::default();
    for (q, k, n) in [(3u64, 2u32, 4usize), (5, 2, 4)] {
        let set = build_sarkozy_power(&SarkozyParams::monomial(q, k, n, Variant::Power), &opts).unwrap();
        let ring = field(q);
        let polys = set.to_vec().unwrap();
        let tk = PolyFq::monomial(Arc::clone(&ring), paley_core::rings::RingElem::ONE, k as usize);
        let bigger = ExplicitSet::new(Arc::clone(&ring), n + 1, &polys).unwrap();
        assert!(verify_no_f_difference(&bigger, &tk).unwrap());
        assert!(set.verify().unwrap());
        for p in &polys {
            assert!(set.contains_poly(p));
        }
    }
}

#[test]
fn exhaustive_probe_bounds_constructions() {
    for n in [3usize, 4] {
        let g = difference_graph(2, n, 2).unwrap();
        let optimum = max_independent_set(&g).unwrap().size;
        let greedy = greedy_construct(2, n, 2).unwrap();
        assert!(greedy.len() <= optimum, "n={n}");
        assert!(greedy.len() >= 1 << (n - 1 - (n - 1) / 2));
    }
}

#[test]
fn full_spaces_are_never_difference_free() {
    for (q, k, n) in [(2u64, 2u32, 3usize), (3, 2, 3), (3, 3, 4), (5, 2, 3), (4, 3, 4)] {
        let ring = field(q);
        let all: Vec<PolyFq> = enumerate_p(Arc::clone(&ring), n).unwrap().collect();
        let set = ExplicitSet::new(Arc::clone(&ring), n, &all).unwrap();
        let f = PolyFq::monomial(ring, paley_core::rings::RingElem::ONE, k as usize);
        assert!(!verify_no_f_difference(&set, &f).unwrap(), "q={q} k={k} n={n}");
    }
}

#[test]
fn greedy_sets_pass_the_verifier() {
    for (q, k, n) in [(2u64, 2u32, 5usize), (2, 2, 6), (3, 3, 4), (4, 2, 4), (5, 3, 4), (2, 3, 7)] {
        let ring = field(q);
        let greedy = greedy_construct(q, n, k).unwrap();
        let set = ExplicitSet::new(Arc::clone(&ring), n, &greedy).unwrap();
        let f = PolyFq::monomial(Arc::clone(&ring), paley_core::rings::RingElem::ONE, k as usize);
        assert!(verify_no_f_difference(&set, &f).unwrap(), "q={q} k={k} n={n}");
        if ring.is_kth_power(ring.neg(paley_core::rings::RingElem::ONE), k) {
            let floor = (q as usize).pow((n - 1 - (n - 1) / k as usize) as u32);
            assert!(greedy.len() >= floor, "q={q} k={k} n={n}: {} < {floor}", greedy.len());
        }
    }
}
