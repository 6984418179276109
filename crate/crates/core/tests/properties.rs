use std::sync::Arc;

use paley_core::graphs::{build_paley, strong_product, GenericGraph};
use paley_core::indep::{max_independent_set, verify_independent};
use paley_core::polyring::PolyFq;
use paley_core::rings::{RingCtx, RingElem, RingSpec};
use proptest::prelude::*;

const ORDERS: [u64; 14] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 64];

fn field(q: u64) -> Arc<RingCtx> {
    Arc::new(RingCtx::new(RingSpec::field_of_order(q).unwrap()).unwrap())
}

fn exhaustive_alpha(n: usize, adj: &[u32]) -> usize {
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

prop_compose! {
    fn ring_and_elems()(i in 0..ORDERS.len())
        (q in Just(ORDERS[i]), a in 0..ORDERS[i] as u32, b in 0..ORDERS[i] as u32, c in 0..ORDERS[i] as u32)
        -> (u64, RingElem, RingElem, RingElem) {
        (q, RingElem(a), RingElem(b), RingElem(c))
    }
}

prop_compose! {
    fn poly_over(max_len: usize)(i in 0..ORDERS.len())
        (q in Just(ORDERS[i]), coeffs in prop::collection::vec(0..ORDERS[i] as u32, 0..max_len)) -> (u64, Vec<u32>) {
        (q, coeffs)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn field_axioms((q, a, b, c) in ring_and_elems()) {
        let r = field(q);
        prop_assert_eq!(r.add(a, b), r.add(b, a));
        prop_assert_eq!(r.mul(a, b), r.mul(b, a));
        prop_assert_eq!(r.mul(a, r.mul(b, c)), r.mul(r.mul(a, b), c));
        prop_assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
        prop_assert_eq!(r.add(a, r.neg(a)), RingElem::ZERO);
        if a != RingElem::ZERO {
            prop_assert_eq!(r.mul(a, r.inv(a).unwrap()), RingElem::ONE);
        }
        prop_assert_eq!(r.pow(a, q), a);
    }

    #[test]
    fn kth_power_sets_match_definition((q, a, _, _) in ring_and_elems(), k in 1u32..8) {
        let r = field(q);
        let by_search = r.elements().any(|z| r.pow(z, k as u64) == a);
        prop_assert_eq!(r.is_kth_power(a, k), by_search);
        for root in r.kth_roots(a, k) {
            prop_assert_eq!(r.pow(root, k as u64), a);
        }
    }

    #[test]
    fn kth_root_roundtrip((q, coeffs) in poly_over(5), k in 1u32..7) {
        let r = field(q);
        let u = PolyFq::from_u32s(Arc::clone(&r), &coeffs).unwrap();
        let w = u.pow(k);
        let root = w.kth_root(k);
        prop_assert!(root.is_some());
        prop_assert_eq!(root.unwrap().pow(k), w);
    }

    #[test]
    fn kth_root_never_lies((q, coeffs) in poly_over(7), k in 2u32..5) {
        let r = field(q);
        let w = PolyFq::from_u32s(r, &coeffs).unwrap();
        if let Some(root) = w.kth_root(k) {
            prop_assert_eq!(root.pow(k), w);
        }
    }

    #[test]
    fn degree_rules((q, a) in poly_over(6), b in prop::collection::vec(0u32..2, 0..6)) {
        let r = field(q);
        let a = PolyFq::from_u32s(Arc::clone(&r), &a).unwrap();
        let b = PolyFq::from_u32s(r, &b).unwrap();
        let sum = a.add(&b).unwrap();
        let max = a.degree().max(b.degree());
        prop_assert!(sum.degree() <= max);
        if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
            prop_assert_eq!(a.mul(&b).unwrap().degree(), Some(da + db));
        }
        prop_assert_eq!(a.sub(&b).unwrap().add(&b).unwrap(), a.clone());
        prop_assert_eq!(PolyFq::from_code(Arc::clone(a.ring()), a.code(), 6), a);
    }

    #[test]
    fn solver_matches_exhaustive(n in 1usize..15, density in 0.05f64..0.9, seed in any::<u64>()) {
        let mut state = seed | 1;
        let mut next = || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; state };
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if (next() % 10_000) as f64 / 10_000.0 < density {
                    edges.push((u, v));
                }
            }
        }
        let g = GenericGraph::from_edges(n, &edges, false);
        let adj: Vec<u32> = (0..n).map(|v| g.symmetrized_row(v).iter().fold(0, |m, u| m | 1 << u)).collect();
        let set = max_independent_set(&g).unwrap();
        prop_assert_eq!(set.size, exhaustive_alpha(n, &adj));
        prop_assert!(verify_independent(&g, &set.vertices).unwrap());
        prop_assert_eq!(max_independent_set(&g).unwrap(), set);
    }

    #[test]
    fn strong_product_adjacency(p in prop::sample::select(vec![3u64, 5, 7, 9, 13]), k in 2u32..4) {
        let g = build_paley(&field(p), k).to_generic();
        let prod = strong_product(&g, &g).unwrap();
        let n = g.order();
        for a in 0..n * n {
            let (x, y) = (a / n, a % n);
            for b in 0..n * n {
                let (u, v) = (b / n, b % n);
                let closed = |s: usize, t: usize| s == t || g.has_edge(s, t);
                let expected = a != b && closed(x, u) && closed(y, v);
                prop_assert_eq!(prod.graph().has_edge(a, b), expected);
            }
        }
    }
}
