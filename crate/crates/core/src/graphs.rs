//! Generalized Paley graphs, complements, strong products and DIMACS export.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::rings::{gcd, RingCtx, RingElem};

/// Largest vertex count of an explicitly materialized product.
pub const PRODUCT_CAP: u128 = 100_000;
/// Largest arc count of an explicitly materialized product.
pub const ARC_CAP: u128 = 60_000_000;

/// A Cayley graph on the additive group of a ring: `x -> y` iff `x - y` lies
/// in the connection set.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    ring: Arc<RingCtx>,
    k: u32,
    connection: BitSet,
    symmetric: bool,
    complemented: bool,
}

impl CayleyGraph {
    pub fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn connection(&self) -> &BitSet {
        &self.connection
    }

    pub fn connection_elems(&self) -> Vec<RingElem> {
        self.connection.iter().map(|i| RingElem(i as u32)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// True for the complement of a Paley graph.
    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    pub fn order(&self) -> usize {
        self.ring.order()
    }

    pub fn degree(&self) -> usize {
        self.connection.count()
    }

    #[inline]
    pub fn has_edge(&self, x: RingElem, y: RingElem) -> bool {
        x != y && self.connection.contains(self.ring.sub(x, y).index())
    }

    /// The complement as a Cayley graph on the same group.
    pub fn complement_cayley(&self) -> CayleyGraph {
        let mut connection = self.connection.complement();
        connection.remove(0);
        CayleyGraph {
            ring: Arc::clone(&self.ring),
            k: self.k,
            connection,
            symmetric: self.symmetric,
            complemented: !self.complemented,
        }
    }

    pub fn to_generic(&self) -> GenericGraph {
        let ring = &self.ring;
        let conn = self.connection_elems();
        let out = ring
            .elements()
            .map(|x| {
                let mut row: Vec<u32> = conn.iter().map(|&s| ring.sub(x, s).0).collect();
                row.sort_unstable();
                row
            })
            .collect();
        GenericGraph::from_sorted_rows(out)
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            ring: self.ring.spec().to_string(),
            k: self.k,
            complement: self.complemented,
            power: 1,
            order: self.order() as u64,
            degree: Some(self.degree() as u64),
            symmetric: self.symmetric,
            edges: if self.symmetric {
                (self.order() * self.degree() / 2) as u64
            } else {
                (self.order() * self.degree()) as u64
            },
            connection: Some(self.connection.iter().map(|i| i as u32).collect()),
        }
    }
}

/// `Paley_k(R)`: `x` and `y` are joined when `x - y = z^k` for some `z`.
pub fn build_paley(ring: &Arc<RingCtx>, k: u32) -> CayleyGraph {
    assert!(k >= 2, "k must be at least 2");
    let mut connection = ring.kth_power_set(k).members.clone();
    connection.remove(0);
    let symmetric = connection.iter().all(|s| connection.contains(ring.neg(RingElem(s as u32)).index()));
    if let crate::rings::RingSpec::Field { p, .. } = ring.spec() {
        let n = ring.order() as u64 - 1;
        let criterion = p == 2 || (n / gcd(n, k as u64)) % 2 == 0;
        assert_eq!(symmetric, criterion, "negation closure disagrees with the parity criterion");
    }
    CayleyGraph { ring: Arc::clone(ring), k, connection, symmetric, complemented: false }
}

/// Adjacency lists of a (possibly directed) loopless graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericGraph {
    out: Vec<Vec<u32>>,
    symmetric: bool,
}

impl GenericGraph {
    /// Builds from out-neighbor lists; rows are sorted and deduplicated and
    /// self-loops dropped.
    pub fn from_rows(mut out: Vec<Vec<u32>>) -> Self {
        for (v, row) in out.iter_mut().enumerate() {
            row.retain(|&u| u as usize != v);
            row.sort_unstable();
            row.dedup();
        }
        Self::from_sorted_rows(out)
    }

    fn from_sorted_rows(out: Vec<Vec<u32>>) -> Self {
        let mut g = GenericGraph { out, symmetric: false };
        g.symmetric = g.out.iter().enumerate().all(|(v, row)| row.iter().all(|&u| g.has_edge(u as usize, v)));
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], directed: bool) -> Self {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in edges {
            out[u].push(v as u32);
            if !directed {
                out[v].push(u as u32);
            }
        }
        Self::from_rows(out)
    }

    pub fn complete(n: usize) -> Self {
        Self::from_sorted_rows((0..n).map(|v| (0..n as u32).filter(|&u| u as usize != v).collect()).collect())
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_rows(vec![Vec::new(); n])
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges, false)
    }

    pub fn order(&self) -> usize {
        self.out.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Edge count of the symmetrized graph.
    pub fn edge_count(&self) -> usize {
        (0..self.order()).map(|v| self.symmetrized_row(v).count()).sum::<usize>() / 2
    }

    /// Common out-degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.out.first().map_or(0, Vec::len);
        self.out.iter().all(|r| r.len() == d).then_some(d)
    }

    /// Neighbors in either direction as a bit set.
    pub fn symmetrized_row(&self, v: usize) -> BitSet {
        let mut row = BitSet::new(self.order());
        for &u in &self.out[v] {
            row.insert(u as usize);
        }
        if !self.symmetric {
            for (u, r) in self.out.iter().enumerate() {
                if r.binary_search(&(v as u32)).is_ok() {
                    row.insert(u);
                }
            }
        }
        row
    }

    /// Symmetrized adjacency matrix as bit rows.
    pub fn symmetrized_rows(&self) -> Vec<BitSet> {
        let n = self.order();
        let mut rows = vec![BitSet::new(n); n];
        for (v, r) in self.out.iter().enumerate() {
            for &u in r {
                rows[v].insert(u as usize);
                rows[u as usize].insert(v);
            }
        }
        rows
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            ring: String::new(),
            k: 0,
            complement: false,
            power: 1,
            order: self.order() as u64,
            degree: self.regular_degree().map(|d| d as u64),
            symmetric: self.symmetric,
            edges: if self.symmetric { self.arc_count() as u64 / 2 } else { self.arc_count() as u64 },
            connection: None,
        }
    }
}

/// `(x, y)` is an edge of the complement iff `x != y` and `(x, y)` is not an edge.
pub fn complement(g: &GenericGraph) -> GenericGraph {
    let n = g.order();
    let out = (0..n)
        .map(|v| {
            let row = &g.out[v];
            (0..n as u32).filter(|&u| u as usize != v && row.binary_search(&u).is_err()).collect()
        })
        .collect();
    GenericGraph::from_sorted_rows(out)
}

/// Strong product of factor graphs. Vertices are tuples encoded in mixed radix
/// with the first factor most significant.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    dims: Vec<usize>,
    graph: GenericGraph,
}

impl ProductGraph {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn graph(&self) -> &GenericGraph {
        &self.graph
    }

    pub fn into_graph(self) -> GenericGraph {
        self.graph
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn tuple(&self, mut v: usize) -> Vec<usize> {
        let mut t = vec![0; self.dims.len()];
        for (slot, &d) in t.iter_mut().zip(&self.dims).rev() {
            *slot = v % d;
            v /= d;
        }
        t
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple_index(&self.dims, tuple)
    }

    /// `G^{⊠n}`.
    pub fn power(g: &GenericGraph, n: usize) -> Result<ProductGraph> {
        assert!(n >= 1, "power must be positive");
        strong_product_all(&vec![g; n])
    }
}

pub fn tuple_index(dims: &[usize], tuple: &[usize]) -> usize {
    tuple.iter().zip(dims).fold(0, |acc, (&t, &d)| acc * d + t)
}

pub fn strong_product(g: &GenericGraph, h: &GenericGraph) -> Result<ProductGraph> {
    strong_product_all(&[g, h])
}

/// Tuples are adjacent when every coordinate pair is an arc or equal, and
/// the tuples differ.
pub fn strong_product_all(factors: &[&GenericGraph]) -> Result<ProductGraph> {
    let dims: Vec<usize> = factors.iter().map(|g| g.order()).collect();
    let vertices = dims.iter().map(|&d| d as u128).product::<u128>();
    if vertices > PRODUCT_CAP {
        return Err(Error::ProductTooLarge { vertices, cap: PRODUCT_CAP });
    }
    let closed: Vec<Vec<Vec<u32>>> = factors
        .iter()
        .map(|g| {
            (0..g.order())
                .map(|v| {
                    let mut row = g.out[v].clone();
                    let pos = row.binary_search(&(v as u32)).unwrap_err();
                    row.insert(pos, v as u32);
                    row
                })
                .collect()
        })
        .collect();
    let mut arcs = 0u128;
    for v in 0..vertices as usize {
        let mut rest = v;
        let mut size = 1u128;
        for (i, &d) in dims.iter().enumerate().rev() {
            size *= closed[i][rest % d].len() as u128;
            rest /= d;
        }
        arcs += size - 1;
    }
    if arcs > ARC_CAP {
        return Err(Error::ProductTooLarge { vertices, cap: PRODUCT_CAP });
    }
    let n = vertices as usize;
    let mut out = Vec::with_capacity(n);
    let mut coords = vec![0usize; dims.len()];
    for v in 0..n {
        let mut rest = v;
        for (slot, &d) in coords.iter_mut().zip(&dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        // Closed neighborhoods are sorted, so the nested expansion is sorted.
        let mut row: Vec<u32> = vec![0];
        for (i, &d) in dims.iter().enumerate() {
            let nbrs = &closed[i][coords[i]];
            row = row.iter().flat_map(|&base| nbrs.iter().map(move |&u| base * d as u32 + u)).collect();
        }
        row.retain(|&u| u as usize != v);
        out.push(row);
    }
    Ok(ProductGraph { dims, graph: GenericGraph::from_sorted_rows(out) })
}

/// Checks that `x -> (x mod m, x mod n)` maps `Paley_k(Z/mn)` onto
/// `Paley_k(Z/m) ⊠ Paley_k(Z/n)`, arcs and non-arcs alike.
pub fn crt_factor_check(m: u32, n: u32, k: u32) -> Result<bool> {
    if gcd(m as u64, n as u64) != 1 || m < 2 || n < 2 {
        return Err(Error::NotCoprime { m: m as u64, n: n as u64 });
    }
    let whole = build_paley(&Arc::new(RingCtx::zmod(m * n)?), k).to_generic();
    let left = build_paley(&Arc::new(RingCtx::zmod(m)?), k).to_generic();
    let right = build_paley(&Arc::new(RingCtx::zmod(n)?), k).to_generic();
    let product = strong_product(&left, &right)?;
    let map = |x: usize| tuple_index(product.dims(), &[x % m as usize, x % n as usize]);
    let size = (m * n) as usize;
    let mut image = BitSet::new(size);
    for x in 0..size {
        image.insert(map(x));
    }
    if image.count() != size {
        return Ok(false);
    }
    for x in 0..size {
        let mapped: Vec<u32> = {
            let mut row: Vec<u32> = whole.out_neighbors(x).iter().map(|&y| map(y as usize) as u32).collect();
            row.sort_unstable();
            row
        };
        if mapped != product.graph().out_neighbors(map(x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Writes `p edge n m` followed by `e u v` lines (1-based, `u < v`, sorted).
pub fn write_dimacs<W: Write>(g: &GenericGraph, mut w: W) -> Result<()> {
    if !g.is_symmetric() {
        return Err(Error::DirectedUnsupported);
    }
    writeln!(w, "p edge {} {}", g.order(), g.arc_count() / 2)?;
    for (v, row) in g.out.iter().enumerate() {
        for &u in row.iter().filter(|&&u| u as usize > v) {
            writeln!(w, "e {} {}", v + 1, u + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_dimacs(g: &GenericGraph, path: &Path) -> Result<()> {
    if !g.is_symmetric() {
        return Err(Error::DirectedUnsupported);
    }
    write_dimacs(g, BufWriter::new(File::create(path)?))
}

/// Reads an undirected DIMACS graph (`c`, `p edge`, `e` lines).
pub fn read_dimacs<R: BufRead>(r: R) -> Result<GenericGraph> {
    let bad = |line: &str| Error::Io(io::Error::new(io::ErrorKind::InvalidData, format!("bad DIMACS line {line:?}")));
    let mut n = None;
    let mut edges = Vec::new();
    for line in r.lines() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("p") => {
                let _format = parts.next();
                n = Some(parts.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| bad(&line))?);
            }
            Some("e") => {
                let mut num = || parts.next().and_then(|t| t.parse::<usize>().ok()).filter(|&v| v >= 1);
                let (u, v) = (num().ok_or_else(|| bad(&line))?, num().ok_or_else(|| bad(&line))?);
                edges.push((u - 1, v - 1));
            }
            _ => {}
        }
    }
    let n = n.ok_or_else(|| bad("missing problem line"))?;
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
        return Err(Error::VertexOutOfRange { vertex: u.max(v), order: n });
    }
    Ok(GenericGraph::from_edges(n, &edges, false))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub ring: String,
    pub k: u32,
    pub complement: bool,
    pub power: u32,
    pub order: u64,
    pub degree: Option<u64>,
    pub symmetric: bool,
    pub edges: u64,
    pub connection: Option<Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32) -> Arc<RingCtx> {
        Arc::new(RingCtx::field(p, 1).unwrap())
    }

    #[test]
    fn paley_3_over_f7_is_the_seven_cycle() {
        let g = build_paley(&field(7), 3);
        assert_eq!(g.connection_elems(), vec![RingElem(1), RingElem(6)]);
        assert!(g.is_symmetric());
        assert_eq!(g.to_generic(), GenericGraph::cycle(7));
    }

    #[test]
    fn coprime_exponent_gives_complete_graph() {
        let g = build_paley(&field(11), 3);
        assert_eq!(g.to_generic(), GenericGraph::complete(11));
    }

    #[test]
    fn sixth_powers_mod_seven_are_directed() {
        let g = build_paley(&field(7), 6);
        assert_eq!(g.connection_elems(), vec![RingElem(1)]);
        assert!(!g.is_symmetric());
        assert!(!g.to_generic().is_symmetric());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&GenericGraph::complete(5)), GenericGraph::empty(5));
        let c7 = GenericGraph::cycle(7);
        assert_eq!(complement(&complement(&c7)), c7);
    }

    #[test]
    fn paley_13_is_self_complementary_via_doubling() {
        let ring = field(13);
        let g = build_paley(&ring, 2);
        let gbar = complement(&g.to_generic());
        let map = |x: usize| ring.mul(RingElem(2), RingElem(x as u32)).index();
        for x in 0..13 {
            for y in 0..13 {
                assert_eq!(g.to_generic().has_edge(x, y), gbar.has_edge(map(x), map(y)));
            }
        }
    }

    #[test]
    fn strong_product_examples() {
        let k6 = strong_product(&GenericGraph::complete(2), &GenericGraph::complete(3)).unwrap();
        assert_eq!(k6.graph(), &GenericGraph::complete(6));
        let c7 = GenericGraph::cycle(7);
        let sq = strong_product(&c7, &c7).unwrap();
        assert_eq!(sq.order(), 49);
        assert_eq!(sq.graph().regular_degree(), Some(8));
        let id = strong_product(&c7, &GenericGraph::empty(1)).unwrap();
        assert_eq!(id.graph(), &c7);
        assert_eq!(sq.tuple(sq.index(&[3, 5])), vec![3, 5]);
    }

    #[test]
    fn strong_product_is_associative() {
        let a = GenericGraph::cycle(3);
        let b = GenericGraph::from_edges(2, &[(0, 1)], true);
        let c = GenericGraph::cycle(4);
        let left = strong_product(strong_product(&a, &b).unwrap().graph(), &c).unwrap();
        let right = strong_product(&a, strong_product(&b, &c).unwrap().graph()).unwrap();
        let flat = strong_product_all(&[&a, &b, &c]).unwrap();
        assert_eq!(left.graph(), flat.graph());
        assert_eq!(right.graph(), flat.graph());
    }

    #[test]
    fn product_cap() {
        let g = GenericGraph::empty(400);
        assert!(matches!(strong_product(&g, &g), Err(Error::ProductTooLarge { .. })));
    }

    #[test]
    fn crt_examples() {
        assert!(crt_factor_check(3, 5, 2).unwrap());
        assert!(crt_factor_check(5, 13, 2).unwrap());
        assert!(crt_factor_check(5, 13, 3).unwrap());
        assert!(matches!(crt_factor_check(4, 6, 2), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn dimacs_line_counts() {
        let count = |g: &GenericGraph| {
            let mut buf = Vec::new();
            write_dimacs(g, &mut buf).unwrap();
            String::from_utf8(buf).unwrap().lines().filter(|l| l.starts_with("e ")).count()
        };
        assert_eq!(count(&GenericGraph::cycle(7)), 7);
        assert_eq!(count(&GenericGraph::complete(5)), 10);
        assert_eq!(count(&GenericGraph::empty(4)), 0);
        let directed = build_paley(&field(7), 6).to_generic();
        assert!(matches!(write_dimacs(&directed, Vec::new()), Err(Error::DirectedUnsupported)));
    }

    #[test]
    fn dimacs_roundtrip() {
        let g = build_paley(&Arc::new(RingCtx::zmod(65).unwrap()), 2).to_generic();
        let mut buf = Vec::new();
        write_dimacs(&g, &mut buf).unwrap();
        assert_eq!(read_dimacs(buf.as_slice()).unwrap(), g);
    }
}
