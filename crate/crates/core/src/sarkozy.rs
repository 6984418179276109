//! Sets of polynomials in `P_{q,n}` with no difference of the form `F(u)`,
//! built from independent sets of Paley graphs, plus the greedy baseline and a
//! brute-force verifier.
//!
//! A set is described by constraints on coefficient positions. In the general
//! variant every coefficient `c_i` with `k | i` lies in `b_k S` for an
//! independent set `S` of `Paley_k(F_q)`. In the power variant the pairs
//! `(c_i, c_{n-k-i})` with `k | i < n/2` lie in `b_k U` for an independent set
//! `U` of `Paley_k(F_q)^{⊠2}`. All other coefficients are free.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graphs::{build_paley, GenericGraph};
use crate::indep::{alpha_product, beta_pair_set, max_independent_set_with, verify_independent, AlphaOptions};
use crate::polyring::{space_size, PolyFq, ENUMERATION_CAP};
use crate::rings::{prime_power, RingCtx, RingElem, RingSpec};

/// Largest `|A| · q^{⌊(n-1)/k⌋+1}` the verifier accepts.
pub const VERIFY_CAP: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    General,
    Power,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::General => "general",
            Variant::Power => "power",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Variant::General),
            "power" => Ok(Variant::Power),
            _ => Err(Error::InvalidArgument(format!("unknown variant {s:?}"))),
        }
    }
}

/// `f` lists the coefficients of `F` as canonical element indices, constant
/// term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SarkozyParams {
    pub q: u64,
    pub k: u32,
    pub n: usize,
    pub f: Vec<u32>,
    pub variant: Variant,
}

impl SarkozyParams {
    /// Parameters with `F = T^k`.
    pub fn monomial(q: u64, k: u32, n: usize, variant: Variant) -> Self {
        let mut f = vec![0; k as usize + 1];
        f[k as usize] = 1;
        SarkozyParams { q, k, n, f, variant }
    }

    pub fn ring(&self) -> Result<Arc<RingCtx>> {
        Ok(Arc::new(RingCtx::new(RingSpec::field_of_order(self.q)?)?))
    }

    pub fn poly(&self, ring: &Arc<RingCtx>) -> Result<PolyFq> {
        PolyFq::from_u32s(Arc::clone(ring), &self.f)
    }
}

/// A group of coefficient positions that are chosen jointly from a list.
#[derive(Clone, Debug)]
struct Slot {
    positions: Vec<usize>,
    options: Vec<Vec<RingElem>>,
}

/// Anything with a membership predicate over coefficient vectors of length `n`
/// and an enumeration of its members.
pub trait PolySet: Sync {
    fn ring(&self) -> &Arc<RingCtx>;
    fn n(&self) -> usize;
    fn contains(&self, coeffs: &[RingElem]) -> bool;
    fn len(&self) -> BigUint;
    fn members(&self) -> Box<dyn Iterator<Item = Vec<RingElem>> + Send + '_>;

    fn is_empty(&self) -> bool {
        self.len() == BigUint::from(0u32)
    }

    fn contains_poly(&self, p: &PolyFq) -> bool {
        match p.degree() {
            Some(d) if d >= self.n() => false,
            _ => self.contains(&p.padded(self.n())),
        }
    }
}

/// A constructed set, kept as constraints rather than a list.
#[derive(Clone, Debug)]
pub struct SarkozySet {
    pub params: SarkozyParams,
    ring: Arc<RingCtx>,
    /// Independent set of `Paley_k(F_q)` containing 0 (general variant).
    pub s: Vec<u32>,
    /// Independent set of `Paley_k(F_q)^{⊠2}` (power variant).
    pub u: Vec<(u32, u32)>,
    slots: Vec<Slot>,
    /// Allowed values of each constrained position, for `O(n)` membership.
    single: Vec<Option<BitSet>>,
    /// Allowed pairs `(x, y)` as `x·q + y`, keyed by the lower position.
    paired: Vec<Option<(usize, BitSet)>>,
    pub size: BigUint,
}

/// Serialized form: parameters and the unscaled certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub params: SarkozyParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<(u32, u32)>,
    pub size: String,
}

fn check_degree(f: &PolyFq, k: u32) -> Result<()> {
    match f.degree() {
        Some(d) if d == k as usize => Ok(()),
        d => Err(Error::BadDegree { expected: k as usize, found: d.map_or(-1, |d| d as isize) }),
    }
}

fn check_nontrivial(ring: &RingCtx, k: u32) -> Result<()> {
    if ring.power_index(k)? < 2 {
        return Err(Error::AllPowers { k });
    }
    Ok(())
}

/// Number of positions `i < n` with `k | i`.
fn constrained_count(n: usize, k: u32) -> usize {
    n.div_ceil(k as usize)
}

impl SarkozySet {
    /// Builds the set from parameters and a certificate, checking that the
    /// certificate is an independent set of the right graph.
    pub fn from_certificate(params: SarkozyParams, s: Vec<u32>, u: Vec<(u32, u32)>) -> Result<Self> {
        let ring = params.ring()?;
        let f = params.poly(&ring)?;
        check_degree(&f, params.k)?;
        if params.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let (q, k, n) = (ring.order(), params.k, params.n);
        let b = f.leading_coeff();
        let graph = build_paley(&ring, k).to_generic();
        let mut slots = Vec::new();
        let mut single = vec![None; n];
        let mut paired = vec![None; n];
        let free: Vec<Vec<RingElem>> = ring.elements().map(|x| vec![x]).collect();

        match params.variant {
            Variant::General => {
                if !u.is_empty() || s.is_empty() {
                    return Err(Error::InvalidArgument("general variant needs S and no U".into()));
                }
                let vertices: Vec<usize> = s.iter().map(|&x| x as usize).collect();
                if !verify_independent(&graph, &vertices)? || !s.contains(&0) {
                    return Err(Error::InvalidArgument("S must be an independent set containing 0".into()));
                }
                let scaled: Vec<RingElem> = s.iter().map(|&x| ring.mul(b, RingElem(x))).collect();
                let mut allowed = BitSet::new(q);
                for x in &scaled {
                    allowed.insert(x.index());
                }
                for i in 0..n {
                    if i % k as usize == 0 {
                        slots.push(Slot { positions: vec![i], options: scaled.iter().map(|&x| vec![x]).collect() });
                        single[i] = Some(allowed.clone());
                    } else {
                        slots.push(Slot { positions: vec![i], options: free.clone() });
                    }
                }
            }
            Variant::Power => {
                if n % (2 * k as usize) != 0 {
                    return Err(Error::BadN { n, two_k: 2 * k as usize });
                }
                if !f.is_monomial() {
                    return Err(Error::NotMonomial);
                }
                if !s.is_empty() || u.is_empty() {
                    return Err(Error::InvalidArgument("power variant needs U and no S".into()));
                }
                let product = crate::graphs::strong_product_all(&[&graph, &graph])?;
                if u.iter().any(|&(x, y)| x as usize >= q || y as usize >= q) {
                    return Err(Error::InvalidArgument("U has coordinates outside the field".into()));
                }
                let vertices: Vec<usize> = u.iter().map(|&(x, y)| product.index(&[x as usize, y as usize])).collect();
                if !verify_independent(product.graph(), &vertices)? {
                    return Err(Error::InvalidArgument("U is not independent".into()));
                }
                let scaled: Vec<Vec<RingElem>> =
                    u.iter().map(|&(x, y)| vec![ring.mul(b, RingElem(x)), ring.mul(b, RingElem(y))]).collect();
                let mut allowed = BitSet::new(q * q);
                for pair in &scaled {
                    allowed.insert(pair[0].index() * q + pair[1].index());
                }
                let mut paired_pos = vec![false; n];
                for i in (0..n / 2).step_by(k as usize) {
                    let j = n - k as usize - i;
                    slots.push(Slot { positions: vec![i, j], options: scaled.clone() });
                    paired[i] = Some((j, allowed.clone()));
                    paired_pos[i] = true;
                    paired_pos[j] = true;
                }
                for i in (0..n).filter(|&i| !paired_pos[i]) {
                    slots.push(Slot { positions: vec![i], options: free.clone() });
                }
            }
        }
        let size = slots.iter().fold(BigUint::from(1u32), |acc, slot| acc * slot.options.len());
        let mut dedup_check = HashSet::new();
        for slot in &slots {
            let distinct = slot.options.iter().all(|o| dedup_check.insert((slot.positions[0], o.clone())));
            if !distinct {
                return Err(Error::InvalidArgument("certificate has repeated elements".into()));
            }
        }
        Ok(SarkozySet { params, ring, s, u, slots, single, paired, size })
    }

    /// `|S|^{⌈n/k⌉} q^{n-⌈n/k⌉}` or `|U|^{n/2k} q^{n-n/k}`.
    pub fn closed_form(&self) -> BigUint {
        let (q, k, n) = (BigUint::from(self.params.q), self.params.k, self.params.n);
        match self.params.variant {
            Variant::General => {
                let c = constrained_count(n, k);
                BigUint::from(self.s.len()).pow(c as u32) * q.pow((n - c) as u32)
            }
            Variant::Power => {
                let pairs = n / (2 * k as usize);
                BigUint::from(self.u.len()).pow(pairs as u32) * q.pow((n - n / k as usize) as u32)
            }
        }
    }

    pub fn certificate(&self) -> Certificate {
        Certificate { params: self.params.clone(), s: self.s.clone(), u: self.u.clone(), size: self.size.to_string() }
    }

    pub fn from_json_certificate(cert: Certificate) -> Result<Self> {
        let set = Self::from_certificate(cert.params, cert.s, cert.u)?;
        if set.size.to_string() != cert.size {
            return Err(Error::InvalidArgument(format!("recorded size {} but the constraints give {}", cert.size, set.size)));
        }
        Ok(set)
    }

    pub fn poly(&self) -> PolyFq {
        self.params.poly(&self.ring).expect("validated at construction")
    }

    /// Materializes every member, if there are at most [`ENUMERATION_CAP`].
    pub fn to_vec(&self) -> Result<Vec<PolyFq>> {
        let count = u128::try_from(&self.size).unwrap_or(u128::MAX);
        if count > ENUMERATION_CAP {
            return Err(Error::EnumerationTooLarge { count, cap: ENUMERATION_CAP });
        }
        Ok(self.members().map(|c| PolyFq::new(Arc::clone(&self.ring), c).expect("field")).collect())
    }

    pub fn verify(&self) -> Result<bool> {
        verify_no_f_difference(self, &self.poly())
    }
}

impl PolySet for SarkozySet {
    fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }

    fn n(&self) -> usize {
        self.params.n
    }

    fn contains(&self, c: &[RingElem]) -> bool {
        let q = self.ring.order();
        c.len() == self.params.n
            && (0..c.len()).all(|i| {
                self.single[i].as_ref().map_or(true, |a| a.contains(c[i].index()))
                    && self.paired[i].as_ref().map_or(true, |(j, a)| a.contains(c[i].index() * q + c[*j].index()))
            })
    }

    fn len(&self) -> BigUint {
        self.size.clone()
    }

    fn members(&self) -> Box<dyn Iterator<Item = Vec<RingElem>> + Send + '_> {
        let n = self.params.n;
        let radices: Vec<usize> = self.slots.iter().map(|s| s.options.len()).collect();
        let mut digits = vec![0usize; self.slots.len()];
        let mut done = radices.iter().any(|&r| r == 0);
        Box::new(std::iter::from_fn(move || {
            if done {
                return None;
            }
            let mut coeffs = vec![RingElem::ZERO; n];
            for (slot, &d) in self.slots.iter().zip(&digits) {
                for (&pos, &val) in slot.positions.iter().zip(&slot.options[d]) {
                    coeffs[pos] = val;
                }
            }
            // Odometer, last slot fastest.
            done = true;
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < radices[i] {
                    done = false;
                    break;
                }
                digits[i] = 0;
            }
            Some(coeffs)
        }))
    }
}

/// An explicitly listed set.
#[derive(Clone, Debug)]
pub struct ExplicitSet {
    ring: Arc<RingCtx>,
    n: usize,
    codes: HashSet<u128>,
    elements: Vec<Vec<RingElem>>,
}

impl ExplicitSet {
    pub fn new(ring: Arc<RingCtx>, n: usize, polys: &[PolyFq]) -> Result<Self> {
        let mut set = ExplicitSet { ring, n, codes: HashSet::new(), elements: Vec::new() };
        for p in polys {
            if p.degree().is_some_and(|d| d >= n) {
                return Err(Error::InvalidArgument(format!("{p} has degree at least {n}")));
            }
            if set.codes.insert(p.code()) {
                set.elements.push(p.padded(n));
            }
        }
        Ok(set)
    }

    fn code(&self, c: &[RingElem]) -> u128 {
        let q = self.ring.order() as u128;
        c.iter().rev().fold(0, |acc, x| acc * q + x.0 as u128)
    }

    pub fn polys(&self) -> Vec<PolyFq> {
        self.elements.iter().map(|c| PolyFq::new(Arc::clone(&self.ring), c.clone()).expect("field")).collect()
    }
}

impl PolySet for ExplicitSet {
    fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }

    fn n(&self) -> usize {
        self.n
    }

    fn contains(&self, c: &[RingElem]) -> bool {
        c.len() == self.n && self.codes.contains(&self.code(c))
    }

    fn len(&self) -> BigUint {
        BigUint::from(self.elements.len())
    }

    fn members(&self) -> Box<dyn Iterator<Item = Vec<RingElem>> + Send + '_> {
        Box::new(self.elements.iter().cloned())
    }
}

/// General variant: `S` is a maximum independent set of `Paley_k(F_q)`,
/// translated so that it contains 0.
pub fn build_sarkozy_general(params: &SarkozyParams, opts: &AlphaOptions) -> Result<SarkozySet> {
    let ring = params.ring()?;
    check_degree(&params.poly(&ring)?, params.k)?;
    check_nontrivial(&ring, params.k)?;
    let graph = build_paley(&ring, params.k).to_generic();
    let mut solver = opts.solver.clone();
    solver.vertex_transitive = true;
    let best = max_independent_set_with(&graph, &solver)?;
    let shift = RingElem(best.vertices[0] as u32);
    let mut s: Vec<u32> = best.vertices.iter().map(|&v| ring.sub(RingElem(v as u32), shift).0).collect();
    s.sort_unstable();
    let mut p = params.clone();
    p.variant = Variant::General;
    SarkozySet::from_certificate(p, s, Vec::new())
}

/// Power variant: `U` is a maximum independent set of the strong square, or
/// the `(x, βx)` set if the solver runs out of time.
pub fn build_sarkozy_power(params: &SarkozyParams, opts: &AlphaOptions) -> Result<SarkozySet> {
    let ring = params.ring()?;
    let f = params.poly(&ring)?;
    check_degree(&f, params.k)?;
    let k = params.k;
    if params.n % (2 * k as usize) != 0 {
        return Err(Error::BadN { n: params.n, two_k: 2 * k as usize });
    }
    if !f.is_monomial() {
        return Err(Error::NotMonomial);
    }
    check_nontrivial(&ring, k)?;
    let best = match alpha_product(&ring, k, 2, opts) {
        Ok(set) => set,
        Err(Error::Timeout { .. }) => beta_pair_set(params.q, k)?,
        Err(e) => return Err(e),
    };
    let u = best.tuples.expect("product certificates carry tuples").iter().map(|t| (t[0] as u32, t[1] as u32)).collect();
    let mut p = params.clone();
    p.variant = Variant::Power;
    SarkozySet::from_certificate(p, Vec::new(), u)
}

/// Brute-force check that no two members differ by a nonzero `F(u)`.
///
/// Walks every `u` with `deg F(u) < n` and every member `a`, and asks the
/// membership predicate about `a + F(u)`.
pub fn verify_no_f_difference(set: &dyn PolySet, f: &PolyFq) -> Result<bool> {
    let ring = set.ring();
    let n = set.n();
    let k = f.degree().ok_or(Error::BadDegree { expected: 1, found: -1 })?.max(1);
    let m = (n - 1) / k + 1;
    let shifts_total = (ring.order() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    let members = u128::try_from(&set.len()).unwrap_or(u128::MAX);
    let cost = members.saturating_mul(shifts_total);
    if cost > VERIFY_CAP {
        return Err(Error::VerificationTooLarge { cost, cap: VERIFY_CAP });
    }
    let mut seen = HashSet::new();
    let mut shifts: Vec<Vec<RingElem>> = Vec::new();
    for code in 0..shifts_total {
        let u = PolyFq::from_code(Arc::clone(ring), code, m);
        let d = f.compose(&u)?;
        if d.is_zero() || d.degree().is_some_and(|e| e >= n) {
            continue;
        }
        if seen.insert(d.code()) {
            shifts.push(d.padded(n));
        }
    }
    let members: Vec<Vec<RingElem>> = set.members().collect();
    let clean = shifts.par_iter().all(|d| {
        let mut shifted = vec![RingElem::ZERO; n];
        members.iter().all(|a| {
            for i in 0..n {
                shifted[i] = ring.add(a[i], d[i]);
            }
            !set.contains(&shifted)
        })
    });
    Ok(clean)
}

/// Nonzero `k`-th powers of degree below `n`, as coefficient vectors.
fn nonzero_powers(ring: &Arc<RingCtx>, n: usize, k: u32) -> Vec<Vec<RingElem>> {
    let m = (n - 1) / k as usize + 1;
    let total = (ring.order() as u128).pow(m as u32);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for code in 1..total {
        let p = PolyFq::from_code(Arc::clone(ring), code, m).pow(k);
        if p.degree().is_some_and(|d| d < n) && seen.insert(p.code()) {
            out.push(p.padded(n));
        }
    }
    out
}

fn encode(c: &[RingElem], q: usize) -> usize {
    c.iter().rev().fold(0, |acc, x| acc * q + x.index())
}

/// Scans `P_{q,n}` in code order, keeping a polynomial when its difference with
/// every kept one is not a nonzero `k`-th power.
pub fn greedy_construct(q: u64, n: usize, k: u32) -> Result<Vec<PolyFq>> {
    let ring = Arc::new(RingCtx::new(RingSpec::field_of_order(q)?)?);
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and k must be positive".into()));
    }
    let total = space_size(ring.order(), n)? as usize;
    let qq = ring.order();
    let powers = nonzero_powers(&ring, n, k);
    let mut blocked = BitSet::new(total);
    let mut chosen = Vec::new();
    let mut a = vec![RingElem::ZERO; n];
    for code in 0..total {
        if blocked.contains(code) {
            continue;
        }
        let mut rest = code;
        for c in a.iter_mut() {
            *c = RingElem((rest % qq) as u32);
            rest /= qq;
        }
        chosen.push(PolyFq::new(Arc::clone(&ring), a.clone())?);
        let mut b = vec![RingElem::ZERO; n];
        for d in &powers {
            for i in 0..n {
                b[i] = ring.add(a[i], d[i]);
            }
            blocked.insert(encode(&b, qq));
            for i in 0..n {
                b[i] = ring.sub(a[i], d[i]);
            }
            blocked.insert(encode(&b, qq));
        }
    }
    Ok(chosen)
}

/// `q^{n - ⌊(n-1)/k⌋}` for `k` a power of `q`.
pub fn pigeonhole_upper(q: u64, n: usize, k: u32) -> Result<BigUint> {
    let mut r = k as u64;
    let mut power = false;
    while q >= 2 && r > 1 && r % q == 0 {
        r /= q;
        power = true;
    }
    if !power || r != 1 {
        return Err(Error::NotApplicable(format!("k = {k} is not a positive power of q = {q}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(BigUint::from(q).pow((n - (n - 1) / k as usize) as u32))
}

/// Cayley graph on `P_{q,n}` (vertices in code order) joining `a` to `a + d`
/// for every nonzero `k`-th power `d`.
pub fn difference_graph(q: u64, n: usize, k: u32) -> Result<GenericGraph> {
    prime_power(q).ok_or(Error::NotPrime(q))?;
    let ring = Arc::new(RingCtx::new(RingSpec::field_of_order(q)?)?);
    let total = space_size(ring.order(), n)? as usize;
    let qq = ring.order();
    let powers = nonzero_powers(&ring, n, k);
    let rows = (0..total)
        .map(|code| {
            let a = PolyFq::from_code(Arc::clone(&ring), code as u128, n).padded(n);
            let mut row: Vec<u32> = powers
                .iter()
                .map(|d| {
                    let b: Vec<RingElem> = a.iter().zip(d).map(|(&x, &y)| ring.add(x, y)).collect();
                    encode(&b, qq) as u32
                })
                .collect();
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect();
    Ok(GenericGraph::from_rows(rows))
}
