//! Dense univariate polynomials over `F_q`, the space `P_{q,n}` of polynomials of
//! degree below `n`, composition and `k`-th root extraction.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rings::{gcd, mod_inverse, RingCtx, RingElem};

/// Largest `q^n` that [`enumerate_p`] will walk.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// A polynomial over a field context. The highest stored coefficient is
/// nonzero; the zero polynomial stores no coefficients.
#[derive(Clone)]
pub struct PolyFq {
    ring: Arc<RingCtx>,
    coeffs: Vec<RingElem>,
}

impl PartialEq for PolyFq {
    fn eq(&self, other: &Self) -> bool {
        self.ring.spec() == other.ring.spec() && self.coeffs == other.coeffs
    }
}

impl Eq for PolyFq {}

impl fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyFq[{}]({})", self.ring.spec(), self)
    }
}

impl fmt::Display for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.0 == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.0) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, _) => write!(f, "{c}T")?,
                (_, 1) => write!(f, "T^{i}")?,
                _ => write!(f, "{c}T^{i}")?,
            }
        }
        Ok(())
    }
}

impl PolyFq {
    pub fn new(ring: Arc<RingCtx>, coeffs: Vec<RingElem>) -> Result<Self> {
        if !ring.is_field() {
            return Err(Error::NotAField);
        }
        if let Some(bad) = coeffs.iter().find(|c| c.index() >= ring.order()) {
            return Err(Error::InvalidArgument(format!("coefficient {bad} is not a field element")));
        }
        Ok(Self::from_raw(ring, coeffs))
    }

    fn from_raw(ring: Arc<RingCtx>, mut coeffs: Vec<RingElem>) -> Self {
        while coeffs.last() == Some(&RingElem::ZERO) {
            coeffs.pop();
        }
        PolyFq { ring, coeffs }
    }

    pub fn from_u32s(ring: Arc<RingCtx>, coeffs: &[u32]) -> Result<Self> {
        Self::new(ring, coeffs.iter().map(|&c| RingElem(c)).collect())
    }

    pub fn zero(ring: Arc<RingCtx>) -> Self {
        PolyFq { ring, coeffs: Vec::new() }
    }

    pub fn constant(ring: Arc<RingCtx>, c: RingElem) -> Self {
        Self::from_raw(ring, vec![c])
    }

    /// `c * T^deg`.
    pub fn monomial(ring: Arc<RingCtx>, c: RingElem, deg: usize) -> Self {
        let mut coeffs = vec![RingElem::ZERO; deg + 1];
        coeffs[deg] = c;
        Self::from_raw(ring, coeffs)
    }

    pub fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    /// Coefficient of `T^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> RingElem {
        self.coeffs.get(i).copied().unwrap_or(RingElem::ZERO)
    }

    /// `None` is the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> RingElem {
        self.coeffs.last().copied().unwrap_or(RingElem::ZERO)
    }

    /// True when every coefficient below the leading one vanishes.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.split_last().is_some_and(|(_, rest)| rest.iter().all(|c| c.0 == 0))
    }

    /// Coefficients padded with zeros to length `n`.
    pub fn padded(&self, n: usize) -> Vec<RingElem> {
        let mut out = self.coeffs.clone();
        out.resize(n.max(out.len()), RingElem::ZERO);
        out
    }

    fn check_ctx(&self, other: &PolyFq) -> Result<()> {
        if self.ring.spec() == other.ring.spec() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn arith(&self, other: &PolyFq, op: PolyOp) -> Result<PolyFq> {
        self.check_ctx(other)?;
        Ok(match op {
            PolyOp::Add => self.add_unchecked(other),
            PolyOp::Sub => self.sub_unchecked(other),
            PolyOp::Mul => self.mul_unchecked(other),
        })
    }

    pub fn add(&self, other: &PolyFq) -> Result<PolyFq> {
        self.arith(other, PolyOp::Add)
    }

    pub fn sub(&self, other: &PolyFq) -> Result<PolyFq> {
        self.arith(other, PolyOp::Sub)
    }

    pub fn mul(&self, other: &PolyFq) -> Result<PolyFq> {
        self.arith(other, PolyOp::Mul)
    }

    fn add_unchecked(&self, other: &PolyFq) -> PolyFq {
        let r = &self.ring;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| r.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_raw(Arc::clone(r), coeffs)
    }

    fn sub_unchecked(&self, other: &PolyFq) -> PolyFq {
        let r = &self.ring;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| r.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_raw(Arc::clone(r), coeffs)
    }

    fn mul_unchecked(&self, other: &PolyFq) -> PolyFq {
        let r = &self.ring;
        if self.is_zero() || other.is_zero() {
            return Self::zero(Arc::clone(r));
        }
        let mut coeffs = vec![RingElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = r.add(coeffs[i + j], r.mul(a, b));
            }
        }
        Self::from_raw(Arc::clone(r), coeffs)
    }

    pub fn scale(&self, c: RingElem) -> PolyFq {
        let coeffs = self.coeffs.iter().map(|&a| self.ring.mul(a, c)).collect();
        Self::from_raw(Arc::clone(&self.ring), coeffs)
    }

    pub fn pow(&self, mut e: u32) -> PolyFq {
        let mut acc = Self::constant(Arc::clone(&self.ring), RingElem::ONE);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `self(u)` by Horner's rule.
    pub fn compose(&self, u: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(u)?;
        let mut acc = Self::zero(Arc::clone(&self.ring));
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_unchecked(u).add_unchecked(&Self::constant(Arc::clone(&self.ring), c));
        }
        Ok(acc)
    }

    /// A polynomial `b` with `b^k = self`, or `None` if there is none.
    ///
    /// Writes `k = p^e * k0` with `p` the characteristic. The `p^e`-th root is
    /// read off coefficientwise through the inverse Frobenius; the `k0`-th
    /// root is built top-down from the least-index root of the leading
    /// coefficient, solving one linear equation per coefficient with pivot
    /// `k0 * lead^(k0-1)`.
    pub fn kth_root(&self, k: u32) -> Option<PolyFq> {
        assert!(k >= 1, "root order must be positive");
        let ring = &self.ring;
        if self.is_zero() {
            return Some(self.clone());
        }
        let p = ring.characteristic();
        let (mut pe, mut k0) = (1u64, k);
        while k0 % p == 0 {
            k0 /= p;
            pe *= p as u64;
        }
        let v = if pe > 1 { self.frobenius_root(pe)? } else { self.clone() };
        v.coprime_root(k0)
    }

    fn frobenius_root(&self, pe: u64) -> Option<PolyFq> {
        let ring = &self.ring;
        let deg = self.coeffs.len() - 1;
        if deg as u64 % pe != 0 {
            return None;
        }
        if self.coeffs.iter().enumerate().any(|(i, c)| c.0 != 0 && i as u64 % pe != 0) {
            return None;
        }
        // x -> x^pe is a bijection of F_q; its inverse is x -> x^inv with
        // inv = pe^{-1} mod (q - 1).
        let n = ring.order() as u64 - 1;
        let inv = mod_inverse(pe % n.max(1), n.max(1)).unwrap_or(0);
        let coeffs = (0..=deg / pe as usize)
            .map(|i| {
                let c = self.coeffs[i * pe as usize];
                if c.0 == 0 { c } else { ring.pow(c, inv.max(1)) }
            })
            .collect();
        Some(Self::from_raw(Arc::clone(ring), coeffs))
    }

    fn coprime_root(&self, k0: u32) -> Option<PolyFq> {
        let ring = &self.ring;
        if k0 == 1 {
            return Some(self.clone());
        }
        let deg = self.coeffs.len() - 1;
        if deg % k0 as usize != 0 {
            return None;
        }
        let m = deg / k0 as usize;
        let lead = *ring.kth_roots(self.leading_coeff(), k0).first()?;
        // Pivot k0 * lead^(k0-1) is a unit because p does not divide k0.
        let k0_elem = ring_small_int(ring, k0 as u64);
        let pivot = ring.mul(k0_elem, ring.pow(lead, k0 as u64 - 1));
        let pivot_inv = ring.inv(pivot)?;
        let mut root = vec![RingElem::ZERO; m + 1];
        root[m] = lead;
        for j in 1..=m {
            let partial = Self::from_raw(Arc::clone(ring), root.clone());
            let residual = self.sub_unchecked(&partial.pow(k0));
            root[m - j] = ring.mul(residual.coeff(deg - j), pivot_inv);
        }
        let candidate = Self::from_raw(Arc::clone(ring), root);
        (candidate.pow(k0) == *self).then_some(candidate)
    }

    /// Base-`q` integer encoding with `c_0` least significant.
    pub fn code(&self) -> u128 {
        let q = self.ring.order() as u128;
        self.coeffs.iter().rev().fold(0, |acc, c| acc * q + c.0 as u128)
    }

    pub fn from_code(ring: Arc<RingCtx>, mut code: u128, n: usize) -> PolyFq {
        let q = ring.order() as u128;
        let coeffs = (0..n)
            .map(|_| {
                let c = RingElem((code % q) as u32);
                code /= q;
                c
            })
            .collect();
        Self::from_raw(ring, coeffs)
    }

    /// Comma-separated coefficient list `c_0,...,c_{n-1}` of canonical indices.
    pub fn to_text(&self, n: usize) -> String {
        self.padded(n).iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse(ring: Arc<RingCtx>, text: &str) -> Result<PolyFq> {
        let coeffs = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map(RingElem)
                    .map_err(|_| Error::InvalidArgument(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, coeffs)
    }
}

/// The image of the integer `n` in the prime subfield.
pub fn ring_small_int(ring: &RingCtx, n: u64) -> RingElem {
    RingElem((n % ring.characteristic() as u64) as u32)
}

pub fn poly_arith(a: &PolyFq, b: &PolyFq, op: PolyOp) -> Result<PolyFq> {
    a.arith(b, op)
}

pub fn poly_eval_comp(f: &PolyFq, u: &PolyFq) -> Result<PolyFq> {
    f.compose(u)
}

pub fn kth_root(u: &PolyFq, k: u32) -> Option<PolyFq> {
    u.kth_root(k)
}

/// Number of elements of `P_{q,n}`, if it fits the cap.
pub fn space_size(q: usize, n: usize) -> Result<u128> {
    let count = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge { count, cap: ENUMERATION_CAP });
    }
    Ok(count)
}

/// All polynomials of degree below `n`, in base-`q` code order.
pub fn enumerate_p(ring: Arc<RingCtx>, n: usize) -> Result<impl Iterator<Item = PolyFq>> {
    if !ring.is_field() {
        return Err(Error::NotAField);
    }
    let count = space_size(ring.order(), n)?;
    Ok((0..count).map(move |code| PolyFq::from_code(Arc::clone(&ring), code, n)))
}

/// `gcd(k, q-1)`, the number of `k`-th roots of each nonzero `k`-th power.
pub fn root_count(ring: &RingCtx, k: u32) -> u64 {
    gcd(k as u64, ring.order() as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, s: u32) -> Arc<RingCtx> {
        Arc::new(RingCtx::field(p, s).unwrap())
    }

    fn poly(r: &Arc<RingCtx>, c: &[u32]) -> PolyFq {
        PolyFq::from_u32s(Arc::clone(r), c).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = field(3, 1);
        let t1 = poly(&f3, &[1, 1]);
        assert!(t1.sub(&t1).unwrap().is_zero());
        assert_eq!(t1.mul(&t1).unwrap(), poly(&f3, &[1, 2, 1]));
        let f2 = field(2, 1);
        let t1 = poly(&f2, &[1, 1]);
        assert_eq!(t1.mul(&t1).unwrap(), poly(&f2, &[1, 0, 1]));
        assert!(matches!(t1.add(&poly(&f3, &[1])), Err(Error::ContextMismatch)));
    }

    #[test]
    fn degree_bounds() {
        let f5 = field(5, 1);
        let a = poly(&f5, &[1, 2, 3]);
        let b = poly(&f5, &[4, 0, 0, 1]);
        assert_eq!(a.mul(&b).unwrap().degree(), Some(5));
        assert_eq!(PolyFq::zero(f5).degree(), None);
    }

    #[test]
    fn composition_examples() {
        let f7 = field(7, 1);
        let cube = PolyFq::monomial(Arc::clone(&f7), RingElem::ONE, 3);
        let u = poly(&f7, &[1, 1]);
        assert_eq!(cube.compose(&u).unwrap(), poly(&f7, &[1, 3, 3, 1]));
        let b = poly(&f7, &[2, 5, 1]);
        assert_eq!(cube.compose(&b).unwrap(), b.pow(3));
        let c = poly(&f7, &[4]);
        assert_eq!(c.compose(&b).unwrap(), c);
        let f = poly(&f7, &[1, 0, 2, 3]);
        assert_eq!(f.compose(&b).unwrap().degree(), Some(6));
    }

    #[test]
    fn kth_root_examples() {
        let f3 = field(3, 1);
        assert_eq!(poly(&f3, &[1, 2, 1]).kth_root(2), Some(poly(&f3, &[1, 1])));
        let f2 = field(2, 1);
        assert_eq!(poly(&f2, &[1, 0, 1]).kth_root(2), Some(poly(&f2, &[1, 1])));
        assert_eq!(poly(&f2, &[1, 1, 1]).kth_root(2), None);
        // Brute-force oracle for T^2 + T + 1 over F_2.
        let candidates = enumerate_p(Arc::clone(&f2), 2).unwrap();
        assert!(candidates.into_iter().all(|b| b.pow(2) != poly(&f2, &[1, 1, 1])));
    }

    #[test]
    fn kth_root_picks_least_leading_root() {
        let f7 = field(7, 1);
        // (3T + 1)^2 has leading coefficient 2 with square roots {3, 4}.
        let u = poly(&f7, &[1, 3]).pow(2);
        let r = u.kth_root(2).unwrap();
        assert_eq!(r.leading_coeff(), RingElem(3));
        assert_eq!(r.pow(2), u);
    }

    #[test]
    fn enumerate_examples() {
        let f2 = field(2, 1);
        let all: Vec<String> = enumerate_p(f2, 2).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(all, ["0", "1", "T", "T + 1"]);
        let f3 = field(3, 1);
        assert_eq!(enumerate_p(Arc::clone(&f3), 1).unwrap().map(|p| p.code()).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(enumerate_p(Arc::clone(&f3), 4).unwrap().count(), 81);
        assert!(matches!(enumerate_p(f3, 20), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn text_roundtrip() {
        let f9 = field(3, 2);
        let p = poly(&f9, &[0, 7, 8]);
        assert_eq!(p.to_text(5), "0,7,8,0,0");
        assert_eq!(PolyFq::parse(Arc::clone(&f9), &p.to_text(5)).unwrap(), p);
        assert!(PolyFq::parse(f9, "1,9").is_err());
    }
}
