//! Finite commutative rings: prime-power fields `F_{p^s}` and residue rings `Z/mZ`.
//!
//! Elements are plain indices in `[0, |R|)`. For `Z/mZ` the index is the least
//! nonnegative residue. For `F_{p^s}` an element is a residue polynomial
//! `c_0 + c_1 a + ... + c_{s-1} a^{s-1}` modulo a fixed monic irreducible of
//! degree `s`, and its index is the base-`p` evaluation `c_0 + c_1 p + ...`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Largest ring order accepted by [`RingCtx::new`].
pub const ORDER_CAP: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingSpec {
    Field { p: u32, s: u32 },
    ZMod { m: u32 },
}

impl RingSpec {
    /// Field of order `q`, factoring `q` as a prime power.
    pub fn field_of_order(q: u64) -> Result<Self> {
        let (p, s) = prime_power(q).ok_or(Error::NotPrime(q))?;
        Ok(RingSpec::Field { p: p as u32, s })
    }

    pub fn order(&self) -> u64 {
        match *self {
            RingSpec::Field { p, s } => (p as u64).saturating_pow(s),
            RingSpec::ZMod { m } => m as u64,
        }
    }

    pub fn is_field(&self) -> bool {
        match *self {
            RingSpec::Field { .. } => true,
            RingSpec::ZMod { m } => is_prime(m as u64),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RingSpec::Field { p, s } => write!(f, "fq:{}", (p as u64).pow(s)),
            RingSpec::ZMod { m } => write!(f, "zmod:{m}"),
        }
    }
}

impl std::str::FromStr for RingSpec {
    type Err = Error;

    /// Parses `fq:<q>` or `zmod:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("ring must be fq:<q> or zmod:<m>, got {s:?}"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: u64 = value.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "fq" => RingSpec::field_of_order(value),
            "zmod" => {
                let m = u32::try_from(value)
                    .map_err(|_| Error::OrderTooLarge { order: value, cap: ORDER_CAP })?;
                Ok(RingSpec::ZMod { m })
            }
            _ => Err(bad()),
        }
    }
}

/// Canonical element index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElem(pub u32);

impl RingElem {
    pub const ZERO: RingElem = RingElem(0);
    pub const ONE: RingElem = RingElem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The set of `k`-th powers `{z^k : z in R}`, including zero.
#[derive(Debug)]
pub struct PowerSet {
    pub members: BitSet,
    pub elems: Vec<RingElem>,
}

#[derive(Debug)]
struct FieldTables {
    p: u32,
    s: u32,
    /// Monic modulus, coefficients low to high, length `s + 1`.
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
enum Repr {
    Field(FieldTables),
    ZMod { m: u32 },
}

/// An immutable ring context with arithmetic on canonical indices.
#[derive(Debug)]
pub struct RingCtx {
    spec: RingSpec,
    order: u32,
    repr: Repr,
    powers: RwLock<HashMap<u32, Arc<PowerSet>>>,
}

impl RingCtx {
    pub fn new(spec: RingSpec) -> Result<Self> {
        let order = spec.order();
        let repr = match spec {
            RingSpec::Field { p, s } => {
                if !is_prime(p as u64) {
                    return Err(Error::InvalidArgument(format!("characteristic {p} is not prime")));
                }
                if s == 0 {
                    return Err(Error::InvalidArgument("field degree must be positive".into()));
                }
                if order > ORDER_CAP {
                    return Err(Error::OrderTooLarge { order, cap: ORDER_CAP });
                }
                Repr::Field(FieldTables::build(p, s))
            }
            RingSpec::ZMod { m } => {
                if m < 2 {
                    return Err(Error::BadModulus(m as u64));
                }
                if order > ORDER_CAP {
                    return Err(Error::OrderTooLarge { order, cap: ORDER_CAP });
                }
                Repr::ZMod { m }
            }
        };
        Ok(RingCtx { spec, order: order as u32, repr, powers: RwLock::new(HashMap::new()) })
    }

    pub fn field(p: u32, s: u32) -> Result<Self> {
        Self::new(RingSpec::Field { p, s })
    }

    pub fn zmod(m: u32) -> Result<Self> {
        Self::new(RingSpec::ZMod { m })
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn is_field(&self) -> bool {
        self.spec.is_field()
    }

    /// Characteristic of the ring (`p` for fields, `m` for `Z/mZ`).
    pub fn characteristic(&self) -> u32 {
        match &self.repr {
            Repr::Field(t) => t.p,
            Repr::ZMod { m } => *m,
        }
    }

    /// Modulus polynomial coefficients (low to high) for `F_{p^s}`.
    pub fn modulus_poly(&self) -> Option<&[u32]> {
        match &self.repr {
            Repr::Field(t) => Some(&t.modulus),
            Repr::ZMod { .. } => None,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> {
        (0..self.order).map(RingElem)
    }

    /// Coordinates of `x` over the prime subring: base-`p` digits for fields,
    /// the residue itself for `Z/mZ`.
    pub fn coords(&self, x: RingElem) -> Vec<u32> {
        match &self.repr {
            Repr::Field(t) => t.digits(x.0),
            Repr::ZMod { .. } => vec![x.0],
        }
    }

    #[inline]
    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        match &self.repr {
            Repr::ZMod { m } => RingElem(((a.0 as u64 + b.0 as u64) % *m as u64) as u32),
            Repr::Field(t) => RingElem(t.add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: RingElem) -> RingElem {
        match &self.repr {
            Repr::ZMod { m } => RingElem((*m - a.0) % *m),
            Repr::Field(t) => RingElem(t.neg(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        match &self.repr {
            Repr::ZMod { m } => RingElem(((a.0 as u64 * b.0 as u64) % *m as u64) as u32),
            Repr::Field(t) => RingElem(t.mul(a.0, b.0)),
        }
    }

    pub fn pow(&self, mut base: RingElem, mut e: u64) -> RingElem {
        let mut acc = RingElem::ONE;
        if self.order == 1 {
            return RingElem::ZERO;
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for non-units.
    pub fn inv(&self, a: RingElem) -> Option<RingElem> {
        match &self.repr {
            Repr::ZMod { m } => mod_inverse(a.0 as u64, *m as u64).map(|x| RingElem(x as u32)),
            Repr::Field(t) => {
                if a.0 == 0 {
                    return None;
                }
                let n = self.order - 1;
                Some(RingElem(t.exp[((n - t.log[a.0 as usize]) % n) as usize]))
            }
        }
    }

    /// Discrete logarithm to the base of [`RingCtx::generator`], fields only.
    pub fn log(&self, a: RingElem) -> Option<u32> {
        match &self.repr {
            Repr::Field(t) if a.0 != 0 => Some(t.log[a.0 as usize]),
            _ => None,
        }
    }

    /// `generator^e`, fields only.
    pub fn exp(&self, e: u64) -> Option<RingElem> {
        match &self.repr {
            Repr::Field(t) => Some(RingElem(t.exp[(e % (self.order as u64 - 1)) as usize])),
            Repr::ZMod { .. } => None,
        }
    }

    /// Least-index generator of the multiplicative group of a field.
    pub fn generator(&self) -> Result<RingElem> {
        match &self.repr {
            Repr::Field(t) => Ok(RingElem(t.generator)),
            Repr::ZMod { .. } => Err(Error::NotAField),
        }
    }

    /// All `k`-th powers of the ring, cached per `k`.
    pub fn kth_power_set(&self, k: u32) -> Arc<PowerSet> {
        if let Some(set) = self.powers.read().expect("power cache poisoned").get(&k) {
            return Arc::clone(set);
        }
        let set = Arc::new(self.compute_power_set(k));
        self.powers.write().expect("power cache poisoned").entry(k).or_insert(set).clone()
    }

    fn compute_power_set(&self, k: u32) -> PowerSet {
        let mut members = BitSet::new(self.order());
        match &self.repr {
            Repr::Field(t) => {
                members.insert(0);
                let n = self.order - 1;
                let d = gcd(k as u64, n as u64) as u32;
                for j in (0..n).step_by(d as usize) {
                    members.insert(t.exp[j as usize] as usize);
                }
            }
            Repr::ZMod { .. } => {
                for z in self.elements() {
                    members.insert(self.pow(z, k as u64).index());
                }
            }
        }
        let elems = members.iter().map(|i| RingElem(i as u32)).collect();
        PowerSet { members, elems }
    }

    pub fn is_kth_power(&self, x: RingElem, k: u32) -> bool {
        if x.0 == 0 {
            return true;
        }
        match &self.repr {
            Repr::Field(t) => {
                let d = gcd(k as u64, self.order as u64 - 1) as u32;
                t.log[x.0 as usize] % d == 0
            }
            Repr::ZMod { .. } => self.kth_power_set(k).members.contains(x.index()),
        }
    }

    /// Least-index element that is not a `k`-th power.
    pub fn non_kth_power(&self, k: u32) -> Result<RingElem> {
        self.elements().find(|&x| !self.is_kth_power(x, k)).ok_or(Error::AllPowers { k })
    }

    /// `gcd(k, q - 1)` for fields: the index of the `k`-th powers in the unit group.
    pub fn power_index(&self, k: u32) -> Result<u32> {
        match &self.repr {
            Repr::Field(_) => Ok(gcd(k as u64, self.order as u64 - 1) as u32),
            Repr::ZMod { m } if is_prime(*m as u64) => Ok(gcd(k as u64, *m as u64 - 1) as u32),
            Repr::ZMod { .. } => Err(Error::NotAField),
        }
    }

    /// All roots of `x^k = a`, sorted by index.
    pub fn kth_roots(&self, a: RingElem, k: u32) -> Vec<RingElem> {
        match &self.repr {
            Repr::Field(t) if a.0 != 0 => {
                let n = self.order - 1;
                let d = gcd(k as u64, n as u64) as u32;
                let la = t.log[a.0 as usize];
                if la % d != 0 {
                    return Vec::new();
                }
                // k*e = la (mod n) has d solutions mod n.
                let (k1, n1, l1) = ((k / d) as u64, (n / d) as u64, (la / d) as u64);
                let base = if n1 == 1 { 0 } else { l1 * mod_inverse(k1 % n1, n1).unwrap() % n1 };
                let mut roots: Vec<RingElem> = (0..d as u64)
                    .map(|j| RingElem(t.exp[(base + j * n1) as usize % n as usize]))
                    .collect();
                roots.sort();
                roots
            }
            _ => self.elements().filter(|&z| self.pow(z, k as u64) == a).collect(),
        }
    }
}

impl FieldTables {
    fn build(p: u32, s: u32) -> Self {
        let modulus = smallest_irreducible(p, s);
        let mut t = FieldTables { p, s, modulus, generator: 0, exp: Vec::new(), log: Vec::new() };
        let q = (p as u64).pow(s);
        let n = q - 1;
        let prime_factors: Vec<u64> = factorize(n).into_iter().map(|(f, _)| f).collect();
        let generator = (1..q as u32)
            .find(|&g| prime_factors.iter().all(|&f| t.pow_slow(g, n / f) != 1))
            .expect("multiplicative group of a field is cyclic");
        t.generator = generator;
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for e in 0..n as u32 {
            exp.push(cur);
            log[cur as usize] = e;
            cur = t.mul_slow(cur, generator);
        }
        debug_assert_eq!(cur, 1);
        t.exp = exp;
        t.log = log;
        t
    }

    fn digits(&self, mut x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.s as usize);
        for _ in 0..self.s {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    #[inline]
    fn add(&self, mut a: u32, mut b: u32) -> u32 {
        if self.s == 1 {
            let r = a + b;
            return if r >= self.p { r - self.p } else { r };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    fn neg(&self, mut a: u32) -> u32 {
        if self.s == 1 {
            return (self.p - a) % self.p;
        }
        if self.p == 2 {
            return a;
        }
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += (self.p - a % self.p) % self.p * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.exp.len() as u32;
        let e = self.log[a as usize] + self.log[b as usize];
        self.exp[(if e >= n { e - n } else { e }) as usize]
    }

    /// Schoolbook product reduced by the modulus; used before the tables exist.
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (da, db) = (self.digits(a), self.digits(b));
        let s = self.s as usize;
        let mut prod = vec![0u64; 2 * s];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (s..2 * s).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..s].iter().enumerate() {
                let idx = deg - s + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
            prod[deg] = 0;
        }
        let low: Vec<u32> = prod[..s].iter().map(|&c| c as u32).collect();
        self.from_digits(&low)
    }

    fn pow_slow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Lexicographically smallest monic irreducible of degree `s` over `F_p`,
/// ordered by the base-`p` encoding of its non-leading coefficients.
pub fn smallest_irreducible(p: u32, s: u32) -> Vec<u32> {
    let count = (p as u64).pow(s);
    (0..count)
        .map(|code| {
            let mut coeffs = Vec::with_capacity(s as usize + 1);
            let mut c = code;
            for _ in 0..s {
                coeffs.push((c % p as u64) as u32);
                c /= p as u64;
            }
            coeffs.push(1);
            coeffs
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree at most `deg f / 2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        for code in 0..(p as u64).pow(d as u32) {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push((c % p as u64) as u32);
                c /= p as u64;
            }
            g.push(1);
            if poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (i, &gc) in g.iter().enumerate() {
            let idx = top - dg + i;
            r[idx] = (r[idx] + (p - c) * gc as u64 % p) % p;
        }
    }
    r[..dg].iter().all(|&c| c == 0)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `q = p^s` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, s)] => Some((*p, *s)),
        _ => None,
    }
}

pub fn is_squarefree(m: u64) -> bool {
    factorize(m).iter().all(|&(_, e)| e == 1)
}

/// Prime-power factors of `m`, ascending by prime.
pub fn crt_split(m: u64) -> Vec<u64> {
    factorize(m).into_iter().map(|(p, e)| p.pow(e)).collect()
}

pub fn crt_map(x: u64, factors: &[u64]) -> Vec<u64> {
    factors.iter().map(|&f| x % f).collect()
}

/// Inverse of [`crt_map`] for pairwise coprime factors.
pub fn crt_inverse(residues: &[u64], factors: &[u64]) -> u64 {
    let m: u64 = factors.iter().product();
    residues.iter().zip(factors).fold(0u128, |acc, (&r, &f)| {
        let rest = m / f;
        let inv = mod_inverse(rest % f, f).expect("factors are coprime");
        (acc + r as u128 * rest as u128 % m as u128 * inv as u128) % m as u128
    }) as u64
}
