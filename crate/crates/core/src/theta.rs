//! Spectra of abelian Cayley graphs and the Lovász theta function.
//!
//! Eigenvalues come from additive characters: on `Z/m` the character `y`
//! sends `x` to `exp(2πi·xy/m)`, on `F_{p^s}` it sends `x` to
//! `exp(2πi·<y,x>/p)` with `<,>` the dot product of base-`p` coordinates.
//!
//! Paley graphs over fields are edge-transitive (the `k`-th power subgroup acts
//! transitively on the connection set), so ϑ equals the ratio bound
//! `n(-λ_min)/(λ_max - λ_min)`. Their complements are not edge-transitive in
//! general; for those ϑ is the optimum of the character LP
//!
//! ```text
//!   max Σ_x f(x)   s.t.  f(0) = 1,  f = 0 on the connection set,  f̂(χ) >= 0 for all χ,
//! ```
//!
//! which is exact for every Cayley graph on an abelian group. The LP is reduced
//! to one variable per orbit of the multiplicative `k`-th power units.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graphs::{build_paley, CayleyGraph};
use crate::indep::{max_independent_set_with, AlphaOptions};
use crate::rings::{factorize, is_squarefree, RingCtx, RingElem};

/// Largest ring handled by [`cayley_spectrum`].
pub const SPECTRUM_CAP: usize = 1 << 16;
/// Largest ring handled by the character LP (quadratic in the order).
pub const LP_CAP: usize = 1 << 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    Ratio,
    Product,
    ClosedForm,
    CharacterLp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaFactor {
    pub prime: u64,
    pub report: ThetaReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub value: f64,
    pub method: ThetaMethod,
    pub lambda_max: f64,
    pub lambda_min: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<ThetaFactor>,
}

/// Character pairing: returns `(t, modulus)` with `χ_y(x) = exp(2πi t / modulus)`.
struct Characters {
    modulus: u32,
    coords: Vec<Vec<u32>>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Characters {
    fn new(ring: &RingCtx) -> Self {
        let modulus = ring.characteristic();
        let coords = ring.elements().map(|x| ring.coords(x)).collect();
        let cos = (0..modulus).map(|t| (TAU * t as f64 / modulus as f64).cos()).collect();
        let sin = (0..modulus).map(|t| (TAU * t as f64 / modulus as f64).sin()).collect();
        Characters { modulus, coords, cos, sin }
    }

    #[inline]
    fn pairing(&self, y: usize, x: usize) -> usize {
        let m = self.modulus as u64;
        self.coords[y].iter().zip(&self.coords[x]).fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % m)
            as usize
    }
}

/// Eigenvalues of the adjacency operator, ascending.
pub fn cayley_spectrum(g: &CayleyGraph) -> Result<Vec<f64>> {
    if !g.is_symmetric() {
        return Err(Error::DirectedUnsupported);
    }
    if g.order() > SPECTRUM_CAP {
        return Err(Error::OrderTooLarge { order: g.order() as u64, cap: SPECTRUM_CAP as u64 });
    }
    let chars = Characters::new(g.ring());
    let conn: Vec<usize> = g.connection().iter().collect();
    let mut spectrum: Vec<f64> = (0..g.order())
        .into_par_iter()
        .map(|y| {
            let (mut re, mut im) = (0.0, 0.0);
            for &s in &conn {
                let t = chars.pairing(y, s);
                re += chars.cos[t];
                im += chars.sin[t];
            }
            debug_assert!(im.abs() < 1e-9, "imaginary part {im} for character {y}");
            re
        })
        .collect();
    spectrum.sort_by(f64::total_cmp);
    Ok(spectrum)
}

/// ϑ of a symmetric Paley graph or Paley complement over a field.
pub fn lovasz_theta(g: &CayleyGraph) -> Result<ThetaReport> {
    if !g.is_symmetric() {
        return Err(Error::DirectedUnsupported);
    }
    let n = g.order();
    let spectrum = cayley_spectrum(g)?;
    let (lambda_min, lambda_max) = (spectrum[0], spectrum[n - 1]);
    let report = |value, method| ThetaReport { value, method, lambda_max, lambda_min, factors: Vec::new() };
    if g.degree() == 0 {
        return Ok(report(n as f64, ThetaMethod::ClosedForm));
    }
    if g.degree() == n - 1 {
        return Ok(report(1.0, ThetaMethod::ClosedForm));
    }
    if !g.ring().is_field() {
        return Err(Error::NotEdgeTransitive);
    }
    if g.is_complemented() {
        theta_character_lp(g)
    } else {
        Ok(report(ratio_bound(n, lambda_max, lambda_min), ThetaMethod::Ratio))
    }
}

pub fn ratio_bound(n: usize, lambda_max: f64, lambda_min: f64) -> f64 {
    n as f64 * (-lambda_min) / (lambda_max - lambda_min)
}

/// Orbits of `x -> ±u^k x` over units `u`, each as a sorted element list.
fn power_orbits(ring: &RingCtx, k: u32) -> Vec<Vec<usize>> {
    let mut multipliers: BTreeSet<RingElem> = BTreeSet::new();
    for u in ring.elements().filter(|&u| ring.inv(u).is_some()) {
        let h = ring.pow(u, k as u64);
        multipliers.insert(h);
        multipliers.insert(ring.neg(h));
    }
    orbits_under(ring, &multipliers.into_iter().collect::<Vec<_>>())
}

fn orbits_under(ring: &RingCtx, multipliers: &[RingElem]) -> Vec<Vec<usize>> {
    let mut seen = BitSet::new(ring.order());
    let mut orbits = Vec::new();
    for x in ring.elements() {
        if seen.contains(x.index()) {
            continue;
        }
        let mut orbit: Vec<usize> = multipliers.iter().map(|&h| ring.mul(h, x).index()).collect();
        orbit.push(x.index());
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            seen.insert(y);
        }
        orbits.push(orbit);
    }
    orbits
}

/// Exact ϑ of a symmetric Cayley graph on the ring's additive group via the
/// orbit-reduced character LP.
pub fn theta_character_lp(g: &CayleyGraph) -> Result<ThetaReport> {
    if !g.is_symmetric() {
        return Err(Error::DirectedUnsupported);
    }
    let n = g.order();
    if n > LP_CAP {
        return Err(Error::OrderTooLarge { order: n as u64, cap: LP_CAP as u64 });
    }
    let ring = g.ring();
    let conn = g.connection();
    let mut orbits = power_orbits(ring, g.k());
    let respects = |orbits: &[Vec<usize>]| {
        orbits.iter().all(|o| o.iter().all(|&x| conn.contains(x)) || o.iter().all(|&x| !conn.contains(x)))
    };
    if !respects(&orbits) {
        orbits = orbits_under(ring, &[RingElem::ONE, ring.neg(RingElem::ONE)]);
    }
    let free: Vec<&Vec<usize>> = orbits.iter().filter(|o| o[0] != 0 && !conn.contains(o[0])).collect();

    let spectrum = cayley_spectrum(g)?;
    let (lambda_min, lambda_max) = (spectrum[0], spectrum[n - 1]);
    if free.is_empty() {
        // Complete graph.
        return Ok(ThetaReport { value: 1.0, method: ThetaMethod::CharacterLp, lambda_max, lambda_min, factors: vec![] });
    }

    let chars = Characters::new(ring);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|y| {
            free.iter().map(|orbit| orbit.iter().map(|&x| chars.cos[chars.pairing(y, x)]).sum()).collect()
        })
        .collect();
    // Identical rows come from characters in one dual orbit.
    let mut distinct: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> =
        free.iter().map(|o| problem.add_var(o.len() as f64, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for row in rows {
        let key: Vec<i64> = row.iter().map(|v| (v * 1e9).round() as i64).collect();
        if distinct.insert(key) {
            let terms: Vec<_> = vars.iter().copied().zip(row.iter().copied()).collect();
            problem.add_constraint(terms.as_slice(), ComparisonOp::Ge, -1.0);
        }
    }
    let solution = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
    Ok(ThetaReport {
        value: 1.0 + solution.objective(),
        method: ThetaMethod::CharacterLp,
        lambda_max,
        lambda_min,
        factors: Vec::new(),
    })
}

/// Upper bound on ϑ(Paley_k(Z/m)) as the product of per-prime values, for
/// squarefree `m`.
pub fn theta_zmod(m: u64, k: u32) -> Result<ThetaReport> {
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    if !is_squarefree(m) {
        return Err(Error::NotSquarefree(m));
    }
    let mut factors = Vec::new();
    for (p, _) in factorize(m) {
        let ring = Arc::new(RingCtx::zmod(p as u32)?);
        let g = build_paley(&ring, k);
        if !g.is_symmetric() {
            return Err(Error::DirectedFactor(p));
        }
        factors.push(ThetaFactor { prime: p, report: lovasz_theta(&g)? });
    }
    if factors.len() == 1 {
        return Ok(factors.pop().expect("one factor").report);
    }
    let value = factors.iter().map(|f| f.report.value).product();
    let (lambda_max, lambda_min) = if m as usize <= SPECTRUM_CAP {
        let whole = build_paley(&Arc::new(RingCtx::zmod(m as u32)?), k);
        let spectrum = cayley_spectrum(&whole)?;
        (spectrum[spectrum.len() - 1], spectrum[0])
    } else {
        // Strong-product eigenvalues are Π(λ_i + 1) - 1; the extremes of a
        // product of intervals sit at endpoint choices.
        let mut lo = 1.0f64;
        let mut hi = 1.0f64;
        for f in &factors {
            let (a, b) = (f.report.lambda_min + 1.0, f.report.lambda_max + 1.0);
            let cands = [lo * a, lo * b, hi * a, hi * b];
            lo = cands.iter().copied().fold(f64::INFINITY, f64::min);
            hi = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        (hi - 1.0, lo - 1.0)
    };
    Ok(ThetaReport { value, method: ThetaMethod::Product, lambda_max, lambda_min, factors })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuzsaCheck {
    pub m: u64,
    pub k: u32,
    pub applicable: bool,
    pub bound: f64,
    /// `α(Paley_k(Z/m))`, or a lower bound when `exact` is false.
    pub alpha: Option<usize>,
    pub exact: bool,
    /// `alpha < m^{1-1/k}`, decided in integers as `alpha^k < m^{k-1}`.
    pub below_bound: Option<bool>,
}

/// Largest modulus for which [`ruzsa_bound_check`] runs the exact solver.
pub const RUZSA_SOLVER_CAP: u64 = 400;

/// Checks `α(Paley_k(Z/m)) < m^{1-1/k}` when every prime factor of the
/// squarefree `m` is `1 mod 2^{s+1}`, `k = d·2^s` with `d` odd.
pub fn ruzsa_bound_check(m: u64, k: u32, opts: &AlphaOptions) -> Result<RuzsaCheck> {
    if m < 2 {
        return Err(Error::BadModulus(m));
    }
    let two_s = 1u64 << k.trailing_zeros();
    let applicable = is_squarefree(m) && factorize(m).iter().all(|&(p, _)| p % (2 * two_s) == 1);
    let bound = (m as f64).powf(1.0 - 1.0 / k as f64);
    let mut check = RuzsaCheck { m, k, applicable, bound, alpha: None, exact: false, below_bound: None };
    if m <= RUZSA_SOLVER_CAP {
        let ring = Arc::new(RingCtx::zmod(m as u32)?);
        let g = build_paley(&ring, k).to_generic();
        let mut solver = opts.solver.clone();
        solver.vertex_transitive = true;
        if opts.theta_cutoff && applicable {
            solver.upper_bound = theta_zmod(m, k).ok().map(|t| (t.value + 1e-7).floor() as usize);
        }
        let (size, exact) = match max_independent_set_with(&g, &solver) {
            Ok(set) => (set.size, true),
            Err(Error::Timeout { incumbent, .. }) => (incumbent.size, false),
            Err(e) => return Err(e),
        };
        check.alpha = Some(size);
        check.exact = exact;
        let lhs = num_bigint::BigUint::from(size).pow(k);
        let rhs = num_bigint::BigUint::from(m).pow(k - 1);
        check.below_bound = Some(lhs < rhs);
        if applicable && exact {
            assert!(lhs < rhs, "α = {size} violates α < {m}^(1-1/{k})");
        }
    }
    Ok(check)
}

/// Is `-1` a `k`-th power in `F_q`?
pub fn minus_one_is_power(ring: &RingCtx, k: u32) -> bool {
    ring.is_kth_power(ring.neg(RingElem::ONE), k)
}
