//! Exponents and per-symbol rates bounding the largest `F(u)`-difference-free
//! subset of `P_{q,n}`: Green's exponent, the refined rate obtained by
//! minimizing a one-variable function, and the construction lower bounds.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indep::{alpha_product, AlphaOptions};
use crate::rings::{gcd, prime_power, RingCtx, RingSpec};

const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_LO: f64 = 1e-6;
const GOLDEN_HI: f64 = 1.0 - 1e-6;
const UNIMODAL_SAMPLES: usize = 1000;

/// Sum of the base-`q` digits of `k`.
pub fn digit_sum(mut k: u64, q: u64) -> u64 {
    assert!(q >= 2, "base must be at least 2");
    let mut s = 0;
    while k > 0 {
        s += k % q;
        k /= q;
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenExponent {
    pub c: f64,
    /// `q^{1-c}`.
    pub base: f64,
}

/// `c_k = 1 / (2 k² D_q(k)² ln q)`.
pub fn green_exponent(q: u64, k: u32) -> GreenExponent {
    let d = digit_sum(k as u64, q) as f64;
    let k = k as f64;
    let c = 1.0 / (2.0 * k * k * d * d * (q as f64).ln());
    GreenExponent { c, base: (q as f64).powf(1.0 - c) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateMin {
    pub t_star: f64,
    pub value: f64,
}

/// `f(t) = (1 - t^q) / ((1 - t) t^{(q-1)γ})`.
pub fn rate_function(q: u64, gamma: f64, t: f64) -> f64 {
    let q = q as f64;
    (1.0 - t.powf(q)) / ((1.0 - t) * t.powf((q - 1.0) * gamma))
}

/// Golden-section minimum of [`rate_function`] on `(0, 1)`, after checking on a
/// sample grid that the function falls and then rises.
pub fn minimize_rate(q: u64, gamma: f64) -> Result<RateMin> {
    minimize_rate_tol(q, gamma, GOLDEN_TOL)
}

pub fn minimize_rate_tol(q: u64, gamma: f64, tol: f64) -> Result<RateMin> {
    if q < 2 || !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("need q >= 2 and 0 < gamma < 1, got q = {q}, gamma = {gamma}")));
    }
    let f = |t: f64| rate_function(q, gamma, t);
    let samples: Vec<f64> = (0..UNIMODAL_SAMPLES)
        .map(|i| f(GOLDEN_LO + (GOLDEN_HI - GOLDEN_LO) * i as f64 / (UNIMODAL_SAMPLES - 1) as f64))
        .collect();
    let mut rising = false;
    for w in samples.windows(2) {
        // Relative slack absorbs rounding on the flat stretches.
        let slack = 1e-12 * w[0].abs().max(1.0);
        if w[1] > w[0] + slack {
            rising = true;
        } else if rising && w[1] < w[0] - slack {
            return Err(Error::NotUnimodal);
        }
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (GOLDEN_LO, GOLDEN_HI);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t_star = (a + b) / 2.0;
    Ok(RateMin { t_star, value: f(t_star) })
}

/// Per-symbol bases for one `(q, k, n)`. Every bound on the set size is the
/// base raised to the `n`-th power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsLedger {
    pub q: u64,
    pub k: u32,
    pub n: usize,
    pub green_exponent: f64,
    pub green_rate: f64,
    pub refined_rate: Option<f64>,
    pub gamma: Option<f64>,
    pub lower_thm1: Option<f64>,
    pub lower_improved: Option<f64>,
    pub r_k2: Option<usize>,
    pub method_limit: f64,
    pub greedy: Option<f64>,
    /// `q^{1-1/k²}`, the conjectured true rate; reported, never asserted.
    pub conjectured_rate: f64,
}

/// Assembles the ledger. `gamma` selects the refined rate; `r_{k,2}` is
/// computed with `opts` and left empty if the solver fails.
pub fn bounds_report(q: u64, k: u32, n: usize, gamma: Option<f64>, opts: &AlphaOptions) -> Result<BoundsLedger> {
    prime_power(q).ok_or(Error::NotPrime(q))?;
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let qf = q as f64;
    let kf = k as f64;
    let green = green_exponent(q, k);
    let refined = gamma.map(|g| minimize_rate(q, g)).transpose()?;
    let ring = Arc::new(RingCtx::new(RingSpec::field_of_order(q)?)?);
    let nontrivial = gcd(k as u64, q - 1) > 1;
    let r_k2 = if nontrivial { alpha_product(&ring, k, 2, opts).ok().map(|s| s.size) } else { None };
    // |A| >= q^{n-1-⌊(n-1)/k⌋} from the greedy scan, valid when -1 is a k-th power.
    let minus_one = ring.neg(crate::rings::RingElem::ONE);
    let greedy = (n >= 1 && ring.is_kth_power(minus_one, k))
        .then(|| qf.powf((n - 1 - (n - 1) / k as usize) as f64 / n as f64));
    Ok(BoundsLedger {
        q,
        k,
        n,
        green_exponent: green.c,
        green_rate: green.base,
        refined_rate: refined.map(|r| r.value),
        gamma,
        lower_thm1: nontrivial.then(|| qf.powf(1.0 - 1.0 / (2.0 * kf))),
        lower_improved: r_k2.map(|r| (r as f64).powf(1.0 / (2.0 * kf)) * qf.powf(1.0 - 1.0 / kf)),
        r_k2,
        method_limit: qf.powf(1.0 - 1.0 / (kf * kf)),
        greedy,
        conjectured_rate: qf.powf(1.0 - 1.0 / (kf * kf)),
    })
}

impl BoundsLedger {
    /// `lower_thm1 <= lower_improved <= method_limit <= green_rate` over the
    /// fields that are present, within `1e-9`.
    pub fn ordering_holds(&self) -> bool {
        let chain: Vec<f64> = [self.lower_thm1, self.lower_improved, Some(self.method_limit), Some(self.green_rate)]
            .into_iter()
            .flatten()
            .collect();
        chain.windows(2).all(|w| w[0] <= w[1] + 1e-9)
    }

    pub const CSV_HEADER: &'static str = "q,k,n,green_exponent,green_rate,refined_rate,gamma,lower_thm1,lower_improved,r_k2,method_limit,greedy,conjectured_rate";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt12).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.q,
            self.k,
            self.n,
            fmt12(self.green_exponent),
            fmt12(self.green_rate),
            opt(self.refined_rate),
            opt(self.gamma),
            opt(self.lower_thm1),
            opt(self.lower_improved),
            self.r_k2.map(|r| r.to_string()).unwrap_or_default(),
            fmt12(self.method_limit),
            opt(self.greedy),
            fmt12(self.conjectured_rate),
        )
    }

    /// Human-readable table; bounds are rates `b` meaning `b^n`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "q = {}, k = {}, n = {}", self.q, self.k, self.n);
        let mut line = |name: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(s, "  {name:<28} {}", fmt12(v));
            }
        };
        line("upper: Green exponent c_k", Some(self.green_exponent));
        line("upper: Green rate", Some(self.green_rate));
        line("upper: refined rate", self.refined_rate);
        line("lower: q^(1-1/2k)", self.lower_thm1);
        line("lower: r_k2 construction", self.lower_improved);
        line("lower: greedy", self.greedy);
        line("limit of the method", Some(self.method_limit));
        let _ = writeln!(s, "  conjectured rate (not proved) {}", fmt12(self.conjectured_rate));
        s
    }
}

/// Shortest decimal form carrying 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.11e}", x);
    let v: f64 = s.parse().expect("formatted float parses");
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(3, 7), 3);
        assert_eq!(digit_sum(10, 7), 4);
        assert_eq!(digit_sum(49, 7), 1);
        assert_eq!(digit_sum(8, 2), 1);
    }

    #[test]
    fn green_values() {
        let g = green_exponent(7, 3);
        assert!((g.c - 3.1725e-3).abs() < 1e-6);
        assert!((g.base - 6.9570).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for k in 2..40 {
            let c = green_exponent(7, k).c;
            assert!(c < prev || digit_sum(k as u64, 7) < digit_sum(k as u64 - 1, 7));
            prev = c;
        }
    }

    #[test]
    fn refined_rate_example() {
        let r = minimize_rate(7, 4.0 / 9.0).unwrap();
        assert!((r.value - 6.903).abs() < 1e-3);
        let half = minimize_rate_tol(7, 4.0 / 9.0, GOLDEN_TOL / 2.0).unwrap();
        assert!((r.value - half.value).abs() < 1e-6);
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert!(rate_function(7, 4.0 / 9.0, t) >= r.value - 1e-12);
        }
        let tiny = minimize_rate(7, 1e-9).unwrap();
        assert!((tiny.value - 1.0).abs() < 1e-3);
        assert!(minimize_rate(7, 1.5).is_err());
    }

    #[test]
    fn ledger_for_c7() {
        let l = bounds_report(7, 3, 6, Some(4.0 / 9.0), &AlphaOptions::default()).unwrap();
        assert!((l.lower_thm1.unwrap() - 5.0613).abs() < 1e-3);
        assert!((l.lower_improved.unwrap() - 5.3716).abs() < 1e-3);
        // 7^{8/9} = exp(8 ln 7 / 9) = 5.638950...
        assert!((l.method_limit - 5.638950182).abs() < 1e-8);
        assert_eq!(l.r_k2, Some(10));
        assert!(l.refined_rate.unwrap() < l.green_rate);
        assert!(l.ordering_holds());
        let l3 = bounds_report(3, 2, 4, None, &AlphaOptions::default()).unwrap();
        assert!((l3.lower_thm1.unwrap() - 3f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(3.605551275463989), "3.60555127546");
        assert_eq!(fmt12(10.0), "10");
        assert_eq!(fmt12(0.0031725), "0.0031725");
    }
}
