//! Exact comparisons involving fractional powers, and small integer helpers.
//!
//! Bounds such as `|A|^{58/37} D^{-21/37}` are never evaluated in floating
//! point for a decision: both sides are raised to the least common integer
//! power and compared as rationals.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::Scalar;

/// A positive real of the form `∏ base_i^{e_i}` with rational bases and
/// rational exponents.
#[derive(Clone, Debug, Default)]
pub struct PowerProduct {
    factors: Vec<(Scalar, Ratio<i64>)>,
}

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct::default()
    }

    pub fn of(base: impl Into<Scalar>) -> Self {
        PowerProduct::one().times(base, 1, 1)
    }

    /// Multiplies by `base^{num/den}`. Panics if `base ≤ 0`.
    pub fn times(mut self, base: impl Into<Scalar>, num: i64, den: i64) -> Self {
        let base = base.into();
        assert!(
            base.is_positive(),
            "power base must be positive, got {base}"
        );
        let e = Ratio::new(num, den);
        if !e.is_zero() && base != Scalar::one() {
            self.factors.push((base, e));
        }
        self
    }

    /// `x` itself as a product, or `None` unless `x > 0`.
    pub fn of_scalar(x: &Scalar) -> Option<Self> {
        x.is_positive().then(|| PowerProduct::of(x.clone()))
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        PowerProduct { factors }
    }

    /// `self^{num/den}`.
    pub fn scaled(&self, num: i64, den: i64) -> PowerProduct {
        let e = Ratio::new(num, den);
        PowerProduct {
            factors: self
                .factors
                .iter()
                .map(|(b, x)| (b.clone(), *x * e))
                .collect(),
        }
    }

    pub fn recip(&self) -> PowerProduct {
        PowerProduct {
            factors: self.factors.iter().map(|(b, e)| (b.clone(), -*e)).collect(),
        }
    }

    pub fn div(&self, other: &PowerProduct) -> PowerProduct {
        self.mul(&other.recip())
    }

    /// Approximate natural log, for report columns.
    pub fn ln(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| b.ln() * (*e.numer() as f64) / (*e.denom() as f64))
            .sum()
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    /// Smallest positive integer `k` such that every exponent times `k` is
    /// an integer.
    pub fn exponent_lcm(&self) -> i64 {
        self.factors
            .iter()
            .fold(1i64, |acc, (_, e)| acc.lcm(e.denom()))
    }

    /// The exact rational `self^k`; `k` must clear every exponent denominator.
    pub fn raised_to(&self, k: i64) -> BigRational {
        let mut acc = BigRational::one();
        for (b, e) in &self.factors {
            let p = *e * Ratio::from_integer(k);
            assert!(p.is_integer(), "exponent {e} not cleared by {k}");
            let p = p.to_integer();
            let r = b.as_rational();
            let pow = num_traits::Pow::pow(r, p.unsigned_abs() as u32);
            if p < 0 {
                acc /= pow;
            } else {
                acc *= pow;
            }
        }
        acc
    }

    /// Exact ordering of two such products.
    ///
    /// Decided from logarithms when they are far from zero relative to
    /// their rounding error, by exact powering otherwise.
    pub fn cmp_exact(&self, other: &PowerProduct) -> Ordering {
        let q = self.div(other);
        let ln = q.ln();
        let scale: f64 = q
            .factors
            .iter()
            .map(|(b, e)| (b.ln() * (*e.numer() as f64) / (*e.denom() as f64)).abs())
            .sum();
        if ln.is_finite() && ln.abs() > 1e-6 * (1.0 + scale) {
            return if ln > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        let k = q.exponent_lcm();
        q.raised_to(k).cmp(&BigRational::one())
    }

    /// Exact rational value when every exponent is an integer.
    pub fn exact_value(&self) -> Option<Scalar> {
        (self.exponent_lcm() == 1).then(|| Scalar::from_rational(self.raised_to(1)))
    }
}

/// `⌊log₂ n⌋` for `n ≥ 1`.
pub fn log2_floor(n: u64) -> u32 {
    assert!(n >= 1);
    63 - n.leading_zeros()
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn log2_ceil(n: u64) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// The number of dyadic classes the pigeonhole steps may use for counts in
/// `1..=n`: `⌊log₂ n⌋ + 1`.
pub fn dyadic_class_count(n: usize) -> u64 {
    log2_floor(n.max(1) as u64) as u64 + 1
}

/// Smallest power of two that is `≥ c`; the cap of the band `(cap/2, cap]`
/// containing `c`.
pub fn dyadic_cap(c: u64) -> u64 {
    assert!(c >= 1);
    c.next_power_of_two()
}

/// Rational enclosure `lo ≤ n^{1/4} ≤ hi` with denominators `2^bits`.
pub fn fourth_root_enclosure(n: &BigUint, bits: u32) -> (BigRational, BigRational) {
    let scaled = n << (4 * bits as usize);
    let lo = scaled.nth_root(4);
    let hi = if &lo * &lo * &lo * &lo == scaled {
        lo.clone()
    } else {
        &lo + 1u32
    };
    let den = BigInt::one() << bits as usize;
    (
        BigRational::new(BigInt::from(lo), den.clone()),
        BigRational::new(BigInt::from(hi), den),
    )
}

/// Writes `n = s⁴·m` with `m` fourth-power free. Trial division, so only
/// meant for the moderate integers energies produce.
pub fn fourth_power_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut m = n.clone();
    let mut s = BigUint::one();
    let mut p = BigUint::from(2u32);
    loop {
        let p4 = &p * &p * &p * &p;
        if p4 > m {
            break;
        }
        while (&m % &p4).is_zero() {
            m /= &p4;
            s *= &p;
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    // m may still carry a fourth power of a prime larger than m^{1/4}
    // only if m itself is that fourth power.
    let r = m.nth_root(4);
    if &r * &r * &r * &r == m && r > BigUint::one() {
        s *= &r;
        m = BigUint::one();
    }
    (s, m)
}

/// A rational printed exactly plus an approximate decimal.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExactValue {
    pub exact: Scalar,
    pub approx: f64,
}

impl From<Scalar> for ExactValue {
    fn from(exact: Scalar) -> Self {
        let approx = exact.to_f64();
        ExactValue { exact, approx }
    }
}

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}
