//! Brute-force reference implementations on `i128` fractions, sharing no
//! code with the library beyond parsing its text output.

#![allow(dead_code)]

use rand::Rng;
use sumprod::{RatSet, Scalar};

/// `(numerator, denominator)` with a positive denominator.
pub type Frac = (i128, i128);

pub fn frac(s: &Scalar) -> Frac {
    let text = s.to_string();
    match text.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (text.parse().unwrap(), 1),
    }
}

pub fn fracs(a: &RatSet) -> Vec<Frac> {
    a.iter().map(frac).collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Random set of distinct reduced fractions `n/d` with `1 ≤ |n| ≤ span`
/// and `1 ≤ d ≤ max_den`.
pub fn random_set(rng: &mut impl Rng, size: usize, span: i64, max_den: i64) -> RatSet {
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < size {
        let mut n: i64 = rng.gen_range(1..=span);
        if rng.gen_bool(0.5) {
            n = -n;
        }
        let d: i64 = rng.gen_range(1..=max_den);
        let g = gcd(n as i128, d as i128) as i64;
        seen.insert((n / g, d / g));
    }
    RatSet::new(
        seen.into_iter()
            .map(|(n, d)| Scalar::new(n, d).unwrap())
            .collect(),
    )
}

fn add(x: Frac, y: Frac) -> Frac {
    (x.0 * y.1 + y.0 * x.1, x.1 * y.1)
}

fn mul(x: Frac, y: Frac) -> Frac {
    (x.0 * y.0, x.1 * y.1)
}

fn same(x: Frac, y: Frac) -> bool {
    x.0 * y.1 == y.0 * x.1
}

/// `#{(a₁, a₂, b₁, b₂) : a₁ ∘ b₁ = a₂ ∘ b₂}` by direct enumeration.
pub fn naive_energy(a: &RatSet, b: &RatSet, multiplicative: bool) -> u64 {
    let (fa, fb) = (fracs(a), fracs(b));
    let op = |x, y| if multiplicative { mul(x, y) } else { add(x, y) };
    let mut n = 0;
    for &a1 in &fa {
        for &b1 in &fb {
            let lhs = op(a1, b1);
            for &a2 in &fa {
                for &b2 in &fb {
                    if same(lhs, op(a2, b2)) {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

/// `#{(a₁, a₂, a₃) : α₁a₁ + α₂a₂ + α₃a₃ = 0}` over all triples.
pub fn naive_sigma(alpha: [&Scalar; 3], sets: [&RatSet; 3]) -> u64 {
    let al: Vec<Frac> = alpha.iter().map(|x| frac(x)).collect();
    let fs: Vec<Vec<Frac>> = sets.iter().map(|s| fracs(s)).collect();
    let mut n = 0;
    for &x in &fs[0] {
        let t1 = mul(al[0], x);
        for &y in &fs[1] {
            let t2 = add(t1, mul(al[1], y));
            for &z in &fs[2] {
                if add(t2, mul(al[2], z)).0 == 0 {
                    n += 1;
                }
            }
        }
    }
    n
}

/// `|A ∩ λA|` for every `λ ∈ A/A`, by scanning all pairs.
pub fn naive_slice_counts(a: &RatSet) -> Vec<(Frac, u64)> {
    let fa = fracs(a);
    let mut out: Vec<(Frac, u64)> = Vec::new();
    for &x in &fa {
        for &y in &fa {
            let g = gcd(x.0 * y.1, x.1 * y.0);
            let mut l = (x.0 * y.1 / g, x.1 * y.0 / g);
            if l.1 < 0 {
                l = (-l.0, -l.1);
            }
            match out.iter_mut().find(|(k, _)| *k == l) {
                Some(e) => e.1 += 1,
                None => out.push((l, 1)),
            }
        }
    }
    out.sort_by(|p, q| (p.0 .0 * q.0 .1).cmp(&(q.0 .0 * p.0 .1)));
    out
}

/// Incidences between points and lines `ax + by = c`.
pub fn naive_incidences(points: &[(Scalar, Scalar)], lines: &[[Scalar; 3]]) -> u64 {
    let mut n = 0;
    for (x, y) in points {
        let (x, y) = (frac(x), frac(y));
        for l in lines {
            let (a, b, c) = (frac(&l[0]), frac(&l[1]), frac(&l[2]));
            let lhs = add(mul(a, x), mul(b, y));
            if same(lhs, c) {
                n += 1;
            }
        }
    }
    n
}
