//! Fast paths against brute-force enumeration.

mod support {
    pub mod oracle;
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumprod::certificates::{fiber_mult, sym_mult};
use sumprod::energy::{
    additive_energy, energy_via_slices, multiplicative_energy, sigma_count, sigma_sup,
    sigma_sup_candidates, slice_profile, third_moment,
};
use sumprod::szt::{incidences, Line, LineSet};
use sumprod::{RatSet, Scalar};
use support::oracle::*;

#[test]
fn energies_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(1..=18);
        let m = rng.gen_range(1..=18);
        let a = random_set(&mut rng, n, 12, 3);
        let b = random_set(&mut rng, m, 12, 3);
        assert_eq!(
            additive_energy(&a, &b).unwrap(),
            naive_energy(&a, &b, false)
        );
        assert_eq!(
            multiplicative_energy(&a, &b).unwrap(),
            naive_energy(&a, &b, true)
        );
    }
}

#[test]
fn slice_quantities_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = rng.gen_range(1..=20);
        let a = random_set(&mut rng, n, 10, 2);
        let naive = naive_slice_counts(&a);
        let fast: Vec<(Frac, u64)> = slice_profile(&a)
            .unwrap()
            .iter()
            .map(|(l, c)| (frac(l), *c))
            .collect();
        assert_eq!(fast, naive);
        let e2: u64 = naive.iter().map(|(_, c)| c * c).sum();
        let e3: u64 = naive.iter().map(|(_, c)| c * c * c).sum();
        assert_eq!(energy_via_slices(&a).unwrap(), e2);
        assert_eq!(third_moment(&a).unwrap(), e3);
    }
}

fn random_alpha(rng: &mut impl Rng) -> Scalar {
    let mut n: i64 = rng.gen_range(1..=6);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    Scalar::new(n, rng.gen_range(1..=4)).unwrap()
}

#[test]
fn sigma_count_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let sets: Vec<RatSet> = (0..3)
            .map(|_| {
                let n = rng.gen_range(1..=8);
                random_set(&mut rng, n, 9, 2)
            })
            .collect();
        let alpha = [
            random_alpha(&mut rng),
            random_alpha(&mut rng),
            random_alpha(&mut rng),
        ];
        let al = [&alpha[0], &alpha[1], &alpha[2]];
        let ss = [&sets[0], &sets[1], &sets[2]];
        assert_eq!(sigma_count(al, ss).unwrap(), naive_sigma(al, ss));
    }
}

#[test]
fn sigma_sup_is_the_maximum_over_its_candidates_and_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..25 {
        let sets: Vec<RatSet> = (0..3)
            .map(|_| {
                let n = rng.gen_range(1..=6);
                random_set(&mut rng, n, 8, 2)
            })
            .collect();
        let ss = [&sets[0], &sets[1], &sets[2]];
        let sup = sigma_sup(ss[0], ss[1], ss[2], 10_000).unwrap();
        let at = naive_sigma([&sup.alpha[0], &sup.alpha[1], &sup.alpha[2]], ss);
        assert_eq!(at, sup.value, "the reported maximiser attains the value");
        let cands = sigma_sup_candidates(ss[0], ss[1], ss[2], 10_000).unwrap();
        let best = cands
            .iter()
            .map(|c| naive_sigma([&c[0], &c[1], &c[2]], ss))
            .max()
            .unwrap_or(0);
        assert_eq!(best, sup.value);
        for _ in 0..20 {
            let al = [
                random_alpha(&mut rng),
                random_alpha(&mut rng),
                random_alpha(&mut rng),
            ];
            assert!(naive_sigma([&al[0], &al[1], &al[2]], ss) <= sup.value);
        }
    }
}

#[test]
fn incidences_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..20 {
        let mut pts = std::collections::BTreeSet::new();
        let np = rng.gen_range(1..=30);
        while pts.len() < np {
            pts.insert((rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4)));
        }
        let points: Vec<(Scalar, Scalar)> = pts
            .into_iter()
            .map(|(x, y)| (Scalar::from(x), Scalar::from(y)))
            .collect();
        let mut raw: Vec<[Scalar; 3]> = Vec::new();
        let mut lines = Vec::new();
        for _ in 0..rng.gen_range(1..=25) {
            let (a, b) = loop {
                let a: i64 = rng.gen_range(-2..=2);
                let b: i64 = rng.gen_range(-2..=2);
                if a != 0 || b != 0 {
                    break (a, b);
                }
            };
            let c: i64 = rng.gen_range(-4..=4);
            let l = Line::new(a.into(), b.into(), c.into()).unwrap();
            if lines.contains(&l) {
                continue;
            }
            lines.push(l);
            raw.push([a.into(), b.into(), c.into()]);
        }
        let set = LineSet::new(lines).unwrap();
        let r = incidences(&points, &set).unwrap();
        assert_eq!(r.count, naive_incidences(&points, &raw));
    }
}

#[test]
fn symmetry_sets_match_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..20 {
        let nq = rng.gen_range(1..=10);
        let nr = rng.gen_range(1..=10);
        let q = random_set(&mut rng, nq, 8, 2);
        let r = random_set(&mut rng, nr, 8, 2);
        let (fq, fr) = (fracs(&q), fracs(&r));
        for t in 1..=3u64 {
            let sym = sym_mult(&q, &r, t).unwrap();
            for x in q.productset(&r).unwrap().iter() {
                let fx = frac(x);
                let pairs = fq
                    .iter()
                    .flat_map(|a| fr.iter().map(move |b| (a, b)))
                    .filter(|(a, b)| a.0 * b.0 * fx.1 == fx.0 * a.1 * b.1)
                    .count() as u64;
                assert_eq!(fiber_mult(&q, &r, x) as u64, pairs);
                assert_eq!(sym.contains(x), pairs >= t);
            }
        }
    }
}
