//! Invariants over random small rational sets.

use num_bigint::BigUint;
use proptest::prelude::*;
use sumprod::certificates::{d_cert, PiMode, SymKind};
use sumprod::decompose::{low_energy_subset, pigeonhole_extract, split_low_energy, MParam};
use sumprod::energy::{
    additive_energy, energy_subadditivity_check, multiplicative_energy, EnergyKind,
};
use sumprod::tracer::{trace_sum_product, trace_sumset_ratio, SumsetRatioConfig};
use sumprod::{RatSet, Scalar};

fn nonzero() -> impl Strategy<Value = Scalar> {
    (1i64..=40, 1i64..=6, any::<bool>()).prop_map(|(n, d, neg)| {
        let n = if neg { -n } else { n };
        Scalar::new(n, d).unwrap()
    })
}

fn set(max: usize) -> impl Strategy<Value = RatSet> {
    prop::collection::vec(nonzero(), 1..=max).prop_map(RatSet::new)
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn energy_lies_between_square_and_cube(a in set(14)) {
        let n = a.len();
        for e in [additive_energy(&a, &a).unwrap(), multiplicative_energy(&a, &a).unwrap()] {
            prop_assert!(*e.as_biguint() >= big(n * n));
            prop_assert!(*e.as_biguint() <= big(n * n * n));
        }
    }

    #[test]
    fn energies_are_affine_invariant(a in set(12), c in nonzero(), t in nonzero()) {
        let e_add = additive_energy(&a, &a).unwrap();
        let e_mul = multiplicative_energy(&a, &a).unwrap();
        let moved = a.translate(&t);
        let scaled = a.dilate(&c).unwrap();
        prop_assert_eq!(additive_energy(&moved, &moved).unwrap(), e_add.clone());
        prop_assert_eq!(additive_energy(&scaled, &scaled).unwrap(), e_add);
        prop_assert_eq!(multiplicative_energy(&scaled, &scaled).unwrap(), e_mul.clone());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(multiplicative_energy(&inv, &inv).unwrap(), e_mul);
    }

    #[test]
    fn cauchy_schwarz_holds(a in set(10), b in set(10)) {
        let e_ab = additive_energy(&a, &b).unwrap();
        let lhs = big(a.len() * a.len() * b.len() * b.len());
        prop_assert!(lhs <= e_ab.as_biguint() * big(a.sumset(&b).unwrap().len()));
        let e_aa = additive_energy(&a, &a).unwrap();
        let e_bb = additive_energy(&b, &b).unwrap();
        prop_assert!(e_ab.as_biguint().pow(2) <= e_aa.as_biguint() * e_bb.as_biguint());
        let m_ab = multiplicative_energy(&a, &b).unwrap();
        prop_assert!(lhs <= m_ab.as_biguint() * big(a.productset(&b).unwrap().len()));
    }

    #[test]
    fn energy_is_quarter_subadditive(a in set(16), mask in any::<u32>()) {
        let left = a.select(|i, _| mask >> (i % 32) & 1 == 1);
        let right = a.difference(&left);
        prop_assume!(!left.is_empty() && !right.is_empty());
        for kind in [EnergyKind::Additive, EnergyKind::Multiplicative] {
            let r = energy_subadditivity_check(&[left.clone(), right.clone()], kind).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.rhs_lower <= r.rhs_upper);
        }
    }

    #[test]
    fn witnessed_certificates_verify(a in set(10), c in set(6)) {
        let d = d_cert(&a, &c).unwrap();
        let cert = d.induced(&a).unwrap();
        cert.verify(&a).unwrap();
        prop_assert_eq!(cert.value, d.value);
    }

    #[test]
    fn traces_recheck_and_repeat(a in set(8)) {
        for mode in [PiMode::Quotient, PiMode::Product] {
            let t = trace_sum_product(&a, mode).unwrap();
            t.recheck().unwrap();
            prop_assert_eq!(t.to_json(), trace_sum_product(&a, mode).unwrap().to_json());
        }
        let t = trace_sumset_ratio(&a, &SumsetRatioConfig::default()).unwrap();
        prop_assert_eq!(t.to_json(), trace_sumset_ratio(&a, &SumsetRatioConfig::default()).unwrap().to_json());
    }

    #[test]
    fn extraction_guarantees_hold(a in set(12), p in set(6)) {
        let quot = a.quotientset(&a).unwrap();
        let p = p.union(&RatSet::singleton(quot.iter().next().unwrap().clone()));
        let r = pigeonhole_extract(&a, &p, SymKind::Multiplicative).unwrap();
        prop_assert!(r.guarantee_holds);
        prop_assert!(r.a_prime.is_subset(&a));
        r.certificate.verify(&r.a_prime).unwrap();
        for flavor in [SymKind::Multiplicative, SymKind::Additive] {
            let t = low_energy_subset(&a, flavor).unwrap();
            prop_assert!(t.second_moment_holds);
            prop_assert!(t.a1.is_subset(&a));
        }
    }

    #[test]
    fn decomposition_partitions(a in set(16)) {
        let r = split_low_energy(&a, &MParam::Auto).unwrap();
        prop_assert!(r.partition_holds);
        prop_assert!(r.exit_condition_holds);
        prop_assert_eq!(r.b.len() + r.c.len(), a.len());
    }

    #[test]
    fn text_round_trips(a in set(20)) {
        prop_assert_eq!(RatSet::parse_text(&a.to_text()).unwrap(), a.clone());
        prop_assert_eq!(RatSet::parse_any(&a.to_json()).unwrap(), a);
    }
}
