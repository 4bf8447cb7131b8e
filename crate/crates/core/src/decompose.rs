//! Dyadic pigeonhole extraction and the iterative low-energy decompositions.
//!
//! A count `c ≥ 1` falls in the band `(cap/2, cap]` with `cap` the power of
//! two at or above `c`; the band's level is `cap/2`, so
//! `level < c ≤ 2·level`. Counts bounded by `n` use at most
//! `⌊log₂ n⌋ + 1` bands, which is the log factor in every realized bound.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::certificates::{dplus_cert_from_sym, dstar_cert_from_sym, SymCertificate, SymKind};
use crate::energy::{
    additive_energy, energy_subadditivity_check, multiplicative_energy, EnergyKind, EnergyValue,
    RepFunction, SetOp,
};
use crate::error::{domain, Error, Result};
use crate::exact::{dyadic_cap, dyadic_class_count, PowerProduct};
use crate::scalar::Scalar;
use crate::set::RatSet;

/// One dyadic band of a counting function.
#[derive(Clone, Debug, Serialize)]
pub struct PigeonholeSlice {
    /// Band cap, a power of two.
    pub cap: u64,
    /// `cap/2`; every member's count `c` has `level < c ≤ 2·level`.
    pub level: Scalar,
    pub members: RatSet,
    /// Σ of the members' counts.
    pub mass: u64,
    /// What was counted.
    pub source: String,
}

fn bands(counts: &[(Scalar, u64)]) -> BTreeMap<u64, Vec<(Scalar, u64)>> {
    let mut out: BTreeMap<u64, Vec<(Scalar, u64)>> = BTreeMap::new();
    for (x, c) in counts {
        if *c > 0 {
            out.entry(dyadic_cap(*c)).or_default().push((x.clone(), *c));
        }
    }
    out
}

fn make_slice(cap: u64, members: Vec<(Scalar, u64)>, source: &str) -> PigeonholeSlice {
    PigeonholeSlice {
        cap,
        level: Scalar::from(cap) / Scalar::from(2u64),
        mass: members.iter().map(|m| m.1).sum(),
        members: RatSet::new(members.into_iter().map(|m| m.0).collect()),
        source: source.to_string(),
    }
}

/// Output of [`pigeonhole_extract`].
#[derive(Clone, Debug, Serialize)]
pub struct PigeonholeExtract {
    pub a_prime: RatSet,
    /// The band cap; every `x ∈ A'` has `q/2 < c(x) ≤ q`.
    pub q: u64,
    pub slice: PigeonholeSlice,
    /// `Σ_{x∈P} |A ∩ xA|` (or `|A ∩ (x + A)|`).
    pub sigma_star: u64,
    pub class_count: u64,
    /// `|A'|·q·(⌊log₂|A|⌋ + 1) ≥ σ_*`.
    pub guarantee_holds: bool,
    /// `A' ⊆ Sym_t(P, A)` with `t = min c(x)` over `A'`.
    #[serde(skip)]
    pub certificate: SymCertificate,
    pub certificate_value: Scalar,
}

/// Dyadic pigeonhole on `c(x) = |P ∩ xA⁻¹|` (multiplicative) or
/// `|P ∩ (x − A)|` (additive) over `x ∈ A`.
///
/// `Σ_x c(x) = σ_*`. The band maximising `|band|·q` is returned, ties to
/// the smaller `q`.
pub fn pigeonhole_extract(a: &RatSet, p: &RatSet, mode: SymKind) -> Result<PigeonholeExtract> {
    a.require_nonempty("A")?;
    p.require_nonempty("P")?;
    if mode == SymKind::Multiplicative {
        a.require_no_zero("A")?;
        p.require_no_zero("P")?;
    }
    let counts: Vec<(Scalar, u64)> = a
        .iter()
        .map(|x| {
            let c = a
                .iter()
                .filter(|y| match mode {
                    SymKind::Multiplicative => p.contains(&(x / *y)),
                    SymKind::Additive => p.contains(&(x - *y)),
                })
                .count() as u64;
            (x.clone(), c)
        })
        .collect();
    let sigma_star: u64 = counts.iter().map(|c| c.1).sum();
    if sigma_star == 0 {
        return domain("σ_* = 0: no element of P is a ratio (difference) of A");
    }
    let bands = bands(&counts);
    // BTreeMap iterates caps upward, so strict improvement keeps the
    // smaller q on ties.
    let (cap, members) = bands
        .into_iter()
        .fold(
            None::<(u64, Vec<(Scalar, u64)>)>,
            |best, (cap, m)| match best {
                Some((bc, bm)) if (bm.len() as u64) * bc >= (m.len() as u64) * cap => {
                    Some((bc, bm))
                }
                _ => Some((cap, m)),
            },
        )
        .expect("σ_* > 0 gives a nonempty band");
    let t = members.iter().map(|m| m.1).min().expect("nonempty band");
    let source = match mode {
        SymKind::Multiplicative => "|P ∩ xA^-1|",
        SymKind::Additive => "|P ∩ (x - A)|",
    };
    let slice = make_slice(cap, members, source);
    let a_prime = slice.members.clone();
    let class_count = dyadic_class_count(a.len());
    let guarantee_holds =
        a_prime.len() as u128 * cap as u128 * class_count as u128 >= sigma_star as u128;
    let certificate = match mode {
        SymKind::Multiplicative => dstar_cert_from_sym(&a_prime, p, a, t)?,
        SymKind::Additive => dplus_cert_from_sym(&a_prime, p, a, t)?,
    };
    Ok(PigeonholeExtract {
        a_prime,
        q: cap,
        slice,
        sigma_star,
        class_count,
        guarantee_holds,
        certificate_value: certificate.value.clone(),
        certificate,
    })
}

/// Output of [`low_energy_subset`].
#[derive(Clone, Debug, Serialize)]
pub struct LowEnergySubset {
    pub flavor: SymKind,
    pub a1: RatSet,
    pub delta: Scalar,
    pub p: RatSet,
    /// `E₃` of the driving energy: `Σ_x |A ∩ xA|³` or `Σ_x |A ∩ (x + A)|³`.
    pub third_moment: EnergyValue,
    /// The driving energy: `E^×(A)` (multiplicative) or `E⁺(A)` (additive).
    pub energy: EnergyValue,
    /// The other energy of `A₁`: `E⁺(A₁)` or `E^×(A₁)`. `None` when `A₁`
    /// contains 0 in the additive flavor.
    pub other_energy: Option<EnergyValue>,
    pub extract_q: u64,
    pub sigma_star: u64,
    /// `2(⌊log₂|A|⌋ + 1)²`.
    pub c_log: u64,
    /// `|A₁|·c_log·|A|² ≥ E`, asserted.
    pub size_bound_holds: bool,
    /// `E ≥ Δ²|P|`, asserted.
    pub second_moment_holds: bool,
    /// `|A₁||A|²/E`, exact.
    pub size_ratio: Scalar,
    /// `E'(A₁)·E/(|A₁|^{7/2}|A|²)`, approximate, report-only.
    pub energy_ratio: Option<f64>,
    /// `E'(A₁)·E ≤ |A₁|^{7/2}|A|²` with constant 1, report-only.
    pub energy_bound_holds: Option<bool>,
}

/// Finds `A₁ ⊆ A` of size about `E(A)/|A|²` with small other energy.
///
/// The multiplicative flavor pigeonholes `λ ↦ |A ∩ λA|` over `A/A` into
/// bands, keeps the band `P` maximising `Δ³|P|` (ties to the larger `Δ`),
/// then runs [`pigeonhole_extract`] with that `P`. The additive flavor does the
/// same with `x ↦ |A ∩ (x + A)|` over `A − A`.
pub fn low_energy_subset(a: &RatSet, flavor: SymKind) -> Result<LowEnergySubset> {
    a.require_nonempty("A")?;
    let (op, source) = match flavor {
        SymKind::Multiplicative => {
            a.require_no_zero("A")?;
            (SetOp::Div, "|A ∩ xA|")
        }
        SymKind::Additive => (SetOp::Sub, "|A ∩ (x + A)|"),
    };
    let rep = RepFunction::build(a, a, op)?;
    let third_moment = rep.moment(3);
    let energy = rep.moment(2);
    let counts = rep.sorted();
    let (cap, members) = bands(&counts)
        .into_iter()
        .fold(None::<(u64, Vec<(Scalar, u64)>)>, |best, (cap, m)| {
            // Δ³|P| with Δ = cap/2, compared as cap³|P|; later caps win ties
            let score = |c: u64, len: usize| (c as u128).pow(3) * len as u128;
            match best {
                Some((bc, bm)) if score(bc, bm.len()) > score(cap, m.len()) => Some((bc, bm)),
                _ => Some((cap, m)),
            }
        })
        .expect("nonempty A has a nonzero count");
    let slice = make_slice(cap, members, source);
    let delta = slice.level.clone();
    let p = slice.members.clone();
    let second_moment_holds = energy.to_scalar() >= &delta * &delta * Scalar::from(p.len());

    let l19 = pigeonhole_extract(a, &p, flavor)?;
    let a1 = l19.a_prime;
    let n = dyadic_class_count(a.len());
    let c_log = 2 * n * n;
    let a_sq = (a.len() * a.len()) as u128;
    let size_bound_holds = EnergyValue::from(a1.len() as u128 * c_log as u128 * a_sq) >= energy;
    let size_ratio = Scalar::from(a1.len()) * Scalar::from(a.len() * a.len()) / energy.to_scalar();

    let other_energy = match flavor {
        SymKind::Multiplicative => Some(additive_energy(&a1, &a1)?),
        SymKind::Additive if a1.excludes_zero() => Some(multiplicative_energy(&a1, &a1)?),
        SymKind::Additive => None,
    };
    let (energy_ratio, energy_bound_holds) = match &other_energy {
        Some(e1) => {
            let lhs = PowerProduct::of(e1.to_scalar()).times(energy.to_scalar(), 1, 1);
            let rhs = PowerProduct::one()
                .times(a1.len(), 7, 2)
                .times(a.len(), 2, 1);
            (
                Some(lhs.div(&rhs).to_f64()),
                Some(lhs.cmp_exact(&rhs) != Ordering::Greater),
            )
        }
        None => (None, None),
    };
    Ok(LowEnergySubset {
        flavor,
        a1,
        delta,
        p,
        third_moment,
        energy,
        other_energy,
        extract_q: l19.q,
        sigma_star: l19.sigma_star,
        c_log,
        size_bound_holds,
        second_moment_holds,
        size_ratio,
        energy_ratio,
        energy_bound_holds,
    })
}

/// The decomposition parameter `M`.
#[derive(Clone, Debug, PartialEq)]
pub enum MParam {
    /// `M = |A|^{1/5}`, kept as an exact power.
    Auto,
    Value(Scalar),
}

impl MParam {
    fn as_power(&self, n: usize) -> Result<PowerProduct> {
        match self {
            MParam::Auto => Ok(PowerProduct::one().times(n, 1, 5)),
            MParam::Value(m) if *m >= Scalar::one() => Ok(PowerProduct::of(m.clone())),
            MParam::Value(m) => domain(format!("M must be at least 1, got {m}")),
        }
    }

    fn describe(&self, n: usize) -> String {
        match self {
            MParam::Auto => format!("{n}^(1/5)"),
            MParam::Value(m) => m.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub j: usize,
    pub d: RatSet,
    pub delta: Scalar,
    pub p: RatSet,
    /// `E^×(C_j)`, before removing `D_j`.
    pub mult_energy_c: EnergyValue,
    pub add_energy_d: EnergyValue,
    pub c_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionResult {
    pub a_len: usize,
    pub b: RatSet,
    pub c: RatSet,
    pub m: String,
    pub steps: Vec<StepRecord>,
    pub stop_reason: String,
    pub add_energy_b: EnergyValue,
    pub mult_energy_c: EnergyValue,
    /// `E^×(C)·M ≤ |A|³`, asserted at exit.
    pub exit_condition_holds: bool,
    pub partition_holds: bool,
    /// `max{E⁺(B), E^×(C)}`.
    pub max_energy: EnergyValue,
    /// `max/|A|^{14/5}`, approximate.
    pub ratio_fifth: f64,
    /// `max/|A|^{3−2/33}`, approximate.
    pub ratio_benchmark: f64,
    /// `|A|^{14/5} < |A|^{3−2/33}`, exact (true for `|A| > 1`).
    pub exponent_order_holds: bool,
}

impl DecompositionResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,d_len,delta,mult_energy_c,add_energy_d\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.j,
                s.d.len(),
                s.delta,
                s.mult_energy_c,
                s.add_energy_d
            ));
        }
        out
    }
}

fn energy_power(e: &EnergyValue) -> Option<PowerProduct> {
    PowerProduct::of_scalar(&e.to_scalar())
}

/// Splits `A = B ⊔ C` with `E⁺(B)` and `E^×(C)` both small.
///
/// Repeatedly peels `D_j = A₁(C_j)` off `C_j` until `E^×(C_j)·M ≤ |A|³`.
pub fn split_low_energy(a: &RatSet, m: &MParam) -> Result<DecompositionResult> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let n = a.len();
    let m_pow = m.as_power(n)?;
    let cube = PowerProduct::of(Scalar::from(n)).times(n, 2, 1);
    let mut c = a.clone();
    let mut b = RatSet::empty();
    let mut steps = Vec::new();
    let mut energy_c;
    loop {
        energy_c = if c.is_empty() {
            EnergyValue::default()
        } else {
            multiplicative_energy(&c, &c)?
        };
        let stop = match energy_power(&energy_c) {
            None => true,
            Some(e) => e.mul(&m_pow).cmp_exact(&cube) != Ordering::Greater,
        };
        if stop {
            break;
        }
        let t20 = low_energy_subset(&c, SymKind::Multiplicative)?;
        if t20.a1.is_empty() {
            return Err(Error::Internal("empty extraction step".into()));
        }
        let d = t20.a1;
        steps.push(StepRecord {
            j: steps.len() + 1,
            add_energy_d: additive_energy(&d, &d)?,
            delta: t20.delta,
            p: t20.p,
            mult_energy_c: energy_c.clone(),
            c_len: c.len(),
            d: d.clone(),
        });
        c = c.difference(&d);
        b = b.union(&d);
    }
    let add_energy_b = if b.is_empty() {
        EnergyValue::default()
    } else {
        additive_energy(&b, &b)?
    };
    let exit_condition_holds = match energy_power(&energy_c) {
        None => true,
        Some(e) => e.mul(&m_pow).cmp_exact(&cube) != Ordering::Greater,
    };
    let partition_holds = b.is_disjoint(&c) && b.union(&c) == *a;
    let max_energy = add_energy_b.clone().max(energy_c.clone());
    let fifth = PowerProduct::one().times(n, 14, 5);
    let bench = PowerProduct::one().times(n, 97, 33);
    let (ratio_fifth, ratio_benchmark) = match energy_power(&max_energy) {
        Some(e) => (e.div(&fifth).to_f64(), e.div(&bench).to_f64()),
        None => (0.0, 0.0),
    };
    Ok(DecompositionResult {
        a_len: n,
        b,
        c,
        m: m.describe(n),
        steps,
        stop_reason: "threshold".into(),
        add_energy_b,
        mult_energy_c: energy_c,
        exit_condition_holds,
        partition_holds,
        max_energy,
        ratio_fifth,
        ratio_benchmark,
        exponent_order_holds: fifth.cmp_exact(&bench) == Ordering::Less,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowStep {
    pub j: usize,
    pub b_len: usize,
    /// `E(B_{j−1})`, driving energy.
    pub energy_b: EnergyValue,
    /// `E(C_j)`.
    pub energy_c: EnergyValue,
    /// `8·E(B_{j−1}) ≤ E(A)`, asserted.
    pub small_b_holds: bool,
    /// `E(A)^{1/4} ≤ E(C_j)^{1/4} + E(B_{j−1})^{1/4}`, asserted.
    pub subadditivity_holds: bool,
    /// `16·E(C_j) ≥ E(A)`, report-only (see the module notes on the
    /// constant).
    pub half_root_holds: bool,
    pub d_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowResult {
    pub flavor: SymKind,
    pub a1: RatSet,
    pub energy: EnergyValue,
    pub steps: Vec<GrowStep>,
    /// `8|A₁|³ > E(A)`, asserted.
    pub size_bound_holds: bool,
    /// `E'(A₁)`: `E⁺(A₁)` for the multiplicative flavor.
    pub other_energy: Option<EnergyValue>,
    /// `E'(A₁)·E(A)/|A|^{11/2}`, approximate.
    pub ratio: Option<f64>,
    /// `(E'(A₁)E(A))² ≤ |A|^{11}`, report-only.
    pub ratio_bound_holds: Option<bool>,
}

/// Grows `A₁` by repeated extraction until `8|A₁|³ > E(A)`.
///
/// While `8|B|³ ≤ E(A)`, `E(B) ≤ |B|³ ≤ E(A)/8`, so energy subadditivity
/// keeps `E(C)^{1/4} ≥ (1 − 8^{−1/4})·E(A)^{1/4}`.
pub fn grow_low_energy(a: &RatSet, flavor: SymKind) -> Result<GrowResult> {
    a.require_nonempty("A")?;
    let kind = match flavor {
        SymKind::Multiplicative => {
            a.require_no_zero("A")?;
            EnergyKind::Multiplicative
        }
        SymKind::Additive => EnergyKind::Additive,
    };
    let energy = kind.energy(a)?;
    let e_a = energy.as_biguint().clone();
    let mut b = RatSet::empty();
    let mut c = a.clone();
    let mut steps = Vec::new();
    loop {
        let b_len = num_bigint::BigUint::from(b.len());
        if b_len.pow(3u32) * 8u32 > e_a {
            break;
        }
        let energy_b = if b.is_empty() {
            EnergyValue::default()
        } else {
            kind.energy(&b)?
        };
        let energy_c = kind.energy(&c)?;
        let small_b_holds = energy_b.as_biguint() * 8u32 <= e_a;
        let subadditivity_holds = if b.is_empty() {
            energy_c == energy
        } else {
            energy_subadditivity_check(&[c.clone(), b.clone()], kind)?.holds
        };
        let half_root_holds = energy_c.as_biguint() * 16u32 >= e_a;
        let d = low_energy_subset(&c, flavor)?.a1;
        if d.is_empty() {
            return Err(Error::Internal("empty extraction step".into()));
        }
        steps.push(GrowStep {
            j: steps.len() + 1,
            b_len: b.len(),
            energy_b,
            energy_c,
            small_b_holds,
            subadditivity_holds,
            half_root_holds,
            d_len: d.len(),
        });
        c = c.difference(&d);
        b = b.union(&d);
    }
    let size_bound_holds = num_bigint::BigUint::from(b.len()).pow(3u32) * 8u32 > e_a;
    let other_energy = match flavor {
        SymKind::Multiplicative => Some(additive_energy(&b, &b)?),
        SymKind::Additive if b.excludes_zero() => Some(multiplicative_energy(&b, &b)?),
        SymKind::Additive => None,
    };
    let (ratio, ratio_bound_holds) = match &other_energy {
        Some(e1) => {
            let lhs = PowerProduct::of(e1.to_scalar()).times(energy.to_scalar(), 1, 1);
            let rhs = PowerProduct::one().times(a.len(), 11, 2);
            (
                Some(lhs.div(&rhs).to_f64()),
                Some(lhs.cmp_exact(&rhs) != Ordering::Greater),
            )
        }
        None => (None, None),
    };
    Ok(GrowResult {
        flavor,
        a1: b,
        energy,
        steps,
        size_bound_holds,
        other_energy,
        ratio,
        ratio_bound_holds,
    })
}
