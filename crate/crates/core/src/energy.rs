//! Representation functions and energies.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::exact::{fourth_power_split, fourth_root_enclosure, rat};
use crate::scalar::Scalar;
use crate::set::RatSet;

/// An exact nonnegative count: energies, solution counts, incidences.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EnergyValue(BigUint);

impl EnergyValue {
    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_int(num_bigint::BigInt::from(self.0.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<u64> for EnergyValue {
    fn from(n: u64) -> Self {
        EnergyValue(BigUint::from(n))
    }
}

impl From<u128> for EnergyValue {
    fn from(n: u128) -> Self {
        EnergyValue(BigUint::from(n))
    }
}

impl From<BigUint> for EnergyValue {
    fn from(n: BigUint) -> Self {
        EnergyValue(n)
    }
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for EnergyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl PartialEq<u64> for EnergyValue {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl SetOp {
    fn apply(self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            SetOp::Add => a + b,
            SetOp::Sub => a - b,
            SetOp::Mul => a * b,
            SetOp::Div => a / b,
        }
    }
}

/// `r(s) = #{(a, b) ∈ A × B : a ∘ b = s}`.
#[derive(Clone, Debug)]
pub struct RepFunction {
    counts: HashMap<Scalar, u64>,
    total: u64,
}

impl RepFunction {
    pub fn build(a: &RatSet, b: &RatSet, op: SetOp) -> Result<RepFunction> {
        a.require_nonempty("A")?;
        b.require_nonempty("B")?;
        if op == SetOp::Div {
            b.require_no_zero("divisor set")?;
        }
        let mut counts: HashMap<Scalar, u64> = HashMap::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                *counts.entry(op.apply(x, y)).or_insert(0) += 1;
            }
        }
        Ok(RepFunction {
            counts,
            total: (a.len() * b.len()) as u64,
        })
    }

    pub fn get(&self, s: &Scalar) -> u64 {
        self.counts.get(s).copied().unwrap_or(0)
    }

    /// Always `|A||B|`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn support(&self) -> RatSet {
        RatSet::new(self.counts.keys().cloned().collect())
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.values().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Scalar, u64)> + '_ {
        self.counts.iter().map(|(k, v)| (k, *v))
    }

    /// `Σ_s r(s)^k`.
    pub fn moment(&self, k: u32) -> EnergyValue {
        let mut acc: u128 = 0;
        for &v in self.counts.values() {
            acc += (v as u128).pow(k);
        }
        EnergyValue::from(acc)
    }

    /// Entries in canonical (ascending) order of `s`.
    pub fn sorted(&self) -> Vec<(Scalar, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        v
    }
}

/// `E⁺(A, B) = Σ_s r_{A+B}(s)²`.
pub fn additive_energy(a: &RatSet, b: &RatSet) -> Result<EnergyValue> {
    Ok(RepFunction::build(a, b, SetOp::Add)?.moment(2))
}

/// `E^×(A, B) = Σ_s r_{AB}(s)²`; both sets must exclude 0.
pub fn multiplicative_energy(a: &RatSet, b: &RatSet) -> Result<EnergyValue> {
    a.require_no_zero("A")?;
    b.require_no_zero("B")?;
    Ok(RepFunction::build(a, b, SetOp::Mul)?.moment(2))
}

/// `E^×(A)` computed as `Σ_{λ ∈ A/A} |A ∩ λA|²`, one slice at a time.
///
/// Deliberately independent of [`RepFunction`]: each slice is a sorted merge
/// of `A` against `λA`.
pub fn energy_via_slices(a: &RatSet) -> Result<EnergyValue> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let quotients = a.quotientset(a)?;
    let total: u128 = quotients
        .as_slice()
        .par_iter()
        .map(|l| {
            let n = a.slice_len(l).expect("nonzero quotient") as u128;
            n * n
        })
        .sum();
    Ok(EnergyValue::from(total))
}

/// `E₃^×(A) = Σ_x |A ∩ xA|³`.
pub fn third_moment(a: &RatSet) -> Result<EnergyValue> {
    a.require_no_zero("A")?;
    Ok(RepFunction::build(a, a, SetOp::Div)?.moment(3))
}

/// The slice-size profile `λ ↦ |A_λ|` over `λ ∈ A/A`, canonical order.
///
/// `|A ∩ λA| = #{(a, b) ∈ A² : a/b = λ}`, so this is the quotient
/// representation function.
pub fn slice_profile(a: &RatSet) -> Result<Vec<(Scalar, u64)>> {
    a.require_no_zero("A")?;
    Ok(RepFunction::build(a, a, SetOp::Div)?.sorted())
}

/// All slices `A_λ` at once, keyed by `λ`, members in canonical order.
pub fn slices(a: &RatSet) -> Result<BTreeMap<Scalar, RatSet>> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let mut groups: HashMap<Scalar, Vec<Scalar>> = HashMap::new();
    for x in a {
        for y in a {
            // x = λ·y with y ∈ A, so x ∈ A ∩ λA
            groups.entry(x / y).or_default().push(x.clone());
        }
    }
    Ok(groups
        .into_iter()
        .map(|(l, v)| (l, RatSet::new(v)))
        .collect())
}

/// `σ(α₁A₁, α₂A₂, α₃A₃)`: solutions of `α₁a₁ + α₂a₂ + α₃a₃ = 0`.
pub fn sigma_count(alpha: [&Scalar; 3], sets: [&RatSet; 3]) -> Result<EnergyValue> {
    Ok(EnergyValue::from(sigma_count_u64(alpha, sets)?))
}

pub(crate) fn sigma_count_u64(alpha: [&Scalar; 3], sets: [&RatSet; 3]) -> Result<u64> {
    if alpha.iter().any(|x| x.is_zero()) {
        return domain("σ coefficients must be nonzero");
    }
    for (i, s) in sets.iter().enumerate() {
        s.require_nonempty(&format!("A{}", i + 1))?;
    }
    let mut n = 0u64;
    for a1 in sets[0] {
        let t1 = alpha[0] * a1;
        for a2 in sets[1] {
            let a3 = -((&t1 + &(alpha[1] * a2)) / alpha[2].clone());
            if sets[2].contains(&a3) {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Default cap on `|A₁||A₂||A₃|` for [`sigma_sup`].
pub const SIGMA_SUP_BUDGET: u64 = 10_000;

/// The maximum of `σ(α₁A₁, α₂A₂, α₃A₃)` over all nonzero real coefficients,
/// together with a maximising coefficient triple normalised to `α₁ = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaSup {
    pub value: u64,
    pub alpha: [Scalar; 3],
    pub lines: usize,
    pub candidates: usize,
}

// Each triple (a₁, a₂, a₃) constrains (α₂, α₃) to the line
// a₂α₂ + a₃α₃ = −a₁, stored as (c₂, c₃, c₀) scaled so the first nonzero of
// (c₂, c₃) is 1.
type LineKey = (Scalar, Scalar, Scalar);

enum Constraint {
    Always,
    Never,
    Line(LineKey),
}

fn constraint(a1: &Scalar, a2: &Scalar, a3: &Scalar) -> Constraint {
    let c0 = -a1;
    if a2.is_zero() && a3.is_zero() {
        return if c0.is_zero() {
            Constraint::Always
        } else {
            Constraint::Never
        };
    }
    let lead = if a2.is_zero() { a3 } else { a2 };
    Constraint::Line((a2 / lead, a3 / lead, c0 / lead.clone()))
}

fn on_line(l: &LineKey, p: &(Scalar, Scalar)) -> bool {
    &(&l.0 * &p.0) + &(&l.1 * &p.1) == l.2
}

fn has_admissible_point(l: &LineKey) -> bool {
    // α₂ = 0 or α₃ = 0 identically along the line
    !((l.1.is_zero() || l.0.is_zero()) && l.2.is_zero())
}

fn intersect(l: &LineKey, m: &LineKey) -> Option<(Scalar, Scalar)> {
    let det = &(&l.0 * &m.1) - &(&l.1 * &m.0);
    if det.is_zero() {
        return None;
    }
    let x = (&(&l.2 * &m.1) - &(&l.1 * &m.2)) / det.clone();
    let y = (&(&l.0 * &m.2) - &(&l.2 * &m.0)) / det;
    Some((x, y))
}

struct LineSystem {
    always: u64,
    lines: Vec<(LineKey, u64)>,
}

impl LineSystem {
    fn build(sets: [&RatSet; 3], budget: u64) -> Result<LineSystem> {
        for (i, s) in sets.iter().enumerate() {
            s.require_nonempty(&format!("A{}", i + 1))?;
        }
        let size = sets.iter().map(|s| s.len() as u64).product::<u64>();
        if size > budget {
            return Err(Error::Budget(format!(
                "|A1||A2||A3| = {size} exceeds the σ-sup budget {budget}"
            )));
        }
        let mut always = 0;
        let mut lines: BTreeMap<LineKey, u64> = BTreeMap::new();
        for a1 in sets[0] {
            for a2 in sets[1] {
                for a3 in sets[2] {
                    match constraint(a1, a2, a3) {
                        Constraint::Always => always += 1,
                        Constraint::Never => {}
                        Constraint::Line(k) => *lines.entry(k).or_insert(0) += 1,
                    }
                }
            }
        }
        Ok(LineSystem {
            always,
            lines: lines.into_iter().collect(),
        })
    }

    /// A point on line `i` with both coordinates nonzero and on no other
    /// line. Parameters are tried in the order 1, −1, 2, −2, …
    fn generic_point(&self, i: usize) -> (Scalar, Scalar) {
        let l = &self.lines[i].0;
        let mut k: i64 = 1;
        loop {
            let t = Scalar::from(k);
            let p = if !l.1.is_zero() {
                let y = (&l.2 - &(&l.0 * &t)) / l.1.clone();
                (t, y)
            } else {
                (l.2.clone() / l.0.clone(), t)
            };
            let ok = !p.0.is_zero()
                && !p.1.is_zero()
                && self
                    .lines
                    .iter()
                    .enumerate()
                    .all(|(j, (m, _))| j == i || !on_line(m, &p));
            if ok {
                return p;
            }
            k = if k > 0 { -k } else { -k + 1 };
        }
    }
}

/// Best intersection point among lines `j > i` meeting line `i`, with the
/// count contributed by lines `i..`. Exact for any point whose first line is
/// `i`, an underestimate otherwise.
fn best_through(sys: &LineSystem, i: usize) -> Option<(u64, (Scalar, Scalar))> {
    let (li, mi) = &sys.lines[i];
    let mut local: HashMap<(Scalar, Scalar), u64> = HashMap::new();
    for (lj, mj) in &sys.lines[i + 1..] {
        if let Some(p) = intersect(li, lj) {
            if !p.0.is_zero() && !p.1.is_zero() {
                *local.entry(p).or_insert(0) += mj;
            }
        }
    }
    local
        .into_iter()
        .map(|(p, c)| (c + mi, p))
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
}

/// Exact supremum of `σ` over nonzero real coefficients.
///
/// The coefficients are normalised to `α₁ = 1`. Every solution triple
/// constrains `(α₂, α₃)` to a line; the count at a point is the number of
/// triples whose line passes through it. The maximum is attained either at
/// an intersection of two distinct lines or at a generic point of a single
/// line, and both kinds of point are rational. Ties prefer intersection
/// points and, among those, the lexicographically smallest `(α₂, α₃)`.
pub fn sigma_sup(a1: &RatSet, a2: &RatSet, a3: &RatSet, budget: u64) -> Result<SigmaSup> {
    let sys = LineSystem::build([a1, a2, a3], budget)?;
    let n = sys.lines.len();
    let best_cross = (0..n)
        .into_par_iter()
        .filter_map(|i| best_through(&sys, i))
        .reduce_with(|a, b| {
            if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
                a
            } else {
                b
            }
        });
    let best_line = sys
        .lines
        .iter()
        .enumerate()
        .filter(|(_, (l, _))| has_admissible_point(l))
        .max_by(|x, y| x.1 .1.cmp(&y.1 .1).then_with(|| y.0.cmp(&x.0)));
    let candidates = n + best_cross.as_ref().map_or(0, |_| 1);
    let (count, point) = match (best_cross, best_line) {
        (Some((c, p)), Some((_, (_, m)))) if c >= *m => (c, p),
        (_, Some((i, (_, m)))) => (*m, sys.generic_point(i)),
        (Some((c, p)), None) => (c, p),
        (None, None) => (0, (Scalar::one(), Scalar::one())),
    };
    Ok(SigmaSup {
        value: count + sys.always,
        alpha: [Scalar::one(), point.0, point.1],
        lines: n,
        candidates,
    })
}

/// Every coefficient triple `sigma_sup` considers: all admissible pairwise
/// line intersections plus one generic point per line. Exposed so the
/// maximum can be re-derived independently with [`sigma_count`].
pub fn sigma_sup_candidates(
    a1: &RatSet,
    a2: &RatSet,
    a3: &RatSet,
    budget: u64,
) -> Result<Vec<[Scalar; 3]>> {
    let sys = LineSystem::build([a1, a2, a3], budget)?;
    let mut out = Vec::new();
    for i in 0..sys.lines.len() {
        if has_admissible_point(&sys.lines[i].0) {
            let p = sys.generic_point(i);
            out.push([Scalar::one(), p.0, p.1]);
        }
        for j in i + 1..sys.lines.len() {
            if let Some(p) = intersect(&sys.lines[i].0, &sys.lines[j].0) {
                if !p.0.is_zero() && !p.1.is_zero() {
                    out.push([Scalar::one(), p.0, p.1]);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    Additive,
    Multiplicative,
}

impl EnergyKind {
    pub fn energy(self, a: &RatSet) -> Result<EnergyValue> {
        match self {
            EnergyKind::Additive => additive_energy(a, a),
            EnergyKind::Multiplicative => multiplicative_energy(a, a),
        }
    }
}

/// Outcome of checking `E(∪Aᵢ) ≤ (Σ E(Aᵢ)^{1/4})⁴`.
#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub kind: EnergyKind,
    pub union_energy: EnergyValue,
    pub part_energies: Vec<EnergyValue>,
    /// Set when the right side is rational (all parts share one
    /// fourth-power-free kernel).
    pub rhs_exact: Option<Scalar>,
    /// Certified enclosure of the right side.
    pub rhs_lower: Scalar,
    pub rhs_upper: Scalar,
    pub precision_bits: u32,
    pub holds: bool,
}

/// Energy subadditivity, decided exactly.
///
/// If every part energy is `sᵢ⁴·m` for a common `m`, the right side is the
/// integer `(Σ sᵢ)⁴·m`. Otherwise fourth roots are enclosed in dyadic
/// rationals whose width is halved until the comparison is decided; with
/// distinct kernels the right side is irrational, so equality cannot occur
/// and the refinement terminates.
pub fn energy_subadditivity_check(
    parts: &[RatSet],
    kind: EnergyKind,
) -> Result<SubadditivityReport> {
    if parts.is_empty() {
        return domain("no parts given");
    }
    let mut union = RatSet::empty();
    for p in parts {
        p.require_nonempty("part")?;
        union = union.union(p);
    }
    let part_energies = parts
        .iter()
        .map(|p| kind.energy(p))
        .collect::<Result<Vec<_>>>()?;
    let union_energy = kind.energy(&union)?;
    let lhs = rat(num_bigint::BigInt::from(union_energy.as_biguint().clone()));

    let splits: Vec<_> = part_energies
        .iter()
        .map(|e| fourth_power_split(e.as_biguint()))
        .collect();
    if splits.iter().all(|(_, m)| *m == splits[0].1) {
        let s: BigUint = splits.iter().map(|(s, _)| s.clone()).sum();
        let rhs = s.pow(4u32) * &splits[0].1;
        let rhs = rat(num_bigint::BigInt::from(rhs));
        let holds = lhs <= rhs;
        let rhs = Scalar::from_rational(rhs);
        return Ok(SubadditivityReport {
            kind,
            union_energy,
            part_energies,
            rhs_exact: Some(rhs.clone()),
            rhs_lower: rhs.clone(),
            rhs_upper: rhs,
            precision_bits: 0,
            holds,
        });
    }

    let mut bits = 16;
    while bits <= 1 << 14 {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for e in &part_energies {
            let (l, h) = fourth_root_enclosure(e.as_biguint(), bits);
            lo += l;
            hi += h;
        }
        let lo4 = num_traits::Pow::pow(&lo, 4u32);
        let hi4 = num_traits::Pow::pow(&hi, 4u32);
        let decided = if lhs <= lo4 {
            Some(true)
        } else if lhs > hi4 {
            Some(false)
        } else {
            None
        };
        if let Some(holds) = decided {
            return Ok(SubadditivityReport {
                kind,
                union_energy,
                part_energies,
                rhs_exact: None,
                rhs_lower: Scalar::from_rational(lo4),
                rhs_upper: Scalar::from_rational(hi4),
                precision_bits: bits,
                holds,
            });
        }
        bits *= 2;
    }
    Err(Error::Internal(
        "fourth-root comparison undecided at maximum precision".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn s(v: &[i64]) -> RatSet {
        RatSet::from_ints(v.iter().copied())
    }

    #[test]
    fn additive_energy_examples() {
        assert_eq!(additive_energy(&s(&[1, 2]), &s(&[1, 2])).unwrap(), 6);
        assert_eq!(additive_energy(&s(&[1, 2, 3]), &s(&[1, 2, 3])).unwrap(), 19);
        assert_eq!(additive_energy(&s(&[1]), &s(&[1])).unwrap(), 1);
    }

    #[test]
    fn multiplicative_energy_examples() {
        assert_eq!(
            multiplicative_energy(&s(&[1, 2, 3]), &s(&[1, 2, 3])).unwrap(),
            15
        );
        assert_eq!(
            multiplicative_energy(&s(&[1, 2, 4]), &s(&[1, 2, 4])).unwrap(),
            19
        );
        assert_eq!(multiplicative_energy(&s(&[2, 4]), &s(&[1, 2])).unwrap(), 6);
        assert!(matches!(
            multiplicative_energy(&s(&[0, 1]), &s(&[1])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn slice_energy_examples() {
        assert_eq!(energy_via_slices(&s(&[1, 2, 3])).unwrap(), 15);
        assert_eq!(energy_via_slices(&s(&[1])).unwrap(), 1);
        assert_eq!(energy_via_slices(&s(&[1, 2])).unwrap(), 6);
        let prof = slice_profile(&s(&[1, 2, 3])).unwrap();
        let mut sizes: Vec<u64> = prof.iter().map(|p| p.1).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1, 1, 1, 3]);
    }

    #[test]
    fn third_moment_examples() {
        assert_eq!(third_moment(&s(&[1, 2])).unwrap(), 10);
        assert_eq!(third_moment(&s(&[1, 2, 3])).unwrap(), 33);
        assert_eq!(third_moment(&s(&[1])).unwrap(), 1);
    }

    #[test]
    fn slices_match_slice() {
        let a = s(&[1, 2, 3, 4, 6, 8, 9]);
        for (l, members) in slices(&a).unwrap() {
            assert_eq!(members, a.slice(&l).unwrap());
        }
    }

    #[test]
    fn sigma_count_examples() {
        let one = Scalar::one();
        let a = s(&[1, 2, 3]);
        assert_eq!(
            sigma_count([&one, &one, &q(-1, 1)], [&a, &a, &a]).unwrap(),
            3
        );
        let b = s(&[1, 2]);
        assert_eq!(
            sigma_count([&one, &one, &q(-2, 1)], [&b, &b, &b]).unwrap(),
            2
        );
        let c = s(&[1]);
        assert_eq!(sigma_count([&one, &one, &one], [&c, &c, &c]).unwrap(), 0);
        assert!(sigma_count([&one, &Scalar::zero(), &one], [&c, &c, &c]).is_err());
    }

    #[test]
    fn sigma_sup_examples() {
        let b = s(&[1, 2]);
        let r = sigma_sup(&b, &b, &b, SIGMA_SUP_BUDGET).unwrap();
        assert_eq!(r.value, 2);
        let c = s(&[1]);
        let r = sigma_sup(&c, &c, &c, SIGMA_SUP_BUDGET).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.alpha, [q(1, 1), q(1, 1), q(-2, 1)]);
        let ap = s(&[1, 2, 3, 4, 5, 6]);
        let r = sigma_sup(&ap, &ap, &ap, SIGMA_SUP_BUDGET).unwrap();
        let three_ap = sigma_count([&q(1, 1), &q(-2, 1), &q(1, 1)], [&ap, &ap, &ap]).unwrap();
        assert!(three_ap.to_u64().unwrap() <= r.value);
        let got = sigma_count([&r.alpha[0], &r.alpha[1], &r.alpha[2]], [&ap, &ap, &ap]).unwrap();
        assert_eq!(got, r.value);
        assert!(r.value <= 36);
    }

    #[test]
    fn sigma_sup_budget_gate() {
        let a = RatSet::from_ints(1..=30);
        assert!(matches!(
            sigma_sup(&a, &a, &a, SIGMA_SUP_BUDGET),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn sigma_sup_with_zero_elements() {
        // (0, 0, 0) solves every equation
        let z = s(&[0, 1]);
        let r = sigma_sup(&z, &z, &z, SIGMA_SUP_BUDGET).unwrap();
        let got = sigma_count([&r.alpha[0], &r.alpha[1], &r.alpha[2]], [&z, &z, &z]).unwrap();
        assert_eq!(got, r.value);
        for c in sigma_sup_candidates(&z, &z, &z, SIGMA_SUP_BUDGET).unwrap() {
            let v = sigma_count([&c[0], &c[1], &c[2]], [&z, &z, &z]).unwrap();
            assert!(v.to_u64().unwrap() <= r.value);
        }
    }

    #[test]
    fn subadditivity_examples() {
        let r =
            energy_subadditivity_check(&[s(&[1, 2]), s(&[2, 3])], EnergyKind::Additive).unwrap();
        assert_eq!(r.union_energy, 19);
        assert_eq!(r.rhs_exact, Some(q(96, 1)));
        assert!(r.holds);

        let r = energy_subadditivity_check(&[s(&[1, 5, 7])], EnergyKind::Additive).unwrap();
        assert_eq!(r.rhs_exact.as_ref().unwrap(), &r.union_energy.to_scalar());
        assert!(r.holds);

        let r =
            energy_subadditivity_check(&[s(&[1]), s(&[2]), s(&[3])], EnergyKind::Additive).unwrap();
        assert_eq!(r.rhs_exact, Some(q(81, 1)));
        assert!(r.holds);

        // distinct kernels: 6 and 19
        let r =
            energy_subadditivity_check(&[s(&[1, 2]), s(&[3, 4, 5])], EnergyKind::Multiplicative)
                .unwrap();
        assert!(r.rhs_exact.is_none());
        assert!(r.rhs_lower <= r.rhs_upper);
        assert!(r.holds);
    }
}
