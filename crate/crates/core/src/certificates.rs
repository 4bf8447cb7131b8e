//! Symmetry sets and upper-bound certificates for the Szemerédi–Trotter
//! parameter.
//!
//! `d_*(A)` is a minimum over all finite `Q, R`, which cannot be searched.
//! Every bound here is therefore an explicit certificate `(Q, R, t)` whose
//! validity is re-checked on construction; nothing claims the true minimum.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{RepFunction, SetOp};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;
use crate::set::RatSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymKind {
    Multiplicative,
    Additive,
}

/// `|Q ∩ xR⁻¹| = #{r ∈ R : x/r ∈ Q}`.
pub fn fiber_mult(q: &RatSet, r: &RatSet, x: &Scalar) -> usize {
    r.iter()
        .filter(|y| !y.is_zero() && q.contains(&(x / *y)))
        .count()
}

/// `|Q ∩ (x − R)| = #{r ∈ R : x − r ∈ Q}`.
pub fn fiber_add(q: &RatSet, r: &RatSet, x: &Scalar) -> usize {
    r.iter().filter(|y| q.contains(&(x - *y))).count()
}

fn fiber(kind: SymKind, q: &RatSet, r: &RatSet, x: &Scalar) -> usize {
    match kind {
        SymKind::Multiplicative => fiber_mult(q, r, x),
        SymKind::Additive => fiber_add(q, r, x),
    }
}

/// `Sym_t^×(Q, R) = {x : |Q ∩ xR⁻¹| ≥ t}`.
///
/// Candidates range over `QR`; the fiber of `x` is the number of ways to
/// write `x = q·r`, except at `x = 0` where `Q ∩ 0·R⁻¹ = Q ∩ {0}`.
pub fn sym_mult(q: &RatSet, r: &RatSet, t: u64) -> Result<RatSet> {
    if t == 0 {
        return domain("t must be positive");
    }
    r.require_no_zero("R")?;
    if q.is_empty() || r.is_empty() {
        return Ok(RatSet::empty());
    }
    let q_nonzero = q.select(|_, x| !x.is_zero());
    let mut out: Vec<Scalar> = if q_nonzero.is_empty() {
        Vec::new()
    } else {
        RepFunction::build(&q_nonzero, r, SetOp::Mul)?
            .iter()
            .filter(|(_, c)| *c >= t)
            .map(|(x, _)| x.clone())
            .collect()
    };
    if !q.excludes_zero() && t <= 1 {
        out.push(Scalar::zero());
    }
    Ok(RatSet::new(out))
}

/// `Sym_t^+(Q, R) = {x : |Q ∩ (x − R)| ≥ t}`, candidates over `Q + R`.
pub fn sym_add(q: &RatSet, r: &RatSet, t: u64) -> Result<RatSet> {
    if t == 0 {
        return domain("t must be positive");
    }
    if q.is_empty() || r.is_empty() {
        return Ok(RatSet::empty());
    }
    Ok(RatSet::new(
        RepFunction::build(q, r, SetOp::Add)?
            .iter()
            .filter(|(_, c)| *c >= t)
            .map(|(x, _)| x.clone())
            .collect(),
    ))
}

/// A witness `A ⊆ Sym_t(Q, R)` with `max{|Q|, |R|} ≥ |A|`, bounding
/// `d_*(A)` (multiplicative) or `d_+(A)` (additive) by
/// `|Q|²|R|²/(|A|t³)`.
#[derive(Clone, Debug)]
pub struct SymCertificate {
    pub kind: SymKind,
    pub q: RatSet,
    pub r: RatSet,
    pub t: u64,
    pub a_len: usize,
    pub value: Scalar,
}

/// The offline-checkable summary of a certificate.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CertificateRecord {
    pub kind: SymKind,
    pub q_digest: String,
    pub q_len: usize,
    pub r_digest: String,
    pub r_len: usize,
    pub t: u64,
    pub a_len: usize,
    pub value: Scalar,
}

impl SymCertificate {
    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            kind: self.kind,
            q_digest: self.q.digest(),
            q_len: self.q.len(),
            r_digest: self.r.digest(),
            r_len: self.r.len(),
            t: self.t,
            a_len: self.a_len,
            value: self.value.clone(),
        }
    }

    /// Re-checks the certificate against `A` from scratch.
    pub fn verify(&self, a: &RatSet) -> Result<()> {
        let again = certify(self.kind, a, &self.q, &self.r, self.t)?;
        if again.value != self.value {
            return Err(Error::CertificateInvalid("recorded value is wrong".into()));
        }
        Ok(())
    }
}

fn certificate_value(q: usize, r: usize, a: usize, t: u64) -> Scalar {
    let num = Scalar::from(q * q) * Scalar::from(r * r);
    let den = Scalar::from(a) * Scalar::from(t).pow(3);
    num / den
}

fn certify(kind: SymKind, a: &RatSet, q: &RatSet, r: &RatSet, t: u64) -> Result<SymCertificate> {
    a.require_nonempty("A")?;
    if t == 0 {
        return domain("t must be positive");
    }
    if kind == SymKind::Multiplicative {
        q.require_no_zero("Q")?;
        r.require_no_zero("R")?;
    }
    if q.len().max(r.len()) < a.len() {
        return Err(Error::CertificateInvalid(format!(
            "max(|Q|, |R|) = {} is below |A| = {}",
            q.len().max(r.len()),
            a.len()
        )));
    }
    let bad = a
        .as_slice()
        .par_iter()
        .find_first(|x| (fiber(kind, q, r, x) as u64) < t);
    if let Some(x) = bad {
        return Err(Error::CertificateInvalid(format!(
            "{x} has fiber {} < t = {t}",
            fiber(kind, q, r, x)
        )));
    }
    Ok(SymCertificate {
        kind,
        q: q.clone(),
        r: r.clone(),
        t,
        a_len: a.len(),
        value: certificate_value(q.len(), r.len(), a.len(), t),
    })
}

/// Builds and validates a `d_*` certificate; fails rather than clamping.
pub fn dstar_cert_from_sym(a: &RatSet, q: &RatSet, r: &RatSet, t: u64) -> Result<SymCertificate> {
    certify(SymKind::Multiplicative, a, q, r, t)
}

/// Additive counterpart of [`dstar_cert_from_sym`], bounding `d_+`.
pub fn dplus_cert_from_sym(a: &RatSet, q: &RatSet, r: &RatSet, t: u64) -> Result<SymCertificate> {
    certify(SymKind::Additive, a, q, r, t)
}

/// The trivial certificate `Q = A, R = {1}, t = 1`, value `|A|`.
pub fn trivial_certificate(a: &RatSet) -> Result<SymCertificate> {
    dstar_cert_from_sym(a, a, &RatSet::singleton(Scalar::one()), 1)
}

/// `|AC|²/(|A||C|)`, an upper bound for `d(A)` witnessed by `C`.
#[derive(Clone, Debug, Serialize)]
pub struct DCertificate {
    pub c: RatSet,
    pub product_len: usize,
    pub a_len: usize,
    pub value: Scalar,
}

impl DCertificate {
    /// The symmetry certificate `Q = AC, R = C⁻¹, t = |C|`, which has the
    /// same value.
    pub fn induced(&self, a: &RatSet) -> Result<SymCertificate> {
        let q = a.productset(&self.c)?;
        let r = self.c.inverse()?;
        dstar_cert_from_sym(a, &q, &r, self.c.len() as u64)
    }
}

pub fn d_cert(a: &RatSet, c: &RatSet) -> Result<DCertificate> {
    a.require_nonempty("A")?;
    c.require_nonempty("C")?;
    a.require_no_zero("A")?;
    c.require_no_zero("C")?;
    let ac = a.productset(c)?;
    Ok(DCertificate {
        c: c.clone(),
        product_len: ac.len(),
        a_len: a.len(),
        value: Scalar::from(ac.len() * ac.len()) / Scalar::from(a.len() * c.len()),
    })
}

/// `|A+C|²/(|A||C|)` and its symmetry form `Q = A + C, R = −C, t = |C|`.
pub fn dplus_cert(a: &RatSet, c: &RatSet) -> Result<SymCertificate> {
    let q = a.sumset(c)?;
    dplus_cert_from_sym(a, &q, &c.negate(), c.len() as u64)
}

/// A named `(Q, R)` pair in a certificate search.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub label: String,
    pub q: RatSet,
    pub r: RatSet,
}

/// `Q ∈ {A, AA, A/A}` crossed with `R ∈ {{1}, A, A⁻¹}`, in that order.
///
/// This contains the trivial certificate and the certificates induced by
/// `C = A` and `C = A⁻¹`.
pub fn default_family(a: &RatSet) -> Result<Vec<FamilyMember>> {
    a.require_no_zero("A")?;
    let qs = [
        ("A", a.clone()),
        ("AA", a.productset(a)?),
        ("A/A", a.quotientset(a)?),
    ];
    let rs = [
        ("{1}", RatSet::singleton(Scalar::one())),
        ("A", a.clone()),
        ("A^-1", a.inverse()?),
    ];
    let mut out = Vec::new();
    for (ql, q) in &qs {
        for (rl, r) in &rs {
            out.push(FamilyMember {
                label: format!("Q={ql},R={rl}"),
                q: q.clone(),
                r: r.clone(),
            });
        }
    }
    Ok(out)
}

/// Result of [`dstar_search`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: SymCertificate,
    pub best_label: String,
    /// Members whose value came out below 1.
    pub anomalies: Vec<String>,
    pub evaluated: usize,
}

/// Best certificate in a family. For each `(Q, R)` the largest valid `t` is
/// the minimum fiber over `A`; members with `max{|Q|, |R|} < |A|` or a zero
/// fiber are skipped. Ties go to the earlier member.
pub fn dstar_search(a: &RatSet, family: &[FamilyMember]) -> Result<SearchResult> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    if family.is_empty() {
        return domain("empty certificate family");
    }
    let certs: Vec<Option<SymCertificate>> = family
        .par_iter()
        .map(|m| {
            if m.q.len().max(m.r.len()) < a.len() || !m.q.excludes_zero() || !m.r.excludes_zero() {
                return None;
            }
            let t = a.iter().map(|x| fiber_mult(&m.q, &m.r, x)).min()? as u64;
            if t == 0 {
                return None;
            }
            dstar_cert_from_sym(a, &m.q, &m.r, t).ok()
        })
        .collect();
    let mut best: Option<(usize, &SymCertificate)> = None;
    let mut anomalies = Vec::new();
    let mut evaluated = 0;
    for (i, c) in certs.iter().enumerate() {
        let Some(c) = c else { continue };
        evaluated += 1;
        if c.value < Scalar::one() {
            anomalies.push(family[i].label.clone());
        }
        if best.is_none_or(|(_, b)| c.value < b.value) {
            best = Some((i, c));
        }
    }
    let (i, c) = best.ok_or_else(|| Error::NotFound("no valid certificate in family".into()))?;
    Ok(SearchResult {
        best: c.clone(),
        best_label: family[i].label.clone(),
        anomalies,
        evaluated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PiMode {
    /// `Π = AA`
    Product,
    /// `Π = A/A`
    Quotient,
}

impl PiMode {
    pub fn pi(self, a: &RatSet) -> Result<RatSet> {
        match self {
            PiMode::Product => a.productset(a),
            PiMode::Quotient => a.quotientset(a),
        }
    }
}

/// Per-`λ` outcome of the Katz–Koester checks.
#[derive(Clone, Debug, Serialize)]
pub struct KkRow {
    pub lambda: Scalar,
    pub slice_len: usize,
    /// `|A_λ/A_λ|` (quotient mode) or `|A_λA_λ|` (product mode).
    pub slice_op_len: usize,
    pub inclusion_holds: bool,
    /// Distinct elements of `Π ∩ λΠ` exhibited explicitly.
    pub witnesses: usize,
    pub size_bound_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KkReport {
    pub mode: PiMode,
    pub pi_len: usize,
    pub a_len: usize,
    pub rows: Vec<KkRow>,
    pub all_hold: bool,
}

/// Katz–Koester checks for every `λ ∈ A/A`.
///
/// Quotient mode checks `A_λ/A_λ ⊆ Π ∩ λΠ⁻¹` with `Π = A/A`; product mode
/// checks `A_λA_λ ⊆ AA ∩ λAA`. Both check `|Π ∩ λΠ| ≥ |A|` through the
/// explicit witnesses `{a₁a}` (product) or `{a₁/a}` (quotient) for
/// `λ = a₁/a₂`, `a ∈ A`.
///
/// Every quotient and product of two elements of `A` is computed once and
/// indexed, so the per-pair work inside the slices is table lookups.
pub fn katz_koester_witness(a: &RatSet, mode: PiMode) -> Result<KkReport> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let tables = PairTables::build(a, mode);
    // slice members as (i, j) with a_i = λ·a_j, grouped by the index of λ
    let mut groups: Vec<Vec<(u32, u32)>> = vec![Vec::new(); tables.quot.len()];
    let n = a.len();
    for i in 0..n {
        for j in 0..n {
            groups[tables.quot_idx[i * n + j] as usize].push((i as u32, j as u32));
        }
    }
    let rows: Vec<KkRow> = groups
        .par_iter()
        .enumerate()
        .map(|(l, members)| kk_row(a, &tables, mode, l, members))
        .collect();
    let all_hold = rows.iter().all(|r| r.inclusion_holds && r.size_bound_holds);
    Ok(KkReport {
        mode,
        pi_len: tables.pi_len(mode),
        a_len: n,
        rows,
        all_hold,
    })
}

/// `a_i/a_j` and `a_i·a_j` as indices into `A/A` and `AA`.
struct PairTables {
    quot: RatSet,
    quot_idx: Vec<u32>,
    prod: RatSet,
    prod_idx: Vec<u32>,
}

impl PairTables {
    fn build(a: &RatSet, mode: PiMode) -> PairTables {
        let index = |op: fn(&Scalar, &Scalar) -> Scalar| {
            let raw: Vec<Scalar> = a
                .iter()
                .flat_map(|x| a.iter().map(move |y| op(x, y)))
                .collect();
            let set = RatSet::new(raw.clone());
            let pos: HashMap<&Scalar, u32> =
                set.iter().enumerate().map(|(k, x)| (x, k as u32)).collect();
            let idx = raw.iter().map(|x| pos[x]).collect();
            (set, idx)
        };
        let (quot, quot_idx) = index(|x, y| x / y);
        let (prod, prod_idx) = match mode {
            PiMode::Product => index(|x, y| x * y),
            PiMode::Quotient => (RatSet::empty(), Vec::new()),
        };
        PairTables {
            quot,
            quot_idx,
            prod,
            prod_idx,
        }
    }

    fn pi_len(&self, mode: PiMode) -> usize {
        match mode {
            PiMode::Quotient => self.quot.len(),
            PiMode::Product => self.prod.len(),
        }
    }
}

fn kk_row(
    a: &RatSet,
    tables: &PairTables,
    mode: PiMode,
    l: usize,
    members: &[(u32, u32)],
) -> KkRow {
    let n = a.len();
    let lambda = &tables.quot.as_slice()[l];
    let mut seen = vec![false; tables.pi_len(mode)];
    let mut combined = 0usize;
    for &(i, _) in members {
        for &(k, _) in members {
            let (i, k) = (i as usize, k as usize);
            // u = a_i/a_k and λ/u = a_k/a_m, as a_i = λ·a_m;
            // u = a_i·a_k and u/λ = a_m·a_k
            let u = match mode {
                PiMode::Quotient => tables.quot_idx[i * n + k],
                PiMode::Product => tables.prod_idx[i * n + k],
            };
            if !seen[u as usize] {
                seen[u as usize] = true;
                combined += 1;
            }
        }
    }
    // Every u and its partner above is a quotient (product) of two elements
    // of A, hence in Π; that rests on a_i = λ·a_m, re-checked here.
    let inclusion_holds = members.iter().all(|&(i, m)| {
        let (x, y) = (&a.as_slice()[i as usize], &a.as_slice()[m as usize]);
        x == &(lambda * y)
    });

    // λ = a₁/a₂ with a₁ the smallest member of the slice. The witnesses
    // w = a₁/a (or a₁a) and w/λ = a₂/a (or a₂a) are quotients (products) of
    // elements of A, hence lie in Π, and a ↦ w is injective. So the bound
    // reduces to a₁, a₂ ∈ A.
    let (i, m) = members[0];
    let (a1, a2) = (&a.as_slice()[i as usize], &a.as_slice()[m as usize]);
    let witnesses = if a1 == &(lambda * a2) { n } else { 0 };
    KkRow {
        lambda: lambda.clone(),
        slice_len: members.len(),
        slice_op_len: combined,
        inclusion_holds,
        witnesses,
        size_bound_holds: witnesses >= n,
    }
}

/// A certificate for `d_*(Π)`.
///
/// Quotient mode uses `Q = R = Π = A/A` and `t = |A|`, value `|Π|³/|A|³`.
/// In product mode `Q = R = AA` is not valid in general (the fiber of
/// `a₁a₂` in `AA ∩ x(AA)⁻¹` needs `a₂/a ∈ AA`), so it uses `Q = AA`,
/// `R = A/A`, `t = |A|`, value `|AA||A/A|²/|A|³`.
pub fn dstar_pi_bound(a: &RatSet, mode: PiMode) -> Result<SymCertificate> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let pi = mode.pi(a)?;
    let (q, r) = match mode {
        PiMode::Quotient => (pi.clone(), pi.clone()),
        PiMode::Product => (pi.clone(), a.quotientset(a)?),
    };
    let t = a.len() as u64;
    // One representation x = a∘b per element of Π.
    let mut repr: HashMap<Scalar, (&Scalar, &Scalar)> = HashMap::with_capacity(pi.len());
    for x in a {
        for y in a {
            let v = match mode {
                PiMode::Quotient => x / y,
                PiMode::Product => x * y,
            };
            repr.entry(v).or_insert((x, y));
        }
    }
    let q_hash: HashSet<&Scalar> = q.iter().collect();
    let r_hash: HashSet<&Scalar> = r.iter().collect();
    // Exact fiber counts with an early exit at t, trying the Katz–Koester
    // partners first: for x = a/b take y = c/b, so x/y = a/c; for x = ab
    // take y = b/c, so x/y = ac.
    let bad = pi.as_slice().par_iter().find_first(|x| {
        let (_, b) = repr[*x];
        let mut n = 0u64;
        for c in a {
            let y = match mode {
                PiMode::Quotient => c / b,
                PiMode::Product => b / c,
            };
            if r_hash.contains(&y) && q_hash.contains(&(*x / &y)) {
                n += 1;
                if n >= t {
                    return false;
                }
            }
        }
        let mut n = 0u64;
        for y in &r {
            if q_hash.contains(&(*x / y)) {
                n += 1;
                if n >= t {
                    return false;
                }
            }
        }
        true
    });
    if let Some(x) = bad {
        return Err(Error::Internal(format!(
            "Katz–Koester fiber bound fails at {x}"
        )));
    }
    Ok(SymCertificate {
        kind: SymKind::Multiplicative,
        value: certificate_value(q.len(), r.len(), pi.len(), t),
        q,
        r,
        t,
        a_len: pi.len(),
    })
}

/// `Σ_x |Q ∩ xR⁻¹|` over `x ∈ QR`; always `|Q||R|` for zero-free sets.
pub fn fiber_total(q: &RatSet, r: &RatSet) -> Result<u64> {
    let support = q.productset(r)?;
    Ok(support.iter().map(|x| fiber_mult(q, r, x) as u64).sum())
}
