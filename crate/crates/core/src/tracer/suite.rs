//! Every exactly stated inequality of the toolkit, run on one set.
//!
//! Asserted rows are proved statements with explicit constants, so any
//! failure is a bug. Report-only rows carry measured ratios against bounds
//! whose constants are hidden.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Check, Rel, Status};
use crate::certificates::{
    d_cert, default_family, dplus_cert, dstar_pi_bound, dstar_search, katz_koester_witness, PiMode,
    SearchResult,
};
use crate::energy::{energy_subadditivity_check, multiplicative_energy, slice_profile, EnergyKind};
use crate::error::{domain, Result};
use crate::exact::{log2_ceil, PowerProduct};
use crate::scalar::Scalar;
use crate::set::RatSet;
use crate::szt::{empirical_d, shifted_energy_report, sumset_from_d_report, BoundRow, ShiftKind};

pub const SUITE_SCHEMA: &str = "sumprod.suite/1";

/// Sets larger than this are left out of the level-set families and the
/// `Π` certificate rows, whose cost grows with `|Π|²`.
pub const HEAVY_SET_LIMIT: usize = 2048;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Random bipartitions per energy kind for the subadditivity rows.
    pub bipartitions: usize,
    pub seed: u64,
    /// Adds report rows repeating the sumset bound with `ln` in place of
    /// `log₂`.
    pub natural_log_audit: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            bipartitions: 10,
            seed: 0x5eed,
            natural_log_audit: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub name: String,
    pub status: Status,
    pub check: Option<Check>,
    pub detail: Value,
}

impl SuiteRow {
    fn asserted(name: &str, check: Check) -> SuiteRow {
        SuiteRow {
            name: name.to_string(),
            status: Status::AssertedExact,
            check: Some(check),
            detail: Value::Null,
        }
    }

    fn reported(name: &str, check: Option<Check>, detail: Value) -> SuiteRow {
        SuiteRow {
            name: name.to_string(),
            status: Status::ReportOnly,
            check,
            detail,
        }
    }

    fn bound(row: BoundRow) -> SuiteRow {
        SuiteRow::reported(&row.name.clone(), None, json!(row))
    }

    fn detail(mut self, detail: Value) -> SuiteRow {
        self.detail = detail;
        self
    }

    pub fn passes(&self) -> bool {
        self.status != Status::AssertedExact || self.check.as_ref().is_none_or(|c| c.holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub set_digest: String,
    pub a_len: usize,
    pub rows: Vec<SuiteRow>,
    pub failures: usize,
}

impl SuiteReport {
    pub fn failed_rows(&self) -> Vec<&SuiteRow> {
        self.rows.iter().filter(|r| !r.passes()).collect()
    }

    pub const CSV_HEADER: &'static str = "set_digest,a_len,row,status,holds,margin";

    /// One line per row; no header.
    pub fn csv_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let (holds, margin) = match &r.check {
                Some(c) => (c.holds.to_string(), format!("{:.6e}", c.margin)),
                None => (String::new(), String::new()),
            };
            let status = serde_json::to_value(r.status).expect("status serializes");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.set_digest,
                self.a_len,
                r.name,
                status.as_str().unwrap_or_default(),
                holds,
                margin
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::CSV_HEADER, self.csv_lines())
    }
}

/// Shared products of `A` computed once per suite run.
struct Ctx<'a> {
    a: &'a RatSet,
    n: usize,
    sumset: RatSet,
    product: RatSet,
    quotient: RatSet,
    energy: Scalar,
    search: SearchResult,
    config: &'a SuiteConfig,
}

type Group = fn(&Ctx) -> Result<Vec<SuiteRow>>;

/// Runs every row group on `A`; groups run in parallel, rows keep a fixed
/// order.
pub fn inequality_suite(a: &RatSet, config: &SuiteConfig) -> Result<SuiteReport> {
    if a.len() < 2 {
        return domain("the suite needs |A| ≥ 2");
    }
    a.require_no_zero("A")?;
    let ctx = Ctx {
        a,
        n: a.len(),
        sumset: a.sumset(a)?,
        product: a.productset(a)?,
        quotient: a.quotientset(a)?,
        energy: multiplicative_energy(a, a)?.to_scalar(),
        search: dstar_search(a, &default_family(a)?)?,
        config,
    };
    let groups: [Group; 9] = [
        sumset_product_rows,
        slice_identity_rows,
        cauchy_schwarz_rows,
        subadditivity_rows,
        katz_koester_rows,
        certificate_rows,
        quotient_bound_rows,
        level_set_rows,
        growth_bound_rows,
    ];
    let parts: Vec<Vec<SuiteRow>> = groups.par_iter().map(|g| g(&ctx)).collect::<Result<_>>()?;
    let rows: Vec<SuiteRow> = parts.into_iter().flatten().collect();
    let failures = rows.iter().filter(|r| !r.passes()).count();
    Ok(SuiteReport {
        schema: SUITE_SCHEMA,
        set_digest: a.digest(),
        a_len: a.len(),
        rows,
        failures,
    })
}

fn len(s: &RatSet) -> Scalar {
    Scalar::from(s.len())
}

/// `|A+A|²|Π| · 4⌈log₂|A|⌉ ≥ |A|⁴` for `Π ∈ {A/A, AA}`.
fn sumset_product_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let a4 = Scalar::from(c.n).pow(4);
    let log = Scalar::from(4 * log2_ceil(c.n as u64) as u64);
    let mut rows = Vec::new();
    for (name, pi) in [
        ("sumset_quotient", &c.quotient),
        ("sumset_product", &c.product),
    ] {
        let lhs = len(&c.sumset).pow(2) * len(pi) * &log;
        rows.push(SuiteRow::asserted(
            name,
            Check::new(lhs, Rel::Ge, a4.clone()),
        ));
        if !c.config.natural_log_audit {
            continue;
        }
        // the same constant with a natural logarithm, for auditing the base
        let ln_const = 4.0 * (c.n as f64).ln().ceil();
        let margin = len(&c.sumset).pow(2).to_f64() * pi.len() as f64 * ln_const / a4.to_f64();
        rows.push(SuiteRow::reported(
            &format!("{name}_natural_log"),
            None,
            json!({ "margin": margin, "holds": margin >= 1.0 }),
        ));
    }
    Ok(rows)
}

/// `E×(A) = Σ_λ |A_λ|²` and `Σ_λ |A_λ| = |A|²`, with the energy counted
/// from products and the slices from quotients.
fn slice_identity_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let profile = slice_profile(c.a)?;
    let via: u128 = profile.iter().map(|(_, k)| (*k as u128).pow(2)).sum();
    let via = Scalar::from(BigInt::from(via));
    let mass: u64 = profile.iter().map(|(_, k)| *k).sum();
    Ok(vec![
        SuiteRow::asserted(
            "slice_energy_identity",
            Check::new(via, Rel::Eq, c.energy.clone()),
        ),
        SuiteRow::asserted(
            "slice_mass_identity",
            Check::new(Scalar::from(mass), Rel::Eq, Scalar::from(c.n * c.n)),
        ),
    ])
}

/// `E×(A₁, A₂)|Π| ≥ |A₁|²|A₂|²` for subsets of `A`, and the `A₁ = A₂ = A`
/// case.
fn cauchy_schwarz_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let even = c.a.select(|i, _| i % 2 == 0);
    let half = c.a.select(|i, _| i < c.n.div_ceil(2));
    let pairs = [
        ("even_half", &even, &half),
        ("half_full", &half, c.a),
        ("even_full", &even, c.a),
    ];
    let mut rows = Vec::new();
    for (label, a1, a2) in pairs {
        let e = multiplicative_energy(a1, a2)?.to_scalar();
        let rhs = len(a1).pow(2) * len(a2).pow(2);
        for (pi_name, pi) in [("quotient", &c.quotient), ("product", &c.product)] {
            rows.push(SuiteRow::asserted(
                &format!("pair_energy_{pi_name}_{label}"),
                Check::new(&e * &len(pi), Rel::Ge, rhs.clone()),
            ));
        }
    }
    let a4 = Scalar::from(c.n).pow(4);
    for (pi_name, pi) in [("quotient", &c.quotient), ("product", &c.product)] {
        rows.push(SuiteRow::asserted(
            &format!("energy_{pi_name}"),
            Check::new(&c.energy * &len(pi), Rel::Ge, a4.clone()),
        ));
    }
    Ok(rows)
}

/// Random bipartitions with both parts nonempty; `|A| ≥ 2` guarantees one.
fn bipartitions(a: &RatSet, count: usize, seed: u64) -> Vec<[RatSet; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mask: Vec<bool> = (0..a.len()).map(|_| rng.gen_bool(0.5)).collect();
        if mask.iter().all(|&m| m) || mask.iter().all(|&m| !m) {
            continue;
        }
        let left = a.select(|i, _| mask[i]);
        let right = a.select(|i, _| !mask[i]);
        out.push([left, right]);
    }
    out
}

/// `E(A₁ ⊔ A₂)^{1/4} ≤ E(A₁)^{1/4} + E(A₂)^{1/4}` for both energies.
fn subadditivity_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let splits = bipartitions(c.a, c.config.bipartitions, c.config.seed);
    let mut rows = Vec::new();
    for (name, kind) in [
        ("subadditive_additive", EnergyKind::Additive),
        ("subadditive_multiplicative", EnergyKind::Multiplicative),
    ] {
        let mut holding = 0usize;
        let mut witness = Value::Null;
        for parts in &splits {
            let r = energy_subadditivity_check(parts, kind)?;
            if r.holds {
                holding += 1;
            } else if witness.is_null() {
                witness = json!({ "parts": parts, "report": r });
            }
        }
        rows.push(
            SuiteRow::asserted(
                name,
                Check::new(Scalar::from(holding), Rel::Eq, Scalar::from(splits.len())),
            )
            .detail(witness),
        );
    }
    Ok(rows)
}

fn katz_koester_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (name, mode) in [
        ("katz_koester_quotient", PiMode::Quotient),
        ("katz_koester_product", PiMode::Product),
    ] {
        let r = katz_koester_witness(c.a, mode)?;
        let inclusion = r.rows.iter().filter(|x| x.inclusion_holds).count();
        let size = r.rows.iter().filter(|x| x.size_bound_holds).count();
        let first_bad = r
            .rows
            .iter()
            .find(|x| !(x.inclusion_holds && x.size_bound_holds))
            .map_or(Value::Null, |x| json!(x));
        let total = Scalar::from(r.rows.len());
        rows.push(
            SuiteRow::asserted(
                &format!("{name}_inclusion"),
                Check::new(Scalar::from(inclusion), Rel::Eq, total.clone()),
            )
            .detail(first_bad.clone()),
        );
        rows.push(
            SuiteRow::asserted(
                &format!("{name}_size"),
                Check::new(Scalar::from(size), Rel::Eq, total),
            )
            .detail(first_bad),
        );
    }
    Ok(rows)
}

/// `d`-certificates and their induced symmetry certificates agree, and the
/// searched `d*` certificate is no worse than any of them.
fn certificate_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let mut best_d: Option<Scalar> = None;
    for (label, set) in [
        ("a", c.a.clone()),
        ("inverse", c.a.inverse()?),
        ("one", RatSet::singleton(Scalar::one())),
    ] {
        let d = d_cert(c.a, &set)?;
        let induced = d.induced(c.a);
        let (value, valid) = match &induced {
            Ok(cert) => (cert.value.clone(), cert.verify(c.a).is_ok()),
            Err(_) => (Scalar::zero(), false),
        };
        rows.push(
            SuiteRow::asserted(
                &format!("induced_certificate_{label}"),
                Check::new(value, Rel::Eq, d.value.clone()),
            )
            .detail(json!({ "valid": valid })),
        );
        rows.push(SuiteRow::asserted(
            &format!("induced_certificate_{label}_valid"),
            Check::new(Scalar::from(valid as u64), Rel::Eq, Scalar::one()),
        ));
        best_d = Some(best_d.map_or(d.value.clone(), |b| b.min(d.value)));
    }
    let search = &c.search;
    rows.push(
        SuiteRow::asserted(
            "searched_certificate_vs_d",
            Check::new(
                search.best.value.clone(),
                Rel::Le,
                best_d.expect("three rows"),
            ),
        )
        .detail(json!({ "best": search.best_label })),
    );
    rows.push(SuiteRow::reported(
        "certificate_below_one",
        None,
        json!({ "anomalies": &search.anomalies }),
    ));
    Ok(rows)
}

/// `d*(Π)` certificates for `Π = A/A` and `Π = AA`; skipped for large `Π`.
fn quotient_bound_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (name, mode, pi) in [
        ("pi_certificate_quotient", PiMode::Quotient, &c.quotient),
        ("pi_certificate_product", PiMode::Product, &c.product),
    ] {
        if pi.len() > HEAVY_SET_LIMIT {
            rows.push(SuiteRow::reported(
                name,
                None,
                json!({ "skipped": format!("|Π| = {} exceeds {HEAVY_SET_LIMIT}", pi.len()) }),
            ));
            continue;
        }
        let ok = dstar_pi_bound(c.a, mode);
        let detail = match &ok {
            Ok(cert) => json!(cert.record()),
            Err(e) => json!(e.to_string()),
        };
        rows.push(
            SuiteRow::asserted(
                name,
                Check::new(Scalar::from(ok.is_ok() as u64), Rel::Eq, Scalar::one()),
            )
            .detail(detail),
        );
    }
    Ok(rows)
}

/// Level-set scans against certified `d*` and `d₊`; report-only.
fn level_set_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let dstar = c.search.best.value.clone();
    let dplus = dplus_cert(c.a, c.a)?.value;
    let mut add_family = vec![
        c.a.clone(),
        c.a.negate(),
        RatSet::from_ints(1..=8),
        RatSet::singleton(Scalar::zero()),
    ];
    let mut mult_family = vec![
        c.a.clone(),
        c.a.inverse()?,
        RatSet::from_ints((0..8).map(|k| 1i64 << k)),
        RatSet::singleton(Scalar::one()),
    ];
    // the full families also carry A+A and AA, too costly beyond this size
    if c.sumset.len() <= HEAVY_SET_LIMIT {
        add_family.push(c.sumset.clone());
    }
    if c.product.len() <= HEAVY_SET_LIMIT {
        mult_family.push(c.product.clone());
    }
    let one = Scalar::one();
    let add = empirical_d(c.a, &add_family, ShiftKind::Additive, Some(&dstar), &one)?;
    let mult = empirical_d(
        c.a,
        &mult_family,
        ShiftKind::Multiplicative,
        Some(&dplus),
        &one,
    )?;
    let neg = -Scalar::one();
    let shifted = shifted_energy_report([c.a, c.a, c.a], [&one, &one, &neg], &dstar)?;
    Ok(vec![
        SuiteRow::reported(
            "additive_level_sets_vs_dstar",
            None,
            json!({
                "max_ratio": add.max_ratio,
                "d_star": dstar,
                "violations": add.violations,
            }),
        ),
        SuiteRow::reported(
            "multiplicative_level_sets_vs_dplus",
            None,
            json!({
                "max_ratio": mult.max_ratio,
                "d_plus": dplus,
                "violations": mult.violations,
            }),
        ),
        SuiteRow::bound(shifted.sigma),
        SuiteRow::bound(shifted.additive_energy),
        SuiteRow::bound(sumset_from_d_report(c.a, &dstar)?),
    ])
}

/// The headline lower bounds with `K = |A/A|/|A|`; report-only.
fn growth_bound_rows(c: &Ctx) -> Result<Vec<SuiteRow>> {
    let n = c.n;
    let sum = len(&c.sumset);
    let top = Scalar::from(c.sumset.len().max(c.product.len()));
    let k = len(&c.quotient) / Scalar::from(n);
    let pp = |parts: &[(Scalar, i64, i64)]| {
        parts.iter().fold(PowerProduct::one(), |p, (b, x, y)| {
            p.times(b.clone(), *x, *y)
        })
    };
    let a = Scalar::from(n);
    Ok(vec![
        SuiteRow::reported("k", None, json!({ "k": k })),
        SuiteRow::bound(BoundRow::lower(
            "max_sum_product",
            top,
            &pp(&[(a.clone(), 13089, 9813)]),
            format!("{n}^(4/3+5/9813)"),
        )),
        SuiteRow::bound(BoundRow::lower(
            "sumset_small_k",
            sum.clone(),
            &pp(&[(a.clone(), 19, 12), (k.clone(), -5, 6)]),
            "|A|^(19/12) K^(-5/6)".into(),
        )),
        SuiteRow::bound(BoundRow::lower(
            "sumset_large_k",
            sum.clone(),
            &pp(&[(a.clone(), 49, 32), (k.clone(), -19, 32)]),
            "|A|^(49/32) K^(-19/32)".into(),
        )),
        SuiteRow::bound(BoundRow::lower(
            "sumset_middle_k",
            sum,
            &pp(&[(a, 1313, 830), (k, -336, 415)]),
            "|A|^(1313/830) K^(-336/415)".into(),
        )),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_elements_pass() {
        let r = inequality_suite(&RatSet::from_ints([1, 2, 3]), &SuiteConfig::default()).unwrap();
        assert_eq!(r.failures, 0, "{:#?}", r.failed_rows());
        let row = r.rows.iter().find(|x| x.name == "sumset_quotient").unwrap();
        let c = row.check.as_ref().unwrap();
        // |A+A| = 5, |A/A| = 7, ⌈log₂3⌉ = 2
        assert_eq!(c.lhs, Scalar::from(5 * 5 * 7 * 8u64));
        assert_eq!(c.rhs, Scalar::from(81u64));
    }

    #[test]
    fn two_elements_energy_row() {
        let r = inequality_suite(&RatSet::from_ints([1, 2]), &SuiteConfig::default()).unwrap();
        let c = r
            .rows
            .iter()
            .find(|x| x.name == "energy_quotient")
            .and_then(|x| x.check.clone())
            .unwrap();
        assert_eq!((c.lhs, c.rhs), (Scalar::from(18u64), Scalar::from(16u64)));
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn csv_is_stable() {
        let a = RatSet::from_ints([1, 3, 4, 9, 10, 12]);
        let x = inequality_suite(&a, &SuiteConfig::default())
            .unwrap()
            .to_csv();
        let y = inequality_suite(&a, &SuiteConfig::default())
            .unwrap()
            .to_csv();
        assert_eq!(x, y);
        assert!(x.starts_with(SuiteReport::CSV_HEADER));
    }

    #[test]
    fn rejects_tiny_and_zero() {
        assert!(inequality_suite(&RatSet::from_ints([3]), &SuiteConfig::default()).is_err());
        assert!(inequality_suite(&RatSet::from_ints([0, 3]), &SuiteConfig::default()).is_err());
    }
}
