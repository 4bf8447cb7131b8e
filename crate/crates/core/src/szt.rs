//! Incidence counting, shifted-intersection level sets and empirical
//! brackets for the Szemerédi–Trotter parameter `D(A)`.
//!
//! `D(A)` is an infimum over every finite `B` and every `τ ≥ 1`, so it is
//! only ever bracketed: scans give lower witnesses, symmetry certificates
//! give upper bounds (up to an unknown absolute constant).

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{additive_energy, sigma_count, EnergyValue, RepFunction, SetOp};
use crate::error::{domain, Result};
use crate::exact::PowerProduct;
use crate::scalar::Scalar;
use crate::set::RatSet;

pub type Point = (Scalar, Scalar);

/// The line `a·x + b·y = c`, scaled so the first nonzero of `(a, b)` is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Line {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl Line {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Result<Line> {
        let lead = if !a.is_zero() {
            a.clone()
        } else if !b.is_zero() {
            b.clone()
        } else {
            return domain("a line needs a nonzero x or y coefficient");
        };
        Ok(Line {
            a: a / lead.clone(),
            b: b / lead.clone(),
            c: c / lead,
        })
    }

    /// `y = m·x + k`.
    pub fn slope_intercept(m: &Scalar, k: &Scalar) -> Line {
        Line::new(-m, Scalar::one(), k.clone()).expect("y coefficient is 1")
    }

    /// `r·y − x = s`, the family counting `qr − b = s`.
    pub fn shifted_quotient(r: &Scalar, s: &Scalar) -> Line {
        Line::new(-Scalar::one(), r.clone(), s.clone()).expect("x coefficient is -1")
    }

    /// `y + r = s·x`, the family counting `q + r = s·b`.
    pub fn shifted_product(r: &Scalar, s: &Scalar) -> Line {
        Line::new(s.clone(), -Scalar::one(), r.clone()).expect("y coefficient is -1")
    }

    pub fn contains(&self, p: &Point) -> bool {
        &(&self.a * &p.0) + &(&self.b * &p.1) == self.c
    }
}

/// Distinct lines; any two share at most one point.
#[derive(Clone, Debug, Default)]
pub struct LineSet {
    lines: Vec<Line>,
}

impl LineSet {
    pub fn new(lines: Vec<Line>) -> Result<LineSet> {
        let mut seen = HashSet::with_capacity(lines.len());
        for l in &lines {
            if !seen.insert(l) {
                return domain(format!("duplicate line {}x + {}y = {}", l.a, l.b, l.c));
            }
        }
        Ok(LineSet { lines })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Line> {
        self.lines.iter()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceReport {
    pub count: EnergyValue,
    pub points: usize,
    pub lines: usize,
    /// `(|P||L|)^{2/3} + |P| + |L|`, approximate.
    pub benchmark: f64,
    pub ratio: f64,
}

/// `J(P, L) = #{(p, l) : p ∈ l}`.
///
/// Points are grouped by abscissa; a non-vertical line meets each column in
/// one candidate point, a vertical line takes its whole column.
pub fn incidences(points: &[Point], lines: &LineSet) -> Result<IncidenceReport> {
    let mut columns: HashMap<&Scalar, HashSet<&Scalar>> = HashMap::new();
    for (x, y) in points {
        if !columns.entry(x).or_default().insert(y) {
            return domain(format!("duplicate point ({x}, {y})"));
        }
    }
    let count: u64 = lines
        .lines
        .par_iter()
        .map(|l| {
            if l.b.is_zero() {
                // a = 1: the vertical line x = c
                columns.get(&l.c).map_or(0, |c| c.len() as u64)
            } else {
                columns
                    .iter()
                    .filter(|(x, ys)| {
                        let y = (&l.c - &(&l.a * **x)) / l.b.clone();
                        ys.contains(&y)
                    })
                    .count() as u64
            }
        })
        .sum();
    let (p, n) = (points.len() as f64, lines.len() as f64);
    let benchmark = (p * n).powf(2.0 / 3.0) + p + n;
    Ok(IncidenceReport {
        count: EnergyValue::from(count),
        points: points.len(),
        lines: lines.len(),
        benchmark,
        ratio: if benchmark > 0.0 {
            count as f64 / benchmark
        } else {
            0.0
        },
    })
}

/// `{s ∈ A − B : |A ∩ (B + s)| ≥ τ}`.
pub fn additive_level_set(a: &RatSet, b: &RatSet, tau: u64) -> Result<RatSet> {
    level_set(a, b, tau, SetOp::Sub)
}

/// `{s ∈ AB⁻¹ : |A ∩ sB| ≥ τ}`.
pub fn mult_level_set(a: &RatSet, b: &RatSet, tau: u64) -> Result<RatSet> {
    a.require_no_zero("A")?;
    b.require_no_zero("B")?;
    level_set(a, b, tau, SetOp::Div)
}

fn level_set(a: &RatSet, b: &RatSet, tau: u64, op: SetOp) -> Result<RatSet> {
    if tau == 0 {
        return domain("τ must be at least 1");
    }
    let rep = RepFunction::build(a, b, op)?;
    Ok(RatSet::new(
        rep.iter()
            .filter(|(_, c)| *c >= tau)
            .map(|(s, _)| s.clone())
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    /// Shifts `s ∈ A − B`, intersections `A ∩ (B + s)`.
    Additive,
    /// Dilations `s ∈ A/B`, intersections `A ∩ sB`.
    Multiplicative,
}

/// One `(B, τ)` cell of a scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub family_index: usize,
    pub b_len: usize,
    pub tau: u64,
    pub s_len: usize,
    /// `|S_τ|τ³/(|A||B|²)`, a lower bound for `D(A)`.
    pub ratio: Scalar,
    /// `D_upper·|A||B|²/τ³` when an upper value was supplied.
    pub bound: Option<Scalar>,
    /// `|S_τ| > C_abs·bound`.
    pub violates: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SztScanResult {
    pub kind: ShiftKind,
    pub a_len: usize,
    pub rows: Vec<ScanRow>,
    pub max_ratio: Scalar,
    pub witness_index: usize,
    pub witness_tau: u64,
    pub d_upper: Option<Scalar>,
    pub c_abs: Scalar,
    pub violations: usize,
}

impl SztScanResult {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("family_index,tau,s_len,bound_numerator,bound_denominator,ratio\n");
        for r in &self.rows {
            let (bn, bd) = match &r.bound {
                Some(b) => (b.numer().to_string(), b.denom().to_string()),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.family_index, r.tau, r.s_len, bn, bd, r.ratio
            ));
        }
        out
    }
}

/// `A`, `−A`, `A + A`, `{1..8}` and `{0}` for shifts; `A`, `A⁻¹`, `AA`,
/// `{1, 2, …, 128}` (powers of two) and `{1}` for dilations.
pub fn default_b_family(a: &RatSet, kind: ShiftKind) -> Result<Vec<RatSet>> {
    Ok(match kind {
        ShiftKind::Additive => vec![
            a.clone(),
            a.negate(),
            a.sumset(a)?,
            RatSet::from_ints(1..=8),
            RatSet::singleton(Scalar::zero()),
        ],
        ShiftKind::Multiplicative => vec![
            a.clone(),
            a.inverse()?,
            a.productset(a)?,
            RatSet::from_ints((0..8).map(|k| 1i64 << k)),
            RatSet::singleton(Scalar::one()),
        ],
    })
}

/// Scans every `B` in the family and every attained level `τ`.
///
/// `|S_τ|` only changes at values taken by the intersection counts, so the
/// attained counts are the only levels that can maximise `|S_τ|τ³`.
pub fn empirical_d(
    a: &RatSet,
    family: &[RatSet],
    kind: ShiftKind,
    d_upper: Option<&Scalar>,
    c_abs: &Scalar,
) -> Result<SztScanResult> {
    a.require_nonempty("A")?;
    if family.is_empty() {
        return domain("empty B family");
    }
    if kind == ShiftKind::Multiplicative {
        a.require_no_zero("A")?;
        for b in family {
            b.require_no_zero("B")?;
        }
    }
    let op = match kind {
        ShiftKind::Additive => SetOp::Sub,
        ShiftKind::Multiplicative => SetOp::Div,
    };
    let per_b: Vec<Vec<ScanRow>> = family
        .par_iter()
        .enumerate()
        .map(|(i, b)| scan_one(a, b, i, op, d_upper, c_abs))
        .collect::<Result<_>>()?;
    let rows: Vec<ScanRow> = per_b.into_iter().flatten().collect();
    let mut best = &rows[0];
    for r in &rows[1..] {
        // rows are ordered by (index, τ), so strict improvement keeps the
        // lexicographically first witness
        if r.ratio > best.ratio {
            best = r;
        }
    }
    Ok(SztScanResult {
        kind,
        a_len: a.len(),
        max_ratio: best.ratio.clone(),
        witness_index: best.family_index,
        witness_tau: best.tau,
        d_upper: d_upper.cloned(),
        c_abs: c_abs.clone(),
        violations: rows.iter().filter(|r| r.violates).count(),
        rows,
    })
}

fn scan_one(
    a: &RatSet,
    b: &RatSet,
    index: usize,
    op: SetOp,
    d_upper: Option<&Scalar>,
    c_abs: &Scalar,
) -> Result<Vec<ScanRow>> {
    let rep = RepFunction::build(a, b, op)?;
    let mut counts: Vec<u64> = rep.values().collect();
    counts.sort_unstable_by(|x, y| y.cmp(x));
    let mut levels: Vec<u64> = counts.clone();
    levels.dedup();
    levels.reverse();
    let scale = Scalar::from(a.len() * b.len() * b.len());
    Ok(levels
        .into_iter()
        .map(|tau| {
            let s_len = counts.partition_point(|&c| c >= tau);
            let t3 = Scalar::from(tau).pow(3);
            let ratio = Scalar::from(s_len) * &t3 / scale.clone();
            let bound = d_upper.map(|d| d * &scale / t3.clone());
            let violates = bound
                .as_ref()
                .is_some_and(|bd| Scalar::from(s_len) > c_abs * bd);
            ScanRow {
                family_index: index,
                b_len: b.len(),
                tau,
                s_len,
                ratio,
                bound,
                violates,
            }
        })
        .collect())
}

/// A measured quantity against a bound with a hidden constant.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub name: String,
    pub value: Scalar,
    /// Human-readable form of the bound expression.
    pub bound: String,
    pub bound_approx: f64,
    /// `value / bound`, approximate.
    pub ratio: f64,
    /// `"le"` for an upper bound on the value, `"ge"` for a lower bound.
    pub direction: &'static str,
    /// The inequality decided exactly with constant 1; never asserted.
    pub holds: bool,
}

impl BoundRow {
    /// `value ≤ bound`.
    pub(crate) fn upper(name: &str, value: Scalar, bound: &PowerProduct, expr: String) -> Self {
        let holds =
            PowerProduct::of_scalar(&value).is_none_or(|v| v.cmp_exact(bound) != Ordering::Greater);
        BoundRow::build(name, value, bound, expr, "le", holds)
    }

    /// `value ≥ bound`.
    pub(crate) fn lower(name: &str, value: Scalar, bound: &PowerProduct, expr: String) -> Self {
        let holds =
            PowerProduct::of_scalar(&value).is_some_and(|v| v.cmp_exact(bound) != Ordering::Less);
        BoundRow::build(name, value, bound, expr, "ge", holds)
    }

    fn build(
        name: &str,
        value: Scalar,
        bound: &PowerProduct,
        expr: String,
        direction: &'static str,
        holds: bool,
    ) -> Self {
        let bound_approx = bound.to_f64();
        BoundRow {
            name: name.to_string(),
            ratio: value.to_f64() / bound_approx,
            value,
            bound: expr,
            bound_approx,
            direction,
            holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftedEnergyReport {
    pub alpha: [Scalar; 3],
    pub d_upper: Scalar,
    pub sigma: BoundRow,
    pub additive_energy: BoundRow,
}

/// `σ(α₁A₁, α₂A₂, α₃A₃)` against `D^{1/3}|A₁|^{1/3}|A₂|^{2/3}|A₃|^{2/3}` and
/// `E⁺(A₁, A₂)` against `D^{1/2}|A₁||A₂|^{3/2}`; report-only.
pub fn shifted_energy_report(
    sets: [&RatSet; 3],
    alpha: [&Scalar; 3],
    d_upper: &Scalar,
) -> Result<ShiftedEnergyReport> {
    if !d_upper.is_positive() {
        return domain("D must be positive");
    }
    let sigma = sigma_count(alpha, sets)?.to_scalar();
    let (n1, n2, n3) = (sets[0].len(), sets[1].len(), sets[2].len());
    let sb = PowerProduct::one()
        .times(d_upper.clone(), 1, 3)
        .times(n1, 1, 3)
        .times(n2, 2, 3)
        .times(n3, 2, 3);
    let e = additive_energy(sets[0], sets[1])?.to_scalar();
    let eb = PowerProduct::one()
        .times(d_upper.clone(), 1, 2)
        .times(n1, 1, 1)
        .times(n2, 3, 2);
    Ok(ShiftedEnergyReport {
        alpha: [alpha[0].clone(), alpha[1].clone(), alpha[2].clone()],
        d_upper: d_upper.clone(),
        sigma: BoundRow::upper(
            "sigma",
            sigma,
            &sb,
            format!("({d_upper})^(1/3)*{n1}^(1/3)*{n2}^(2/3)*{n3}^(2/3)"),
        ),
        additive_energy: BoundRow::upper(
            "additive_energy",
            e,
            &eb,
            format!("({d_upper})^(1/2)*{n1}*{n2}^(3/2)"),
        ),
    })
}

/// `|A + A|` against `|A|^{58/37} D^{-21/37}`; report-only.
pub fn sumset_from_d_report(a: &RatSet, d_upper: &Scalar) -> Result<BoundRow> {
    if !d_upper.is_positive() {
        return domain("D must be positive");
    }
    let n = a.len();
    let bound = PowerProduct::one()
        .times(n, 58, 37)
        .times(d_upper.clone(), -21, 37);
    Ok(BoundRow::lower(
        "sumset_vs_d",
        Scalar::from(a.sumset(a)?.len()),
        &bound,
        format!("{n}^(58/37)*({d_upper})^(-21/37)"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn s(v: &[i64]) -> RatSet {
        RatSet::from_ints(v.iter().copied())
    }

    fn pt(x: i64, y: i64) -> Point {
        (Scalar::from(x), Scalar::from(y))
    }

    #[test]
    fn incidence_examples() {
        let diag = LineSet::new(vec![Line::slope_intercept(&q(1, 1), &q(0, 1))]).unwrap();
        assert_eq!(incidences(&[pt(0, 0)], &diag).unwrap().count, 1);

        let grid: Vec<Point> = (0..3).flat_map(|x| (0..3).map(move |y| pt(x, y))).collect();
        let horiz = LineSet::new(
            (0..3)
                .map(|b| Line::slope_intercept(&q(0, 1), &q(b, 1)))
                .collect(),
        )
        .unwrap();
        assert_eq!(incidences(&grid, &horiz).unwrap().count, 9);

        let vert = LineSet::new(vec![Line::new(q(2, 1), q(0, 1), q(4, 1)).unwrap()]).unwrap();
        assert_eq!(incidences(&grid, &vert).unwrap().count, 3);
    }

    #[test]
    fn duplicates_rejected() {
        let l = Line::slope_intercept(&q(1, 1), &q(0, 1));
        let same = Line::new(q(-2, 1), q(2, 1), q(0, 1)).unwrap();
        assert!(LineSet::new(vec![l.clone(), same]).is_err());
        let ls = LineSet::new(vec![l]).unwrap();
        assert!(incidences(&[pt(0, 0), pt(0, 0)], &ls).is_err());
    }

    #[test]
    fn level_set_examples() {
        let a = s(&[1, 2, 3]);
        assert_eq!(additive_level_set(&a, &s(&[0]), 1).unwrap(), a);
        assert_eq!(additive_level_set(&a, &a, 3).unwrap(), s(&[0]));
        assert_eq!(additive_level_set(&a, &a, 2).unwrap(), s(&[-1, 0, 1]));

        assert_eq!(mult_level_set(&a, &s(&[1]), 1).unwrap(), a);
        let g = s(&[1, 2, 4]);
        assert_eq!(
            mult_level_set(&g, &g, 2).unwrap(),
            RatSet::new(vec![q(1, 2), q(1, 1), q(2, 1)])
        );
        assert!(mult_level_set(&g, &g, 4).unwrap().is_empty());
        assert!(additive_level_set(&a, &a, 0).is_err());
    }

    #[test]
    fn empirical_d_examples() {
        let a = s(&[1, 5, 9, 30]);
        let r = empirical_d(&a, &[s(&[0])], ShiftKind::Additive, None, &q(1, 1)).unwrap();
        assert_eq!(r.max_ratio, q(1, 1));

        let ap = RatSet::from_ints(1..=8);
        let d = q(8, 1);
        let r = empirical_d(
            &ap,
            std::slice::from_ref(&ap),
            ShiftKind::Additive,
            Some(&d),
            &q(1, 1),
        )
        .unwrap();
        // τ = 8 has S = {0}: 512/512; τ = 5 has 7 shifts: 875/512
        let best = r.rows.iter().max_by(|x, y| x.ratio.cmp(&y.ratio)).unwrap();
        assert_eq!(r.max_ratio, best.ratio);
        assert!(r.max_ratio >= q(875, 512));
        assert!(r.to_csv().starts_with("family_index,tau"));
    }

    #[test]
    fn report_rows() {
        let a = s(&[1, 2, 3]);
        let one = q(1, 1);
        let r = shifted_energy_report([&a, &a, &a], [&one, &one, &q(-1, 1)], &q(3, 1)).unwrap();
        assert_eq!(r.sigma.value, q(3, 1));
        // 3 ≤ 3^{1/3}·3^{1/3}·3^{2/3}·3^{2/3} = 9
        assert!(r.sigma.holds);
        assert!((r.sigma.bound_approx - 9.0).abs() < 1e-9);

        let r = sumset_from_d_report(&s(&[7]), &q(1, 1)).unwrap();
        assert_eq!(r.value, q(1, 1));
        assert!(r.holds);
        let ap = RatSet::from_ints(1..=32);
        let r = sumset_from_d_report(&ap, &q(32, 1)).unwrap();
        // 32^{58/37}·32^{-21/37} = 32
        assert_eq!(r.value, q(63, 1));
        assert!(r.holds);
        assert!((r.bound_approx - 32.0).abs() < 1e-9);
    }
}
