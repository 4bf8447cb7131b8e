//! Level-set witnesses for multiplicative energy, and the cubic sumset
//! bound over three-slice configurations.

use serde::Serialize;

use super::{best_tau, Check, Rel, Status};
use crate::certificates::PiMode;
use crate::energy::{multiplicative_energy, sigma_sup, slices, EnergyValue};
use crate::error::{domain, Error, Result};
use crate::exact::log2_floor;
use crate::scalar::Scalar;
use crate::set::RatSet;

#[derive(Clone, Debug, Serialize)]
pub struct RichLevelRow {
    pub lambda: Scalar,
    pub slice_len: usize,
    /// `|A_λ/A_λ|` or `|A_λA_λ|`.
    pub op_len: usize,
    pub in_s_prime: bool,
    /// `τ²L⁻¹⁶`, approximate.
    pub benchmark: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RichLevelWitness {
    pub mode: PiMode,
    pub a_len: usize,
    pub energy: EnergyValue,
    /// `E^×(A)/(2|A|²)`.
    pub threshold: Scalar,
    pub tau: Scalar,
    /// `S_τ` in ascending order.
    pub s: Vec<Scalar>,
    /// The half of `S_τ` with the largest slice sets, ascending.
    pub s_prime: Vec<Scalar>,
    /// `⌊log₂|A|⌋ + 1`.
    pub n: u32,
    /// `2n|S_τ|τ² ≥ E^×(A)`.
    pub pigeonhole: Check,
    /// `|A+A|²|Π|/|A|⁴`.
    pub l: Scalar,
    pub pi_len: usize,
    pub sumset_len: usize,
    /// Smallest `|A_λ op A_λ|` over `S'_τ`.
    pub s_prime_min_op: usize,
    pub rows: Vec<RichLevelRow>,
}

impl RichLevelWitness {
    /// `|A_λ|` summed over `S'_τ`.
    pub fn s_prime_mass(&self) -> u64 {
        self.rows
            .iter()
            .filter(|r| r.in_s_prime)
            .map(|r| r.slice_len as u64)
            .sum()
    }
}

fn op_len(members: &RatSet, mode: PiMode) -> Result<usize> {
    Ok(match mode {
        PiMode::Quotient => members.quotientset(members)?.len(),
        PiMode::Product => members.productset(members)?.len(),
    })
}

/// The dyadic level `τ` maximising `|S_τ|τ²` above `E^×(A)/(2|A|²)`, and
/// the half of its band with the richest slices.
pub fn rich_level_witness(a: &RatSet, mode: PiMode) -> Result<RichLevelWitness> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    let energy = multiplicative_energy(a, a)?;
    let n_a = a.len();
    let threshold = energy.to_scalar() / Scalar::from(2 * n_a * n_a);

    let by_lambda = slices(a)?;
    let entries: Vec<(&Scalar, &RatSet)> = by_lambda.iter().collect();
    let counts: Vec<u64> = entries.iter().map(|(_, s)| s.len() as u64).collect();
    let (tau, band) = best_tau(&counts, &threshold, 2);

    let n = log2_floor(n_a as u64) + 1;
    let pigeonhole = Check::new(
        Scalar::from(2 * n as u64 * band.len() as u64) * tau.pow(2),
        Rel::Ge,
        energy.to_scalar(),
    );

    let pi = mode.pi(a)?;
    let sumset = a.sumset(a)?;
    let l = Scalar::from(sumset.len()).pow(2) * Scalar::from(pi.len()) / Scalar::from(n_a).pow(4);
    let benchmark = (2.0 * tau.ln() - 16.0 * l.ln()).exp();

    let mut sized: Vec<(usize, usize)> = Vec::with_capacity(band.len());
    for &i in &band {
        sized.push((i, op_len(entries[i].1, mode)?));
    }
    // richest first; `entries` is ascending in λ, so index order breaks ties
    let mut order = sized.clone();
    order.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let keep = band.len().div_ceil(2);
    let mut chosen: Vec<usize> = order[..keep].iter().map(|p| p.0).collect();
    chosen.sort_unstable();
    let s_prime_min_op = order[..keep].iter().map(|p| p.1).min().unwrap_or(0);

    let rows = sized
        .iter()
        .map(|&(i, op)| RichLevelRow {
            lambda: entries[i].0.clone(),
            slice_len: entries[i].1.len(),
            op_len: op,
            in_s_prime: chosen.binary_search(&i).is_ok(),
            benchmark,
            ratio: op as f64 / benchmark,
        })
        .collect();

    Ok(RichLevelWitness {
        mode,
        a_len: n_a,
        energy,
        threshold,
        tau,
        s: band.iter().map(|&i| entries[i].0.clone()).collect(),
        s_prime: chosen.iter().map(|&i| entries[i].0.clone()).collect(),
        n,
        pigeonhole,
        l,
        pi_len: pi.len(),
        sumset_len: sumset.len(),
        s_prime_min_op,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceSigmaReport {
    pub tau: Scalar,
    pub s_prime_len: usize,
    pub sumset_len: usize,
    pub sigma: u64,
    /// Whether `σ` is at least the certified supremum over triples.
    pub sigma_certified: bool,
    /// The supremum itself, when it could be computed.
    pub sigma_sup: Option<u64>,
    pub triples: usize,
    /// `32σ ≤ τ²`.
    pub lower_precondition: Check,
    /// `τ⁴ ≤ |A+A|²σ`, the squared form of `τ² ≤ |A+A|√σ`.
    pub upper_precondition: Check,
    /// `128²|A+A|⁴σ ≥ τ⁶|S'|²`, the squared form of the conclusion.
    pub conclusion: Check,
    pub status: Status,
    /// `|A+A|²·128√σ / (τ³|S'|)`, approximate; `None` when `σ = 0`.
    pub stress: Option<f64>,
}

/// Checks the cubic bound `|A+A|² ≥ τ³|S'|/(128√σ)` on a concrete band.
///
/// `sigma` overrides the computed supremum; it must not undercut it. When
/// the supremum exceeds `budget` the override is taken on trust and the
/// report is conditional.
pub fn slice_sigma_check(
    a: &RatSet,
    tau: &Scalar,
    s_prime: &RatSet,
    sigma: Option<u64>,
    budget: u64,
) -> Result<SliceSigmaReport> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    if !tau.is_positive() {
        return domain("τ must be positive");
    }
    let two_tau = tau * &Scalar::from(2u64);
    let mut members = Vec::with_capacity(s_prime.len());
    for lambda in s_prime {
        let slice = a.slice(lambda)?;
        let c = Scalar::from(slice.len());
        if !(&c > tau && c <= two_tau) {
            return domain(format!(
                "λ = {lambda} has |A_λ| = {c}, outside ({tau}, {two_tau}]"
            ));
        }
        members.push(slice);
    }

    let k = members.len();
    let mut triples = 0;
    let mut sup: Option<u64> = Some(0);
    'outer: for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                triples += 1;
                match sigma_sup(&members[i], &members[j], &members[l], budget) {
                    Ok(s) => sup = sup.map(|v| v.max(s.value)),
                    Err(Error::Budget(_)) => {
                        sup = None;
                        break 'outer;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let (sigma, certified) = match (sigma, sup) {
        (Some(g), Some(s)) if g < s => {
            return domain(format!("σ = {g} is below the triple supremum {s}"))
        }
        (Some(g), Some(_)) => (g, true),
        (None, Some(s)) => (s, true),
        (Some(g), None) => (g, false),
        (None, None) => {
            return Err(Error::Budget(format!(
                "σ supremum over {k} slices exceeds budget {budget}"
            )))
        }
    };

    let sumset_len = Scalar::from(a.sumset(a)?.len());
    let sig = Scalar::from(sigma);
    let lower_precondition = Check::new(Scalar::from(32u64) * &sig, Rel::Le, tau.pow(2));
    let upper_precondition = Check::new(tau.pow(4), Rel::Le, sumset_len.pow(2) * &sig);
    let conclusion = Check::new(
        Scalar::from(128u64 * 128) * sumset_len.pow(4) * &sig,
        Rel::Ge,
        tau.pow(6) * Scalar::from(k).pow(2),
    );
    let status = if !(lower_precondition.holds && upper_precondition.holds) {
        Status::PreconditionUnmet
    } else if certified {
        Status::AssertedExact
    } else {
        Status::Conditional
    };
    let stress = (sigma > 0 && k > 0).then(|| {
        sumset_len.to_f64().powi(2) * 128.0 * (sigma as f64).sqrt()
            / (tau.to_f64().powi(3) * k as f64)
    });

    Ok(SliceSigmaReport {
        tau: tau.clone(),
        s_prime_len: k,
        sumset_len: a.sumset(a)?.len(),
        sigma,
        sigma_certified: certified,
        sigma_sup: sup,
        triples,
        lower_precondition,
        upper_precondition,
        conclusion,
        status,
        stress,
    })
}

/// Outcome of hunting for a small instance where the cubic bound's
/// preconditions hold.
#[derive(Clone, Debug, Serialize)]
pub struct SliceSigmaSearch {
    pub sets_tried: usize,
    pub runs: usize,
    pub precondition_met: usize,
    /// The first run whose preconditions held, with its set.
    pub witness: Option<(RatSet, SliceSigmaReport)>,
    /// Smallest `32σ/τ²` seen among runs with at least one triple.
    pub best_lower_ratio: Option<f64>,
    pub min_stress: Option<f64>,
}

/// Runs [`slice_sigma_check`] over APs `{1, …, N}` for `N` in `3..=max_len`.
///
/// For each AP every candidate level `τ` is tried, with `S'` ranging over
/// prefixes of sizes `1..=8` of the band and, for bands of at most ten
/// elements, every three-element subset. Slices larger than
/// `max_slice` are excluded.
pub fn slice_sigma_search(max_len: i64, max_slice: usize, budget: u64) -> Result<SliceSigmaSearch> {
    let mut out = SliceSigmaSearch {
        sets_tried: 0,
        runs: 0,
        precondition_met: 0,
        witness: None,
        best_lower_ratio: None,
        min_stress: None,
    };
    for len in 3..=max_len {
        let a = RatSet::from_ints(1..=len);
        out.sets_tried += 1;
        let by_lambda = slices(&a)?;
        let entries: Vec<(&Scalar, &RatSet)> = by_lambda
            .iter()
            .filter(|(_, s)| s.len() <= max_slice)
            .collect();
        let counts: Vec<u64> = entries.iter().map(|(_, s)| s.len() as u64).collect();
        if counts.is_empty() {
            continue;
        }
        let taus = super::tau_candidates(&counts, &Scalar::from(0u64));
        for tau in taus {
            let band: Vec<Scalar> = super::band_indices(&counts, &tau)
                .into_iter()
                .map(|i| entries[i].0.clone())
                .collect();
            let mut choices: Vec<RatSet> = (1..=band.len().min(8))
                .map(|m| RatSet::new(band[..m].to_vec()))
                .collect();
            if band.len() <= 10 {
                for i in 0..band.len() {
                    for j in i + 1..band.len() {
                        for l in j + 1..band.len() {
                            choices.push(RatSet::new(vec![
                                band[i].clone(),
                                band[j].clone(),
                                band[l].clone(),
                            ]));
                        }
                    }
                }
            }
            for s_prime in choices {
                let report = match slice_sigma_check(&a, &tau, &s_prime, None, budget) {
                    Ok(r) => r,
                    Err(Error::Budget(_)) => continue,
                    Err(e) => return Err(e),
                };
                out.runs += 1;
                if report.triples > 0 {
                    let ratio = 32.0 * report.sigma as f64 / tau.to_f64().powi(2);
                    out.best_lower_ratio =
                        Some(out.best_lower_ratio.map_or(ratio, |b: f64| b.min(ratio)));
                }
                if report.status != Status::PreconditionUnmet {
                    out.precondition_met += 1;
                    if let Some(s) = report.stress {
                        out.min_stress = Some(out.min_stress.map_or(s, |m: f64| m.min(s)));
                    }
                    if out.witness.is_none() {
                        out.witness = Some((a.clone(), report));
                    }
                }
            }
        }
    }
    Ok(out)
}
