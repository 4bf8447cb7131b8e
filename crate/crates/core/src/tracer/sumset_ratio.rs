//! Replay of the `|A+A| ≳ |A|^{1313/830}K^{-336/415}` argument for
//! `|A/A| = K|A|`.

use serde::{Deserialize, Serialize};

use super::sum_product::report;
use super::{best_tau, Check, ProofTrace, Rel, Status, Step};
use crate::certificates::{d_cert, dstar_cert_from_sym, fiber_mult};
use crate::error::{domain, Result};
use crate::exact::{log2_floor, PowerProduct};
use crate::scalar::{q, Scalar};
use crate::set::RatSet;
use crate::szt::{sumset_from_d_report, BoundRow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaChoice {
    /// `κ = |A|^{7/830}K^{-59/415}`, the choice balancing the two branches.
    Auto,
    Value(Scalar),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumsetRatioConfig {
    pub kappa: KappaChoice,
    /// Constant in the regime gate `K ≤ γ|A|^{1/4}`.
    pub gamma: Scalar,
}

impl Default for SumsetRatioConfig {
    fn default() -> Self {
        SumsetRatioConfig {
            kappa: KappaChoice::Auto,
            gamma: q(1, 16),
        }
    }
}

/// Runs the level, median-split, certificate and averaging steps on `A`
/// with `Π = A/A`, reporting both branch bounds.
pub fn trace_sumset_ratio(a: &RatSet, config: &SumsetRatioConfig) -> Result<ProofTrace> {
    a.require_nonempty("A")?;
    a.require_no_zero("A")?;
    if !config.gamma.is_positive() {
        return domain("γ must be positive");
    }
    let mut trace = ProofTrace::new("sumset-vs-quotient-ratio", "quotient", a);
    let pi = a.quotientset(a)?;
    let n_a = a.len();
    if pi.len() < 2 {
        trace.push(
            Step::new(
                "degenerate",
                Status::ReportOnly,
                "|A/A| < 2, nothing to trace",
            )
            .value("pi_len", pi.len()),
        );
        return Ok(trace);
    }
    let k = Scalar::from(pi.len()) / Scalar::from(n_a);
    let kappa = match &config.kappa {
        KappaChoice::Auto => PowerProduct::one()
            .times(n_a, 7, 830)
            .times(k.clone(), -59, 415),
        KappaChoice::Value(v) => {
            if !v.is_positive() || v > &Scalar::one() {
                return domain(format!("κ = {v} is outside (0, 1]"));
            }
            PowerProduct::of(v.clone())
        }
    };

    trace.push(
        Step::new("regime-lower", Status::ReportOnly, "|A|^{5/23} ≤ K")
            .with_check(Check::powers(
                &PowerProduct::of(k.clone()),
                Rel::Ge,
                &PowerProduct::one().times(n_a, 5, 23),
            ))
            .value("k", &k)
            .value("kappa_requested", kappa.to_f64())
            .value("kappa_exceeds_one", kappa.to_f64() > 1.0),
    );
    trace.push(
        Step::new("regime-upper", Status::ReportOnly, "K ≤ γ|A|^{1/4}")
            .with_check(Check::powers(
                &PowerProduct::of(k.clone()),
                Rel::Le,
                &PowerProduct::of(config.gamma.clone()).times(n_a, 1, 4),
            ))
            .value("gamma", &config.gamma),
    );

    // level τ ≥ |A|/(2K) maximising |S_τ|τ
    let threshold = Scalar::from(n_a * n_a) / Scalar::from(2 * pi.len());
    let by_lambda = crate::energy::slices(a)?;
    let entries: Vec<(&Scalar, &RatSet)> = by_lambda.iter().collect();
    let counts: Vec<u64> = entries.iter().map(|(_, s)| s.len() as u64).collect();
    let (tau, band) = best_tau(&counts, &threshold, 1);
    let n = log2_floor(n_a as u64) + 1;
    trace.push(
        Step::new("dirichlet-level", Status::AssertedExact, "n|S|τ ≥ |A|²")
            .with_check(Check::new(
                Scalar::from(n as u64 * band.len() as u64) * &tau,
                Rel::Ge,
                Scalar::from(n_a * n_a),
            ))
            .value("threshold", &threshold)
            .value("tau", &tau)
            .value("n", n)
            .value("s_len", band.len()),
    );
    trace.push(
        Step::new("level-threshold", Status::AssertedExact, "τ ≥ |A|/(2K)").with_check(Check::new(
            tau.clone(),
            Rel::Ge,
            threshold.clone(),
        )),
    );

    // median split by |A_λ/A|, the odd element going to S'
    let inv = a.inverse()?;
    let mut measured: Vec<(usize, usize)> = Vec::with_capacity(band.len());
    for &i in &band {
        measured.push((entries[i].1.productset(&inv)?.len(), i));
    }
    measured.sort();
    let cut = band.len().div_ceil(2);
    let (lower, upper) = measured.split_at(cut);
    let kappa_top = lower.last().map_or(0, |p| p.0);
    let kappa_realized = Scalar::from(kappa_top) / Scalar::from(pi.len());
    let t2 = upper.first().map(|p| p.0);
    let split_check = match t2 {
        Some(t2) => Check::new(Scalar::from(t2), Rel::Ge, Scalar::from(kappa_top)),
        None => Check::new(
            Scalar::from(lower.len()),
            Rel::Ge,
            Scalar::from(upper.len()),
        ),
    };
    let lambdas = |part: &[(usize, usize)]| -> Vec<Scalar> {
        let mut v: Vec<Scalar> = part.iter().map(|p| entries[p.1].0.clone()).collect();
        v.sort();
        v
    };
    trace.push(
        Step::new(
            "kappa-split",
            Status::AssertedExact,
            "|A_λ/A| ≤ κ|Π| on S' and ≥ κ|Π| on S'', κ realized as the max over S'",
        )
        .with_check(split_check)
        .value("s_prime", lambdas(lower))
        .value("s_second", lambdas(upper))
        .value("kappa_realized", &kappa_realized),
    );

    // d(A_λ) ≤ κ²|Π|²/(|A_λ||A|) through C = A⁻¹
    let pi_sq = Scalar::from(pi.len()).pow(2);
    let mut good = 0usize;
    let mut worst = 0f64;
    for &(_, i) in lower {
        let slice = entries[i].1;
        let d = d_cert(slice, &inv)?;
        let bound = kappa_realized.pow(2) * &pi_sq / Scalar::from(slice.len() * n_a);
        let coarse = kappa_realized.pow(2) * &pi_sq / (&tau * &Scalar::from(n_a));
        let induced = d
            .induced(slice)
            .map(|c| c.value == d.value)
            .unwrap_or(false);
        if d.value <= bound && bound <= coarse && induced {
            good += 1;
        }
        worst = worst.max(d.value.to_f64() / bound.to_f64());
    }
    trace.push(
        Step::new(
            "slice-certificates",
            Status::AssertedExact,
            "d(A_λ) ≤ κ²|Π|²/(|A_λ||A|) ≤ κ²|Π|²/(τ|A|) with a valid induced certificate",
        )
        .with_check(Check::new(
            Scalar::from(good),
            Rel::Eq,
            Scalar::from(lower.len()),
        ))
        .value("max_value_over_bound", worst),
    );

    let sumset_len = a.sumset(a)?.len();
    let sumset = Scalar::from(sumset_len);
    // σ = τ^{4/3}K^{2/3}|A|^{1/3}κ^{2/3}
    let sigma = PowerProduct::one()
        .times(tau.clone(), 4, 3)
        .times(k.clone(), 2, 3)
        .times(n_a, 1, 3)
        .mul(&kappa.scaled(2, 3));
    trace.push(report(BoundRow::lower(
        "condition-lower",
        tau.pow(2),
        &sigma.mul(&PowerProduct::of(32u64)),
        "τ² against 32σ, σ = τ^(4/3) K^(2/3) |A|^(1/3) κ^(2/3)".into(),
    )));
    trace.push(report(BoundRow::upper(
        "condition-upper",
        tau.pow(8),
        &PowerProduct::one()
            .times(sumset_len, 6, 1)
            .times(k.clone(), 2, 1)
            .times(n_a, 1, 1)
            .mul(&kappa)
            .mul(&kappa),
        "τ⁸ against |A+A|⁶ K² |A| κ²".into(),
    )));
    trace.push(report(BoundRow::lower(
        "branch_small_kappa",
        sumset.clone(),
        &PowerProduct::one()
            .times(n_a, 19, 12)
            .times(k.clone(), -5, 6)
            .mul(&kappa.scaled(-1, 6)),
        "|A|^(19/12) K^(-5/6) κ^(-1/6)".into(),
    )));

    if upper.is_empty() {
        trace.push(Step::new(
            "second-half",
            Status::PreconditionUnmet,
            "S'' is empty, the large-κ branch has nothing to average",
        ));
    } else {
        second_half(
            &mut trace,
            a,
            &pi,
            &tau,
            upper,
            &entries,
            &kappa_realized,
            band.len(),
        )?;
        let row = BoundRow::lower(
            "branch_large_kappa",
            sumset.clone(),
            &PowerProduct::one()
                .times(n_a, 58, 37)
                .times(k.clone(), -21, 37)
                .mul(&kappa.scaled(63, 37)),
            "|A|^(58/37) K^(-21/37) κ^(63/37)".into(),
        );
        trace.push(report(row));
    }

    trace.push(report(BoundRow::lower(
        "final_bound",
        sumset,
        &PowerProduct::one()
            .times(n_a, 1313, 830)
            .times(k.clone(), -336, 415),
        "|A|^(1313/830) K^(-336/415)".into(),
    )));
    Ok(trace)
}

#[allow(clippy::too_many_arguments)]
fn second_half(
    trace: &mut ProofTrace,
    a: &RatSet,
    pi: &RatSet,
    tau: &Scalar,
    upper: &[(usize, usize)],
    entries: &[(&Scalar, &RatSet)],
    kappa_realized: &Scalar,
    s_len: usize,
) -> Result<()> {
    let inv = a.inverse()?;
    let t = upper.iter().map(|p| p.0).min().expect("nonempty") as u64;
    let mut inclusions = 0usize;
    let mut min_fiber = u64::MAX;
    let mut mass = 0u64;
    for &(_, i) in upper {
        let (lambda, slice) = entries[i];
        mass += slice.len() as u64;
        let ratio = slice.productset(&inv)?;
        if ratio
            .iter()
            .all(|u| pi.contains(u) && pi.contains(&(lambda / u)))
        {
            inclusions += 1;
        }
        min_fiber = min_fiber.min(fiber_mult(pi, pi, lambda) as u64);
    }
    trace.push(
        Step::new(
            "katz-koester-inclusion",
            Status::AssertedExact,
            "A_λ/A ⊆ Π ∩ λΠ⁻¹ for every λ in S''",
        )
        .with_check(Check::new(
            Scalar::from(inclusions),
            Rel::Eq,
            Scalar::from(upper.len()),
        )),
    );
    trace.push(
        Step::new(
            "symmetry-membership",
            Status::AssertedExact,
            "|Π ∩ λΠ⁻¹| ≥ t ≥ κ|Π| on S''",
        )
        .with_check(Check::new(
            Scalar::from(min_fiber),
            Rel::Ge,
            Scalar::from(t),
        ))
        .value("t", t)
        .value("kappa_pi", kappa_realized * &Scalar::from(pi.len())),
    );

    let s2 = RatSet::new(upper.iter().map(|p| entries[p.1].0.clone()).collect());
    let mut total = 0u64;
    let mut best: Option<(usize, &Scalar)> = None;
    for x in a {
        let hits = s2.iter().filter(|l| a.contains(&(x * *l))).count();
        total += hits as u64;
        if best.is_none_or(|(h, _)| hits > h) {
            best = Some((hits, x));
        }
    }
    let (_, best_a) = best.expect("A is nonempty");
    let a_prime = a.intersection(&s2.dilate(best_a)?);
    trace.push(
        Step::new(
            "averaging-identity",
            Status::AssertedExact,
            "Σ_a |A ∩ aS''| = Σ_{λ∈S''} |A_λ|",
        )
        .with_check(Check::new(Scalar::from(total), Rel::Eq, Scalar::from(mass))),
    );
    trace.push(
        Step::new(
            "averaging-max",
            Status::AssertedExact,
            "|A'|·|A| ≥ Σ_a |A ∩ aS''|",
        )
        .with_check(Check::new(
            Scalar::from(a_prime.len() * a.len()),
            Rel::Ge,
            Scalar::from(total),
        ))
        .value("a", best_a)
        .value("a_prime", &a_prime),
    );
    trace.push(
        Step::new(
            "averaging-lower",
            Status::AssertedExact,
            "Σ_{λ∈S''} |A_λ| > τ|S''|",
        )
        .with_check(Check::new(
            Scalar::from(mass),
            Rel::Gt,
            tau * &Scalar::from(upper.len()),
        )),
    );
    // the unnamed density constant in front of τ|S_τ| is taken to be 1/2
    trace.push(
        Step::new(
            "eta",
            Status::ReportOnly,
            "Σ_{λ∈S''} |A_λ| ≥ ητ|S| with η = 1/2",
        )
        .with_check(Check::new(
            Scalar::from(mass),
            Rel::Ge,
            tau * &Scalar::from(s_len) * &q(1, 2),
        ))
        .value("eta", q(1, 2))
        .value("unhoused", true),
    );

    let q_set = pi.dilate(best_a)?;
    let a_prime_min_fiber = a_prime
        .iter()
        .map(|x| fiber_mult(&q_set, pi, x) as u64)
        .min()
        .unwrap_or(0);
    let cert = dstar_cert_from_sym(&a_prime, &q_set, pi, t).ok();
    let mut step = Step::new(
        "certificate",
        Status::AssertedExact,
        "A' ⊆ Sym_t(aΠ, Π), bounding d*(A') by |Π|⁴/(|A'|t³)",
    )
    .with_check(Check::new(
        Scalar::from(a_prime_min_fiber),
        Rel::Ge,
        Scalar::from(t),
    ));
    if let Some(c) = &cert {
        step = step.value("certificate", c.record());
    }
    trace.push(step);
    if let Some(c) = cert {
        trace.push(report(sumset_from_d_report(&a_prime, &c.value)?));
    }
    Ok(())
}
