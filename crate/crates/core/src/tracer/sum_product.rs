//! Replay of the `max{|A+A|, |Π|} ≳ |A|^{4/3+c}` argument.

use super::{rich_level_witness, Check, ProofTrace, Rel, Status, Step};
use crate::certificates::{dstar_cert_from_sym, fiber_mult, PiMode};
use crate::error::Result;
use crate::exact::PowerProduct;
use crate::scalar::Scalar;
use crate::set::RatSet;
use crate::szt::{sumset_from_d_report, BoundRow};

fn mode_name(mode: PiMode) -> &'static str {
    match mode {
        PiMode::Quotient => "quotient",
        PiMode::Product => "product",
    }
}

/// Runs the level-set, Katz–Koester, averaging and certificate steps on
/// `A`, then reports the resulting chain of bounds.
pub fn trace_sum_product(a: &RatSet, mode: PiMode) -> Result<ProofTrace> {
    let mut trace = ProofTrace::new("sum-product-4/3", mode_name(mode), a);
    let w = rich_level_witness(a, mode)?;
    let n_a = a.len();

    trace.push(
        Step::new(
            "energy-level",
            Status::AssertedExact,
            "2n|S|τ² ≥ E×(A) for the heaviest band above E×(A)/(2|A|²)",
        )
        .with_check(w.pigeonhole.clone())
        .value("energy", &w.energy)
        .value("threshold", &w.threshold)
        .value("tau", &w.tau)
        .value("n", w.n)
        .value("s_len", w.s.len())
        .value("s", &w.s),
    );
    trace.push(
        Step::new(
            "level-threshold",
            Status::AssertedExact,
            "τ ≥ E×(A)/(2|A|²)",
        )
        .with_check(Check::new(w.tau.clone(), Rel::Ge, w.threshold.clone())),
    );
    let min_ratio = w
        .rows
        .iter()
        .filter(|r| r.in_s_prime)
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    trace.push(
        Step::new(
            "rich-half",
            Status::ReportOnly,
            "half of S with the largest slice sets, against τ²L⁻¹⁶",
        )
        .with_check(Check::new(
            Scalar::from(2 * w.s_prime.len()),
            Rel::Ge,
            Scalar::from(w.s.len()),
        ))
        .value("s_prime", &w.s_prime)
        .value("l", &w.l)
        .value("min_op_len", w.s_prime_min_op)
        .value("min_ratio_vs_tau2_l16", min_ratio)
        .value("rows", &w.rows),
    );

    // Katz–Koester: A_λ op A_λ sits inside Π ∩ λΠ^{∓1}
    let pi = mode.pi(a)?;
    let r_set = match mode {
        PiMode::Quotient => pi.clone(),
        PiMode::Product => pi.inverse()?,
    };
    let mut inclusions = 0usize;
    let mut min_fiber = u64::MAX;
    let mut slice_mass = 0u64;
    for lambda in &w.s_prime {
        let slice = a.slice(lambda)?;
        slice_mass += slice.len() as u64;
        let combined = match mode {
            PiMode::Quotient => slice.quotientset(&slice)?,
            PiMode::Product => slice.productset(&slice)?,
        };
        let fiber = fiber_mult(&pi, &r_set, lambda);
        let inside = combined.iter().all(|u| {
            let partner = match mode {
                PiMode::Quotient => lambda / u,
                PiMode::Product => u / lambda,
            };
            pi.contains(u) && pi.contains(&partner)
        });
        if inside {
            inclusions += 1;
        }
        min_fiber = min_fiber.min(fiber as u64);
    }
    let t = w.s_prime_min_op as u64;
    trace.push(
        Step::new(
            "katz-koester-inclusion",
            Status::AssertedExact,
            "A_λ op A_λ ⊆ Π ∩ λΠ^{∓1} for every λ in S'",
        )
        .with_check(Check::new(
            Scalar::from(inclusions),
            Rel::Eq,
            Scalar::from(w.s_prime.len()),
        )),
    );
    trace.push(
        Step::new(
            "symmetry-membership",
            Status::AssertedExact,
            "S' ⊆ Sym_t(Π, Π^{±1})",
        )
        .with_check(Check::new(
            Scalar::from(min_fiber),
            Rel::Ge,
            Scalar::from(t),
        ))
        .value("t", t)
        .value("pi_len", pi.len()),
    );

    // averaging over a ∈ A of |A ∩ aS'|
    let s_prime = RatSet::new(w.s_prime.clone());
    let mut total = 0u64;
    let mut best: Option<(usize, &Scalar)> = None;
    for x in a {
        let hits = s_prime.iter().filter(|l| a.contains(&(x * *l))).count();
        total += hits as u64;
        if best.is_none_or(|(h, _)| hits > h) {
            best = Some((hits, x));
        }
    }
    let (best_hits, best_a) = best.expect("A is nonempty");
    let a_prime = a.intersection(&s_prime.dilate(best_a)?);
    debug_assert_eq!(a_prime.len(), best_hits);
    trace.push(
        Step::new(
            "averaging-identity",
            Status::AssertedExact,
            "Σ_a |A ∩ aS'| = Σ_{λ∈S'} |A_λ|",
        )
        .with_check(Check::new(
            Scalar::from(total),
            Rel::Eq,
            Scalar::from(slice_mass),
        )),
    );
    trace.push(
        Step::new(
            "averaging-max",
            Status::AssertedExact,
            "|A'|·|A| ≥ Σ_a |A ∩ aS'|",
        )
        .with_check(Check::new(
            Scalar::from(a_prime.len() * n_a),
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
            "Σ_{λ∈S'} |A_λ| > τ|S'|",
        )
        .with_check(Check::new(
            Scalar::from(slice_mass),
            Rel::Gt,
            &w.tau * &Scalar::from(w.s_prime.len()),
        )),
    );

    // A' ⊆ Sym_t(aΠ, Π^{±1})
    let q_set = pi.dilate(best_a)?;
    let a_prime_min_fiber = a_prime
        .iter()
        .map(|x| fiber_mult(&q_set, &r_set, x) as u64)
        .min()
        .unwrap_or(0);
    let cert = dstar_cert_from_sym(&a_prime, &q_set, &r_set, t).ok();
    let mut step = Step::new(
        "certificate",
        Status::AssertedExact,
        "A' ⊆ Sym_t(aΠ, Π^{±1}), bounding d*(A') by |Π|⁴/(|A'|t³)",
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
    let Some(cert) = cert else {
        return Ok(trace);
    };

    // report-only chain
    let l = w.l.clone();
    let chain = PowerProduct::one()
        .times(pi.len(), 4, 1)
        .times(l.clone(), 48, 1)
        .times(a_prime.len(), -1, 1)
        .times(w.tau.clone(), -6, 1);
    trace.push(report(BoundRow::upper(
        "d_star_chain",
        cert.value.clone(),
        &chain,
        format!("|Π|^4 L^48 / (|A'| τ^6) with L = {l}"),
    )));
    trace.push(report(sumset_from_d_report(&a_prime, &cert.value)?));

    let sumset_len = w.sumset_len;
    let l_prime = Scalar::from(pi.len()).pow(3) / Scalar::from(n_a).pow(4);
    let final_chain = PowerProduct::one()
        .times(l.clone(), -1008, 37)
        .times(l_prime.clone(), -70, 37)
        .times(n_a, 51, 37);
    trace.push(report(BoundRow::lower(
        "sumset_chain",
        Scalar::from(sumset_len),
        &final_chain,
        format!("L^(-1008/37) L'^(-70/37) |A|^(51/37) with L' = {l_prime}"),
    )));
    let top = Scalar::from(sumset_len.max(pi.len()));
    trace.push(report(BoundRow::lower(
        "max_vs_refined",
        top.clone(),
        &PowerProduct::one().times(n_a, 13089, 9813),
        format!("{n_a}^(4/3+5/9813)"),
    )));
    trace.push(report(BoundRow::lower(
        "max_vs_four_thirds",
        top,
        &PowerProduct::one().times(n_a, 4, 3),
        format!("{n_a}^(4/3)"),
    )));
    Ok(trace)
}

pub(super) fn report(row: BoundRow) -> Step {
    let name = row.name.clone();
    Step::new(&name, Status::ReportOnly, &row.bound.clone()).value("row", row)
}
