//! Proof replays on concrete sets, and the exact inequality suite.
//!
//! A [`ProofTrace`] records every intermediate quantity of a pipeline with
//! the inequality checked at that step. Asserted steps store both sides as
//! exact rationals (after clearing fractional exponents), so
//! [`ProofTrace::recheck`] can re-verify them from the record alone.

mod levels;
mod suite;
mod sum_product;
mod sumset_ratio;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::PowerProduct;
use crate::scalar::Scalar;

pub use levels::{
    rich_level_witness, slice_sigma_check, slice_sigma_search, RichLevelRow, RichLevelWitness,
    SliceSigmaReport, SliceSigmaSearch,
};
pub use suite::{inequality_suite, SuiteConfig, SuiteReport, SuiteRow};
pub use sum_product::trace_sum_product;
pub use sumset_ratio::{trace_sumset_ratio, KappaChoice, SumsetRatioConfig};

pub const TRACE_SCHEMA: &str = "sumprod.trace/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Exact inequality that must hold.
    AssertedExact,
    /// Recorded for comparison; hidden constants make it non-assertable.
    ReportOnly,
    /// Depends on an input that could not be certified exactly.
    Conditional,
    /// A hypothesis of the step failed, so its conclusion is not claimed.
    PreconditionUnmet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rel {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
}

impl Rel {
    pub fn eval(self, lhs: &Scalar, rhs: &Scalar) -> bool {
        match self {
            Rel::Le => lhs <= rhs,
            Rel::Lt => lhs < rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
            Rel::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
            Rel::Eq => "==",
        })
    }
}

/// `lhs rel rhs`, where both sides are the original quantities raised to
/// `power` (1 unless fractional exponents had to be cleared).
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub lhs: Scalar,
    pub rel: Rel,
    pub rhs: Scalar,
    pub power: i64,
    pub holds: bool,
    /// `lhs/rhs` before raising to `power`, approximate.
    pub margin: f64,
}

impl Check {
    pub fn new(lhs: Scalar, rel: Rel, rhs: Scalar) -> Check {
        let holds = rel.eval(&lhs, &rhs);
        let margin = if rhs.is_zero() {
            f64::INFINITY
        } else {
            lhs.to_f64() / rhs.to_f64()
        };
        Check {
            lhs,
            rel,
            rhs,
            power: 1,
            holds,
            margin,
        }
    }

    /// Compares two positive power products exactly.
    pub fn powers(lhs: &PowerProduct, rel: Rel, rhs: &PowerProduct) -> Check {
        let k = lhs.exponent_lcm().max(1);
        let k = num_integer::lcm(k, rhs.exponent_lcm().max(1));
        let l = Scalar::from_rational(lhs.raised_to(k));
        let r = Scalar::from_rational(rhs.raised_to(k));
        Check {
            holds: rel.eval(&l, &r),
            lhs: l,
            rel,
            rhs: r,
            power: k,
            margin: lhs.div(rhs).to_f64(),
        }
    }

    pub fn recheck(&self) -> bool {
        self.rel.eval(&self.lhs, &self.rhs)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub name: String,
    pub status: Status,
    pub description: String,
    pub check: Option<Check>,
    pub values: BTreeMap<String, Value>,
}

impl Step {
    pub fn new(name: &str, status: Status, description: &str) -> Step {
        Step {
            name: name.to_string(),
            status,
            description: description.to_string(),
            check: None,
            values: BTreeMap::new(),
        }
    }

    pub fn with_check(mut self, check: Check) -> Step {
        self.check = Some(check);
        self
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Step {
        self.values.insert(
            key.to_string(),
            serde_json::to_value(v).expect("trace values serialize"),
        );
        self
    }

    /// True unless this is an asserted step whose check fails.
    pub fn passes(&self) -> bool {
        self.status != Status::AssertedExact || self.check.as_ref().is_none_or(|c| c.holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofTrace {
    pub schema: &'static str,
    pub pipeline: String,
    pub mode: String,
    pub input_digest: String,
    pub input_len: usize,
    pub steps: Vec<Step>,
}

impl ProofTrace {
    pub fn new(pipeline: &str, mode: &str, input: &crate::set::RatSet) -> ProofTrace {
        ProofTrace {
            schema: TRACE_SCHEMA,
            pipeline: pipeline.to_string(),
            mode: mode.to_string(),
            input_digest: input.digest(),
            input_len: input.len(),
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Asserted steps whose recorded check fails.
    pub fn failures(&self) -> Vec<&Step> {
        self.steps.iter().filter(|s| !s.passes()).collect()
    }

    /// Re-verifies every asserted step from its recorded sides.
    pub fn recheck(&self) -> Result<()> {
        for s in &self.steps {
            if s.status != Status::AssertedExact {
                continue;
            }
            if let Some(c) = &s.check {
                if !c.recheck() || !c.holds {
                    return Err(Error::CertificateInvalid(format!(
                        "step {}: {} {} {} fails",
                        s.name, c.lhs, c.rel, c.rhs
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Every `τ` at which `|S_τ|·τ^k` can be maximal.
///
/// `S_τ = {λ : τ < c(λ) ≤ 2τ}` is constant between consecutive points of
/// `{c, c/2}`. On such a piece the objective grows with `τ`, so the
/// supremum sits at the right end: at `c/2` it is attained, at `c` it is
/// approached from below, and a point within `min(1/(4c), (c − thr)/2)` of
/// it stands in (inside the same piece, as breakpoints are half-integers).
pub(crate) fn tau_candidates(counts: &[u64], threshold: &Scalar) -> Vec<Scalar> {
    let mut distinct: Vec<u64> = counts.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let two = Scalar::from(2u64);
    let mut out = vec![threshold.clone()];
    for &c in &distinct {
        let cs = Scalar::from(c);
        out.push(&cs / &two);
        if &cs > threshold {
            let eps = (Scalar::one() / Scalar::from(4 * c)).min((&cs - threshold) / &two);
            out.push(&cs - &eps);
        }
    }
    out.retain(|t| t >= threshold && t.is_positive());
    out.sort();
    out.dedup();
    out
}

/// `S_τ` as indices into `counts`.
pub(crate) fn band_indices(counts: &[u64], tau: &Scalar) -> Vec<usize> {
    let two_tau = tau * &Scalar::from(2u64);
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| {
            let c = Scalar::from(c);
            &c > tau && c <= two_tau
        })
        .map(|(i, _)| i)
        .collect()
}

/// The candidate maximising `|S_τ|·τ^k`, ties to the larger `τ`.
pub(crate) fn best_tau(counts: &[u64], threshold: &Scalar, k: i32) -> (Scalar, Vec<usize>) {
    let mut best: Option<(Scalar, Scalar, Vec<usize>)> = None;
    for tau in tau_candidates(counts, threshold) {
        let idx = band_indices(counts, &tau);
        let score = Scalar::from(idx.len()) * tau.pow(k);
        // candidates ascend, so >= keeps the larger τ on ties
        if best.as_ref().is_none_or(|(s, _, _)| score >= *s) {
            best = Some((score, tau, idx));
        }
    }
    let (_, tau, idx) = best.expect("the top count always yields a candidate");
    (tau, idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn tau_search_picks_the_heaviest_band() {
        // counts 3, 1 ×6 (the slices of {1, 2, 3}); threshold 15/18
        let counts = [1, 1, 1, 3, 1, 1, 1];
        let (tau, idx) = best_tau(&counts, &q(15, 18), 2);
        // τ just below 3 keeps λ = 1 alone and beats the six unit slices
        assert_eq!(tau, q(35, 12));
        assert_eq!(idx, vec![3]);
        // linear weight prefers the six unit slices, with τ pushed toward 1
        let (tau, idx) = best_tau(&counts, &q(15, 18), 1);
        assert_eq!(idx.len(), 6);
        assert_eq!(tau, q(11, 12));
    }

    #[test]
    fn power_checks_are_exact() {
        let a = PowerProduct::one().times(2u64, 1, 2);
        let b = PowerProduct::of(q(7, 5));
        let c = Check::powers(&a, Rel::Ge, &b);
        assert!(c.holds);
        assert_eq!(c.power, 2);
        assert!(c.recheck());
    }
}
