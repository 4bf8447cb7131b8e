//! Deterministic set families, from additively to multiplicatively
//! structured.
//!
//! Random kinds use ChaCha8 seeded from the spec, so a spec names the same
//! set on every platform.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::set::RatSet;

fn default_start() -> Scalar {
    Scalar::one()
}

fn default_step() -> Scalar {
    Scalar::one()
}

fn default_ratio() -> Scalar {
    Scalar::from(2i64)
}

fn default_den() -> u64 {
    7
}

/// A set family. JSON form: `{"kind": "gp", "size": 16, "ratio": "3/2"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `start, start + step, …`
    Ap {
        size: usize,
        #[serde(default = "default_start")]
        start: Scalar,
        #[serde(default = "default_step")]
        step: Scalar,
        #[serde(default)]
        allow_zero: bool,
    },
    /// `start, start·ratio, …`
    Gp {
        size: usize,
        #[serde(default = "default_start")]
        start: Scalar,
        #[serde(default = "default_ratio")]
        ratio: Scalar,
    },
    /// `size` distinct integers drawn uniformly from `[1, range]` without
    /// replacement; `range` defaults to `size³`.
    RandomInteger {
        size: usize,
        seed: u64,
        #[serde(default)]
        range: Option<u64>,
    },
    /// `{1, …, ap_size} ∪ {(ap_size + 1)·2^k : k < gp_size}`.
    ApUnionGp { ap_size: usize, gp_size: usize },
    /// `{k² : 1 ≤ k ≤ size}`.
    Convex { size: usize },
    /// Greedy Sidon sequence 1, 2, 4, 8, 13, … (all pairwise sums distinct).
    SidonGreedy {
        size: usize,
        #[serde(default)]
        range: Option<u64>,
    },
    /// `{k + u_k/den}` with `u_k` uniform in `[0, den)`, `1 ≤ k ≤ size`.
    Perturbed {
        size: usize,
        seed: u64,
        #[serde(default = "default_den")]
        den: u64,
    },
}

impl FamilySpec {
    pub fn size(&self) -> usize {
        match self {
            FamilySpec::Ap { size, .. }
            | FamilySpec::Gp { size, .. }
            | FamilySpec::RandomInteger { size, .. }
            | FamilySpec::Convex { size }
            | FamilySpec::SidonGreedy { size, .. }
            | FamilySpec::Perturbed { size, .. } => *size,
            FamilySpec::ApUnionGp { ap_size, gp_size } => ap_size + gp_size,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::Ap { .. } => "ap",
            FamilySpec::Gp { .. } => "gp",
            FamilySpec::RandomInteger { .. } => "random_integer",
            FamilySpec::ApUnionGp { .. } => "ap_union_gp",
            FamilySpec::Convex { .. } => "convex",
            FamilySpec::SidonGreedy { .. } => "sidon_greedy",
            FamilySpec::Perturbed { .. } => "perturbed",
        }
    }

    /// Same kind and parameters at a different size. For `ap_union_gp` the
    /// size is split evenly.
    pub fn with_size(&self, n: usize) -> FamilySpec {
        let mut s = self.clone();
        match &mut s {
            FamilySpec::Ap { size, .. }
            | FamilySpec::Gp { size, .. }
            | FamilySpec::RandomInteger { size, .. }
            | FamilySpec::Convex { size }
            | FamilySpec::SidonGreedy { size, .. }
            | FamilySpec::Perturbed { size, .. } => *size = n,
            FamilySpec::ApUnionGp { ap_size, gp_size } => {
                *ap_size = n - n / 2;
                *gp_size = n / 2;
            }
        }
        s
    }

    /// A short stable label such as `gp(16)`.
    pub fn label(&self) -> String {
        format!("{}({})", self.kind_name(), self.size())
    }

    /// The default spec of a kind, by name.
    pub fn by_name(kind: &str, size: usize, seed: u64) -> Result<FamilySpec> {
        let spec = match kind {
            "ap" => FamilySpec::Ap {
                size,
                start: default_start(),
                step: default_step(),
                allow_zero: false,
            },
            "gp" => FamilySpec::Gp {
                size,
                start: default_start(),
                ratio: default_ratio(),
            },
            "random_integer" | "random-integer" => FamilySpec::RandomInteger {
                size,
                seed,
                range: None,
            },
            "ap_union_gp" | "ap-union-gp" => FamilySpec::ApUnionGp {
                ap_size: size - size / 2,
                gp_size: size / 2,
            },
            "convex" => FamilySpec::Convex { size },
            "sidon_greedy" | "sidon-greedy" => FamilySpec::SidonGreedy { size, range: None },
            "perturbed" => FamilySpec::Perturbed {
                size,
                seed,
                den: default_den(),
            },
            other => {
                return Err(crate::Error::Parse(format!(
                    "unknown family kind {other:?}"
                )))
            }
        };
        Ok(spec)
    }
}

/// Every kind, in the order scans report them.
pub const ALL_KINDS: [&str; 7] = [
    "ap",
    "gp",
    "random_integer",
    "ap_union_gp",
    "convex",
    "sidon_greedy",
    "perturbed",
];

pub fn generate(spec: &FamilySpec) -> Result<RatSet> {
    let n = spec.size();
    if n == 0 {
        return domain("family size must be at least 1");
    }
    let (elems, allow_zero): (Vec<Scalar>, bool) = match spec {
        FamilySpec::Ap {
            size,
            start,
            step,
            allow_zero,
        } => {
            if step.is_zero() && *size > 1 {
                return domain("ap step must be nonzero");
            }
            let v = (0..*size)
                .map(|k| start + &(step * &Scalar::from(k)))
                .collect();
            (v, *allow_zero)
        }
        FamilySpec::Gp { size, start, ratio } => {
            if ratio.is_zero() || ratio.abs() == Scalar::one() {
                return domain("gp ratio must not be 0, 1 or -1");
            }
            let mut v = Vec::with_capacity(*size);
            let mut x = start.clone();
            for _ in 0..*size {
                v.push(x.clone());
                x = &x * ratio;
            }
            (v, false)
        }
        FamilySpec::RandomInteger { size, seed, range } => {
            let range = match range {
                Some(r) => *r,
                None => (*size as u64).checked_pow(3).unwrap_or(u64::MAX),
            };
            if range < *size as u64 {
                return domain(format!("range {range} is smaller than size {size}"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let v = if range <= u32::MAX as u64 {
                index::sample(&mut rng, range as usize, *size)
                    .into_iter()
                    .map(|i| Scalar::from(i as u64 + 1))
                    .collect()
            } else {
                let mut seen = std::collections::BTreeSet::new();
                while seen.len() < *size {
                    seen.insert(rng.gen_range(1..=range));
                }
                seen.into_iter().map(Scalar::from).collect()
            };
            (v, false)
        }
        FamilySpec::ApUnionGp { ap_size, gp_size } => {
            let mut v: Vec<Scalar> = (1..=*ap_size as u64).map(Scalar::from).collect();
            let base = Scalar::from(*ap_size as u64 + 1);
            let two = Scalar::from(2i64);
            for k in 0..*gp_size {
                v.push(&base * &two.pow(k as i32));
            }
            (v, false)
        }
        FamilySpec::Convex { size } => (
            (1..=*size as u64).map(|k| Scalar::from(k * k)).collect(),
            false,
        ),
        FamilySpec::SidonGreedy { size, range } => (sidon_greedy(*size, *range)?, false),
        FamilySpec::Perturbed { size, seed, den } => {
            if *den == 0 {
                return domain("perturbation denominator must be positive");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let v = (1..=*size as i64)
                .map(|k| {
                    let u = rng.gen_range(0..*den) as i64;
                    Scalar::new(k * *den as i64 + u, *den as i64).expect("den > 0")
                })
                .collect();
            (v, false)
        }
    };
    let set = RatSet::new(elems);
    if set.len() != n {
        return domain(format!(
            "{} produced {} distinct elements, not {n}",
            spec.label(),
            set.len()
        ));
    }
    if !allow_zero && !set.excludes_zero() {
        return domain(format!(
            "{} contains 0; set allow_zero to keep it",
            spec.label()
        ));
    }
    Ok(set)
}

/// The Mian–Chowla sequence: repeatedly take the least integer keeping all
/// pairwise sums distinct.
fn sidon_greedy(size: usize, range: Option<u64>) -> Result<Vec<Scalar>> {
    let limit = range.unwrap_or(u64::MAX);
    let mut elems: Vec<u64> = Vec::with_capacity(size);
    let mut sums = std::collections::HashSet::new();
    let mut x = 0u64;
    while elems.len() < size {
        x += 1;
        if x > limit {
            return domain(format!(
                "only {} Sidon elements fit below {limit}",
                elems.len()
            ));
        }
        let fresh: Vec<u64> = elems
            .iter()
            .chain(std::iter::once(&x))
            .map(|e| e + x)
            .collect();
        if fresh.iter().all(|s| !sums.contains(s)) {
            sums.extend(fresh);
            elems.push(x);
        }
    }
    Ok(elems.into_iter().map(Scalar::from).collect())
}

/// One cell of a family scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanCell<T: Serialize> {
    pub spec: FamilySpec,
    pub label: String,
    pub digest: String,
    pub outcome: std::result::Result<T, String>,
}

/// Runs `op` on every spec in parallel, keeping the input order and
/// recording per-cell errors instead of stopping.
pub fn family_scan<T, F>(specs: &[FamilySpec], op: F) -> Vec<ScanCell<T>>
where
    T: Serialize + Send,
    F: Fn(&RatSet) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    specs
        .par_iter()
        .map(|spec| match generate(spec) {
            Ok(set) => ScanCell {
                spec: spec.clone(),
                label: spec.label(),
                digest: set.short_digest(),
                outcome: op(&set).map_err(|e| e.to_string()),
            },
            Err(e) => ScanCell {
                spec: spec.clone(),
                label: spec.label(),
                digest: String::new(),
                outcome: Err(e.to_string()),
            },
        })
        .collect()
}
