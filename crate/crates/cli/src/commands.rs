//! Command implementations. Each returns an [`Output`]; `main` decides where
//! it goes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sumprod::certificates::{
    d_cert, default_family, dplus_cert, dstar_pi_bound, dstar_search, sym_mult,
    trivial_certificate, PiMode, SymKind,
};
use sumprod::decompose::{grow_low_energy, low_energy_subset, split_low_energy, MParam};
use sumprod::energy::{
    additive_energy, multiplicative_energy, sigma_count, sigma_sup, third_moment,
};
use sumprod::generators::{family_scan, generate, FamilySpec, ALL_KINDS};
use sumprod::growth::growth_fit;
use sumprod::report::{to_json, Record};
use sumprod::szt::{default_b_family, empirical_d, ShiftKind};
use sumprod::tracer::{
    inequality_suite, slice_sigma_search, trace_sum_product, trace_sumset_ratio, KappaChoice,
    SuiteReport, SumsetRatioConfig,
};
use sumprod::{RatSet, Scalar};

use crate::config::RunConfig;
use crate::error::CliError;

/// What a command produced.
pub struct Output {
    /// File stem under the output directory.
    pub stem: String,
    pub json: Option<String>,
    pub csv: Option<String>,
    /// Plain-text form for stdout; the JSON is printed when absent.
    pub text: Option<String>,
    /// Set when an asserted check failed.
    pub failure: Option<String>,
}

impl Output {
    fn json(stem: &str, value: &impl Serialize) -> Output {
        Output {
            stem: stem.to_string(),
            json: Some(to_json(value)),
            csv: None,
            text: None,
            failure: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Output {
        self.csv = Some(csv);
        self
    }

    fn fail_if(mut self, failed: bool, why: impl FnOnce() -> String) -> Output {
        if failed {
            self.failure = Some(why());
        }
        self
    }
}

/// A set argument: a path to a set file, or an inline FamilySpec object.
pub fn load_set(arg: &str) -> Result<RatSet, CliError> {
    if arg.trim_start().starts_with('{') {
        let spec: FamilySpec =
            serde_json::from_str(arg).map_err(|e| CliError::Input(format!("family spec: {e}")))?;
        return Ok(generate(&spec)?);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    RatSet::parse_any(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_scalar(s: &str, what: &str) -> Result<Scalar, CliError> {
    s.trim()
        .parse()
        .map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn lines(set: &RatSet) -> String {
    set.to_text()
}

pub struct ComputeArgs<'a> {
    pub quantity: &'a str,
    pub set: &'a RatSet,
    pub with: &'a [RatSet],
    pub lambda: Option<&'a str>,
    pub alpha: Option<&'a str>,
    pub t: u64,
    pub json: bool,
}

pub fn compute(args: ComputeArgs, config: &RunConfig) -> Result<Output, CliError> {
    let a = args.set;
    let b = args.with.first().unwrap_or(a);
    let c = args.with.get(1).unwrap_or(b);
    let (op, record, text): (&str, Value, String) = match args.quantity {
        "sumset" | "productset" | "quotientset" => {
            let s = match args.quantity {
                "sumset" => a.sumset(b)?,
                "productset" => a.productset(b)?,
                _ => a.quotientset(b)?,
            };
            (args.quantity, json!(s), lines(&s))
        }
        "e+" | "eplus" => {
            let e = additive_energy(a, b)?;
            ("additive_energy", json!(e), format!("{e}\n"))
        }
        "e×" | "ex" | "e*" => {
            let e = multiplicative_energy(a, b)?;
            ("multiplicative_energy", json!(e), format!("{e}\n"))
        }
        "e3×" | "e3x" | "e3*" => {
            let e = third_moment(a)?;
            ("third_moment", json!(e), format!("{e}\n"))
        }
        "sigma" => match args.alpha {
            Some(alpha) => {
                let parts: Vec<Scalar> = alpha
                    .split(',')
                    .map(|s| parse_scalar(s, "alpha"))
                    .collect::<Result<_, _>>()?;
                let [x, y, z] = parts.as_slice() else {
                    return Err(CliError::Input("--alpha takes three coefficients".into()));
                };
                let n = sigma_count([x, y, z], [a, b, c])?;
                (
                    "sigma",
                    json!({ "alpha": [x, y, z], "count": n }),
                    format!("{n}\n"),
                )
            }
            None => {
                let s = sigma_sup(a, b, c, config.sigma_budget())?;
                let text = format!("{}\n", s.value);
                ("sigma_sup", json!(s), text)
            }
        },
        "sym" => {
            let s = sym_mult(a, b, args.t)?;
            ("sym", json!({ "t": args.t, "set": s }), lines(&s))
        }
        "slice" => {
            let lambda = args
                .lambda
                .ok_or_else(|| CliError::Input("slice needs --lambda".into()))?;
            let s = a.slice(&parse_scalar(lambda, "lambda")?)?;
            ("slice", json!(s), lines(&s))
        }
        other => return Err(CliError::Input(format!("unknown quantity {other:?}"))),
    };
    let mut inputs = vec![a];
    inputs.extend(args.with.iter());
    let rec = Record::new(op, &inputs, record);
    let mut out = Output::json(op, &rec);
    if !args.json {
        out.text = Some(if config.decimal() {
            with_decimals(&text)
        } else {
            text
        });
    }
    Ok(out)
}

/// Appends a marked approximation to every fractional line.
fn with_decimals(text: &str) -> String {
    text.lines()
        .map(|l| match l.parse::<Scalar>() {
            Ok(x) if !x.is_integer() => format!("{l}\t~{:.12} (approximate)\n", x.to_f64()),
            _ => format!("{l}\n"),
        })
        .collect()
}

/// Adds a `<key>_approx` sibling to every fractional string in a JSON tree.
pub fn json_with_decimals(json: &str) -> String {
    fn walk(v: &mut Value) {
        match v {
            Value::Object(map) => {
                let mut extra = Vec::new();
                for (k, x) in map.iter_mut() {
                    if let Value::String(s) = x {
                        if let Ok(q) = s.parse::<Scalar>() {
                            if s.contains('/') {
                                extra.push((format!("{k}_approx"), json!(q.to_f64())));
                            }
                        }
                    } else {
                        walk(x);
                    }
                }
                map.extend(extra);
            }
            Value::Array(items) => items.iter_mut().for_each(walk),
            _ => {}
        }
    }
    let mut v: Value = serde_json::from_str(json).expect("outputs are JSON");
    walk(&mut v);
    if let Value::Object(map) = &mut v {
        map.insert(
            "approximations".into(),
            json!("fields ending in _approx are floating-point and not authoritative"),
        );
    }
    to_json(&v)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum CertKind {
    /// Best of the default `(Q, R)` family.
    Search,
    /// `|AC|²/(|A||C|)` with `C` from `--with` (default `A`).
    D,
    /// Additive form `|A+C|²/(|A||C|)`.
    Dplus,
    Trivial,
    PiQuotient,
    PiProduct,
}

pub fn certify(a: &RatSet, kind: CertKind, with: Option<&RatSet>) -> Result<Output, CliError> {
    let c = with.unwrap_or(a);
    let value = match kind {
        CertKind::Search => {
            let r = dstar_search(a, &default_family(a)?)?;
            json!({
                "certificate": r.best.record(),
                "family_member": r.best_label,
                "evaluated": r.evaluated,
                "below_one": r.anomalies,
            })
        }
        CertKind::D => {
            let d = d_cert(a, c)?;
            let induced = d.induced(a)?;
            induced.verify(a)?;
            json!({ "d": d, "induced": induced.record() })
        }
        CertKind::Dplus => json!({ "certificate": dplus_cert(a, c)?.record() }),
        CertKind::Trivial => json!({ "certificate": trivial_certificate(a)?.record() }),
        CertKind::PiQuotient => {
            json!({ "certificate": dstar_pi_bound(a, PiMode::Quotient)?.record() })
        }
        CertKind::PiProduct => {
            json!({ "certificate": dstar_pi_bound(a, PiMode::Product)?.record() })
        }
    };
    let mut inputs = vec![a];
    if let Some(c) = with {
        inputs.push(c);
    }
    Ok(Output::json(
        "certificate",
        &Record::new("certify", &inputs, value),
    ))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Method {
    /// Split `A = B ⊔ C` with small `E⁺(B)` and `E×(C)`.
    Split,
    /// One low-energy subset, multiplicative driver.
    SubsetMult,
    SubsetAdd,
    /// Grow a subset until it carries the energy, multiplicative driver.
    GrowMult,
    GrowAdd,
}

pub fn decompose(a: &RatSet, method: Method, m: &str) -> Result<Output, CliError> {
    let out = match method {
        Method::Split => {
            let m = match m {
                "auto" => MParam::Auto,
                v => MParam::Value(parse_scalar(v, "M")?),
            };
            let r = split_low_energy(a, &m)?;
            let ok = r.partition_holds && r.exit_condition_holds;
            let csv = r.to_csv();
            Output::json("decomposition", &Record::new("decompose", &[a], &r))
                .with_csv(csv)
                .fail_if(!ok, || "partition or exit condition".into())
        }
        Method::SubsetMult | Method::SubsetAdd => {
            let flavor = if matches!(method, Method::SubsetMult) {
                SymKind::Multiplicative
            } else {
                SymKind::Additive
            };
            let r = low_energy_subset(a, flavor)?;
            let ok = r.size_bound_holds && r.second_moment_holds;
            Output::json("subset", &Record::new("low_energy_subset", &[a], &r))
                .fail_if(!ok, || "size bound or second moment".into())
        }
        Method::GrowMult | Method::GrowAdd => {
            let flavor = if matches!(method, Method::GrowMult) {
                SymKind::Multiplicative
            } else {
                SymKind::Additive
            };
            let r = grow_low_energy(a, flavor)?;
            let ok = r.size_bound_holds
                && r.steps
                    .iter()
                    .all(|s| s.small_b_holds && s.subadditivity_holds);
            let mut csv = String::from("j,b_len,energy_b,energy_c,d_len\n");
            for s in &r.steps {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.j, s.b_len, s.energy_b, s.energy_c, s.d_len
                ));
            }
            Output::json("grow", &Record::new("grow_low_energy", &[a], &r))
                .with_csv(csv)
                .fail_if(!ok, || "size bound or a growth step".into())
        }
    };
    Ok(out)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Pipeline {
    /// `max{|A+A|, |Π|}` against `|A|^{4/3}`.
    #[value(alias = "3")]
    SumProduct,
    /// `|A+A|` against `|A/A|`.
    #[value(alias = "5")]
    SumsetRatio,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ModeArg {
    Quotient,
    Product,
}

pub fn trace(
    a: &RatSet,
    pipeline: Pipeline,
    mode: ModeArg,
    kappa: Option<&str>,
    config: &RunConfig,
) -> Result<Output, CliError> {
    let t = match pipeline {
        Pipeline::SumProduct => {
            let mode = match mode {
                ModeArg::Quotient => PiMode::Quotient,
                ModeArg::Product => PiMode::Product,
            };
            trace_sum_product(a, mode)?
        }
        Pipeline::SumsetRatio => {
            let mut c = SumsetRatioConfig::default();
            if let Some(k) = kappa.filter(|k| *k != "auto") {
                c.kappa = KappaChoice::Value(parse_scalar(k, "kappa")?);
            }
            if let Some(g) = &config.gamma {
                c.gamma = g.clone();
            }
            trace_sumset_ratio(a, &c)?
        }
    };
    let mut csv = String::from("step,status,holds,power,margin\n");
    for s in &t.steps {
        let status = serde_json::to_value(s.status).expect("status serializes");
        let (holds, power, margin) = match &s.check {
            Some(c) => (
                c.holds.to_string(),
                c.power.to_string(),
                format!("{:.6e}", c.margin),
            ),
            None => Default::default(),
        };
        csv.push_str(&format!(
            "{},{},{holds},{power},{margin}\n",
            s.name,
            status.as_str().unwrap_or_default()
        ));
    }
    let failed: Vec<String> = t.failures().iter().map(|s| s.name.clone()).collect();
    t.recheck()?;
    Ok(Output::json("trace", &t)
        .with_csv(csv)
        .fail_if(!failed.is_empty(), || {
            format!("steps {}", failed.join(", "))
        }))
}

#[derive(Serialize)]
struct SuiteBatch<'a> {
    schema: &'static str,
    sets: Vec<SuiteEntry<'a>>,
    failures: usize,
}

#[derive(Serialize)]
struct SuiteEntry<'a> {
    label: String,
    report: &'a SuiteReport,
}

/// Runs the suite on each `(label, set)`.
pub fn verify(sets: &[(String, RatSet)], config: &RunConfig) -> Result<Output, CliError> {
    let suite = config.suite();
    let reports: Vec<SuiteReport> = sets
        .iter()
        .map(|(_, a)| inequality_suite(a, &suite))
        .collect::<Result<_, _>>()?;
    let mut csv = format!("label,{}\n", SuiteReport::CSV_HEADER);
    for ((label, _), r) in sets.iter().zip(&reports) {
        for line in r.csv_lines().lines() {
            csv.push_str(&format!("{label},{line}\n"));
        }
    }
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    let batch = SuiteBatch {
        schema: "sumprod.verify/1",
        sets: sets
            .iter()
            .zip(&reports)
            .map(|((label, _), report)| SuiteEntry {
                label: label.clone(),
                report,
            })
            .collect(),
        failures,
    };
    let failing: Vec<String> = sets
        .iter()
        .zip(&reports)
        .filter(|(_, r)| r.failures > 0)
        .map(|((l, _), r)| {
            let rows: Vec<&str> = r.failed_rows().iter().map(|x| x.name.as_str()).collect();
            format!("{l}: {}", rows.join(" "))
        })
        .collect();
    Ok(Output::json("verify", &batch)
        .with_csv(csv)
        .fail_if(failures > 0, || failing.join("; ")))
}

/// Family specs from `--family` (comma list, `all` for every kind) and
/// `--sizes`.
pub fn family_specs(
    families: &[String],
    sizes: &[usize],
    seed: u64,
) -> Result<Vec<FamilySpec>, CliError> {
    if sizes.is_empty() {
        return Err(CliError::Input("--sizes is required with --family".into()));
    }
    let kinds: Vec<String> = if families.iter().any(|f| f == "all") || families.is_empty() {
        ALL_KINDS.iter().map(|s| s.to_string()).collect()
    } else {
        families.to_vec()
    };
    let mut specs = Vec::new();
    for k in &kinds {
        for &n in sizes {
            specs.push(FamilySpec::by_name(k, n, seed)?);
        }
    }
    Ok(specs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScanOp {
    /// `|A+A|`, `|AA|`, `|A/A|`.
    Sizes,
    /// `E⁺(A)`, `E×(A)`, `E₃×(A)`.
    Energies,
    /// Per-kind log-log fit of `max{|A+A|, |AA|}`.
    Growth,
    /// The inequality suite, failures only.
    Suite,
    /// The low-energy split with `M = |A|^{1/5}`.
    Split,
    /// Realized pigeonhole constants of the extraction routines.
    Pigeonhole,
}

/// A batch file: `{"op": "energies", "specs": [{"kind": "ap", "size": 8}, …]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Batch {
    pub op: ScanOp,
    pub specs: Vec<FamilySpec>,
}

pub fn load_batch(path: &PathBuf) -> Result<Batch, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn scan(specs: &[FamilySpec], op: ScanOp, config: &RunConfig) -> Result<Output, CliError> {
    if op == ScanOp::Growth {
        return growth(specs);
    }
    let suite = config.suite();
    let cells = family_scan(specs, |a| -> sumprod::Result<Value> {
        Ok(match op {
            ScanOp::Sizes => json!({
                "a_len": a.len(),
                "sumset": a.sumset(a)?.len(),
                "productset": a.productset(a)?.len(),
                "quotientset": a.quotientset(a)?.len(),
            }),
            ScanOp::Energies => json!({
                "a_len": a.len(),
                "additive": additive_energy(a, a)?,
                "multiplicative": multiplicative_energy(a, a)?,
                "third_moment": third_moment(a)?,
            }),
            ScanOp::Suite => {
                let r = inequality_suite(a, &suite)?;
                let failed: Vec<&str> = r.failed_rows().iter().map(|x| x.name.as_str()).collect();
                json!({ "a_len": a.len(), "rows": r.rows.len(), "failures": r.failures, "failed": failed })
            }
            ScanOp::Split => {
                let r = split_low_energy(a, &MParam::Auto)?;
                json!({
                    "a_len": a.len(),
                    "b_len": r.b.len(),
                    "c_len": r.c.len(),
                    "steps": r.steps.len(),
                    "partition_holds": r.partition_holds,
                    "exit_condition_holds": r.exit_condition_holds,
                    "ratio_fifth": r.ratio_fifth,
                    "ratio_benchmark": r.ratio_benchmark,
                })
            }
            ScanOp::Pigeonhole => pigeonhole_row(a)?,
            ScanOp::Growth => unreachable!(),
        })
    });
    let mut csv = String::from("label,digest,outcome\n");
    let mut failed = Vec::new();
    for c in &cells {
        let outcome = match &c.outcome {
            Ok(v) => {
                if value_failed(v) {
                    failed.push(c.label.clone());
                }
                serde_json::to_string(v).expect("values serialize")
            }
            Err(e) => format!("error: {e}"),
        };
        csv.push_str(&format!("{},{},{:?}\n", c.label, c.digest, outcome));
    }
    let doc = json!({ "schema": "sumprod.scan/1", "op": op, "cells": cells });
    Ok(Output::json("scan", &doc)
        .with_csv(csv)
        .fail_if(!failed.is_empty(), || failed.join(", ")))
}

/// A scan cell fails when it reports asserted failures or a false
/// `*_holds` flag.
fn value_failed(v: &Value) -> bool {
    let Value::Object(map) = v else { return false };
    map.iter().any(|(k, x)| {
        (k == "failures" && x.as_u64().is_some_and(|n| n > 0))
            || (k.ends_with("_holds") && x == &Value::Bool(false))
    })
}

fn pigeonhole_row(a: &RatSet) -> sumprod::Result<Value> {
    use sumprod::decompose::pigeonhole_extract;
    use sumprod::tracer::rich_level_witness;
    let quot = a.quotientset(a)?;
    let extract = pigeonhole_extract(a, &quot, SymKind::Multiplicative)?;
    let subset = low_energy_subset(a, SymKind::Multiplicative)?;
    let level = rich_level_witness(a, PiMode::Quotient)?;
    Ok(json!({
        "a_len": a.len(),
        "extract_holds": extract.guarantee_holds,
        "subset_size_holds": subset.size_bound_holds,
        "level_holds": level.pigeonhole.holds,
    }))
}

fn growth(specs: &[FamilySpec]) -> Result<Output, CliError> {
    let mut kinds: Vec<&str> = specs.iter().map(|s| s.kind_name()).collect();
    kinds.dedup();
    let mut fits = Vec::new();
    let mut csv = String::from("kind,size,sumset_len,productset_len,max_len,pointwise_exponent\n");
    for kind in kinds {
        let sets: Vec<RatSet> = specs
            .iter()
            .filter(|s| s.kind_name() == kind)
            .map(generate)
            .collect::<Result<_, _>>()?;
        let fit = growth_fit(&sets)?;
        for line in fit.to_csv().lines().skip(1) {
            csv.push_str(&format!("{kind},{line}\n"));
        }
        fits.push(json!({ "kind": kind, "fit": fit }));
    }
    let doc = json!({ "schema": "sumprod.growth/1", "fits": fits });
    Ok(Output::json("growth", &doc).with_csv(csv))
}

pub fn szt(
    a: &RatSet,
    shift: ShiftKind,
    d_upper: Option<&str>,
    config: &RunConfig,
) -> Result<Output, CliError> {
    let d = match d_upper {
        None => None,
        Some("search") => Some(dstar_search(a, &default_family(a)?)?.best.value),
        Some(v) => Some(parse_scalar(v, "d-upper")?),
    };
    let c_abs = config.c_abs.clone().unwrap_or_else(Scalar::one);
    let family = default_b_family(a, shift)?;
    let r = empirical_d(a, &family, shift, d.as_ref(), &c_abs)?;
    let csv = r.to_csv();
    Ok(Output::json("szt", &Record::new("empirical_d", &[a], &r)).with_csv(csv))
}

pub fn slice_search(
    max_len: i64,
    max_slice: usize,
    config: &RunConfig,
) -> Result<Output, CliError> {
    let r = slice_sigma_search(max_len, max_slice, config.sigma_budget())?;
    let found = r.witness.is_some();
    Ok(Output::json("slice_search", &r).fail_if(!found, || {
        "no arithmetic progression met both preconditions".into()
    }))
}
