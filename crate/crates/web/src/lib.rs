//! Browser bindings. Every entry point takes a set as text and returns a
//! JSON string; the page in `www/` draws the result.
//!
//! Sets are written one rational per line, or separated by commas and
//! spaces, or as a JSON array of strings.

use serde_json::{json, Value};
use sumprod::decompose::{split_low_energy, MParam};
use sumprod::energy::{additive_energy, multiplicative_energy, slice_profile};
use sumprod::generators::{generate, FamilySpec};
use sumprod::szt::{default_b_family, empirical_d, ShiftKind};
use sumprod::{Error, RatSet, Result, Scalar};
use wasm_bindgen::prelude::*;

/// Larger sets stall the page for seconds.
pub const MAX_LEN: usize = 160;

pub fn parse_set(text: &str) -> Result<RatSet> {
    let a = if text.trim_start().starts_with('[') {
        RatSet::parse_any(text)?
    } else {
        // one entry per line, so parse errors count entries
        let entries: Vec<&str> = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
            .filter(|e| !e.is_empty())
            .collect();
        RatSet::parse_text(&entries.join("\n"))?
    };
    a.require_nonempty("the set")?;
    if a.len() > MAX_LEN {
        return Err(Error::Domain(format!(
            "the demo takes at most {MAX_LEN} elements, got {}",
            a.len()
        )));
    }
    Ok(a)
}

/// Sizes, both energies and the slice profile `λ ↦ |A ∩ λA|`.
pub fn energy_profile_json(text: &str) -> Result<Value> {
    let a = parse_set(text)?;
    let slices = if a.excludes_zero() {
        slice_profile(&a)?
            .into_iter()
            .map(|(lambda, size)| json!({ "lambda": lambda, "size": size }))
            .collect()
    } else {
        Vec::new()
    };
    let mult = if a.excludes_zero() {
        Some(multiplicative_energy(&a, &a)?)
    } else {
        None
    };
    Ok(json!({
        "len": a.len(),
        "sumset_len": a.sumset(&a)?.len(),
        "productset_len": a.productset(&a)?.len(),
        "additive_energy": additive_energy(&a, &a)?,
        "multiplicative_energy": mult,
        "slices": slices,
    }))
}

/// The split `A = B ⊔ C` with `M = |A|^{1/5}`.
pub fn split_json(text: &str) -> Result<Value> {
    let a = parse_set(text)?;
    let r = split_low_energy(&a, &MParam::Auto)?;
    Ok(json!({
        "b": r.b,
        "c": r.c,
        "steps": r.steps.len(),
        "additive_energy_b": r.add_energy_b,
        "multiplicative_energy_c": r.mult_energy_c,
        "exit_condition_holds": r.exit_condition_holds,
        "partition_holds": r.partition_holds,
        "ratio_fifth": r.ratio_fifth,
    }))
}

/// Level-set scan over the default `B` family, with no upper bound.
pub fn level_scan_json(text: &str, multiplicative: bool) -> Result<Value> {
    let a = parse_set(text)?;
    let kind = if multiplicative {
        ShiftKind::Multiplicative
    } else {
        ShiftKind::Additive
    };
    let family = default_b_family(&a, kind)?;
    let r = empirical_d(&a, &family, kind, None, &Scalar::one())?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "b": row.family_index,
                "tau": row.tau,
                "s_len": row.s_len,
                "ratio": row.ratio,
                "ratio_approx": row.ratio.to_f64(),
            })
        })
        .collect();
    Ok(json!({
        "max_ratio": r.max_ratio,
        "witness_b": r.witness_index,
        "witness_tau": r.witness_tau,
        "rows": rows,
    }))
}

/// A generated family member in the text format, to fill the input box.
pub fn family_text(kind: &str, size: usize, seed: u64) -> Result<String> {
    if size > MAX_LEN {
        return Err(Error::Domain(format!("size must be at most {MAX_LEN}")));
    }
    Ok(generate(&FamilySpec::by_name(kind, size, seed)?)?.to_text())
}

fn to_js(v: Result<Value>) -> std::result::Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(JsError::from)
}

#[wasm_bindgen(js_name = energyProfile)]
pub fn energy_profile(text: &str) -> std::result::Result<String, JsError> {
    to_js(energy_profile_json(text))
}

#[wasm_bindgen]
pub fn split(text: &str) -> std::result::Result<String, JsError> {
    to_js(split_json(text))
}

#[wasm_bindgen(js_name = levelScan)]
pub fn level_scan(text: &str, multiplicative: bool) -> std::result::Result<String, JsError> {
    to_js(level_scan_json(text, multiplicative))
}

#[wasm_bindgen]
pub fn family(kind: &str, size: usize, seed: u64) -> std::result::Result<String, JsError> {
    family_text(kind, size, seed).map_err(JsError::from)
}
