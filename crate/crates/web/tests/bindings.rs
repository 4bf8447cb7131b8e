use sumprod_web::{
    energy_profile_json, family_text, level_scan_json, parse_set, split_json, MAX_LEN,
};

#[test]
fn separators_are_interchangeable() {
    let lines = parse_set("1\n2\n1/2\n").unwrap();
    assert_eq!(parse_set("1, 2 1/2").unwrap(), lines);
    assert_eq!(
        parse_set("# comment, here\n1, 2\n1/2 # half").unwrap(),
        lines
    );
    assert_eq!(parse_set(r#"["1/2", "2", "1"]"#).unwrap(), lines);
    assert!(parse_set("").is_err());
    let err = parse_set("1, x").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
    let big = (1..=MAX_LEN + 1)
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",");
    assert!(parse_set(&big).is_err());
}

#[test]
fn profile_of_a_short_progression() {
    let v = energy_profile_json("1,2,3").unwrap();
    assert_eq!(v["sumset_len"], 5);
    assert_eq!(v["productset_len"], 6);
    assert_eq!(v["additive_energy"], "19");
    assert_eq!(v["multiplicative_energy"], "15");
    // slice sizes sum to |A|²
    let total: u64 = v["slices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["size"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 9);
}

#[test]
fn zero_skips_the_multiplicative_side() {
    let v = energy_profile_json("0,1,2").unwrap();
    assert!(v["multiplicative_energy"].is_null());
    assert_eq!(v["slices"].as_array().unwrap().len(), 0);
}

#[test]
fn split_partitions_the_input() {
    let text = family_text("ap_union_gp", 32, 1).unwrap();
    let v = split_json(&text).unwrap();
    assert_eq!(v["partition_holds"], true);
    assert_eq!(v["exit_condition_holds"], true);
    let parts = v["b"].as_array().unwrap().len() + v["c"].as_array().unwrap().len();
    assert_eq!(parts, 32);
}

#[test]
fn scan_reports_a_witness() {
    let v = level_scan_json("1,2,3,4,5,6,7,8", false).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .any(|r| r["b"] == v["witness_b"] && r["tau"] == v["witness_tau"]));
    assert!(level_scan_json("1,2,4,8", true).is_ok());
}
