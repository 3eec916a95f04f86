use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn cyclo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclo")).args(args).env_remove("CYCLO_MAX_BASIS").output().expect("binary runs")
}

/// Runs with `--json`, returning the exit code and the parsed report.
fn report(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = cyclo(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    let code = out.status.code().expect("exited");
    assert_eq!(v["exit_code"], code, "report exit code matches the process");
    (code, v)
}

fn error_kind(v: &Value) -> &str {
    v["results"]["error"]["kind"].as_str().unwrap_or("")
}

#[test]
fn check_dual_numbers_passes() {
    let (code, v) = report(&["check", &data("dual.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["identities_hold"], true);
    assert_eq!(v["flags"]["max_degree"], 4);
    assert_eq!(v["command"], "check");
    assert_eq!(v["inputs_digest"]["file"].as_str().unwrap().len(), 64);
}

#[test]
fn check_broken_associativity() {
    let out = cyclo(&["check", &data("broken.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("AssociativityError"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AssociativityError"));
}

#[test]
fn malformed_input_is_exit_2() {
    let (code, v) = report(&["check", &data("malformed.json")]);
    assert_eq!(code, 2);
    assert_eq!(error_kind(&v), "ParseError");
    let (code, _) = report(&["homology", &data("does_not_exist.json")]);
    assert_eq!(code, 2);
    assert_eq!(cyclo(&["transport", &data("x2_t.json")]).status.code(), Some(2));
}

#[test]
fn check_family_runs_the_chain_map_gate() {
    let (code, v) = report(&["check", &data("x2_t.json"), "--max-degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["structure"], "family");
    assert_eq!(v["results"]["gm_chain_map"]["interior_zero"], true);
}

#[test]
fn homology_tables() {
    for (file, even) in [("c_plus_c.json", 2), ("dual.json", 1), ("m2.json", 1)] {
        let (code, v) = report(&["homology", &data(file)]);
        assert_eq!(code, 0, "{file}");
        let hp = &v["results"]["hp"];
        assert_eq!((hp["even"].as_u64(), hp["odd"].as_u64(), hp["stabilized"].as_bool()), (Some(even), Some(0), Some(true)), "{file}");
    }
    let (_, v) = report(&["hp", &data("c_plus_c.json")]);
    assert_eq!(v["results"]["hp"]["even"], 2);
}

#[test]
fn resource_cap_is_exit_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_cyclo"))
        .args(["--json", "homology", &data("m2.json")])
        .env("CYCLO_MAX_BASIS", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(error_kind(&v), "ResourceCap");
    assert_eq!(v["flags"]["max_basis"], 50);
}

#[test]
fn chern_of_e1() {
    let (code, v) = report(&["chern", &data("c_plus_c.json"), "--idempotent", &data("e1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["flags"]["cutoff"], Value::Null);
    assert_eq!(v["results"]["chern"]["cutoff"], 6);
    assert!(v["results"]["chern"]["closedness_checked_through"].as_u64().unwrap() >= 4);
    let table = v["results"]["pairings"].as_array().unwrap();
    assert_eq!(table.len(), 2);
    assert_eq!(table[0]["pairing"], "1");
    assert_eq!(table[1]["pairing"], "0");
}

#[test]
fn chern_rejects_non_idempotent() {
    let (code, v) = report(&["chern", &data("c_plus_c.json"), "--idempotent", &data("not_idempotent.json")]);
    assert_eq!(code, 1);
    assert_eq!(error_kind(&v), "NotIdempotent");
}

#[test]
fn chern_of_zero_is_zero() {
    let (code, v) = report(&["chern", &data("c_plus_c.json"), "--idempotent", &data("zero.json")]);
    assert_eq!(code, 0);
    let comps = v["results"]["chern"]["components"].as_array().unwrap();
    assert!(comps.iter().all(|c| c["terms"].as_array().unwrap().is_empty()));
}

#[test]
fn transport_outside_safe_interval() {
    let (code, v) = report(&["transport", &data("x2_t.json"), "--from", "1", "--to", "5", "--chern-idempotent", &data("e_plus.json")]);
    assert_eq!(code, 1);
    assert_eq!(error_kind(&v), "SafeIntervalViolation");
}

#[test]
fn nilpotent_exp_needs_constant_vertical_part() {
    let args = ["transport", &data("x2_t2.json"), "--from", "1", "--to", "2", "--method", "nilpotent_exp", "--chern-idempotent", &data("e_plus.json")];
    let (code, v) = report(&args);
    assert_eq!(code, 1);
    assert_eq!(error_kind(&v), "PreconditionFailed");
}

#[test]
fn transport_reports_residuals() {
    let args = ["transport", &data("x2_t.json"), "--from", "1", "--to", "4", "--window", "2", "--chern-idempotent", &data("e_plus.json")];
    let (code, v) = report(&args);
    assert_eq!(code, 0);
    let r = &v["residuals"]["transport"];
    assert!(r["richardson_gap"].as_f64().unwrap() < 1e-8);
    assert!(r["cross_method_gap"].as_f64().unwrap() < 1e-8);
    assert!(v["residuals"]["input_truncation_norm"].as_f64().unwrap() > 0.0);
    assert_eq!(v["results"]["method"], "rk4");
    assert_eq!(v["results"]["window"], 2);
}

#[test]
#[ignore = "red: window transport of truncated ch e+ does not keep the pairing with χ+ (drift 81/16 + 1 at 2N = 6); see README"]
fn transport_keeps_the_character_pairing() {
    let args = ["transport", &data("x2_t.json"), "--from", "1", "--to", "4", "--chern-idempotent", &data("e_plus.json"), "--characters", &data("chi_plus.json")];
    let (code, v) = report(&args);
    assert_eq!(code, 0);
    assert!(v["residuals"]["transport"]["pairing_drift"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn retract_of_c_plus_c() {
    let (code, v) = report(&["retract", &data("c_plus_c.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["bidimension_upper"]["at_most"], 0);
    assert_eq!(v["results"]["hp"], serde_json::json!([2, 0]));
}

#[test]
fn retract_of_dual_numbers_not_found() {
    let (code, v) = report(&["retract", &data("dual.json"), "--n-max", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["bidimension_upper"]["not_found"], 4);
    assert!(v["results"]["certificate"]["augmented_rank"].as_u64() > v["results"]["certificate"]["rank"].as_u64());
}

#[test]
fn retract_transport_across_zero_fails() {
    let (code, v) = report(&["retract", &data("x2_t.json"), "--from", "-1/2", "--to", "1/2"]);
    assert_eq!(code, 1);
    assert_eq!(error_kind(&v), "SolvabilityLost");
    assert!(v["results"]["error"]["message"].as_str().unwrap().contains("at 0"));
}

#[test]
fn retract_transport_inside() {
    let (code, v) = report(&["retract", &data("x2_t.json"), "--from", "1/2", "--to", "2", "--grid-step", "1/20"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["hp"], serde_json::json!([2, 0]));
    assert_eq!(v["flags"]["grid_step"], "1/20");
    assert_eq!(v["results"]["solvable_grid"].as_array().unwrap().len(), 31);
}

#[test]
fn reports_round_trip_byte_identical() {
    for (cmd, file) in [("homology", "dual.json"), ("check", "broken.json"), ("retract", "c_plus_c.json")] {
        let path = data(file);
        let all = ["--json", cmd, &path];
        let out = cyclo(&all);
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
        // and deterministic
        assert_eq!(String::from_utf8(cyclo(&all).stdout).unwrap(), text);
    }
}

/// Follows a table path such as `results.hc[1]` into the JSON.
fn lookup<'a>(v: &'a Value, path: &str) -> &'a Value {
    let mut cur = v;
    for part in path.split('.') {
        let (key, idx) = match part.find('[') {
            Some(i) => (&part[..i], Some(&part[i..])),
            None => (part, None),
        };
        cur = &cur[key];
        for ix in idx.into_iter().flat_map(|s| s.split(['[', ']']).filter(|x| !x.is_empty())) {
            cur = &cur[ix.parse::<usize>().unwrap()];
        }
    }
    cur
}

#[test]
fn table_numbers_match_the_json() {
    for args in [vec!["homology".to_string(), data("c_plus_c.json")], vec!["chern".into(), data("c_plus_c.json"), "--idempotent".into(), data("e1.json")]] {
        let table = String::from_utf8(cyclo(&args.iter().map(|s| s.as_str()).collect::<Vec<_>>()).stdout).unwrap();
        let mut all = vec!["--json"];
        all.extend(args.iter().map(|s| s.as_str()));
        let v: Value = serde_json::from_slice(&cyclo(&all).stdout).unwrap();
        let mut rows = 0;
        for line in table.lines() {
            let (path, shown) = line.split_once("  ").unwrap();
            let leaf = lookup(&v, path.trim());
            let expect = match leaf {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(shown.trim(), expect, "row {path}");
            rows += 1;
        }
        assert!(rows > 10);
    }
}
