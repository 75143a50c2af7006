use serde_json::Value;
use std::f64::consts::{LN_2, PI, TAU};
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrenyi")).args(args).env_remove("RENYI_LOG_BASE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn row<'a>(rows: &'a [csv::StringRecord], name: &str, alpha: &str) -> &'a csv::StringRecord {
    rows.iter().find(|r| &r[1] == name && &r[5] == alpha).unwrap_or_else(|| panic!("no row {name} {alpha}"))
}

fn num(r: &csv::StringRecord, i: usize) -> f64 {
    r[i].parse().unwrap()
}

#[test]
fn f_curve_reference_rows() {
    let o = run(&["f-curve", "--alpha-min", "0.5", "--alpha-max", "1.0", "--points", "2"]);
    assert!(o.status.success());
    let rows = csv_records(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(num(&rows[0], 1), 0.5);
    assert!((num(&rows[2], 1) - (TAU / 1f64.exp().powi(3)).sqrt()).abs() < 1e-10);
    let max = rows.iter().find(|r| &r[3] == "true").unwrap();
    assert!((num(max, 0) - 0.7471).abs() < 5e-4 && (num(max, 1) - 0.5823).abs() < 5e-4);
}

#[test]
fn f_curve_single_point_and_rejection() {
    let o = run(&["f-curve", "--alpha-min", "2", "--points", "1"]);
    assert_eq!(csv_records(&stdout(&o)).len(), 1);
    let o = run(&["f-curve", "--alpha-min", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn vacuum_saturates_first_rmse_bound() {
    let o = run(&["bounds-report", "--state", &data("vacuum.json"), "--alphas", "0.5,1,inf"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_records(&stdout(&o));
    let r = row(&rows, "rmse_half_length", "inf");
    assert!(num(r, 4).abs() < 1e-9);
    assert!((num(r, 3) - PI / 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn edge_superposition_contrasts_fisher_and_rmse() {
    let o = run(&["bounds-report", "--state", &data("noon_edge.json"), "--alphas", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_records(&stdout(&o));
    let fisher = rows.iter().find(|r| &r[1] == "fisher_comparison").unwrap();
    assert!((num(fisher, 2) - 1.0 / 3.0).abs() < 1e-12);
    let max_prob = row(&rows, "rmse_max_prob", "0.5");
    assert_eq!(num(max_prob, 2), 0.5);
    assert!(num(max_prob, 3) >= 0.5);
    assert!(num(row(&rows, "rmse_half_length", "inf"), 2) > PI / (2.0 * 3f64.sqrt()) - 1e-12);
}

#[test]
fn usage_and_input_errors() {
    let o = run(&["bounds-report", "--state", &data("vacuum.json"), "--alphas", ""]);
    assert_eq!(o.status.code(), Some(2));
    let bad = std::env::temp_dir().join(format!("qrenyi-bad-{}.json", std::process::id()));
    std::fs::write(&bad, r#"{"dim": 2, "labels": [0, 1], "matrix": [[{"re": 1.0, "im": 0.0}]]}"#).unwrap();
    let o = run(&["bounds-report", "--state", bad.to_str().unwrap(), "--alphas", "1"]);
    std::fs::remove_file(&bad).ok();
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["bounds-report", "--state", &data("vacuum.json"), "--alphas", "1", "--generator", "jz"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let args = ["bounds-report", "--state", &data("noon_edge.json"), "--alphas", "0.5,2", "--estimator", "rotated", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["bounds-report", "--state", &data("noon_edge.json"), "--alphas", "0.5,2", "--estimator", "rotated", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bits_flag_and_environment_agree() {
    let base = ["bounds-report", "--state", &data("vacuum.json"), "--alphas", "1"];
    let bits: Vec<&str> = base.iter().copied().chain(["--bits"]).collect();
    let o = run(&bits);
    let rows = csv_records(&stdout(&o));
    assert!((num(row(&rows, "entropy_tradeoff", "1"), 2) - TAU.ln() / LN_2).abs() < 1e-12);
    let env = Command::new(env!("CARGO_BIN_EXE_qrenyi")).args(base).env("RENYI_LOG_BASE", "2").output().unwrap();
    assert_eq!(env.stdout, o.stdout);
    let nats = csv_records(&stdout(&run(&base)));
    // Non-entropic rows are unit free.
    assert_eq!(row(&nats, "rmse_half_length", "inf")[3], row(&rows, "rmse_half_length", "inf")[3]);
}

#[test]
fn audit_reports_small_deltas() {
    let o = run(&["bounds-report", "--state", &data("noon_edge.json"), "--alphas", "1", "--audit"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.ends_with("grid_delta_bound,grid_delta_measured,cutoff_delta_bound,cutoff_delta_measured"));
    for r in csv_records(&text) {
        for i in 9..13 {
            let d: f64 = r[i].parse().unwrap();
            assert!(d < 1e-6, "{} column {i}: {d}", &r[1]);
        }
    }
}

#[test]
fn asymmetry_of_pure_state_agrees_across_routes() {
    let v = json(&run(&["asymmetry", "--state", &data("three_level_plus.json"), "--alphas", "0.5,2,inf"]));
    for r in v.as_array().unwrap() {
        assert_eq!(r["method"], "PureDuality");
        let d = r["duality"].as_f64().unwrap();
        let n = r["numeric"].as_f64().unwrap();
        assert!((d - n).abs() < 1e-6);
        assert!(!r["starts"].as_array().unwrap().is_empty());
    }
}

#[test]
fn maximally_coherent_qubit_geometric_coherence() {
    let v = json(&run(&["coherence", "--state", &data("qubit_plus.json"), "--alphas", "1"]));
    assert!((v["measures"]["geometric"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["measures"]["robustness"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn holevo_chain_holds() {
    let o = run(&["holevo-chain", "--state", &data("three_level_plus.json"), "--alphas", "0.5,1,2", "--cells", "3"]);
    let v = json(&o);
    for r in v.as_array().unwrap() {
        assert_eq!(r["holds"], true);
        let (i, c, a, h) = (r["information"].as_f64().unwrap(), r["holevo"].as_f64().unwrap(), r["asymmetry"].as_f64().unwrap(), r["upper_bound"].as_f64().unwrap());
        assert!(i <= c + 1e-6 && c <= a + 1e-6 && a <= h + 1e-6);
    }
}

#[test]
fn eigenstate_time_energy_report_is_zero() {
    let v = json(&run(&["time-energy", "--state", &data("three_level_eigen.json"), "--spectrum", &data("harmonic3.json"), "--alphas", "0.5,1,2,inf"]));
    assert_eq!(v["periodic"], true);
    for r in v["rows"].as_array().unwrap() {
        assert!(r["ap_entropy"].as_f64().unwrap().abs() < 1e-9);
        assert!(r["relations"]["asymmetry"].as_f64().unwrap().abs() < 1e-9);
        assert!(r["time_estimation"]["tradeoff_slack"].as_f64().unwrap() > -1e-6);
    }
}

#[test]
fn incommensurate_spectrum_omits_time_bounds() {
    let sweep = std::env::temp_dir().join(format!("qrenyi-sweep-{}.csv", std::process::id()));
    let v = json(&run(&[
        "time-energy",
        "--state",
        &data("three_level_plus.json"),
        "--spectrum",
        &data("incommensurate3.json"),
        "--alphas",
        "2",
        "--sweep-csv",
        sweep.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&sweep).unwrap();
    std::fs::remove_file(&sweep).ok();
    assert!(text.starts_with("order,H_ap,windows_used,spread"));
    assert_eq!(v["periodic"], false);
    let r = &v["rows"][0];
    assert!(r["time_estimation"].is_null());
    // |p_ap|^2 mean for an equal two-level superposition is 3/2.
    assert!((r["ap_entropy"].as_f64().unwrap() + 1.5f64.ln()).abs() < 1e-6);
}

#[test]
fn conjecture_search_reports_without_asserting() {
    let args = ["conjecture-search", "--size", "3", "--budget", "300", "--seed", "5"];
    let a = run(&args);
    assert_eq!(a.stdout, run(&args).stdout);
    let v = json(&a);
    let m = v["minimum"].as_f64().unwrap();
    assert!(m >= v["floor"].as_f64().unwrap() - 1e-9);
    assert!(m <= v["vacuum_value"].as_f64().unwrap() + 1e-12);
}
