//! End-to-end runs of the command-line driver.

use std::fs;
use std::path::Path;

use v2x_secrecy::cli::{execute, NodeRecord, SopRecord};
use v2x_secrecy::{Error, Technique};

const NO_ENV: [(&str, &str); 0] = [];

fn run(args: &[&str]) -> v2x_secrecy::Result<v2x_secrecy::cli::RunReport> {
    let mut full = vec!["v2x-secrecy"];
    full.extend_from_slice(args);
    execute(full, NO_ENV)
}

fn read_sop(path: &Path) -> Vec<SopRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fig3_preset_has_126_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3.csv");
    let report = run(&["sweep", "--preset", "fig3", "--out", s(&out)]).unwrap();
    assert!(report.success);
    let rows = read_sop(&out);
    assert_eq!(rows.len(), 126);
    let header = fs::read_to_string(&out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(
        header,
        "axis_name,axis_value,technique,sop,std_err,realizations,seed,series_name,series_value"
    );
    assert!(rows.iter().all(|r| r.axis_name == "phi" && r.realizations == 25));
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.sop)));
    let keys: Vec<(Technique, u64, u64)> = rows
        .iter()
        .map(|r| (r.technique, r.series_value.unwrap().to_bits(), r.axis_value.to_bits()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let manifest = fs::read_to_string(dir.path().join("fig3.csv.manifest.toml")).unwrap();
    assert!(manifest.contains("tool_version"));
    assert!(manifest.contains("[scenario]"));
}

#[test]
fn manifest_replays_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    run(&["sweep", "--preset", "fig5", "--seed", "9", "--realizations", "10", "--out", s(&first)]).unwrap();
    let manifest = dir.path().join("a.csv.manifest.toml");
    let second = dir.path().join("b.csv");
    run(&["sweep", "--config", s(&manifest), "--out", s(&second)]).unwrap();
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let sop_a = dir.path().join("p.csv");
    run(&["sop", "--mode", "exact", "--realizations", "30", "--out", s(&sop_a)]).unwrap();
    let sop_b = dir.path().join("q.csv");
    run(&["sop", "--config", s(&dir.path().join("p.csv.manifest.toml")), "--out", s(&sop_b)]).unwrap();
    assert_eq!(fs::read(&sop_a).unwrap(), fs::read(&sop_b).unwrap());
}

#[test]
fn sop_without_eves_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noeve.toml");
    let mut text = v2x_secrecy::ScenarioConfig::fig3_baseline().to_toml_string();
    text = text
        .replace("lambda_e_per_m2 = 0.000001", "lambda_e_per_m2 = 0.0")
        .replace("u_e_per_m = 0.001", "u_e_per_m = 0.0");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("sop.csv");
    run(&["sop", "--config", s(&cfg), "--realizations", "200", "--out", s(&out)]).unwrap();
    let rows = read_sop(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].sop, 0.0);
    assert_eq!(rows[0].realizations, 200);
}

#[test]
fn generate_dumps_every_node_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("net.csv");
    run(&["generate", "--seed", "3", "--out", s(&out)]).unwrap();
    let rows: Vec<NodeRecord> = csv::Reader::from_path(&out)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows[0].kind, "alice");
    assert_eq!((rows[0].x_m, rows[0].y_m), (0.0, 0.0));
    for kind in ["street", "planar_eve", "planar_charlie", "veh_eve", "veh_charlie"] {
        assert!(rows.iter().any(|r| r.kind == kind), "no {kind} rows");
    }
    for street in rows.iter().filter(|r| r.kind == "street") {
        let (p, theta, len) = (street.p_m.unwrap(), street.theta_rad.unwrap(), street.len_m.unwrap());
        let chord = v2x_secrecy::geometry::chord_endpoints(p, theta, 3000.0).unwrap();
        assert_eq!(chord.length, len);
    }
    for node in rows.iter().filter(|r| r.kind != "street") {
        assert!(node.p_m.is_none() && node.len_m.is_none());
        assert!(node.x_m.hypot(node.y_m) <= 3000.0 + 1e-9);
    }
}

#[test]
fn explicit_grid_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("beta.csv");
    run(&[
        "sweep", "--axis", "beta_db", "--values", "-10,0,10", "--technique", "cj", "--realizations", "20", "--out",
        s(&out),
    ])
    .unwrap();
    let rows = read_sop(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.technique == Technique::Cj && r.series_name.is_none()));
    assert_eq!(rows.iter().map(|r| r.axis_value).collect::<Vec<_>>(), vec![-10.0, 0.0, 10.0]);
}

#[test]
fn validate_oracle_passes_on_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oracle.csv");
    let report = run(&["validate-oracle", "--out", s(&out)]).unwrap();
    assert!(report.success, "{}", report.summary);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 28);
}

#[test]
fn env_overrides_apply_before_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sop.csv");
    execute(
        ["v2x-secrecy", "sop", "--realizations", "15", "--out", s(&out)],
        [("V2X_SECRECY_PHI", "0.3"), ("V2X_SECRECY_REALIZATIONS", "99")],
    )
    .unwrap();
    let rows = read_sop(&out);
    assert_eq!(rows[0].axis_value, 0.3);
    assert_eq!(rows[0].realizations, 15);
}

#[test]
fn errors_are_reported() {
    assert!(matches!(run(&["frobnicate"]), Err(Error::Parse { .. })));
    assert!(matches!(run(&["sop", "--bogus-flag"]), Err(Error::Parse { .. })));
    assert!(matches!(run(&["sweep"]), Err(Error::Grid { .. })));
    assert!(matches!(
        run(&["sweep", "--axis", "phi", "--values", "0.5,0.2", "--out", "/tmp/never.csv"]),
        Err(Error::Grid { .. })
    ));
    let err = run(&["sop", "--realizations", "1", "--out", "/nonexistent-dir/x.csv"]).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = v2x_secrecy::ScenarioConfig::fig3_baseline()
        .to_toml_string()
        .replace("alpha = 3.0", "alpha = 2.0");
    fs::write(&cfg, text).unwrap();
    let err = run(&["sop", "--config", s(&cfg)]).unwrap_err();
    assert!(matches!(err, Error::Config { ref field, .. } if field == "alpha"), "{err}");
    assert!(err.to_string().contains("path-loss exponent must exceed 2"));
}
