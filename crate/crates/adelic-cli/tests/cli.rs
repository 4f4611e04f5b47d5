use std::path::PathBuf;
use std::process::{Command, Output};

use adelic_core::bundle::io::parse_bundle;
use adelic_core::bundle::{degree, john_bundle};
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn adelic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adelic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn gamma_prints_twelve_significant_digits() {
    let out = adelic(&["gamma", "2", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"lhs\":0.231049060187"), "{text}");
    let r = &records(&adelic(&["gamma", "2", "2"]))[0];
    assert_eq!(r["name"], "gamma");
    assert_eq!(r["instance"]["count"], 3);
}

#[test]
fn records_follow_the_report_schema() {
    for args in [vec!["gamma", "3", "4"], vec!["verify", "all", "12", "3"]] {
        for r in records(&adelic(&args)) {
            let keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
            assert_eq!(
                keys,
                ["instance", "lhs", "name", "pass", "rhs", "seed", "slack"]
            );
        }
    }
}

#[test]
fn degree_of_trivial_bundle_is_zero() {
    let out = adelic(&["degree", &data("trivial2.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["lhs"], 0.0);
    // Cube: log(4/π).
    let r = &records(&adelic(&["degree", &data("cube2.json")]))[0];
    assert!((r["lhs"].as_f64().unwrap() - (4.0 / std::f64::consts::PI).ln()).abs() < 1e-11);
    // Hexagon |x|, |y|, |x + y| <= 1 of area 3 on a lattice of covolume 2: log(3 / 2π).
    let r = &records(&adelic(&["degree", &data("hexagon.json")]))[0];
    assert!((r["lhs"].as_f64().unwrap() - (3.0 / (2.0 * std::f64::consts::PI)).ln()).abs() < 1e-11);
}

#[test]
fn verify_hermitian_suite_passes() {
    let out = adelic(&["verify", "hermitian-exact", "50", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    assert_eq!(rs.len(), 50);
    assert!(rs.iter().all(|r| r["pass"] == true));
}

#[test]
fn failing_checks_exit_with_two() {
    // Floating-point identities leave residuals far above a 1e-300 tolerance.
    let out = adelic(&["verify", "hermitian-identities", "30", "1", "--tol=1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(records(&out).iter().any(|r| r["pass"] == false));
    let out = adelic(&["verify", "hermitian-exact", "5", "1", "--tol=-1"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "negative overrides are rejected"
    );
}

#[test]
fn usage_and_parse_errors_exit_with_one() {
    assert_eq!(adelic(&["gamma", "2"]).status.code(), Some(1));
    assert_eq!(adelic(&["degree", "missing.json"]).status.code(), Some(1));
    assert_eq!(
        adelic(&["verify", "no-such-suite", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        adelic(&["height", &data("diag14.json"), "0,0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(adelic(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"rank": 2, "finite": {"matrix": ["1", "0"]}}"#).unwrap();
    assert_eq!(
        adelic(&["degree", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["verify", "all", "40", "11"],
        vec!["polygon", "PLACEHOLDER"],
        vec!["minima", "PLACEHOLDER"],
    ] {
        let file = data("lattice3.json");
        let args: Vec<&str> = args
            .iter()
            .map(|a| {
                if *a == "PLACEHOLDER" {
                    file.as_str()
                } else {
                    a
                }
            })
            .collect();
        let a = adelic(&args);
        let b = adelic(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn emitted_bundle_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("john.json");
    let out = adelic(&[
        "john",
        &data("hexagon.json"),
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&emitted).unwrap();
    let parsed = parse_bundle(&text).unwrap();
    let direct = john_bundle(
        &parse_bundle(&std::fs::read_to_string(data("hexagon.json")).unwrap()).unwrap(),
    )
    .unwrap();
    assert_eq!(parsed, direct);
    let r = &records(&adelic(&["degree", emitted.to_str().unwrap()]))[0];
    assert!((r["lhs"].as_f64().unwrap() - degree(&direct).unwrap()).abs() < 1e-11);
    // The hermitian John bundle is its own John bundle.
    let again = dir.path().join("again.json");
    adelic(&[
        "john",
        emitted.to_str().unwrap(),
        "--emit",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&again).unwrap(), text);
}

#[test]
fn polygon_writes_svg_and_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let out = adelic(&[
        "polygon",
        &data("diag14.json"),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["instance"]["breakpoints"], serde_json::json!([0, 1, 2]));
    assert!((r["instance"]["slopes"][1].as_f64().unwrap() + std::f64::consts::LN_2).abs() < 1e-11);
    let s = std::fs::read_to_string(&svg).unwrap();
    assert!(s.starts_with("<svg") && s.contains("P(rank)"));
    let out = adelic(&[
        "polygon",
        &data("hexagon.json"),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let r = &records(&out)[0];
    assert_eq!(r["name"], "polygon_bracket");
    assert!(r["lhs"].as_f64().unwrap() <= r["rhs"].as_f64().unwrap());
    assert_eq!(
        std::fs::read_to_string(&svg)
            .unwrap()
            .matches("<polyline")
            .count(),
        2
    );
}

#[test]
fn height_of_a_rational_vector() {
    // ‖(1, 2/3)‖ = 5/3 for G = diag(1, 4) and the finite part is |2/3|_3 = 3.
    let r = &records(&adelic(&["height", &data("diag14.json"), "1,2/3"]))[0];
    assert!((r["lhs"].as_f64().unwrap() - 5f64.ln()).abs() < 1e-11);
    assert_eq!(r["instance"]["finite_part"], "3/1");
}

#[test]
fn formats_and_output_file() {
    let csv = String::from_utf8(adelic(&["gamma", "2", "2", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("name,lhs,rhs,slack,pass,seed,instance\ngamma,0.231049060187,"));
    let text = String::from_utf8(adelic(&["gamma", "2", "2", "--format", "text"]).stdout).unwrap();
    assert!(text.starts_with("gamma [pass] lhs=0.231049060187"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let out = adelic(&["gamma", "2", "2", "--out", path.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .contains("0.231049060187"));
}

#[test]
fn config_file_is_validated_and_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "seed = 9\nformat = \"text\"\n").unwrap();
    let out = adelic(&["gamma", "2", "2", "--config", cfg.to_str().unwrap()]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("seed=9"));
    let out = adelic(&[
        "gamma",
        "2",
        "2",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "4",
    ]);
    assert_eq!(records(&out)[0]["seed"], 4);
    std::fs::write(&cfg, "seeed = 9\n").unwrap();
    assert_eq!(
        adelic(&["gamma", "2", "2", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    std::fs::write(&cfg, "radius_factor = -2.0\n").unwrap();
    assert_eq!(
        adelic(&["gamma", "2", "2", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        adelic(&["gamma", "2", "2", "--tol", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        adelic(&["gamma", "2", "2", "--config", &data("config.toml")])
            .status
            .code(),
        Some(0)
    );
}
