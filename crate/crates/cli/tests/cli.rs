use std::process::{Command, Output};

use loewner_cli::output::{read_csv, read_json, Cell, Report};
use loewner_core::closed_forms::sle_reference;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loewner-lab")).args(args).env_remove("LOEWNER_LAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn text(c: &Cell) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        other => panic!("expected text, got {other:?}"),
    }
}

fn num(c: &Cell) -> f64 {
    c.as_f64().unwrap()
}

fn rendered(r: &Report) -> (Vec<String>, Vec<Vec<String>>) {
    (r.columns.clone(), r.rows.iter().map(|row| row.iter().map(Cell::render).collect()).collect())
}

fn csv_report(args: &[&str]) -> Report {
    let o = lab(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    read_csv(&stdout(&o)).unwrap()
}

#[test]
fn spectra_regimes_switch_at_the_transitions() {
    let r = csv_report(&["spectra", "--kappa", "6", "--m", "1", "--p-min", "-5", "--p-max", "3", "--points", "8001"]);
    assert_eq!(r.columns, ["p", "beta", "regime", "status"]);
    let (pi, ri) = (r.column("p").unwrap(), r.column("regime").unwrap());
    let mut switches = Vec::new();
    for w in r.rows.windows(2) {
        if text(&w[0][ri]) != text(&w[1][ri]) {
            switches.push((num(&w[1][pi]), text(&w[1][ri])));
        }
    }
    assert_eq!(switches.len(), 2, "{switches:?}");
    assert!((switches[0].0 + 3.25).abs() < 1e-3 && switches[0].1 == "bulk_beta0");
    assert!((switches[1].0 - 0.7024).abs() < 1e-3 && switches[1].1 == "unbounded_B1");
    assert_eq!(r.config["command"]["spectra"]["kappa"], 6.0);
    assert_eq!(r.summary["tip"], -3.25);
}

#[test]
fn pde_check_passes_and_fails_on_tolerance() {
    let o = lab(&["pde-check", "--kappa", "6", "--m", "1", "--grid", "100", "--tol", "1e-8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&stdout(&o)).unwrap();
    assert_eq!(r.rows.len(), 100);
    assert_eq!(r.schema, 1);
    assert!(r.summary["max_residual"].as_f64().unwrap() < 1e-8);
    let strict = lab(&["pde-check", "--kappa", "6", "--m", "1", "--tol", "1e-15"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn series_matches_level_recursion() {
    let r = csv_report(&["series", "--kappa", "6", "--m", "1", "--count", "50"]);
    assert_eq!(r.rows.len(), 50);
    for row in &r.rows {
        assert_eq!(row[2], Cell::Int(1));
        assert!((num(&row[3]) - num(&row[4])).abs() < 1e-10);
    }
    let odd = csv_report(&["series", "--kappa", "4", "--m", "2", "--count", "10"]);
    for row in &odd.rows {
        assert!((num(&row[3]) - num(&row[4])).abs() < 1e-12);
    }
}

#[test]
fn symbolic_moment_is_the_stored_rational_function() {
    let r = csv_report(&["moments", "--family", "a", "--n", "8", "--mode", "symbolic"]);
    assert_eq!(r.rows.len(), 1);
    assert_eq!(text(&r.rows[0][2]), sle_reference(8).unwrap().to_string());
    let dp = csv_report(&["moments", "--n", "8", "--mode", "dp", "--all"]);
    assert_eq!(dp.rows.len(), 7);
    assert_eq!(dp.rows[6][2], r.rows[0][2]);
}

#[test]
fn oracle_agrees() {
    for s in ["sle:6", "stable:1.5:2", "dendritic"] {
        let r = csv_report(&["oracle", "--symbol", s, "--n", "8"]);
        assert!(r.rows.iter().all(|row| text(&row[4]) == "true"), "{s}");
    }
}

#[test]
fn simulation_is_independent_of_threads() {
    let args = ["simulate", "--driver", "brownian:6", "--n", "4", "--samples", "600", "--seed", "7", "--format", "json"];
    let one = lab(&[&args[..], &["--threads", "1"]].concat());
    let three = lab(&[&args[..], &["--threads", "3"]].concat());
    let (a, b) = (read_json(&stdout(&one)).unwrap(), read_json(&stdout(&three)).unwrap());
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.config["mc"]["samples"], 600);
    // E(a_2) = −2/(1 + κ/2) for SLE.
    let mean_exact = num(&a.rows[0][5]);
    assert!((mean_exact + 0.5).abs() < 1e-15);
    let m2_exact = num(&a.rows[0][8]);
    assert!((m2_exact - 1.0).abs() < 1e-12);
}

#[test]
fn environment_sets_threads() {
    let o = Command::new(env!("CARGO_BIN_EXE_loewner-lab"))
        .args(["simulate", "--driver", "brownian:2", "--n", "2", "--samples", "100", "--format", "json"])
        .env("LOEWNER_LAB_THREADS", "2")
        .output()
        .unwrap();
    let r = read_json(&stdout(&o)).unwrap();
    assert_eq!(r.config["threads"], 2);
}

#[test]
fn verify_all_quick_passes() {
    let start = std::time::Instant::now();
    let o = lab(&["verify-all", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(start.elapsed().as_secs() < 60);
    let r = read_csv(&stdout(&o)).unwrap();
    assert!(r.rows.iter().all(|row| text(&row[1]) == "true"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["simulate", "--driver", "levy:1", "--n", "4"]).status.code(), Some(2));
    assert_eq!(lab(&["spectra"]).status.code(), Some(2));
    // Valid syntax, unsupported parameters.
    assert_eq!(lab(&["series", "--kappa", "5", "--m", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["pde-check", "--kappa", "6", "--format", "svg", "--grid", "0"]).status.code(), Some(2));
}

#[test]
fn csv_and_json_round_trip() {
    for args in [
        vec!["spectra", "--kappa", "0", "--m", "2", "--points", "21"],
        vec!["series", "--kappa", "4", "--m", "2", "--count", "6"],
        vec!["moments", "--n", "5", "--all", "--symbol", "sle:sym"],
        vec!["simulate", "--driver", "composite:1:0.25:3.141592653589793", "--n", "3", "--samples", "200"],
    ] {
        let csv_r = csv_report(&args);
        let json_out = lab(&[&args[..], &["--format", "json"]].concat());
        let json_r = read_json(&stdout(&json_out)).unwrap();
        // CSV carries no cell types, so compare what each cell renders to.
        assert_eq!(rendered(&csv_r), rendered(&json_r), "{args:?}");
        assert_eq!((&csv_r.command, &csv_r.config, &csv_r.summary), (&json_r.command, &json_r.config, &json_r.summary));
        // Re-emitting reproduces the same text.
        assert_eq!(read_csv(&csv_r.to_csv().unwrap()).unwrap(), csv_r);
        assert_eq!(read_json(&json_r.to_json().unwrap()).unwrap(), json_r);
    }
}

#[test]
fn svg_is_well_formed() {
    for args in [
        vec!["spectra", "--kappa", "6"],
        vec!["simulate", "--driver", "brownian:2", "--n", "4", "--samples", "200"],
        vec!["series", "--kappa", "2", "--count", "20"],
    ] {
        let o = lab(&[&args[..], &["--format", "svg"]].concat());
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        let doc = roxmltree::Document::parse(&s).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(doc.descendants().any(|n| n.has_tag_name("polyline")));
    }
    assert_eq!(lab(&["verify-all", "--quick", "--format", "svg"]).status.code(), Some(2));
}

#[test]
fn out_directory_receives_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["spectra", "--kappa", "2", "--format", "json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("spectra.json")).unwrap();
    assert_eq!(read_json(&text).unwrap().command, "spectra");
}
