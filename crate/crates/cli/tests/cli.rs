use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use zeeman_core::grid::Field2D;

fn zeeman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeeman")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV table, split on commas, comment lines dropped.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn spectrum_zero_field_energies() {
    let o = zeeman(&["spectrum", "--B", "0", "--k", "1", "--max-level", "2"]);
    assert!(o.status.success());
    let (h, body) = rows(&stdout(&o));
    let e = col(&h, "E_oracle");
    let got: Vec<f64> = body.iter().map(|r| r[e].parse().unwrap()).collect();
    let want = [-0.5, -0.125, -0.125, -1.0 / 18.0, -1.0 / 18.0, -1.0 / 18.0];
    assert_eq!(got.len(), 6);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-15, "{g} vs {w}");
    }
    let ep = col(&h, "E_paper");
    assert!(body.iter().all(|r| r[ep] == r[e]));
}

#[test]
fn spectrum_delta_columns_and_determinism() {
    let a = zeeman(&["spectrum", "--B", "1", "--n1", "0", "--n2", "0"]);
    let b = zeeman(&["spectrum", "--B", "1", "--n1", "0", "--n2", "0"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# schema_version=1\n"));
    let (h, body) = rows(&text);
    assert_eq!(body[0][col(&h, "delta_paper")], "2e1");
    assert_eq!(body[0][col(&h, "delta_oracle")], "4.8e1");
    let k1: f64 = body[0][col(&h, "k1_oracle")].parse().unwrap();
    assert!((k1 - (2f64.sqrt() + 48.0 / 8.0)).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(zeeman(&["spectrum", "--E", "1", "--W", "2"]).status.code(), Some(2));
    assert_eq!(zeeman(&["spectrum", "--qmin", "1", "--qmax", "-1"]).status.code(), Some(2));
    assert_eq!(zeeman(&["spectrum", "--order", "2"]).status.code(), Some(2));
    assert_eq!(zeeman(&["wigner-slice", "--B", "1,0.5"]).status.code(), Some(2));
    assert_eq!(zeeman(&["negativity", "--grid", "2"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    std::fs::write(&cfg, "B=\n").unwrap();
    let o = zeeman(&["sweep", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("s").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("B list is empty"));
    assert!(!dir.path().join("s").exists());
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nB = 0.5\nk=2\nmax_level=1\n").unwrap();
    let path = cfg.to_str().unwrap();

    let (h, body) = rows(&stdout(&zeeman(&["spectrum", "--config", path])));
    assert_eq!(body.len(), 3);
    assert!(body.iter().all(|r| r[col(&h, "B")] == "5e-1"));

    let text = stdout(&zeeman(&["spectrum", "--config", path, "--B", "0"]));
    assert!(text.contains("# config.k=2.0\n"));
    let (h, body) = rows(&text);
    assert!(body.iter().all(|r| r[col(&h, "B")] == "0e0"));
    assert_eq!(body[0][col(&h, "E_oracle")], "-2e0");

    std::fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(zeeman(&["spectrum", "--config", path]).status.code(), Some(2));
}

#[test]
fn json_output_has_schema_and_config() {
    let o = zeeman(&["spectrum", "--format", "json", "--W", "2", "--max-level", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["config"]["W"], 2.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["k0"], 2.0);
}

#[test]
fn wigner_slice_round_trips_and_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig8.csv");
    let o = zeeman(&[
        "wigner-slice",
        "--order",
        "1",
        "--E",
        "10",
        "--B",
        "0.5",
        "--grid",
        "41",
        "--out",
        out.to_str().unwrap(),
        "--heatmap",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = Field2D::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(f.grid.nq, 41);
    assert_eq!((f.grid.slice_q2, f.grid.slice_p2), (1.0, 1.0));
    assert!(f.reflection_defect() < 1e-12);
    assert_eq!(f.metadata["order"], "1");
    assert_eq!(f.metadata["config.E"], "10.0");
    let pgm = std::fs::read(out.with_extension("pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n41 41\n255\n"));
}

#[test]
fn negativity_table_rows() {
    let o = zeeman(&["negativity", "--B", "1", "--max-level", "2"]);
    assert!(o.status.success());
    let (h, body) = rows(&stdout(&o));
    assert_eq!(&h[..6], ["n1", "n2", "B", "eta", "paper_eta", "abs_deviation"]);
    let labels: Vec<(String, String)> = body.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let want = [("0", "0"), ("1", "0"), ("0", "1"), ("2", "0"), ("1", "1"), ("0", "2")];
    assert_eq!(labels, want.map(|(a, b)| (a.to_string(), b.to_string())));
    assert_eq!(body[0][col(&h, "paper_eta")], "1.4345e-1");

    let (h, body) = rows(&stdout(&zeeman(&["negativity", "--B", "0.1"])));
    assert_eq!(body[0][col(&h, "paper_eta")], "3.4e-3");

    let (h, body) = rows(&stdout(&zeeman(&["negativity", "--B", "0"])));
    let eta: f64 = body[0][col(&h, "eta")].parse().unwrap();
    assert!(eta.abs() < 1e-8);
    assert_eq!(body[0][col(&h, "paper_eta")], "");
}

#[test]
fn negativity_slice_variant_and_halved_form() {
    let full = rows(&stdout(&zeeman(&["negativity", "--n1", "1"])));
    let half = rows(&stdout(&zeeman(&["negativity", "--n1", "1", "--form", "halved"])));
    let e = col(&full.0, "eta");
    let (a, b): (f64, f64) = (full.1[0][e].parse().unwrap(), half.1[0][e].parse().unwrap());
    assert!((a - 2.0 * b).abs() < 1e-14);

    let s = rows(&stdout(&zeeman(&["negativity", "--n1", "1", "--variant", "slice"])));
    assert_eq!(s.1[0][col(&s.0, "variant")], "slice");
    let eta: f64 = s.1[0][e].parse().unwrap();
    assert!(eta > 0.0 && eta.is_finite());
}

fn sweep(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["sweep", "--out", dir.to_str().unwrap(), "--grid", "31"];
    args.extend_from_slice(extra);
    zeeman(&args)
}

#[test]
fn sweep_manifest_resolves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sweep(&out, &["--jobs", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let entries = m["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 12);
    assert_eq!(m["figures"].as_object().unwrap().len(), 8);
    assert!(m["figures_missing"].as_array().unwrap().is_empty());
    for e in entries {
        let f = Field2D::from_csv(&std::fs::read_to_string(out.join(e["slice"].as_str().unwrap())).unwrap()).unwrap();
        assert_eq!(f.grid.nq, 31);
        let neg = std::fs::read_to_string(out.join(e["negativity"].as_str().unwrap())).unwrap();
        assert_eq!(rows(&neg).1.len(), 1);
        assert!(e["cross_check"]["max_imag"].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn sweep_failure_removes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    // paper-literal mode has no printed coefficients for level (3,0)
    let o = sweep(&out, &["--mode", "paper-literal", "--n1", "3", "--B", "1", "--E", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}
