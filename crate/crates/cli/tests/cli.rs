use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use sovf::io::{load_model, load_samples, samples_to_csv};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sovf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

/// Data rows of a CSV, skipping the header and `#` footer lines.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

const SINGLE_MODE: &str = r#"{"type":"second_order_modal","omega":[2.0],"psi":[0.1],"b":[3.0],"c":[1.0]}"#;

#[test]
fn sample_chain_example_writes_points_and_conjugates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--chain-n", "20", "--alpha", "1e-3", "--beta", "1e-4", "--fmin", "1", "--fmax", "1000",
            "--count", "1000", "--spacing", "linear", "--conj-close", "--out", "data.csv"]);
    let text = read(d, "data.csv");
    assert_eq!(text.lines().next(), Some("xi_re,xi_im,h_re,h_im"));
    assert_eq!(rows(&text).len(), 2000);
    let samples = load_samples(&d.join("data.csv")).unwrap();
    assert!(samples.is_conjugate_closed());
    assert!(samples.points().iter().all(|p| p.re == 0.0));
    // write -> read -> write is byte-stable
    assert_eq!(samples_to_csv(&samples), text);
}

#[test]
fn eval_on_stored_points_reproduces_sampled_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "m.json", SINGLE_MODE);
    ok(d, &["sample", "--model", "m.json", "--fmin", "0.5", "--fmax", "6", "--count", "25", "--out", "s.csv"]);
    ok(d, &["eval", "--model", "m.json", "--samples", "s.csv", "--out", "e.csv"]);
    let samples = rows(&read(d, "s.csv"));
    let values = rows(&read(d, "e.csv"));
    assert_eq!(samples.len(), values.len());
    for (s, v) in samples.iter().zip(&values) {
        assert_eq!(s[1], v[0]);
        let h = Complex64::new(s[2], s[3]);
        let g = Complex64::new(v[1], v[2]);
        assert!((h - g).norm() <= 1e-12 * h.norm());
        assert!((g.norm() - v[3]).abs() <= 1e-15 * v[3]);
    }
}

#[test]
fn eval_at_zero_frequency_gives_static_gain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "m.json", SINGLE_MODE);
    ok(d, &["eval", "--model", "m.json", "--fmin", "0", "--fmax", "1", "--count", "2", "--out", "e.csv"]);
    let first = &rows(&read(d, "e.csv"))[0];
    assert_eq!(first[0], 0.0);
    assert!((first[3] - 3.0 / 2.0).abs() < 1e-15);
}

#[test]
fn eval_at_a_pole_flags_the_row_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "m.json", r#"{"type":"second_order_modal","omega":[2.0],"psi":[0.0],"b":[1.0],"c":[1.0]}"#);
    let out = ok(d, &["eval", "--model", "m.json", "--fmin", "1", "--fmax", "3", "--count", "3", "--out", "e.csv"]);
    let text = read(d, "e.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].contains("NaN"));
    assert!(!lines[1].contains("NaN") && !lines[3].contains("NaN"));
    assert!(!out.stderr.is_empty());
}

#[test]
fn vf_recovers_order_four_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "truth.json",
        r#"{"type":"first_order","lambda_re":[-1.5,-1.5,-4.0,-4.0],"lambda_im":[30.0,-30.0,70.0,-70.0],"phi_re":[2.0,2.0,-1.0,-1.0],"phi_im":[0.5,-0.5,3.0,-3.0]}"#,
    );
    ok(d, &["sample", "--model", "truth.json", "--fmin", "1", "--fmax", "100", "--count", "200", "--conj-close", "--out", "s.csv"]);
    ok(d, &["fit", "--method", "vf", "--order", "4", "--samples", "s.csv", "--out", "vf.json", "--report", "r.csv",
            "--errors", "e.csv"]);
    let errors = rows(&read(d, "e.csv"));
    assert_eq!(read(d, "e.csv").lines().next(), Some("xi_im,rel_err"));
    assert!(errors.iter().all(|r| r[1] <= 1e-8));
    assert_eq!(read(d, "r.csv").lines().next(), Some("iter,max_den_weight,ls_residual,max_rel_err,max_pole_move"));
    assert!(read(d, "vf.json").contains(r#""type":"first_order""#));
}

#[test]
fn structured_fit_writes_all_outputs_even_without_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--chain-n", "6", "--k0", "1e4", "--fmin", "1", "--fmax", "300", "--count", "100", "--conj-close",
            "--out", "s.csv"]);
    for method in ["sovf1", "sovf2"] {
        ok(d, &["fit", "--method", method, "--order", "3", "--samples", "s.csv", "--max-iter", "2", "--out", "m.json",
                "--report", "r.csv", "--errors", "e.csv"]);
        let report = read(d, "r.csv");
        assert!(report.contains("# termination="));
        assert!(rows(&report).len() <= 2);
        let model = load_model(&d.join("m.json")).unwrap();
        assert!(matches!(model, sovf::io::Model::SecondOrder(_)));
    }
}

#[test]
fn compare_identical_and_zero_models() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", SINGLE_MODE);
    write(d, "zero.json", r#"{"type":"second_order_modal","omega":[2.0],"psi":[0.1],"b":[0.0],"c":[1.0]}"#);
    ok(d, &["sample", "--model", "a.json", "--fmin", "1", "--fmax", "5", "--count", "9", "--out", "s.csv"]);
    ok(d, &["compare", "--model", "a.json", "--model", "a.json", "--model", "zero.json", "--samples", "s.csv",
            "--out", "c.csv"]);
    let text = read(d, "c.csv");
    assert_eq!(text.lines().next(), Some("xi_im,a,a_2,zero"));
    for r in rows(&text) {
        assert_eq!(r[1], r[2]);
        assert!(r[1] < 1e-14);
        assert_eq!(r[3], 1.0);
    }
    assert!(text.contains("# max,"));
    assert!(text.contains("# mean,"));
}

#[test]
fn compare_columns_match_recomputed_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sample", "--chain-n", "5", "--k0", "1e4", "--fmin", "1", "--fmax", "300", "--count", "80", "--conj-close",
            "--out", "s.csv"]);
    for m in ["sovf1", "sovf2"] {
        ok(d, &["fit", "--method", m, "--order", "4", "--samples", "s.csv", "--max-iter", "10", "--out",
                &format!("{m}.json"), "--report", &format!("{m}_r.csv"), "--errors", &format!("{m}_e.csv")]);
    }
    ok(d, &["compare", "--model", "sovf1.json", "--model", "sovf2.json", "--samples", "s.csv", "--out", "c.csv"]);
    let samples = load_samples(&d.join("s.csv")).unwrap();
    let table = rows(&read(d, "c.csv"));
    for (col, m) in ["sovf1", "sovf2"].iter().enumerate() {
        let model = load_model(&d.join(format!("{m}.json"))).unwrap();
        for (row, (s, h)) in table.iter().zip(samples.points().iter().zip(samples.values())) {
            let want = (model.eval(*s).unwrap() - h).norm() / h.norm();
            assert!((row[col + 1] - want).abs() <= 1e-12 * want.max(1e-300), "{} vs {want}", row[col + 1]);
        }
    }
    // an errors CSV from the fit can be compared too
    ok(d, &["compare", "--model", "sovf1.json", "--errors", "sovf1_e.csv", "--samples", "s.csv", "--out", "c2.csv"]);
    for r in rows(&read(d, "c2.csv")) {
        assert_eq!(r[1], r[2]);
    }
}

#[test]
fn compare_rejects_mismatched_grids() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", SINGLE_MODE);
    ok(d, &["sample", "--model", "a.json", "--fmin", "1", "--fmax", "5", "--count", "9", "--out", "s.csv"]);
    write(d, "e.csv", "xi_im,rel_err\n1.0,0.0\n2.0,0.0\n");
    let out = run(d, &["compare", "--errors", "e.csv", "--samples", "s.csv", "--out", "c.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!d.join("c.csv").exists());
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", SINGLE_MODE);
    ok(d, &["sample", "--model", "a.json", "--fmin", "1", "--fmax", "5", "--count", "9", "--out", "s.csv"]);
    let cases: [&[&str]; 5] = [
        &["fit", "--method", "sovf2", "--order", "0", "--samples", "s.csv", "--out", "m.json"],
        &["eval", "--model", "a.json", "--fmin", "1", "--fmax", "2", "--count", "0", "--out", "e.csv"],
        &["sample", "--chain-n", "3", "--bogus", "--out", "x.csv"],
        &["fit", "--method", "nope", "--order", "2", "--samples", "s.csv", "--out", "m.json"],
        &["sample", "--chain-n", "3", "--model", "a.json", "--fmin", "1", "--fmax", "2", "--count", "3", "--out", "x.csv"],
    ];
    for args in cases {
        let out = run(d, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn hard_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", SINGLE_MODE);
    ok(d, &["sample", "--model", "a.json", "--fmin", "1", "--fmax", "5", "--count", "5", "--conj-close", "--out", "s.csv"]);
    // 3r columns exceed the 10 samples
    let out = run(d, &["fit", "--method", "sovf1", "--order", "4", "--samples", "s.csv", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(d, &["fit", "--method", "vf", "--order", "2", "--samples", "missing.csv", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    write(d, "bad.json", r#"{"type":"second_order_modal","omega":[-1.0],"psi":[0.1],"b":[1.0],"c":[1.0]}"#);
    let out = run(d, &["eval", "--model", "bad.json", "--fmin", "1", "--fmax", "2", "--count", "2", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_documents_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["sample", "fit", "eval", "compare"] {
        assert!(text.contains(cmd));
    }
    let out = ok(dir.path(), &["fit", "--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--method", "--order", "--samples", "--max-iter", "--tol", "--out", "--report", "--errors"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn user_supplied_initial_points() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", SINGLE_MODE);
    ok(d, &["sample", "--model", "a.json", "--fmin", "0.5", "--fmax", "5", "--count", "30", "--conj-close", "--out", "s.csv"]);
    write(d, "init.csv", "re,im\n-0.2,1.9\n-0.2,-1.9\n");
    ok(d, &["fit", "--method", "sovf1", "--order", "1", "--samples", "s.csv", "--init-points", "init.csv", "--out",
            "m.json", "--errors", "e.csv"]);
    assert!(rows(&read(d, "e.csv")).iter().all(|r| r[1] < 1e-8));
}
