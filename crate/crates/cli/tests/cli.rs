use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wigner_lab_cli::table::Table;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn table(path: &Path) -> Table {
    Table::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn meta<'a>(t: &'a Table, key: &str) -> Option<&'a str> {
    t.metadata.iter().find_map(|m| m.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn fredholm_table_has_81_rows_with_exact_origin() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["fredholm", "--alpha-max", "4", "--step", "0.05", "--out", "f"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = table(&dir.path().join("f/fredholm.csv"));
    assert_eq!(t.rows.len(), 81);
    assert_eq!(t.rows[0], vec![0.0, 1.0, 0.0, 0.0]);
    assert!((t.rows[80][0] - 4.0).abs() < 1e-12);

    let m = json(&dir.path().join("f/manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(meta(&t, "config_hash"), m["config_hash"].as_str());
    assert!(m["wall_time"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn gaps_are_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "gaps", "--N", "400", "--samples", "500", "--u", "0", "--s", "1", "--delta", "0.8", "--seed",
        "7",
    ];
    let mut a: Vec<&str> = base.to_vec();
    a.extend(["--workers", "1", "--out", "a"]);
    let mut b: Vec<&str> = base.to_vec();
    b.extend(["--workers", "4", "--out", "b"]);
    assert_eq!(code(&run(dir.path(), &a)), 0);
    assert_eq!(code(&run(dir.path(), &b)), 0);
    let x = std::fs::read(dir.path().join("a/gaps.csv")).unwrap();
    let y = std::fs::read(dir.path().join("b/gaps.csv")).unwrap();
    assert_eq!(x, y);

    let t = table(&dir.path().join("a/gaps.csv"));
    let row = &t.rows[0];
    let k = |c: &str| t.column_index(c).unwrap();
    assert_eq!(row[k("samples")], 500.0);
    assert!(row[k("abs_error")] <= 0.05, "{row:?}");
    let m = json(&dir.path().join("a/manifest.json"));
    assert_eq!(m["replica_seeds"].as_array().unwrap().len(), 500);
    assert_eq!(m["master_seed"], 7);
}

fn write_table(path: &Path, rows: &[(f64, f64)]) {
    let mut t = Table::new(&["x", "value"]);
    t.metadata.push("test table".into());
    for &(x, v) in rows {
        t.push(vec![x, v]);
    }
    std::fs::write(path, t.to_csv()).unwrap();
}

#[test]
fn compare_reports_deviation_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let rows = [(0.5, 0.11), (1.0, 0.53), (2.0, 0.98)];
    write_table(&p.join("a.csv"), &rows);
    let shifted: Vec<_> = rows.iter().map(|&(x, v)| (x, v + 0.1)).collect();
    write_table(&p.join("b.csv"), &shifted);
    write_table(&p.join("c.csv"), &[(0.5, 0.11), (1.5, 0.5)]);

    let o = run(p, &["compare", "--table", "a.csv", "--reference", "a.csv", "--out", "same"]);
    assert_eq!(code(&o), 0);
    let r = json(&p.join("same/compare.json"));
    assert_eq!(r["sup_deviation"], 0.0);
    assert_eq!(r["pass"], true);

    let o = run(
        p,
        &["compare", "--table", "a.csv", "--reference", "b.csv", "--tolerance", "0.05", "--out", "off"],
    );
    assert_eq!(code(&o), 1);
    let r = json(&p.join("off/compare.json"));
    assert_eq!(r["pass"], false);
    assert!((r["sup_deviation"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(json(&p.join("off/manifest.json"))["status"], "failed");

    let o = run(p, &["compare", "--table", "a.csv", "--reference", "c.csv", "--out", "grid"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatched grids"));
}

#[test]
fn gap_table_passes_against_fredholm_reference() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gaps = [
        "gaps", "--N", "400", "--samples", "500", "--s", "0.5,1,2", "--seed", "11", "--out", "g",
    ];
    assert_eq!(code(&run(p, &gaps)), 0);
    assert_eq!(code(&run(p, &["fredholm", "--out", "f"])), 0);
    let o = run(
        p,
        &[
            "compare", "--table", "g/gaps.csv", "--reference", "f/fredholm.csv", "--column",
            "lambda_hat", "--reference-column", "int_p", "--tolerance", "0.05", "--out", "c",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&p.join("c/compare.json"))["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn kernel_sweep_stays_within_tolerance_of_sinc() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["kernel", "--N", "500", "--lambda", "0.5", "--u", "0", "--tau-sweep", "0.25:3:0.25"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = table(&dir.path().join("wigner-lab-out/kernel.csv"));
    assert_eq!(t.rows.len(), 12);
    let k = t.column_index("abs_error").unwrap();
    for row in &t.rows {
        assert!(row[k] < 0.05, "{row:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["frobnicate"])), 64);
    assert_eq!(code(&run(p, &["gaps", "--no-such-flag"])), 64);
    assert_eq!(code(&run(p, &[])), 64);
    assert_eq!(code(&run(p, &["--help"])), 0);
    assert_eq!(code(&run(p, &["gaps", "--delta", "1.5"])), 1);
    assert_eq!(code(&run(p, &["gaps", "--u", "3"])), 1);
    assert_eq!(code(&run(p, &["compare", "--table", "missing.csv", "--reference", "x"])), 1);

    // Every critical point is real for this spectrum: a numerical failure.
    std::fs::write(p.join("y.csv"), "eigenvalue\n-0.5\n0.5\n").unwrap();
    let o = run(p, &["kernel", "--spectrum", "y.csv", "--t", "0.1", "--u", "0", "--out", "k"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&p.join("k/manifest.json"))["status"], "failed");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("exp.toml"),
        "command = \"fredholm\"\nseed = 3\n[fredholm]\nalpha_max = 1.0\nstep = 0.25\n",
    )
    .unwrap();
    let o = run(p, &["fredholm", "--config", "exp.toml", "--step", "0.5", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    let t = table(&p.join("wigner-lab-out/fredholm.csv"));
    assert_eq!(t.rows.len(), 3);
    assert_eq!(meta(&t, "seed"), Some("5"));

    std::fs::write(p.join("bad.toml"), "command = \"fredholm\"\n[fredholm]\nstep = \"x\"\n").unwrap();
    assert_eq!(code(&run(p, &["fredholm", "--config", "bad.toml"])), 1);
}

#[test]
fn density_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["reverse", "--order", "3", "--out", "r"]);
    assert_eq!(code(&o), 0);
    let slope = json(&p.join("r/reverse.json"))["slope"].as_f64().unwrap();
    assert!((slope - 6.0).abs() < 0.2, "{slope}");

    std::fs::write(p.join("v.txt"), "# hermite coefficients\nK=2\n1\n0\n0.1\n").unwrap();
    let o = run(p, &["flow", "--density-file", "v.txt", "--t", "0.1", "--out", "f"]);
    assert_eq!(code(&o), 0);
    let t = table(&p.join("f/flow.csv"));
    assert_eq!(t.rows.len(), 2001);
    let s = json(&p.join("f/flow.json"));
    assert_eq!(s["is_probability"], true);
    assert!(s["reversal_chi2"].as_f64().unwrap() < 1e-4);
}

#[test]
fn spectrum_and_law_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["sample-spectrum", "--N", "6", "--samples", "3", "--seed", "1", "--out", "s"]);
    assert_eq!(code(&o), 0);
    let t = table(&p.join("s/sample_spectrum.csv"));
    assert_eq!(t.rows.len(), 18);
    assert_eq!(meta(&t, "n"), Some("6"));

    let o = run(p, &["validate-law", "--potential", "quartic", "--coeff", "0.1", "--out", "v"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&p.join("v/validate_law.json"))["passed"], true);
    let o = run(p, &["validate-law", "--potential", "quartic", "--out", "w"]);
    assert_eq!(code(&o), 1);

    let o = run(p, &["sc-check", "--N", "300", "--samples", "4", "--out", "c"]);
    assert_eq!(code(&o), 0);
    let s = json(&p.join("c/sc_check.json"));
    assert!(s["pooled_sup_cdf_distance"].as_f64().unwrap() < 0.02);

    let o = run(p, &["paircorr", "--N", "300", "--samples", "20", "--poisson", "--out", "pc"]);
    assert_eq!(code(&o), 0);
    let t = table(&p.join("pc/paircorr.csv"));
    assert_eq!(t.rows.len(), 24);
    assert_eq!(meta(&t, "poisson"), Some("true"));
}
