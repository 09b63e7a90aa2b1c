//! Runs the `tomoprob` binary on the shipped configs and on malformed input.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tomoprob::io::{spin_to_csv, CsvTable};
use tomoprob::qstate::BasisDescriptor;
use tomoprob::quadrature::SphereGrid;
use tomoprob::specfun::HalfInt;
use tomoprob::spintomo::SpinMarginal;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomoprob"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn table(path: &Path) -> CsvTable {
    CsvTable::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spin_sweep_matches_cos_squared() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("spin_sweep.toml");
    let out = run(&["marginal", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = table(&dir.path().join("spin_marginal.csv"));
    assert_eq!(t.columns, ["s", "alpha", "beta", "w"]);
    for row in &t.rows {
        let want = if row[0] > 0.0 { (row[2] / 2.0).cos().powi(2) } else { (row[2] / 2.0).sin().powi(2) };
        assert!((row[3] - want).abs() < 1e-12);
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"][0]["path"], "spin_marginal.csv");
}

#[test]
fn vacuum_circle_is_gaussian_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("fock0_circle.toml");
    assert_eq!(run(&["marginal", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(0));
    let csv = dir.path().join("quadrature_marginal.csv");
    for row in &table(&csv).rows {
        // Columns: frame, mu, nu, x, w on the unit circle.
        let want = (-row[3] * row[3]).exp() / std::f64::consts::PI.sqrt();
        assert!((row[4] - want).abs() < 1e-12);
    }
    let rec_cfg = dir.path().join("rec.toml");
    std::fs::write(&rec_cfg, format!("input = {:?}\nlevels = 2\n", csv.to_str().unwrap())).unwrap();
    let rec = dir.path().join("rec");
    let out = run(&["reconstruct", "--config", rec_cfg.to_str().unwrap()], &rec);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rho = tomoprob::io::read_state(&rec.join("density.toml")).unwrap();
    let want = tomoprob::io::read_state(&configs().join("states/fock0.toml")).unwrap();
    assert!(rho.distance(want.matrix()) < 1e-6);
}

#[test]
fn uniform_spin_marginal_reconstructs_to_identity_over_two() {
    let dir = tempfile::tempdir().unwrap();
    let w = SpinMarginal::uniform(HalfInt::HALF, &SphereGrid::new(4, 3)).unwrap();
    let csv = dir.path().join("w.csv");
    std::fs::write(&csv, spin_to_csv(&w).render()).unwrap();
    let cfg = dir.path().join("rec.toml");
    std::fs::write(&cfg, "input = \"w.csv\"\n").unwrap();
    let out = run(&["reconstruct", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rho = tomoprob::io::read_state(&dir.path().join("density.toml")).unwrap();
    let half = tomoprob::qstate::DensityMatrix::maximally_mixed(BasisDescriptor::spin_half()).unwrap();
    assert!(rho.distance(half.matrix()) < 1e-12);
}

#[test]
fn corrupted_table_is_a_parse_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let w = SpinMarginal::uniform(HalfInt::HALF, &SphereGrid::new(2, 2)).unwrap();
    let mut lines: Vec<String> = spin_to_csv(&w).render().lines().map(String::from).collect();
    lines[3] = lines[3].replace(",0.5", ",half");
    let text = lines.join("\n") + "\n";
    std::fs::write(dir.path().join("w.csv"), text).unwrap();
    std::fs::write(dir.path().join("rec.toml"), "input = \"w.csv\"\n").unwrap();
    let out = run(&["reconstruct", "--config", dir.path().join("rec.toml").to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn empty_lattice_and_unknown_suite_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let state = configs().join("states/fock0.toml");
    let cfg = dir.path().join("m.toml");
    std::fs::write(
        &cfg,
        format!("state = {:?}\n[lattice]\nkind = \"circle\"\nangles = 0\ngrid = {{ start = -1.0, end = 1.0, points = 8 }}\n", state),
    )
    .unwrap();
    assert_eq!(run(&["marginal", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["verify", "everything"], dir.path()).status.code(), Some(2));
}

#[test]
fn marginal_output_is_deterministic() {
    let cfg = configs().join("fock0_circle.toml");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&["marginal", "--config", cfg.to_str().unwrap(), "--threads", "2"], a.path());
    run(&["marginal", "--config", cfg.to_str().unwrap()], b.path());
    let read = |d: &Path| std::fs::read(d.join("quadrature_marginal.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn trapped_and_free_demos_validate() {
    for name in ["trapped.toml", "free.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = configs().join(name);
        let out = run(&["evolve", "--config", cfg.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let series = tomoprob::io::hybrid_from_csv(&table(&dir.path().join("evolution.csv"))).unwrap();
        assert!(!series.is_empty());
    }
}

#[test]
fn verify_specfun_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "specfun"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 5);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 5);
}
