use std::path::Path;
use std::process::{Command, Output};

fn hypwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypwalk"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn spherical_triangle_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["walk", "--group", "triangle 2,3,5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not hyperbolic"));
}

#[test]
fn point_mass_has_zero_drift() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(
        d.path(),
        &["walk", "--group", "triangle 2,3,7", "--measure", "e : 1", "--steps", "50", "--trials", "10"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for row in data_rows(&d.path().join("walk.csv")) {
        assert_eq!(row[1], "0");
    }
}

#[test]
fn one_step_entropy_of_the_free_group() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["entropy", "--group", "free", "--k-max", "1"]);
    assert!(out.status.success());
    let rows = data_rows(&d.path().join("entropy.csv"));
    assert_eq!(rows.len(), 1);
    let h: f64 = rows[0][1].parse().unwrap();
    assert!((h - 4f64.ln()).abs() < 1e-12);
}

#[test]
fn support_cap_breach_keeps_the_partial_table() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["entropy", "--group", "free", "--k-max", "8", "--set", "support_cap=100"]);
    assert_eq!(out.status.code(), Some(3));
    let rows = data_rows(&d.path().join("entropy.csv"));
    assert_eq!(rows.len(), 3);
    let report = std::fs::read_to_string(d.path().join("entropy_report.json")).unwrap();
    assert!(report.contains("overflow"));
}

#[test]
fn empty_family_gives_an_empty_table() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "empty.cfg",
        "family = block\n[family]\n1 2 n\n2 1 3\nn 3 1\nn-values\nweights 1/3 1/3 1/3\n",
    );
    let out = hypwalk(d.path(), &["sweep", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(data_rows(&d.path().join("sweep.csv")).is_empty());
}

#[test]
fn family_without_weights_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "bad.cfg", "family = block\n[family]\n1 2 n\n2 1 3\nn 3 1\nn-values 7 inf\n");
    let out = hypwalk(d.path(), &["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file_and_are_echoed() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "w.cfg", "group = triangle 2,3,7\nsteps = 40\ntrials = 8\nseed = 5\n");
    let out = hypwalk(d.path(), &["walk", "--config", &cfg, "--seed", "11"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(d.path().join("walk.csv")).unwrap();
    assert!(text.contains("# seed = 11\n"));
    assert!(text.contains("# steps = 40\n"));
    assert!(text.contains("# bins = 64\n"), "defaults are echoed too");
    assert!(!text.contains('\r'));
    let meta = std::fs::read_to_string(d.path().join("walk.meta.json")).unwrap();
    assert!(meta.contains("wall_time_s"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["walk", "--group", "free", "--set", "colour=red"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hitting_histogram_counts_every_escaped_trial() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["hitting", "--group", "triangle 2,3,7", "--trials", "500", "--set", "bins=16"]);
    assert!(out.status.success());
    let rows = data_rows(&d.path().join("hitting.csv"));
    assert_eq!(rows.len(), 16);
    let total: u64 = rows.iter().map(|r| r[2].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 500);
    let stats = std::fs::read_to_string(d.path().join("hitting_stats.json")).unwrap();
    assert!(stats.contains("indicator only"));
}

#[test]
fn sphere_binning_for_three_dimensional_groups() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["hitting", "--group", "z2", "--trials", "50", "--set", "max_steps=200"]);
    // Parabolic walks escape slowly; either outcome must still write a full grid.
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&d.path().join("hitting.csv"));
    assert_eq!(rows.len(), 64);
    assert_eq!(rows[0][1].split(' ').count(), 3);
}

#[test]
fn verify_reports_small_residuals_for_every_member() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["verify", "--family", "dihedral 5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&d.path().join("verify.csv"));
    assert!(rows.iter().any(|r| r[0] == "5"));
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() < 1e-8));
}

#[test]
fn ball_table_has_one_row_per_radius() {
    let d = tempfile::tempdir().unwrap();
    let out = hypwalk(d.path(), &["ball", "--group", "free", "--r-max", "3"]);
    assert!(out.status.success());
    let rows = data_rows(&d.path().join("ball.csv"));
    let counts: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(counts, ["1", "5", "17", "53"]);
}

#[test]
fn walk_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["walk", "--group", "triangle 2,3,7", "--steps", "300", "--trials", "50"];
    assert!(hypwalk(a.path(), &args).status.success());
    assert!(hypwalk(b.path(), &args).status.success());
    assert_eq!(
        std::fs::read(a.path().join("walk.csv")).unwrap(),
        std::fs::read(b.path().join("walk.csv")).unwrap()
    );
}
