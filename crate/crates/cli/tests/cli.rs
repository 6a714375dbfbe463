//! End-to-end checks of the rweyl binary: exit codes per error class,
//! report provenance, and bit-reproducibility under a fixed seed.

use std::path::{Path, PathBuf};
use std::process::Output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rweyl")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rweyl-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(bin()).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_DISK: &str = r#"
characters = [0, 1]

[group]
kind = "planar_so2"
n = 2

[domain]
kind = "disk"
radius = 1.0

[operator]
kind = "euclidean_power"
order = 2


[lambda_grid]
min = 1.0e3
max = 1.0e5
points = 12
spacing = "log"

[mc]
samples = 20000
seed = 7

[quadrature]
resolution = [32, 32, 16]

[tolerances]
coefficient_rel = 0.05
exponent_abs = 0.05
"#;

#[test]
fn volume_is_bit_reproducible_and_embeds_provenance() {
    let dir = scratch("volume");
    let cfg = write_config(&dir, "disk.toml", SMALL_DISK);
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let r = run(&["volume", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let a = std::fs::read(out_a.join("volume.json")).unwrap();
    let b = std::fs::read(out_b.join("volume.json")).unwrap();
    assert_eq!(a, b, "same config + seed must give byte-identical JSON");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"config_sha256\":\""));
    assert!(text.contains("\"seed\":7"));
    assert!(text.contains("\"versions\":\"reduced-weyl/"));
    // lexicographic top-level key order
    let ix = |k: &str| text.find(k).unwrap();
    assert!(ix("agreement_sigma") < ix("config_sha256"));
    assert!(ix("config_sha256") < ix("\"mc\""));
    assert!(ix("\"mc\"") < ix("quadrature"));
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = scratch("seed");
    let cfg = write_config(&dir, "disk.toml", SMALL_DISK);
    let r = run(&[
        "volume",
        cfg.to_str().unwrap(),
        "--seed",
        "123",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let text = std::fs::read_to_string(dir.join("volume.json")).unwrap();
    assert!(text.contains("\"seed\":123"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = scratch("badkey");
    let cfg = write_config(&dir, "bad.toml", &format!("{SMALL_DISK}\ntypo_section = 1\n"));
    let r = run(&["volume", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    let r = run(&["volume", dir.join("missing.toml").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn non_invariant_symbol_exits_3() {
    let dir = scratch("invariance");
    let cfg = write_config(
        &dir,
        "skew.toml",
        r#"
characters = [0]

[group]
kind = "planar_so2"
n = 2

[domain]
kind = "disk"
radius = 1.0

[operator]
kind = "quadratic_form"
q = [[1.0, 0.0], [0.0, 2.0]]

"#,
    );
    let r = run(&["predict", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("not invariant"));
}

#[test]
fn unfittable_counts_exit_4() {
    let dir = scratch("unfit");
    // λ so small that no character reaches 10 eigenvalues: fit must refuse.
    let cfg = write_config(
        &dir,
        "tiny.toml",
        &SMALL_DISK.replace("min = 1.0e3", "min = 6.0").replace("max = 1.0e5", "max = 30.0"),
    );
    let r = run(&["compare", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(4), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn count_emits_rfc4180_style_csv() {
    let dir = scratch("count");
    let cfg = write_config(&dir, "disk.toml", SMALL_DISK);
    let r = run(&["count", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(dir.join("counts.csv")).unwrap();
    let mut lines = text.split("\r\n");
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(lines.next().unwrap(), "character,lambda,count");
    let first = lines.next().unwrap();
    assert!(first.starts_with("m=0,"), "{first}");
    assert_eq!(first.split(',').count(), 3);
    // 2 characters × 12 grid points
    assert_eq!(text.trim_end().split("\r\n").count(), 2 + 24);
}

#[test]
fn compare_on_bundled_disk_config_passes_per_character() {
    let dir = scratch("compare");
    let cfg = configs_dir().join("disk.toml");
    let r = run(&["compare", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(dir.join("compare.json")).unwrap();
    assert_eq!(text.matches("\"pass\":true").count(), 6, "{text}");
    assert!(!text.contains("\"pass\":false"));
    // plot data: two columns, one line per grid point
    let dat = std::fs::read_to_string(dir.join("compare_counts_m0.dat")).unwrap();
    assert_eq!(dat.lines().count(), 48);
    assert!(dat.lines().all(|l| l.split(' ').count() == 2));
    assert!(dir.join("compare_prediction_m5.dat").exists());
}

#[test]
fn identities_report_residuals_within_bounds() {
    let dir = scratch("identities");
    let cfg = write_config(
        &dir,
        "ids.toml",
        r#"
[group]
kind = "planar_so2"
n = 2

[domain]
kind = "disk"
radius = 1.0

[operator]
kind = "euclidean_power"
order = 2

[mc]
samples = 1
seed = 23

[identities]
zero_level_points = 500
fixed_point_pairs = 25
"#,
    );
    let r = run(&["identities", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(dir.join("identities.json")).unwrap();
    for key in [
        "d_det_deviation",
        "projector_completeness",
        "projector_idempotency",
        "projector_orthogonality",
        "roch2",
        "uv",
    ] {
        let tail = &text[text.find(&format!("\"{key}\":")).unwrap() + key.len() + 3..];
        let num: f64 = tail[..tail.find([',', '}']).unwrap()].parse().unwrap();
        assert!(num <= 1e-8, "{key} residual {num}");
    }
}

#[test]
fn oscillatory_emits_convergence_csv() {
    let dir = scratch("osc");
    let cfg = write_config(
        &dir,
        "osc.toml",
        r#"
[group]
kind = "planar_so2"
n = 2

[domain]
kind = "disk"
radius = 1.0

[operator]
kind = "euclidean_power"
order = 2

[oscillatory]
r_x = 0.6
rho1 = 0.25
rho2 = 0.6
mu = [0.8, 0.4]
character = 0
"#,
    );
    let r = run(&["oscillatory", cfg.to_str().unwrap(), "--out-dir", dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(dir.join("oscillatory.csv")).unwrap();
    let lines: Vec<&str> = text.trim_end().split("\r\n").collect();
    assert_eq!(lines[1], "mu,I_real,I_imag,leading,abs_error,empirical_order");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].ends_with(','), "first row has no order: {}", lines[2]);
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(last.len(), 6);
    assert!(last[5].parse::<f64>().is_ok());
}
