//! End-to-end tests of the `sdelab` binary: exit codes, artifact shapes, and
//! reproducibility of the emitted bytes.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sdelab"))
}

static DIR_ID: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let id = DIR_ID.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!("sdelab-test-{}-{tag}-{id}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn pitchfork_args(alpha: &str) -> Vec<String> {
    vec![
        "--set".into(),
        "model.kind=\"Pitchfork\"".into(),
        "--set".into(),
        "model.lambda=1".into(),
        "--set".into(),
        "model.sigma=1".into(),
        "--set".into(),
        format!("model.alpha={alpha}"),
    ]
}

#[test]
fn classify_reports_almost_sure_absorption() {
    let out = bin().arg("classify").args(pitchfork_args("0.6")).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"AlmostSurelyFinite\""), "{text}");
    assert!(text.contains("config_sha256"));
}

#[test]
fn low_alpha_is_a_config_error() {
    let out = bin().arg("classify").args(pitchfork_args("0.4")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("strong-uniqueness threshold"), "{}", stderr(&out));
}

#[test]
fn malformed_config_file_is_a_config_error() {
    let dir = scratch_dir("badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin().arg("classify").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed JSON"), "{}", stderr(&out));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn density_without_integrable_solution_is_refused() {
    let out = bin()
        .arg("density")
        .args(pitchfork_args("2"))
        .args(["--set", "model.lambda=-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("no integrable solution"), "{}", stderr(&out));
}

#[test]
fn density_profile_integrates_to_one() {
    // lambda > 0 with alpha > 1 grants an interior-peaked density on (0, inf).
    let out = bin()
        .arg("density")
        .args(pitchfork_args("1.5"))
        .args(["--set", "density.points=400"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x') && l.contains(','))
        .take_while(|l| !l.starts_with('{'))
        .filter_map(|l| {
            let (a, b) = l.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect();
    assert!(rows.len() >= 100, "parsed {} rows", rows.len());
    // Trapezoid over the emitted window should carry most of the mass.
    let mass: f64 = rows
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    assert!(mass > 0.8 && mass < 1.01, "window mass {mass}");
}

#[test]
fn ldp_reports_the_quadrature_value() {
    let out = bin()
        .arg("ldp")
        .args([
            "--set",
            "ldp.lambda=1",
            "--set",
            "ldp.mu=1",
            "--set",
            "ldp.kappa=2",
            "--set",
            "ldp.alpha=0.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let u0 = doc["payload"]["u0"].as_f64().unwrap();
    assert!((u0 - 2.0 / 3.0).abs() < 1e-12, "u0 = {u0}");
}

#[test]
fn scale_artifacts_have_metadata_headers() {
    let dir = scratch_dir("scale");
    let out = bin()
        .arg("scale")
        .arg("--out")
        .arg(&dir)
        .args([
            "--set",
            "model.kind=\"SaddleNode\"",
            "--set",
            "model.a=1",
            "--set",
            "model.sigma=0.5",
            "--set",
            "model.alpha=0.75",
            "--set",
            "scale.interval={\"lo\":-1,\"hi\":1}",
            "--set",
            "scale.grid={\"from\":-0.5,\"to\":0.5,\"points\":3}",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("scale.csv")).unwrap();
    assert!(csv.starts_with("# command: scale\n# config_sha256: "));
    assert!(csv.contains("\nx,G,p,v\n"));
    assert!(!csv.contains('\r'));
    let boundary = std::fs::read_to_string(dir.join("boundary.json")).unwrap();
    assert!(boundary.contains("\"feller\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn simulate_is_byte_reproducible_across_thread_counts() {
    let run = |threads: &str, tag: &str| {
        let dir = scratch_dir(tag);
        let out = bin()
            .arg("simulate")
            .arg("--out")
            .arg(&dir)
            .args(["--threads", threads, "--seed", "7"])
            .args([
                "--set",
                "model.kind=\"SubcriticalPitchfork\"",
                "--set",
                "model.lambda=-0.5",
                "--set",
                "model.sigma=0.5",
                "--set",
                "model.alpha=0.6",
                "--set",
                "sim.horizon=3",
                "--set",
                "sim.n_particles=400",
                "--set",
                "sim.snapshot_times=[1,2,3]",
                "--set",
                "sim.histogram_range=[0,1.5]",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        let hist = std::fs::read(dir.join("histograms.csv")).unwrap();
        let times = std::fs::read(dir.join("absorption_times.csv")).unwrap();
        let _ = std::fs::remove_dir_all(&dir);
        (hist, times)
    };
    let a = run("1", "t1");
    let b = run("3", "t3");
    assert_eq!(a, b);
}

#[test]
fn missing_command_block_is_a_config_error() {
    let out = bin().arg("scale").args(pitchfork_args("0.75")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing the `scale` block"), "{}", stderr(&out));
}
