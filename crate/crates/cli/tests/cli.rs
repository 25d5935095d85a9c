//! End-to-end tests of the qres binary: exit codes, schema stability, and
//! byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qres"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qres-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn check_config_accepts_all_shipped_examples() {
    for name in [
        "resonance.toml",
        "fig_detuned.toml",
        "overdamped.toml",
        "underdamped.toml",
        "rabi_qubit.toml",
        "hypothesis.toml",
    ] {
        let status = bin()
            .args(["check-config", "--config"])
            .arg(repo_config(name))
            .status()
            .unwrap();
        assert!(status.success(), "{name} rejected");
    }
}

#[test]
fn unknown_keys_exit_with_config_code() {
    let dir = tmp_dir("badcfg");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "[model]\nkind = \"dimer\"\ncoupling = 1.0\nbogus_key = 3\n\n[map]\nkind = \"site_dephasing\"\n\n[observable]\nkind = \"coeffs\"\nmu_a = 1.0\n",
    )
    .unwrap();
    let output = bin()
        .args(["check-config", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bogus_key"), "diagnostic should name the key: {stderr}");
}

#[test]
fn invalid_physics_exits_with_config_code() {
    let dir = tmp_dir("badphys");
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "[model]\nkind = \"dimer\"\ncoupling = 1.0\ndecay_donor = -2.0\n\n[map]\nkind = \"site_dephasing\"\n\n[observable]\nkind = \"coeffs\"\nmu_a = 1.0\n",
    )
    .unwrap();
    let output = bin()
        .args(["check-config", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_theta_on_custom_model_is_a_regime_mismatch() {
    let out = tmp_dir("regime");
    let output = bin()
        .args(["sweep-theta", "--config"])
        .arg(repo_config("rabi_qubit.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let out1 = tmp_dir("rerun1");
    let out2 = tmp_dir("rerun2");
    for (out, threads) in [(&out1, "1"), (&out2, "4")] {
        let status = bin()
            .env("QRES_THREADS", threads)
            .args(["dynamics", "--config"])
            .arg(repo_config("resonance.toml"))
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out1.join("dynamics.csv")).unwrap();
    let b = std::fs::read(out2.join("dynamics.csv")).unwrap();
    assert_eq!(a, b, "dynamics.csv differs across thread counts");

    // a second run in-place reproduces the same bytes
    let status = bin()
        .args(["dynamics", "--config"])
        .arg(repo_config("resonance.toml"))
        .arg("--out")
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    let c = std::fs::read(out1.join("dynamics.csv")).unwrap();
    assert_eq!(a, c, "rerun changed the output bytes");
}

#[test]
fn sweep_schema_and_quarter_pi_row() {
    let out = tmp_dir("sweep");
    let status = bin()
        .args(["sweep-theta", "--config"])
        .arg(repo_config("resonance.toml"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("sweep_theta.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta,capacity_closed_form,capacity_spectral,abs_diff"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 181);
    // row 45 is θ = π/4 with capacity 1/2 in both columns
    let cells: Vec<&str> = rows[45].split(',').collect();
    let closed: f64 = cells[1].parse().unwrap();
    let spectral: f64 = cells[2].parse().unwrap();
    assert!((closed - 0.5).abs() < 1e-12);
    assert!((spectral - 0.5).abs() < 1e-12);
}

#[test]
fn hypothesis_rows_respect_bound_chain() {
    let out = tmp_dir("hyp");
    let status = bin()
        .args(["hypothesis", "--config"])
        .arg(repo_config("hypothesis.toml"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("hypothesis.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (p_succ, bound, err, slack) = (cells[4], cells[5], cells[6], cells[7]);
        assert!((p_succ - 0.75).abs() < 1e-12);
        assert!(err <= bound + slack);
    }
}

#[test]
fn dynamics_emits_sentinel_for_non_analytic_regime() {
    let out = tmp_dir("detuned");
    let output = bin()
        .args(["dynamics", "--config"])
        .arg(repo_config("fig_detuned.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("warning"), "expected a sentinel warning: {stderr}");
    let text = std::fs::read_to_string(out.join("dynamics.csv")).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.split(',').nth(5).unwrap() == "nan");
}

#[test]
fn verify_exits_zero_on_default_seeds() {
    let output = bin()
        .args(["verify", "--seed", "7", "--samples", "25"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("all 18 suites passed"), "{stdout}");
}

#[test]
fn plots_flag_writes_svg() {
    let out = tmp_dir("plots");
    let status = bin()
        .args(["dynamics", "--config"])
        .arg(repo_config("overdamped.toml"))
        .arg("--out")
        .arg(&out)
        .arg("--plots")
        .status()
        .unwrap();
    assert!(status.success());
    let svg = std::fs::read_to_string(out.join("dynamics.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}
