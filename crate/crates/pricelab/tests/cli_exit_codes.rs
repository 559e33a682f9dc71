//! Exit-code contract of the binary: 0 success, 2 config/usage errors,
//! 3 agent failures, 4 non-convergence in strict mode.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pricelab"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn solve_succeeds_with_zero() {
    let out = bin().args(["solve", "--n", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("competitive price"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, "name = \"x\"\nseed = 1\nnot_a_key = true\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_error_exits_two() {
    let out = bin().args(["run"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn agent_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fail.toml");
    write(
        &cfg,
        r#"
name = "fail"
seed = 1
max_periods = 10

[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2

[benchmarks]
p_competitive = 1.4729266441
p_monopoly = 1.9249809191

[[agents]]
kind = "scripted"
prices = [1.5]
hold_last = false

[[agents]]
kind = "constant"
price = 1.5
"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn strict_convergence_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nc.toml");
    write(
        &cfg,
        r#"
name = "never-converges"
seed = 1
max_periods = 150

[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2

[benchmarks]
p_competitive = 1.4729266441
p_monopoly = 1.9249809191

[[agents]]
kind = "constant"
price = 1.0

[[agents]]
kind = "constant"
price = 1.2
"#,
    );
    let out_dir = dir.path().join("out");
    let strict = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .arg("--require-convergence")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(4), "{}", String::from_utf8_lossy(&strict.stderr));

    // Without the flag the same condition is an ordinary success.
    let lax = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out2"))
        .output()
        .unwrap();
    assert_eq!(lax.status.code(), Some(0));
}

#[test]
fn missing_api_key_fails_before_any_period() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("keyed.toml");
    write(
        &cfg,
        r#"
name = "keyed"
seed = 1
max_periods = 10

[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 1

[benchmarks]
p_competitive = 1.4729266441
p_monopoly = 1.9249809191

[[agents]]
kind = "llm"
delta = 0.95
[agents.backend]
kind = "http"
endpoint = "http://localhost:9/v1/chat/completions"
model_name = "m"
api_key_env = "PRICELAB_KEY_THAT_IS_NOT_SET_ANYWHERE"
"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    // Startup config error, not an agent failure: no period ever executes.
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PRICELAB_KEY_THAT_IS_NOT_SET_ANYWHERE"), "{stderr}");
    assert!(!out_dir.join("run_00").exists(), "no run directory may be created");
}

#[test]
fn theory_rejects_out_of_range_target() {
    let out = bin().args(["theory", "--p-c", "9.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["theory", "--p-c", "2.4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("monotonicity check: OK"));
}

#[test]
fn report_compares_two_conditions() {
    // Build two tiny conditions, then report across them.
    let dir = tempfile::tempdir().unwrap();
    for (name, p1, p2, seed) in [("hi", 1.8, 1.79, 1u64), ("lo", 1.48, 1.47, 2u64)] {
        let cfg = dir.path().join(format!("{name}.toml"));
        write(
            &cfg,
            &format!(
                r#"
name = "{name}"
seed = {seed}
max_periods = 120

[market]
a = 2.0
mu = 0.25
a0 = 0.0
c = 1.0
n = 2

[benchmarks]
p_competitive = 1.4729266441
p_monopoly = 1.9249809191

[[agents]]
kind = "constant"
price = {p1}

[[agents]]
kind = "constant"
price = {p2}
"#
            ),
        );
        let status = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .args(["--runs", "3"])
            .arg("--out")
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let out = bin().arg("report").arg(dir.path().join("hi")).arg(dir.path().join("lo")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hi") && text.contains("lo"));
    // Identical runs per condition have zero variance; the report says the
    // test is unavailable rather than inventing a p-value.
    assert!(text.contains("Welch"), "{text}");
}
