use std::process::{Command, Output};

fn tasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tasep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn values(out: &Output, column: &str) -> Vec<f64> {
    let text = stdout(out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|c| *c == column).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn step_at_time_zero_is_certain() {
    let out = tasep(&[
        "exact", "--step", "-N", "3", "-k", "2", "-x", "1", "-t", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "N,k,x,t,value,method\n3,2,1,0.0,1.0,hankel\n");
}

#[test]
fn step_values_do_not_depend_on_block() {
    let out = tasep(&[
        "exact", "--step", "-N", "3", "-k", "1,2,3", "-x", "2", "-t", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out, "value");
    assert_eq!(v.len(), 3);
    assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12), "{v:?}");
}

#[test]
fn explicit_configuration_matches_closed_form() {
    let out = tasep(&["exact", "-Y", "1,3,4", "-k", "1", "-x", "2", "-t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&out, "value")[0];
    assert!((v - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
    assert!(stdout(&out).contains("determinant"));
}

#[test]
fn json_output_parses() {
    let out = tasep(&[
        "exact", "--step", "-N", "2", "-k", "1", "-x", "0..3", "-t", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 4);
    assert_eq!(parsed[0]["x"], 0);
}

#[test]
fn simulation_is_seed_deterministic_across_thread_counts() {
    let args = [
        "simulate", "--step", "-N", "3", "-k", "1", "-x", "1..4", "-t", "1", "-n", "20000",
        "--seed", "11",
    ];
    let a = tasep(&args);
    let mut single = vec!["--threads", "1"];
    single.extend_from_slice(&args);
    let b = tasep(&single);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let other = tasep(&[
        "simulate", "--step", "-N", "3", "-k", "1", "-x", "1..4", "-t", "1", "-n", "20000",
        "--seed", "12",
    ]);
    assert_ne!(stdout(&a), stdout(&other));
}

#[test]
fn oracle_reports_truncation() {
    let out = tasep(&[
        "oracle", "--step", "-N", "2", "-k", "1", "-x", "2", "-t", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(values(&out, "truncation_bound")[0] <= 1e-10);
    let exact = values(
        &tasep(&[
            "exact", "--step", "-N", "2", "-k", "1", "-x", "2", "-t", "1",
        ]),
        "value",
    )[0];
    assert!((values(&out, "value")[0] - exact).abs() <= 1e-10);
}

#[test]
fn default_compare_passes() {
    let out = tasep(&["compare"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "N,k,x,t,exact,oracle,mc_phat,mc_stderr,abs_err,z"
    );
}

#[test]
fn perturbed_compare_fails() {
    let out = tasep(&["compare", "--perturb", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identity_suite() {
    let a = tasep(&["identities", "--seed", "3", "--trials", "20"]);
    assert_eq!(a.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(parsed.as_array().unwrap().iter().all(|r| r["pass"] == true));
    let b = tasep(&["identities", "--seed", "3", "--trials", "20"]);
    assert_eq!(stdout(&a), stdout(&b));
    let strict = tasep(&["identities", "--trials", "20", "--threshold", "1e-16"]);
    assert_eq!(strict.status.code(), Some(1));
    let mutated = tasep(&["identities", "--trials", "20", "--mutate"]);
    assert_eq!(mutated.status.code(), Some(1));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let dest = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "step = true\nparticles = [2]\nk = [1]\nx = [2]\nt = [1.0]\n",
    )
    .unwrap();
    let out = tasep(&[
        "exact",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = std::fs::read_to_string(&dest).unwrap();
    assert!(written.starts_with("N,k,x,t,value,method\n2,1,2,1.0,"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        tasep(&["exact", "--step", "-N", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tasep(&["exact", "--step", "-N", "2", "-k", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tasep(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        tasep(&["exact", "--step", "-N", "2", "-t", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_exits_zero() {
    assert_eq!(tasep(&["--help"]).status.code(), Some(0));
}

#[test]
fn oversized_oracle_is_a_resource_error() {
    let out = tasep(&[
        "oracle", "--step", "-N", "12", "-k", "3", "-x", "1", "-t", "50",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

#[test]
fn golden_outputs() {
    let cases: [(&str, &[&str]); 3] = [
        (
            "exact_step_n2.csv",
            &[
                "exact", "--step", "-N", "2", "-k", "1", "-x", "0..4", "-t", "1",
            ],
        ),
        (
            "exact_explicit.json",
            &[
                "exact", "-Y", "1,3,4", "-k", "1,2", "-x", "1..6", "-t", "0.5", "--format", "json",
            ],
        ),
        (
            "simulate_seed42.csv",
            &[
                "simulate", "--step", "-N", "2", "-k", "1", "-x", "1..3", "-t", "1", "-n", "5000",
                "--seed", "42",
            ],
        ),
    ];
    for (file, args) in cases {
        let out = tasep(args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), golden(file), "{file}");
    }
}
