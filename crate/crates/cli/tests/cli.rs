use std::process::{Command, Output};

fn cubelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubelab"))
        .args(args)
        .env_remove("CUBELAB_SEED")
        .output()
        .expect("spawn cubelab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn zero_dimension_is_a_usage_error() {
    assert_eq!(cubelab(&["dual", "--n", "0..2"]).status.code(), Some(1));
    assert_eq!(cubelab(&["dual", "--n", "30"]).status.code(), Some(1));
    assert_eq!(cubelab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cubelab(&["--help"]).status.code(), Some(0));
}

#[test]
fn one_dimension_is_exactly_one() {
    let o = cubelab(&["dual", "--n", "1..1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,value,certified,restarts,seed\n1,1.0000000000000000e0,true,250,42\n");
}

#[test]
fn fair_coin_khintchine_is_one() {
    let o = cubelab(&["khintchine", "--p", "0.5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_owned();
    let q: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((q - 1.0).abs() < 1e-12, "{row}");
}

#[test]
fn certify_emits_json() {
    let o = cubelab(&["certify", "--p", "0.75"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v[0];
    assert!(row["epsilon"].as_f64().unwrap() > 0.0);
    assert!(row["q_upper"].as_f64().unwrap() < 1.0);
    assert_eq!(cubelab(&["certify", "--p", "0.5"]).status.code(), Some(1));
    assert_eq!(cubelab(&["certify", "--p", "1.2"]).status.code(), Some(1));
}

#[test]
fn kernel_json_keeps_exact_fractions() {
    let o = cubelab(&["kernel", "--n", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["m_plus_num"], "3");
    assert_eq!(v[0]["m_plus_den"], "8");
    assert_eq!(v[2]["m_minus_den"], "8");
}

#[test]
fn unknown_series_lists_names() {
    let o = cubelab(&["series", "--name", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("lp-sum") && err.contains("majority-odd"), "{err}");
}

#[test]
fn lp_sum_final_gap() {
    let o = cubelab(&["series", "--name", "lp-sum", "--n-max", "10000"]);
    let last = stdout(&o).lines().last().unwrap().to_owned();
    assert!(last.starts_with("10000,"));
    let gap: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!(gap.abs() < 0.05);
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let a = cubelab(&["dual", "--n", "2..6", "--restarts", "40", "--threads", "1"]);
    let b = cubelab(&["dual", "--n", "2..6", "--restarts", "40", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let k1 = cubelab(&["khintchine", "--p", "0.6,0.8", "--n", "6", "--threads", "3"]);
    let k2 = cubelab(&["khintchine", "--p", "0.6,0.8", "--n", "6"]);
    assert_eq!(k1.stdout, k2.stdout);
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cubelab"))
        .args(["dual", "--n", "2", "--restarts", "5"])
        .env("CUBELAB_SEED", "7")
        .output()
        .unwrap();
    assert!(stdout(&o).ends_with(",7\n"), "{}", stdout(&o));
    let flag = Command::new(env!("CARGO_BIN_EXE_cubelab"))
        .args(["dual", "--n", "2", "--restarts", "5", "--seed", "9"])
        .env("CUBELAB_SEED", "7")
        .output()
        .unwrap();
    assert!(stdout(&flag).ends_with(",9\n"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("cubelab-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("two-value.csv");
    let o = cubelab(&["bellman", "--check", "two-value", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("value,argmax\n1.25331413731550"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bound_margin_is_an_assertion_failure() {
    let o = cubelab(&["bound"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stdout.is_empty());
    assert_eq!(cubelab(&["bound", "--no-certify"]).status.code(), Some(0));
}
