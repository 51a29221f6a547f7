use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumlevel")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn measure_golden_values() {
    let o = run(&["measure", "--from", "1", "--to", "4", "--method", "exact"]);
    assert!(o.status.success());
    let exact: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_owned())
        .collect();
    assert_eq!(exact, ["1/2", "1/3", "3/10", "39/140"]);
}

#[test]
fn json_rows_mirror_csv_columns() {
    let o = run(&["--format", "json", "pressure", "--n", "4", "--t", "0"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = v[0].as_object().unwrap();
    let keys: Vec<&str> = row.keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 5);
    for k in ["n", "t", "family", "log_sum", "estimate"] {
        assert!(row.contains_key(k));
    }
    assert_eq!(row["estimate"].as_f64().unwrap(), std::f64::consts::LN_2);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["measure", "--n", "26", "--method", "exact"]).status.code(), Some(3));
    assert_eq!(run(&["measure", "--n", "26", "--method", "exact", "--exact-guard", "26"]).status.code(), Some(0));
    assert_eq!(run(&["measure", "--n", "x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["codes", "--cylinder", "[[0]]"]).status.code(), Some(1));
    let o = run(&["dioph", "--seed", "3", "--event", "c:0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn operator_checkpoint_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("run.ckpt");
    let path = ckpt.to_str().unwrap();
    let args = ["measure", "--n", "300", "--method", "operator", "--checkpoint", path, "--checkpoint-every", "50"];
    let first = run(&args);
    assert!(first.status.success());
    assert!(ckpt.exists());
    let again = run(&args);
    assert!(again.status.success());
    assert_eq!(stdout(&first), stdout(&again));

    let env_dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sumlevel"))
        .args(["measure", "--n", "40", "--engine", "grid", "--grid", "1024"])
        .env("SUMLEVEL_CHECKPOINT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.path().join("grid-1024.ckpt").exists());

    std::fs::write(&ckpt, b"not a checkpoint").unwrap();
    assert_eq!(run(&args).status.code(), Some(4));
}

#[test]
fn listings_and_codes() {
    let o = run(&["enumerate", "--n", "3", "--coding", "sb"]);
    let codes: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(2).unwrap().to_owned()).collect();
    assert_eq!(codes.len(), 4);
    let o = run(&["codes", "--code", "LLR"]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "LLR,farey,1/4,1/3,1/12,[[3]]");
}

#[test]
fn dioph_is_deterministic() {
    let args = ["dioph", "--seed", "7", "--samples", "20", "--n", "5,10"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&run(&args)));
    assert!(stdout(&a).starts_with("sample_id,n,khintchine,algebraic,theta,ratio\n"));
    assert_eq!(stdout(&a).lines().count(), 41);
    let mc = run(&["dioph", "--seed", "7", "--samples", "2000", "--event", "e:5:0.5"]);
    assert!(mc.status.success());
    assert!(stdout(&mc).lines().nth(1).unwrap().ends_with(",true"));
}
