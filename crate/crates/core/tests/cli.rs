use std::process::{Command, Output};

fn permlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tv_table_csv_columns() {
    let o = permlab(&["tv-table", "--gamma", "1", "--n", "200:800:2", "--b-rule", "floor(n^(1/4))", "--deterministic"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "schema_version,gamma,n,b,d_b_n,bound_thm11,p_T0n_eq_n");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[3]).collect::<Vec<_>>(), ["3", "4", "5"]);
}

#[test]
fn timestamp_only_without_deterministic() {
    let args = ["hn-check", "--gamma", "0.5", "--n", "100"];
    let o = permlab(&args);
    assert!(stdout(&o).starts_with("# generated_at_unix="));
    let o = permlab(&[&args[..], &["--deterministic"]].concat());
    assert!(stdout(&o).starts_with("schema_version,"));
    let o = permlab(&[&args[..], &["--format", "json"]].concat());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["generated_at_unix"].is_u64());
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        r#"{"kind": "sample", "gamma": 0.5, "n": 50, "samples": 40, "seed": 3, "deterministic": true}"#,
    )
    .unwrap();
    let o = permlab(&["--config", cfg.to_str().unwrap(), "--samples", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "schema_version,seed,stream,index,cycle_type,log_order,log_y");
    assert_eq!(lines.count(), 7);
}

#[test]
fn constants_json_object() {
    let o = permlab(&["constants", "--gamma", "0.5", "--n", "100000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 100000);
    assert!(v["tildeH"].is_f64());
}

#[test]
fn config_errors_exit_2() {
    let cases: [&[&str]; 7] = [
        &["sample", "--gamma", "0.5", "--n", "10"],
        &["tv-table", "--gamma", "-1", "--n", "10", "--b", "2"],
        &["tv-table", "--gamma", "1", "--n", "10:5:2", "--b", "2"],
        &["tv-table", "--gamma", "1", "--n", "10", "--b", "2", "--b-rule", "n^0.5"],
        &["clt-order", "--gamma", "1.5", "--n", "100", "--samples", "1000", "--seed", "1"],
        &["frobnicate", "--n", "10"],
        &["tv-table", "--gamma", "1", "--n", "6000", "--b", "2"],
    ];
    for args in cases {
        let o = permlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn help_succeeds() {
    assert!(permlab(&["--help"]).status.success());
}
