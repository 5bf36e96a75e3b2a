use std::process::{Command, Output};

fn maxbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxbandit"))
        .args(args)
        .env("MAXBANDIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn fixtures_lists_names() {
    let out = maxbandit(&["fixtures"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "fig1"));
    let one = stdout_json(&maxbandit(&["fixtures", "--fixture", "equal-deterministic:3"]));
    assert_eq!(one["arms"].as_array().unwrap().len(), 3);
}

#[test]
fn bounds_reports_itemized_terms() {
    let v = stdout_json(&maxbandit(&["bounds", "--fixture", "two-arm-gap:0.2", "--T", "500"]));
    let report = &v["report"];
    assert_eq!(report["tau"], 40);
    assert_eq!(report["T"], 500);
    let terms = report["upper_terms"].as_object().unwrap();
    let sum: f64 = terms.values().map(|x| x.as_f64().unwrap()).sum();
    assert!((sum - report["upper_bound"].as_f64().unwrap()).abs() < 1e-9);
    assert!(report["lower_bound_coeff"].as_f64().unwrap() > 0.0);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["bounds", "--fixture", "nope", "--T", "5"][..],
        &["simulate", "--fixture", "fig1", "--T", "1"],
        &["gen-instances", "--K", "3", "--alpha", "0.5"],
        &["sweep", "--K", "2", "--T", "50", "--alpha", "0.7", "--out", "/nonexistent/never-written"],
    ] {
        let out = maxbandit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "validation");
    }
}

#[test]
fn unreadable_instance_is_a_runtime_error() {
    let out = maxbandit(&["bounds", "--instance", "/nonexistent/instance.json", "--T", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_on_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(
        &path,
        r#"{"arms":[{"kind":"bernoulli","p":0.3},{"kind":"deterministic","v":0.6}]}"#,
    )
    .unwrap();
    let traces = dir.path().join("traces.json");
    let v = stdout_json(&maxbandit(&[
        "simulate",
        "--instance",
        path.to_str().unwrap(),
        "--T",
        "120",
        "--runs",
        "50",
        "--policies",
        "oracle:1,ucb1",
        "--traces",
        traces.to_str().unwrap(),
    ]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["policy"], "oracle:1");
    // a deterministic best arm makes the oracle exact
    assert!(rows[0]["estimate"]["mean_regret"].as_f64().unwrap().abs() < 1e-9);
    let traces: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(traces).unwrap()).unwrap();
    assert_eq!(traces[1]["episode"]["trace"].as_array().unwrap().len(), 120);
}

#[test]
fn sweep_writes_outputs_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &config,
        format!(
            "K = [2, 3]\nT = [60]\nalpha = [0.0]\npolicies = [\"etc\", \"ada-etc\"]\ninstances = 3\nruns = 4\nseed = 9\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let status = maxbandit(&["sweep", "--config", config.to_str().unwrap(), "--K", "2", "--svg"]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "K,T,alpha,policy,mean_regret,stderr,n_instances,n_runs,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,60,0,ada-etc,"));
    assert!(lines[2].starts_with("2,60,0,etc,"));
    assert!(out.join("sweep.meta.json").exists());
    let plots: Vec<_> = std::fs::read_dir(out.join("plots")).unwrap().collect();
    assert!(!plots.is_empty());
}

#[test]
fn gen_instances_is_reproducible() {
    let a = stdout_json(&maxbandit(&["gen-instances", "--K", "4", "--alpha", "0.2", "--instances", "5", "--seed", "3"]));
    let b = stdout_json(&maxbandit(&["gen-instances", "--K", "4", "--alpha", "0.2", "--instances", "5", "--seed", "3"]));
    assert_eq!(a, b);
    for inst in a.as_array().unwrap() {
        for arm in inst["arms"].as_array().unwrap() {
            let p = arm["p"].as_f64().unwrap();
            assert!((0.2..=0.8).contains(&p));
        }
    }
}
