use std::fs;
use std::process::{Command, Output};

fn hypotest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypotest")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_line(out: &Output) -> serde_json::Value {
    let text = stdout(out);
    let line = text.lines().find(|l| l.starts_with('{')).expect("a JSON line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn bound_phase_converse_example() {
    let out =
        hypotest(&["bound", "--pair", "gaussian:2,0.05", "--bound", "phase_converse", "--n", "200", "--c", "0.025"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("phase_converse n=200"), "{text}");
    let json = json_line(&out);
    let value = json["value"].as_f64().unwrap();
    assert!((value - 0.95096).abs() <= 1e-4, "{value}");
    assert!((json["optimizer"].as_f64().unwrap() - 20f64.sqrt()).abs() < 1e-6);
    assert_eq!(json["valid"], true);
}

#[test]
fn bound_with_fixed_parameter() {
    let base = ["bound", "--pair", "gaussian:2,0.05", "--n", "1000000", "--eps", "0.01"];
    let out = hypotest(&[&base[..], &["--bound", "berry_esseen", "--param", "1"]].concat());
    assert!(out.status.success());
    let json = json_line(&out);
    assert!((json["log_value"].as_f64().unwrap() + 1_154.806_594_969_205_3).abs() < 1e-7);
    assert_eq!(json["optimizer"].as_f64().unwrap(), 1.0);

    let out = hypotest(&[&base[..], &["--bound", "fano", "--param", "1"]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_outside_domain_is_flagged() {
    // c below D(P1||P0): the strong converse does not apply.
    let out =
        hypotest(&["bound", "--pair", "gaussian:2,0.05", "--bound", "phase_converse", "--n", "200", "--c", "0.001"]);
    assert!(out.status.success());
    let json = json_line(&out);
    assert_eq!(json["valid"], false);
    assert!(json["value"].is_null());
}

#[test]
fn samplesize_examples() {
    let out =
        hypotest(&["samplesize", "--pair", "gaussian:2,0.05", "--eps", "0.01", "--delta", "0.01", "--lambda", "2"]);
    assert!(out.status.success());
    let json = json_line(&out);
    let n = json["renyi"]["n"].as_f64().unwrap();
    assert!((n - 1834.0).abs() <= 1.0, "{n}");
    assert!((json["renyi"]["raw"].as_f64().unwrap() - 1_834.027_805_712_435).abs() < 1e-6);

    let out = hypotest(&["samplesize", "--pair", "gaussian:2,0.05", "--eps", "0.01", "--delta", "0.001"]);
    let json = json_line(&out);
    assert_eq!(json["pensia"]["n"].as_f64().unwrap(), 4051.0);

    let out = hypotest(&["samplesize", "--pair", "gaussian:2,0.05", "--eps", "0.6", "--delta", "0.01"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("pensia unavailable"));
    assert!(json_line(&out)["pensia"].is_null());
}

#[test]
fn exit_codes() {
    let out = hypotest(&["bound", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = hypotest(&["bound", "--pair", "bernoulli:0.5,x", "--bound", "fano", "--n", "3", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset 14"));

    let out =
        hypotest(&["bound", "--pair", "gaussian:2,0.05", "--bound", "fano", "--n", "3", "--eps", "0.1", "--c", "0.2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = hypotest(&["reproduce", "fig9"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let blocked = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    let csv = blocked.join("out.csv");
    let out = hypotest(&[
        "sweep",
        "--pair",
        "gaussian:2,0.05",
        "--regime",
        "linear",
        "--n",
        "10,20",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    assert!(hypotest(&["--help"]).status.success());
}

#[test]
fn sweep_rejects_infeasible_combinations_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = hypotest(&[
        "sweep",
        "--pair",
        "bernoulli:0.5,0.6",
        "--regime",
        "constant:0.01",
        "--n",
        "10,20",
        "--bounds",
        "fano,smoothing_out",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!csv.exists());
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    let out = hypotest(&[
        "sweep",
        "--pair",
        "gaussian:2,0.1",
        "--regime",
        "exponential:20D",
        "--n-range",
        "50:250:50",
        "--bounds",
        "hellinger,renyi_converse",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--log-y",
        "--title",
        "test",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    // Canonical column order regardless of the order requested.
    assert!(lines[0].starts_with("n,eps,log_eps,renyi_converse,"));
    assert!(lines[0].ends_with("hellinger,hellinger_optimizer,hellinger_valid"));
    let image = fs::read_to_string(&svg).unwrap();
    assert!(image.starts_with("<svg"));
    assert!(image.contains(r#"data-bound="renyi_converse""#));
}

#[test]
fn reproduce_fig2_writes_three_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypotest(&["reproduce", "fig2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let mut names: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "fig2_constant.csv",
            "fig2_constant.svg",
            "fig2_exponential.csv",
            "fig2_exponential.svg",
            "fig2_linear.csv",
            "fig2_linear.svg"
        ]
    );
}

#[test]
fn thread_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hypotest"))
        .args(["reproduce", "fig1", "--out", dir.path().to_str().unwrap()])
        .env("HYPOTEST_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
