use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpke-lab")).args(args).env_remove("QPKE_QMAX").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lambda_zero_is_a_configuration_error() {
    let o = lab(&["game", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("λ out of range"), "{}", stderr(&o));
}

#[test]
fn capacity_errors_exit_two() {
    let o = lab(&["correctness", "--scheme", "owf", "--lambda", "11", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stderr(&o).contains("capacity"), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_qpke-lab"))
        .args(["game", "--lambda", "5", "--trials", "100"])
        .env("QPKE_QMAX", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn argument_errors_exit_two() {
    assert_eq!(lab(&["bogus"]).status.code(), Some(2));
    assert_eq!(lab(&["game", "--trials", "10"]).status.code(), Some(2));
    assert_eq!(lab(&["game", "--adversary", "nobody", "--trials", "100"]).status.code(), Some(2));
}

#[test]
fn help_lists_the_flags() {
    let o = lab(&["game", "--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for flag in [
        "--scheme", "--lambda", "--n", "--m", "--tag-width", "--instantiation", "--ske", "--mutation", "--game",
        "--adversary", "--confidence", "--budget", "--trials", "--seed", "--format", "--out", "--qmax", "QPKE_QMAX",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
}

#[test]
fn text_report_layout() {
    let o = lab(&["game", "--lambda", "3", "--trials", "200", "--format", "text"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# qpke-lab game report v1");
    assert!(lines.iter().any(|l| l.starts_with("record game=cpa scheme=owf lambda=3 ")));
    assert_eq!(*lines.last().unwrap(), "status=pass");
}

#[test]
fn csv_report_layout() {
    let o = lab(&["game", "--lambda", "3", "--trials", "200", "--format", "csv"]);
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        body[0],
        "game,scheme,lambda,mutation,adversary,trials,seed,confidence,wins,invalid,win_rate,ci_low,ci_high,advantage"
    );
    assert_eq!(body.len(), 2);
    assert_eq!(body[1].split(',').count(), 14);
    assert!(text.contains("# status=pass"));
}

#[test]
fn out_file_matches_stdout_and_seeds_reproduce() {
    let dir = std::env::temp_dir().join(format!("qpke-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.csv");
    let args = ["game", "--scheme", "prfs", "--lambda", "3", "--trials", "300", "--seed", "7", "--format", "csv"];
    let printed = lab(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = lab(&with_out);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), printed);
    let mut other = args.to_vec();
    other[8] = "8";
    assert_ne!(lab(&other).stdout, printed);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analyses_pass() {
    for args in [
        vec!["analyze", "punctured", "--lambda", "3"],
        vec!["analyze", "commuting", "--lambda", "2"],
        vec!["analyze", "random-key", "--queries", "1"],
        vec!["analyze", "helstrom", "--lambda", "2"],
    ] {
        let o = lab(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
}
