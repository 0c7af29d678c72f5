use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn causanet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causanet"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.causanet",
        "net n\n  place p\n  trans t in ghost\nend\n",
    );
    let bad_tt = write(dir.path(), "bad.tt", "A B\n7\n");
    let sync = scenario("sync_choice.causanet");
    let graph = scenario("graph.causanet");
    let feedback = scenario("feedback.causanet");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["validate", &sync], 0),
        (vec!["validate", &broken], 2),
        (vec!["validate", "missing.causanet"], 2),
        (vec!["simulate", "missing.causanet"], 2),
        (vec!["simulate", &broken], 2),
        (vec!["simulate", &sync, "--net", "nope"], 3),
        (vec!["simulate", &graph], 3),
        (vec!["simulate", &sync], 0),
        (vec!["reach", &sync], 0),
        (vec!["reach", &sync, "--net", "nope"], 3),
        (vec!["puzzle", "trumping"], 0),
        (vec!["puzzle", "no_such_puzzle"], 3),
        (vec!["puzzle", "--list"], 0),
        (vec!["minimize", &bad_tt], 2),
        (vec!["chain", &graph, "--path", "X,Y,Z"], 0),
        (vec!["chain", &graph, "--path", "X,Q"], 3),
        (vec!["chain", &sync, "--path", "X,Y"], 3),
        (vec!["fcm", &feedback, "--map", "positive_loop"], 0),
        (vec!["fcm", &feedback, "--map", "nope"], 3),
        (vec!["export-dot", &sync], 0),
        (vec!["export-dot", &sync, "--reach"], 0),
        (vec!["export-dot", &sync, "--name", "nope"], 3),
    ];
    for (args, code) in cases {
        let o = causanet(&args);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{args:?}\nstdout: {}\nstderr: {}",
            stdout(&o),
            String::from_utf8_lossy(&o.stderr)
        );
        if code != 0 {
            assert!(!o.stderr.is_empty(), "{args:?} should explain itself on stderr");
        }
    }
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.causanet",
        "net n\n  place p\n  trans t in ghost\nend\n",
    );
    let o = causanet(&["validate", &broken]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken.causanet:3:14: dangling reference"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn trumping_summary() {
    let o = causanet(&[
        "simulate",
        &scenario("trumping.causanet"),
        "--runs",
        "1000",
        "--seed",
        "7",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.contains("transition merlin_casts: fired in 1000/1000 runs, frequency 1.000"),
        "{out}"
    );
    assert!(
        out.contains("transition morgana_casts: fired in 0/1000 runs, frequency 0.000"),
        "{out}"
    );
}

#[test]
fn job_market_trace_reaches_the_rehired_marking() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("job.trace");
    let o = causanet(&[
        "simulate",
        &scenario("job_market.causanet"),
        "--horizon",
        "10",
        "--seed",
        "1",
        "--trace-out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let trace = std::fs::read_to_string(&out).unwrap();
    assert!(trace.lines().next().unwrap().contains("causanet-trace/1"));
    assert!(trace.contains("[2,1,0,1]"), "{trace}");
    assert!(stdout(&o).contains("(2,0,1,0) -> (2,1,0,1)"));
}

#[test]
fn several_runs_write_a_trace_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traces");
    let o = causanet(&[
        "simulate",
        &scenario("fizzling.causanet"),
        "--runs",
        "3",
        "--seed",
        "5",
        "--trace-out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec!["fizzling-seed5.trace", "fizzling-seed6.trace", "fizzling-seed7.trace"]
    );
}

#[test]
fn minimize_and_chain_print_values() {
    let o = causanet(&["minimize", &scenario("surgery.tt")]);
    assert_eq!(stdout(&o).trim(), "A&B | A&C | A&D | B&C&D");
    let o = causanet(&["chain", &scenario("graph.causanet"), "--path", "X,Y,Z"]);
    assert_eq!(stdout(&o).trim(), "0.2");
    let a = causanet(&[
        "chain",
        &scenario("graph.causanet"),
        "--path",
        "X,Y,Z",
        "--mode",
        "sampled",
        "--seed",
        "9",
    ]);
    let b = causanet(&[
        "chain",
        &scenario("graph.causanet"),
        "--path",
        "X,Y,Z",
        "--mode",
        "sampled",
        "--seed",
        "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let p: f64 = stdout(&a).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn step_session() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_causanet"))
        .args(["step", &scenario("sync_choice.causanet")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"fire t2\nfire t1\nundo\nquit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("refused") && out.contains("`p3`"), "{out}");
    let markings: Vec<&str> = out.lines().filter(|l| l.starts_with("marking")).collect();
    assert_eq!(
        markings,
        vec!["marking (2,2,0,0,0)", "marking (0,1,1,0,0)", "marking (2,2,0,0,0)"]
    );
}

#[test]
fn puzzle_all_passes() {
    let o = causanet(&["puzzle", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
    assert!(out.contains("PASS fizzling"));
}
