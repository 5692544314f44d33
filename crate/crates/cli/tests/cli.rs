use std::process::{Command, Output};

fn kat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SIG: [&str; 4] = ["--tests", "a,b", "--letters", "p,q"];

fn check(extra: &[&str], e1: &str, e2: &str) -> Output {
    let mut args = vec!["check"];
    args.extend_from_slice(&SIG);
    args.extend_from_slice(extra);
    args.push(e1);
    args.push(e2);
    kat(&args)
}

#[test]
fn equivalent_expressions_exit_zero() {
    for method in ["brz", "ant", "iy"] {
        for algo in ["naive", "symb", "dsf"] {
            let o = check(&["--method", method, "--algo", algo], "(p + q)*", "p*;(q;p*)*");
            assert_eq!(o.status.code(), Some(0), "{method} {algo}");
            assert_eq!(stdout(&o).trim(), "equivalent");
        }
    }
}

#[test]
fn counter_example_is_printed() {
    let o = check(&[], "a;p", "a;q");
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("not equivalent\n"), "{out}");
    assert!(out.contains("counter-example: [+a"), "{out}");
    assert!(out.contains("accepted by the first expression only"), "{out}");
}

#[test]
fn inclusion_mode() {
    let o = check(&["--mode", "incl"], "(p + p;p;q)*", "(p + p;q)*");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "included");
    let o = check(&["--mode", "incl"], "(p + p;q)*", "(p + p;p;q)*");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("not included\n"));
}

#[test]
fn stats_are_reported() {
    let o = check(&["--stats", "--algo", "symb"], "p*;p*", "p*");
    let out = stdout(&o);
    for key in ["output tests: ", "pairs pushed: ", "nodes visited: ", "states: "] {
        assert!(out.contains(key), "{out}");
    }
}

#[test]
fn errors_exit_two() {
    let o = check(&[], "(p", "p");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    // undeclared letter
    assert_eq!(check(&[], "r", "p").status.code(), Some(2));
    // negating a letter
    assert_eq!(check(&[], "!p", "p").status.code(), Some(2));
    // state cap
    assert_eq!(check(&["--state-cap", "1"], "(p;q)*", "(p;q;p;q)* + p;(q;p)*;q").status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let o = kat(&[
        "bench",
        "--tests",
        "2",
        "--letters",
        "2",
        "--connectives",
        "8",
        "--pairs",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("method,algo,pair_id,verdict,output_tests,pairs_pushed,millis"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5 * 6);
    assert!(rows.iter().all(|r| r.contains(",equivalent,")));
    assert!(stdout(&o).contains("wrote "));
}
