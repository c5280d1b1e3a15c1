use std::io::Write;
use std::process::Command;

use rtc::cli::run;

fn corpus(name: &str) -> String {
    format!("{}/corpus/{name}.trs", env!("CARGO_MANIFEST_DIR"))
}

fn rtc(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("rtc").chain(args.iter().copied()).collect();
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verdict_lines_are_stable() {
    let (code, out, _) = rtc(&[&corpus("div")], "");
    assert_eq!((code, out.as_str()), (0, "YES(?,O(n^1))\nmethod: direct\n"));
    let (code, out, _) = rtc(&[&corpus("gcd")], "");
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("YES(?,O(n^2))"));
    let (code, out, _) = rtc(&[&corpus("exp")], "");
    assert_eq!((code, out.as_str()), (1, "MAYBE\n"));
}

#[test]
fn the_binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rtc");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&[&corpus("div")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stdout.starts_with(b"YES(?,O(n^1))\n"));
    assert_eq!(status(&[&corpus("exp")]).status.code(), Some(1));
    assert_eq!(status(&["/nonexistent.trs"]).status.code(), Some(2));
    assert_eq!(status(&[&corpus("div"), "--bogus"]).status.code(), Some(2));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(rtc(&[], "").0, 2);
    assert_eq!(rtc(&[&corpus("div"), "--timeout", "0"], "").0, 2);
    assert_eq!(rtc(&[&corpus("div"), "--dim", "9"], "").0, 2);
    assert_eq!(rtc(&[&corpus("div"), "--strategies", "cycles"], "").0, 2);
    let (code, _, err) = rtc(&["-"], "(VAR x) (RULES f(x) -> ");
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
    let (code, _, err) = rtc(&["-"], "(VAR x y) (RULES f(x) -> y)");
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, out, err) = rtc(&["--help"], "");
    assert_eq!(code, 0);
    assert!(out.contains("--coeff-bound") && err.is_empty());
}

#[test]
fn standard_input_and_mode_override() {
    let text = std::fs::read_to_string(corpus("div")).unwrap();
    let (code, out, _) = rtc(&["-", "--mode", "innermost", "--dump", "widp"], &text);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().skip(2).collect::<Vec<_>>(),
        [
            "5: minus#(x, 0) -> c_1",
            "6: minus#(s(x), s(y)) -> minus#(x, y)",
            "7: quot#(0, s(y)) -> c_2",
            "8: quot#(s(x), s(y)) -> quot#(minus(x, y), s(y))",
        ]
    );
}

#[test]
fn dumps() {
    let (_, out, _) = rtc(&[&corpus("div"), "--strategies", "direct", "--dump", "usable"], "");
    assert!(out.contains("usable rules of WDP:\n1: minus(x, 0) -> x\n2: minus(s(x), s(y)) -> minus(x, y)\n"), "{out}");
    let (_, out, _) = rtc(&[&corpus("div"), "--strategies", "direct", "--dump", "maps"], "");
    assert!(out.contains("innermost usable replacement map:\nminus: {}\nquot: {1}\ns: {1}\n"), "{out}");
    let (_, out, _) = rtc(&[&corpus("gcd"), "--strategies", "direct", "--dump", "graph"], "");
    assert!(out.contains("sources: {13} {15} {17} {18,19,20}\n"), "{out}");
    let (_, out, _) = rtc(&[&corpus("exp"), "--strategies", "direct", "--dump", "dp"], "");
    assert!(out.ends_with("5: exp#(r(x)) -> d#(exp(x))\n6: exp#(r(x)) -> exp#(x)\n7: d#(s(x)) -> d#(x)\n"), "{out}");
    let (_, out, _) = rtc(&[&corpus("div"), "--format", "dot"], "");
    assert!(out.contains("digraph"), "{out}");
}

#[test]
fn oracle_tables_pass_on_certified_systems() {
    for name in ["div", "diff", "gcd", "pairs", "minus_f"] {
        let (code, out, _) = rtc(&[&corpus(name), "--oracle", "8"], "");
        assert_eq!(code, 0, "{name}");
        assert!(out.contains("\nn rc(n)\n"), "{out}");
        let last = out.lines().last().unwrap();
        assert!(last.starts_with("PASS rc(n) <= "), "{name}: {last}");
    }
    let (_, out, _) = rtc(&[&corpus("exp"), "--oracle", "5"], "");
    assert!(out.ends_with("no certified bound to compare\n"), "{out}");
}

#[test]
fn certificates_round_trip_through_files() {
    for format in ["json-certificate", "certificate"] {
        let (code, out, _) = rtc(&[&corpus("gcd"), "--format", format], "");
        assert_eq!(code, 0);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let body = if format == "json-certificate" {
            out.split_once('\n').unwrap().1.to_string()
        } else {
            out.clone()
        };
        file.write_all(body.as_bytes()).unwrap();
        let path = file.path().to_str().unwrap().to_string();
        let (code, checked, _) = rtc(&[&corpus("gcd"), "--check", &path], "");
        assert_eq!((code, checked.as_str()), (0, "YES(?,O(n^2))\ncertificate accepted\n"));
        let (code, checked, _) = rtc(&[&corpus("div"), "--check", &path], "");
        assert_eq!(code, 1);
        assert!(checked.starts_with("MAYBE\ncertificate rejected: fingerprint"), "{checked}");
        let tampered = body.replace("\"degree\": 2", "\"degree\": 1");
        assert_ne!(tampered, body);
        std::fs::write(file.path(), tampered).unwrap();
        let (code, checked, _) = rtc(&[&corpus("gcd"), "--check", &path], "");
        assert_eq!(code, 1, "{checked}");
    }
}

#[test]
fn certificate_text_lists_the_evidence() {
    let (_, out, _) = rtc(&[&corpus("diff"), "--format", "certificate", "--strategies", "wdp"], "");
    assert!(out.starts_with("YES(?,O(n^1))\n"));
    assert!(out.contains("wdp-compatible"), "{out}");
    assert!(out.contains("c_5"), "{out}");
}
