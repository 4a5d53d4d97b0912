use std::fs;

use igc::cli::run;

fn igc(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("igc").chain(args.iter().copied()).map(String::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn compiled_file_reproduces_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coin.graphing");
    let p = path.to_str().unwrap();
    let (code, out, _) = igc(&["compile", "corpus:coin", "-o", p]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = igc(&["accept", p, "01"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("path-sum 1/2 "), "{out}");

    let (code, _, _) = igc(&["equiv", p, p]);
    assert_eq!(code, 0);
    let other = dir.path().join("even.graphing");
    igc(&["compile", "corpus:even_ones", "-o", other.to_str().unwrap()]);
    let (code, out, _) = igc(&["equiv", p, other.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (1, "not equivalent\n"));
}

#[test]
fn accept_against_corpus() {
    let (code, out, _) = igc(&["accept", "corpus:dyck", "0101"]);
    assert_eq!(code, 0);
    assert!(out.contains("agree true"));
}

#[test]
fn membership_table() {
    let (code, out, _) = igc(&["membership", "corpus:even_ones", "--words", "0,1,11", "--reps", "2"]);
    assert_eq!(code, 0, "{out}");
    let member: Vec<(&str, &str)> = out
        .lines()
        .skip(1)
        .filter_map(|l| {
            let cols: Vec<&str> = l.split_whitespace().collect();
            (cols.len() == 5).then(|| (cols[0], cols[1]))
        })
        .collect();
    assert_eq!(member, [("0", "true"), ("1", "false"), ("11", "true")], "{out}");
}

#[test]
fn properties_dump_counterexamples_dir_untouched_on_pass() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("cex");
    let (code, out, _) = igc(&["properties", "det-closure", "--count", "5", "--dump-dir", dump.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS"));
    assert!(!dump.exists() || fs::read_dir(&dump).unwrap().next().is_none());
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(igc(&["accept", "corpus:nope", "0"]).0, 2);
    assert_eq!(igc(&["accept", "corpus:coin", "0a"]).0, 2);
    assert_eq!(igc(&["accept", "corpus:coin", "0", "--stack-depth", "0"]).0, 2);
    assert_eq!(igc(&["bogus"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.aut");
    fs::write(&bad, "heads 0\n").unwrap();
    assert_eq!(igc(&["compile", bad.to_str().unwrap()]).0, 2);
}
