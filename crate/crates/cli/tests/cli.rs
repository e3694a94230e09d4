use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ampleforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cf_prints_period() {
    let o = run(&["cf", "19"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "4; 2 1 3 1 2 8\n");
    let o = run(&["cf", "14"]);
    assert_eq!(stdout(&o), "3; 1 2 1 6\n");
}

#[test]
fn pell_and_conjecture() {
    let o = run(&["pell", "2", "--count", "3"]);
    assert_eq!(stdout(&o), "3 2\n17 12\n99 70\n");
    let o = run(&["conjecture", "22"]);
    assert_eq!(stdout(&o), "target 197;42^22\nbound 1/38809\n");
    let o = run(&["conjecture", "12"]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("data error: OutOfConjectureRange"));
}

#[test]
fn prove_writes_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = run(&["prove", "--kind", "nef", "--vector", "10;3^11", "--out", path_arg(&cert)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("outcome proved\n"));
    assert!(text.contains("inner 6;3^4\n"), "{text}");
    let o = run(&["verify", path_arg(&cert)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "verdict valid\nclaim nef 10;3^11\n");
}

#[test]
fn prove_exit_codes() {
    let o = run(&["prove", "--kind", "nef", "--vector", "2;1^5"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("reason self-intersection -1 < 0"));
    let o = run(&["prove", "--kind", "nef", "--vector", "19;6^10", "--depth", "2", "--budget", "500"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("outcome inconclusive"));
}

#[test]
fn parallel_jobs() {
    let o = run(&["--jobs", "2", "prove", "--kind", "nef", "--vector", "170;39^19"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn tampered_certificate_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("n19.json");
    let o = run(&["conjecture", "19", "--prove", "--out", path_arg(&cert)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&cert).unwrap();
    let tampered = text.replacen("\"78;39^4\"", "\"78;39^3,40\"", 1);
    assert_ne!(text, tampered);
    std::fs::write(&cert, tampered).unwrap();
    let o = run(&["verify", path_arg(&cert)]);
    assert_eq!(code(&o), 5);
    let out = stdout(&o);
    assert!(out.starts_with("verdict invalid\npath $."), "{out}");
    assert!(out.contains("\nreason "));
}

#[test]
fn malformed_certificate_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("bad.json");
    std::fs::write(&cert, "{\"ampleforge-cert\": 1, \"root\": {\"node\": \"bogus\"}}").unwrap();
    let o = run(&["verify", path_arg(&cert)]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("data error: schema error at "));
    let o = run(&["verify", path_arg(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 65);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["prove", "--kind", "nef", "--vector", "10;3^"])), 64);
    assert_eq!(code(&run(&["prove", "--kind", "big", "--vector", "10;3"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["family", "--part", "1", "--a", "2"])), 64);
    assert_eq!(code(&run(&["table", "--max-n", "8", "--out", "x.csv"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn reduce_trace() {
    let o = run(&["reduce", "--vector", "197;84^4,42^6"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("start 197;84^4,42^6\nstep 1 reflect 1 2 3 -> "));
    assert!(text.ends_with("final 1;0^10\nstatus ReducedNonNegative\n"), "{text}");
    let o = run(&["reduce", "--vector", "7/2;3/2^2,1/2"]);
    assert!(stdout(&o).starts_with("scale 2\nstart 7;3^2,1\n"));
}

#[test]
fn families_and_nagata() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("f.json");
    let o = run(&["family", "--part", "3", "--a", "2", "--l", "5", "--out", path_arg(&cert)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("claim nef 41;4^105,1\n"));
    assert_eq!(code(&run(&["verify", path_arg(&cert)])), 0);

    let o = run(&["family", "--part", "coef2", "--d", "7"]);
    assert_eq!(stdout(&o), "claim nef 7;2^12\nbound 1/49\nverdict valid\n");
    assert_eq!(code(&run(&["family", "--part", "coef2", "--d", "3"])), 65);
    assert_eq!(code(&run(&["family", "--part", "2", "--a", "2", "--l", "1"])), 65);

    let o = run(&["nagata", "--n1", "16", "--n2", "16", "--d", "17", "--m", "1", "--x", "33/8", "--out", path_arg(&cert)]);
    assert_eq!(code(&o), 4);
    let o = run(&["verify", path_arg(&cert)]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).ends_with("assumption nagata(16)\n"));
    assert_eq!(code(&run(&["verify", "--strict", path_arg(&cert)])), 5);
}

#[test]
fn probe_report() {
    let o = run(&["probe", "--vector", "19;6^10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("verdict none-within-bounds\n"));
    let o = run(&["probe", "--vector", "10;3^11"]);
    assert!(stdout(&o).contains("decomposition outer 10;3^7,6 site 8 inner 6;3^4\n"));
}

#[test]
fn table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let certs = dir.path().join("certs");
    let o = run(&["table", "--max-n", "20", "--out", path_arg(&csv), "--cert-dir", path_arg(&certs)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,xu,family,conjecture,proved,certified_file");
    assert_eq!(lines.len(), 12);
    assert!(lines[3].starts_with("12,1/12,1/49,,1/49,"));
    assert!(lines[10].starts_with("19,1/19,,1/28900,1/28900,"));
    let n19 = certs.join("N19.json");
    assert!(lines[10].ends_with(path_arg(&n19)));
    assert_eq!(code(&run(&["verify", path_arg(&n19)])), 0);
}
