use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn imp_slice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imp-slice"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_uses_the_sibling_state_file() {
    let o = imp_slice(&["run", path(&corpus("intro.imp"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "x = 1, y = 1, z = 3");
}

#[test]
fn run_json() {
    let o = imp_slice(&[
        "run",
        path(&corpus("intro.imp")),
        "--state",
        "x = 1, y = 1, z = 0",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["output_text"], "x = 1, y = 2, z = 1");
    assert_eq!(v["trace_stats"]["branch_decisions"], serde_json::json!([true]));
}

#[test]
fn backward_slice() {
    let o = imp_slice(&["bwd", path(&corpus("intro.imp")), "--criterion", "x = _, y = 1, z = _"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "program: if (y = 1) then { _ } else { y := y + 1 } ; _\ninput:   x = _, y = 0, z = _\n"
    );
}

#[test]
fn division_slice() {
    let o = imp_slice(&[
        "bwd",
        path(&corpus("division.imp")),
        "--criterion",
        "q = _, r = _, res = 1, a = _, b = _",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["program_slice_text"],
        "r := a ; while (b <= r) do { _ ; r := r - b } ; if (!(r = 0)) then { _ } else { res := 1 }"
    );
    assert_eq!(v["input_slice_text"], "q = _, r = _, res = _, a = 4, b = 2");
}

#[test]
fn forward_slice_from_text_or_file() {
    let o = imp_slice(&[
        "fwd",
        path(&corpus("intro.imp")),
        "--partial-program",
        "if (y = 1) then { _ } else { y := y + 1 } ; _",
        "--partial-state",
        "x = _, y = 0, z = _",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "x = _, y = 1, z = _");

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("slice.imp");
    std::fs::write(&p, "_").unwrap();
    let o = imp_slice(&[
        "fwd",
        path(&corpus("intro.imp")),
        "--partial-program",
        path(&p),
        "--partial-state",
        "x = 1, y = 0, z = 2",
    ]);
    assert_eq!(stdout(&o).trim(), "x = 1, y = _, z = _");
}

#[test]
fn trace_listing() {
    let o = imp_slice(&["trace", path(&corpus("division.imp"))]);
    assert_eq!(o.status.code(), Some(0));
    let listing = stdout(&o);
    assert!(listing.starts_with("r := a(4);"), "{listing}");
    assert_eq!(listing.matches("while_true").count(), 2);
    assert!(listing.contains("while_false (b(2) <= r(0))"));
}

#[test]
fn check_single_program() {
    let o = imp_slice(&["check", path(&corpus("intro.imp")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["sizes"]["program"], 1087);
}

#[test]
fn check_directory() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["intro", "swap", "skip"] {
        for ext in ["imp", "state"] {
            std::fs::copy(
                corpus(&format!("{name}.{ext}")),
                dir.path().join(format!("{name}.{ext}")),
            )
            .unwrap();
        }
    }
    let o = imp_slice(&["check", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("3/3 programs certified"), "{out}");
    assert_eq!(out.matches("all laws hold").count(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let bad = write("bad.imp", "x := (");
    let o = imp_slice(&["run", &bad, "--state", "x = 1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.imp:1:"), "{}", stderr(&o));

    let unbound = write("unbound.imp", "x := y");
    assert_eq!(imp_slice(&["run", &unbound, "--state", "x = 1"]).status.code(), Some(2));

    let forever = write("forever.imp", "while (0 = 0) do { skip }");
    let o = imp_slice(&[
        "run", &forever, "--state", "x = 1", "--fuel", "1000", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "fuel_exhausted");

    let intro = corpus("intro.imp");
    assert_eq!(
        imp_slice(&["bwd", path(&intro), "--criterion", "x = _, y = 7, z = _"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        imp_slice(&["check", path(&intro), "--bound", "100"]).status.code(),
        Some(5)
    );
    assert_eq!(imp_slice(&["run", path(&intro), "--fuel", "0"]).status.code(), Some(1));
    assert_eq!(imp_slice(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(imp_slice(&["run", "/nonexistent.imp"]).status.code(), Some(1));
}

#[test]
fn long_loops_do_not_overflow_the_stack() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("count.imp");
    std::fs::write(&p, "while (1 <= n) do { n := n - 1 ; s := s + 2 }").unwrap();
    let o = imp_slice(&[
        "bwd",
        path(&p),
        "--state",
        "n = 30000, s = 0",
        "--fuel",
        "1000000",
        "--criterion",
        "n = _, s = 60000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("input:   n = 30000, s = 0"), "{}", stdout(&o));
}
