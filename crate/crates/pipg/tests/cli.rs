//! End-to-end checks of the binary: exit codes, witnesses, format
//! round-trips, DOT determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pipg"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).expect("write fixture");
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pipg")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn parse_ok_and_parse_error_exit_codes() {
    let dir = tempfile::tempdir().expect("tmp");
    let good = write(dir.path(), "good.pi", "X := tau.X\n[a] X | a(x).0\n");
    let bad = write(dir.path(), "bad.pi", "[a] a(b\n");
    let out = run(&["parse", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("X := tau.X"));
    let out = run(&["parse", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = run(&["parse", dir.path().join("missing.pi").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fairtest_must_differs_and_fair_agrees() {
    let dir = tempfile::tempdir().expect("tmp");
    let q1 = write(dir.path(), "q1.pi", "X := tau.X\n[a] X | a(x).0\n");
    let q2 = write(dir.path(), "q2.pi", "[a] a(x).0\n");
    let out = run(&[
        "fairtest",
        q1.to_str().unwrap(),
        q2.to_str().unwrap(),
        "--pole",
        "must",
        "--tests",
        "auto:2",
    ]);
    assert_eq!(code(&out), 1, "must-testing separates the divergence pair");
    let text = stdout(&out);
    assert!(text.contains("\"verdict\":\"differ\""));
    assert!(text.contains("\"passes\":\"right\""));

    let out = run(&[
        "fairtest",
        q1.to_str().unwrap(),
        q2.to_str().unwrap(),
        "--pole",
        "fair",
        "--tests",
        "auto:2",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"verdict\":\"same\""));
}

#[test]
fn fairtest_with_explicit_test_file() {
    let dir = tempfile::tempdir().expect("tmp");
    let q1 = write(dir.path(), "q1.pi", "X := tau.X\n[a] X | a(x).0\n");
    let q2 = write(dir.path(), "q2.pi", "[a] a(x).0\n");
    // the distinguished handshake test from the worked example
    let tests = write(dir.path(), "tests.txt", "a<a>.tick.0\n");
    let out = run(&[
        "fairtest",
        q1.to_str().unwrap(),
        q2.to_str().unwrap(),
        "--pole",
        "must",
        "--tests",
        tests.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("a<a>.tick.0"));
}

#[test]
fn bisim_expansion_and_weak_modes() {
    let dir = tempfile::tempdir().expect("tmp");
    let c = write(dir.path(), "c.pi", "[a] a<a>.0; a(x).tick.0\n");
    let out = run(&[
        "bisim",
        c.to_str().unwrap(),
        "--expansion",
        "--against",
        "auto",
        "--depth",
        "6",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("expansion-holds"));

    let x = write(dir.path(), "x.pi", "[a] tau.tick.0\n");
    let y = write(dir.path(), "y.pi", "[a] tick.0\n");
    let out = run(&["bisim", x.to_str().unwrap(), y.to_str().unwrap(), "--mode", "weak"]);
    assert_eq!(code(&out), 0);
    let out = run(&["bisim", x.to_str().unwrap(), y.to_str().unwrap(), "--mode", "strong"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bbot_reports_json_on_all_ltss() {
    let dir = tempfile::tempdir().expect("tmp");
    let c = write(dir.path(), "c.pi", "[a] tick.0\n");
    for lts in ["conf", "m", "s"] {
        let out = run(&["bbot", c.to_str().unwrap(), "--pole", "fair", "--lts", lts]);
        assert_eq!(code(&out), 0, "lts {lts}");
        let text = stdout(&out);
        let v: serde_json::Value = serde_json::from_str(text.trim()).expect("json report");
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["complete"], true);
        assert!(v["states"].as_u64().expect("states") >= 2);
    }
    let dead = write(dir.path(), "dead.pi", "[a] a(x).0\n");
    let out = run(&["bbot", dead.to_str().unwrap(), "--pole", "fair"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn step_lists_transitions() {
    let dir = tempfile::tempdir().expect("tmp");
    let c = write(dir.path(), "c.pi", "[a] a<a>.0 | a(x).0\n");
    let out = run(&["step", c.to_str().unwrap(), "--lts", "conf", "-n", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("state 0:"));
    assert!(text.contains("--tau-->"));
    let out = run(&["step", c.to_str().unwrap(), "--lts", "m", "-n", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn translate_then_zeta_round_trip() {
    let dir = tempfile::tempdir().expect("tmp");
    let c = write(dir.path(), "c.pi", "[a] a(x).x<x>.0 + tau.0\n");
    let bsys = dir.path().join("c.bsys");
    let out = run(&["translate", c.to_str().unwrap(), "-o", bsys.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&bsys).expect("bsys written");
    assert!(text.contains("STATE"));
    assert!(text.contains("ROW iota1.0 ->"));

    // behaviour-system files round-trip bit-exactly
    let body: String =
        text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let (sys, _) = pipg::format::parse_behaviour_system(&body).expect("parse bsys");
    assert_eq!(pipg::format::print_behaviour_system(&sys), body);

    let out = run(&["zeta", bsys.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("c0(")); // the input guard survives

    let out = run(&["zeta", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("tau.0"));
}

fn fork_cospan_file(dir: &Path) -> PathBuf {
    use pipg_core::presheaf::{ElemId, PositionBuilder};
    use pipg_core::presheaf::ObjC as ObjCAlias;
    use pipg_core::trace::{action_at, AgentRef};
    // a binary agent next to a passive one
    let mut b = PositionBuilder::new();
    b.agent(2, ElemId(0), &[ElemId(0), ElemId(1)]);
    b.agent(1, ElemId(1), &[ElemId(1)]);
    let pos = b.build();
    let fork = action_at(&pos, ObjCAlias::Fork(2), AgentRef { arity: 2, id: ElemId(0) })
        .expect("fork");
    write(dir, "fork.cospan", &pipg::format::print_cospan(&fork.cospan))
}

#[test]
fn trace_subcommands_and_formats() {
    let dir = tempfile::tempdir().expect("tmp");
    let f = fork_cospan_file(dir.path());

    // bit-exact round trip of the cospan format
    let text = std::fs::read_to_string(&f).expect("cospan");
    let parsed = pipg::format::parse_cospan(&text).expect("parse cospan");
    assert_eq!(pipg::format::print_cospan(&parsed), text);

    let out = run(&["trace", "check", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Ok length=1"));

    let out = run(&["trace", "seq", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("fork2"));

    let out = run(&["trace", "views", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let views = stdout(&out);
    assert!(views.contains("pil2") && views.contains("pir2"));

    // compose the fork with a tick by the left child
    let parsed = pipg::format::parse_cospan(&text).expect("parse");
    let tick = pipg_core::trace::closed_world_actions_from(&parsed.final_)
        .into_iter()
        .find(|a| matches!(a.label, pipg_core::presheaf::ObjC::Tick(2)))
        .expect("tick");
    let g = write(dir.path(), "tick.cospan", &pipg::format::print_cospan(&tick.cospan));
    let o = dir.path().join("both.cospan");
    let out = run(&[
        "trace",
        "compose",
        f.to_str().unwrap(),
        g.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["trace", "check", o.to_str().unwrap()]);
    assert!(stdout(&out).contains("Ok length=2"));

    // a corrupted final boundary is a violation, exit 1
    let mut broken = pipg::format::parse_cospan(&text).expect("parse");
    let (n, id) = broken.final_.agents()[0];
    broken.final_.remove_elem(pipg_core::presheaf::ObjC::Agent(n), id);
    let b = write(dir.path(), "broken.cospan", &pipg::format::print_cospan(&broken));
    let out = run(&["trace", "check", b.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("condition (iii)"));
}

#[test]
fn dot_output_is_deterministic() {
    let dir = tempfile::tempdir().expect("tmp");
    let f = fork_cospan_file(dir.path());
    let a = run(&["dot", "causal", f.to_str().unwrap()]);
    let b = run(&["dot", "causal", f.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("shape=diamond"));
    let c = run(&["dot", "diagram", f.to_str().unwrap()]);
    assert_eq!(code(&c), 0);
    assert!(stdout(&c).contains("rank=same"));
}
