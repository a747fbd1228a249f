use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn fpfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpfix"))
        .args(args)
        .env_remove("FPFIX_MAX_VERTICES")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn rank_of_whole_group() {
    let out = fpfix(&["rank", "-g", &data("z2z2.spec"), "-s", &data("gens_ab.txt")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("kurosh_rank=2 instances=2 free_rank=0"));
}

#[test]
fn normalize_to_identity() {
    let out = fpfix(&["normalize", "-g", &data("z2z2.spec"), "-w", "A[g0] A[g0]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ε\n");
}

#[test]
fn chain_of_kill_b() {
    let out = fpfix(&["chain", "-g", &data("z2z3.spec"), "-e", &data("kill_b.spec")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("levels=2,1,1 stabilized_at=1"));
}

#[test]
fn stable_and_fix() {
    let out = fpfix(&["stable", "--g", &data("z2z3.spec"), "--e", &data("kill_b.spec")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("kurosh_rank=1") && text.contains("onto=true"), "{text}");

    let out = fpfix(&["stable", "-g", &data("z2f2.spec"), "-e", &data("xax.spec"), "--max-k", "5"]);
    assert!(stdout(&out).starts_with("stabilized_at=none"));

    let out = fpfix(&["fix", "-g", &data("z2z2.spec"), "-e", &data("b_to_aba.spec"), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("record=fix\nkurosh_rank=1\n"), "{text}");
    assert!(text.contains("\ngenerator=A[g0]\n"));
}

#[test]
fn printed_words_reparse() {
    let out = fpfix(&["centralizer", "-g", &data("s3z2.spec"), "-w", "B[g0] A[g0 g1] B[g0]", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        if let Some(w) = line.strip_prefix("generator=") {
            let again = fpfix(&["normalize", "-g", &data("s3z2.spec"), "-w", w]);
            assert_eq!(stdout(&again).trim(), w);
        }
    }
}

#[test]
fn text_and_machine_numbers_agree() {
    let args = ["rank", "-g", &data("z2z2.spec"), "-s", &data("gens_a_bab.txt")];
    let text = stdout(&fpfix(&args));
    let machine = stdout(&fpfix(&[&args[..], &["--format", "machine"]].concat()));
    for key in ["kurosh_rank", "instances", "free_rank", "index"] {
        let t = text.split_whitespace().find_map(|f| f.strip_prefix(&format!("{key}="))).unwrap();
        let m = machine.lines().find_map(|f| f.strip_prefix(&format!("{key}="))).unwrap();
        assert_eq!(t, m, "{key}");
    }
    assert!(text.contains("index=2"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let out = fpfix(&["normalize", "-g", &data("z2z2.spec"), "-w", "A[g0] B[h]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 9"));

    let dir = std::env::temp_dir().join(format!("fpfix-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.spec");
    std::fs::write(&bad, "free_rank = 0\n[factor]\nname = A\ndegree = 2\ngenerators = [[1, 0]\n").unwrap();
    let out = fpfix(&["rank", "-g", bad.to_str().unwrap(), "-s", &data("gens_ab.txt")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.spec") && err.contains("line 5"), "{err}");

    let out = fpfix(&["rank", "-g", &data("z2z2.spec"), "-s", "/nonexistent/gens.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cap_override_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_fpfix"))
        .args(["rank", "-g", &data("z2z2.spec"), "-s", &data("gens_a_bab.txt")])
        .env("FPFIX_MAX_VERTICES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_is_deterministic_and_clean() {
    let args = ["verify", "--catalog", "z2z3f1", "--iters", "12", "--seed", "5", "--format", "machine"];
    let a = fpfix(&args);
    let b = fpfix(&[&args[..], &["--serial"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("violations=0\n"));

    let out = fpfix(&["verify", "--catalog", "nope", "--iters", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fpfix(&["verify", "--g", &data("z2z2.spec"), "--iters", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("seed=0 iterations=0"));
}
