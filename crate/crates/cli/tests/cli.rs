use std::io::Write;
use std::process::{Command, Output, Stdio};

fn parikh(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_parikh"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn membership_exit_codes() {
    let yes = parikh(&["member", "corpus:ex1", "--word", "aabb"], None);
    assert_eq!((code(&yes), stdout(&yes).as_str()), (0, "result: yes\n"));
    let no = parikh(&["member", "corpus:ex1", "--word", "aab"], None);
    assert_eq!(code(&no), 1);
    let eps = parikh(&["member", "corpus:ex1", "--word", ""], None);
    assert_eq!(code(&eps), 0);
}

#[test]
fn reads_documents_from_stdin() {
    let doc = stdout(&parikh(&["corpus", "get", "nonDyck"], None));
    let o = parikh(&["member", "--word", "011"], Some(&doc));
    assert_eq!(code(&o), 0);
    let o = parikh(&["member", "-", "--word", "0011"], Some(&doc));
    assert_eq!(code(&o), 1);
}

#[test]
fn json_documents_are_accepted_and_produced() {
    let json = stdout(&parikh(&["corpus", "get", "ex1", "--json"], None));
    assert!(json.trim_start().starts_with('{'));
    let text = stdout(&parikh(&["corpus", "get", "ex1"], None));
    let back = parikh(&["eps-eliminate"], Some(&json));
    assert_eq!(code(&back), 0);
    let o = parikh(&["member", "--word", "abb", "--json"], Some(&json));
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], "yes");
    assert!(text.starts_with("parikh 1\n"));
}

#[test]
fn epsilon_membership_follows_long_epsilon_loops() {
    // ε is accepted only after three trips round the loop.
    let e = "eps-parikh 1\nalphabet a b\ndim 1\nstates q0 q1\ninitial q0\naccepting q1\n\
             q0 eps 0 -> q1\nq1 eps 1 -> q0\nset constraint 1\n  clause x0 >= 3\nend\n";
    assert_eq!(code(&parikh(&["member", "--word", ""], Some(e))), 0);
}

#[test]
fn input_errors_exit_three_with_location() {
    let bad = "parikh 1\nalphabet a\ndim 1\nstates p\ninitial p\naccepting p\np a 1 2 -> p\nset constraint 1\nend\n";
    let o = parikh(&["member", "--word", "a"], Some(bad));
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("7:1:") && err.contains("p a -> p"), "{err}");
    assert_eq!(code(&parikh(&["member", "corpus:nope", "--word", "a"], None)), 3);
    assert_eq!(code(&parikh(&["member", "corpus:ex1", "--word", "z"], None)), 3);
    assert_eq!(code(&parikh(&["frobnicate"], None)), 3);
    assert_eq!(code(&parikh(&["--help"], None)), 0);
}

#[test]
fn budget_exhaustion_is_unknown() {
    let o = parikh(&["empty", "corpus:D", "--budget-steps", "1"], None);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("result: unknown\n"));
}

#[test]
fn decision_commands() {
    let o = parikh(&["empty", "corpus:E"], None);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("witness: "));
    let o = parikh(&["finite", "corpus:ex1"], None);
    assert_eq!(code(&o), 1);
    let o = parikh(&["comm-member", "corpus:ex1", "--word", "aab"], None);
    assert_eq!(code(&o), 1);
    let o = parikh(&["comm-member", "corpus:ex1", "--word", "bba"], None);
    assert_eq!(code(&o), 0);
    let o = parikh(&["equiv", "corpus:ex1", "corpus:ex1", "--max-len", "6"], None);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "result: yes\nbound: 6\n"));
    let o = parikh(&["equiv", "corpus:ex1", "corpus:nonDyck"], None);
    assert_eq!(code(&o), 3);
}

#[test]
fn constructions_compose_through_pipes() {
    let u = parikh(&["product", "--op", "union", "corpus:ex1", "corpus:E"], None);
    assert_eq!(code(&u), 0);
    let o = parikh(&["member", "--word", "bab"], Some(&stdout(&u)));
    assert_eq!(code(&o), 0);
    let inv = parikh(&["invhom", "corpus:ex1", "--map", "a=ab", "--map", "b=b"], None);
    let o = parikh(&["member", "--word", "ab"], Some(&stdout(&inv)));
    assert_eq!(code(&o), 0);
    let o = parikh(&["member", "--word", "b"], Some(&stdout(&inv)));
    assert_eq!(code(&o), 1);
    let m = parikh(&["pa", "to-rbcm", "corpus:ex1"], None);
    assert!(stdout(&m).starts_with("machine 1\n"));
    let o = parikh(&["rbcm", "run", "--word", "abb"], Some(&stdout(&m)));
    assert_eq!(code(&o), 0);
}

#[test]
fn machine_pipeline() {
    let m = "machine 1\nalphabet a b\ncounters 1\nstates p q\ninitial p\naccepting q\n\
             p > 0 -> p 1 0\np a * -> p 1 1\np b 1 -> p 1 -1\np < 0 -> q 0 0\n";
    assert_eq!(code(&parikh(&["rbcm", "run", "--word", "abab"], Some(m))), 0);
    assert_eq!(code(&parikh(&["rbcm", "run", "--word", "abb"], Some(m))), 1);
    let pa = parikh(&["rbcm", "to-pa"], Some(m));
    assert_eq!(code(&pa), 0, "{}", String::from_utf8_lossy(&pa.stderr));
    assert_eq!(code(&parikh(&["member", "--word", "aabb"], Some(&stdout(&pa)))), 0);
    assert_eq!(code(&parikh(&["member", "--word", "ba"], Some(&stdout(&pa)))), 1);
    let eps = parikh(&["rbcm", "to-pa", "--keep-epsilon"], Some(m));
    assert!(stdout(&eps).starts_with("eps-parikh 1\n"));
    let n = parikh(&["rbcm", "normalize"], Some(m));
    assert_eq!(code(&n), 0);
}

#[test]
fn hd_commands() {
    let o = parikh(&["hd", "validate", "corpus:D", "--max-len", "8"], None);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "result: yes\nbound: 8\n"));
    let o = parikh(&["hd", "game", "corpus:E"], None);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("winner: adam"));
    let o = parikh(&["hd", "validate", "corpus:E"], None);
    assert_eq!(code(&o), 3);
    let doc = stdout(&parikh(&["corpus", "get", "nonDyck"], None));
    // nonDyck's resolver is not a rule table, so a file copy has none.
    assert_eq!(code(&parikh(&["hd", "validate"], Some(&doc))), 3);
    let o = parikh(&["hd", "pump", "corpus:ex1", "--word", &"ab".repeat(20)], None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("sizes_ok: true"));
}

#[test]
fn minsky_commands() {
    let halt = "0: IF 0 ZERO 1 ELSE 1\n1: STOP\n";
    let o = parikh(&["minsky", "run"], Some(halt));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("projection: 01\n"));
    let lp = "0: INC 0\n1: IF 0 ZERO 0 ELSE 0\n2: STOP\n";
    assert_eq!(code(&parikh(&["minsky", "run", "--steps", "30"], Some(lp))), 2);
    let u = stdout(&parikh(&["minsky", "compile", "--target", "universality"], Some(halt)));
    assert_eq!(code(&parikh(&["member", "--word", "01"], Some(&u))), 1);
    assert_eq!(code(&parikh(&["member", "--word", "00"], Some(&u))), 0);
    let s = stdout(&parikh(&["minsky", "compile", "--target", "safety"], Some(lp)));
    assert_eq!(code(&parikh(&["member", "--word", "0101"], Some(&s))), 0);
    let r = stdout(&parikh(&["minsky", "compile", "--target", "regularity"], Some(halt)));
    assert_eq!(code(&parikh(&["member", "--word", "010011"], Some(&r))), 1);
    assert_eq!(code(&parikh(&["minsky", "run"], Some("0: JUMP 1\n1: STOP\n"))), 3);
}

#[test]
fn reduction_gadgets() {
    let c = stdout(&parikh(&["collapse", "corpus:ex1"], None));
    assert_eq!(code(&parikh(&["member", "--word", "##"], Some(&c))), 0);
    let p = stdout(&parikh(&["pair", "corpus:ex1"], None));
    assert!(p.contains("a/b"));
    let r = parikh(&["restrict", "--word", "b a"], Some(&p));
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(code(&parikh(&["member", "--word", "ab"], Some(&stdout(&r)))), 0);
}

#[test]
fn corpus_listing() {
    let o = parikh(&["corpus", "list"], None);
    assert_eq!(stdout(&o).lines().count(), 6);
    let j = parikh(&["corpus", "list", "--json"], None);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["corpus"].as_array().unwrap().len(), 6);
}
