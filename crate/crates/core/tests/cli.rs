use std::process::{Command, Output};

fn twostack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = twostack(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn simulate() {
    assert_eq!(stdout(&["simulate", "rlmrlm"]), "12\n");
    assert_eq!(stdout(&["simulate", "ρρλμλμ"]), "21\n");
    assert_eq!(stdout(&["simulate", "rlrlmm", "--k", "2"]), "21\n");
    let trace = stdout(&["simulate", "rlm", "--trace"]);
    assert_eq!(trace.lines().count(), 4);
    assert!(trace.lines().last().unwrap().ends_with("out=[1]"));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["simulate", "rlm", "--trace", "--json"])).unwrap();
    assert_eq!(json[3]["output"], serde_json::json!([1]));
}

#[test]
fn domain_errors_exit_one() {
    let out = twostack(&["simulate", "rrrlllmmm"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        String::from_utf8_lossy(&out.stderr),
        "error: StackAOverflow(2)\n"
    );
    assert!(out.stdout.is_empty());

    let out = twostack(&["canon", "rm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotInL2Infinity"));

    let out = twostack(&["pda", "trace", "rlm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MalformedInput"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["simulate", "rxm"][..],
        &["member", "rlm", "--lang", "Q"],
        &["count", "--n-max", "3"],
        &["frobnicate"],
        &["simulate", "rlm", "--k", "0"],
    ] {
        assert_eq!(twostack(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn membership() {
    assert_eq!(stdout(&["member", "rlrlmm", "--lang", "L"]), "false\n");
    assert_eq!(stdout(&["member", "rlrlmm", "--lang", "L2inf"]), "true\n");
    assert_eq!(stdout(&["member", "rrlmlm", "--lang", "L"]), "true\n");
    assert_eq!(stdout(&["member", "rrlmlm$", "--lang", "pda"]), "true\n");
    assert_eq!(stdout(&["member", "rlrmlm", "--lang", "pda"]), "false\n");
    assert_eq!(stdout(&["member", "", "--lang", "pda"]), "true\n");
}

#[test]
fn canon_and_reverse() {
    assert_eq!(stdout(&["canon", "rlrmlm"]), "rlmrlm 12\n");
    assert_eq!(stdout(&["--unicode", "canon", "rlrlmm"]), "ρρλμλμ 21\n");
    assert_eq!(stdout(&["reverse", "rlmrlm"]), "12\n");
}

#[test]
fn enumerate() {
    let perms = stdout(&["enumerate", "--n", "3"]);
    assert_eq!(perms, "123\n132\n213\n231\n312\n321\n");
    assert_eq!(
        stdout(&["enumerate", "--n", "4", "--k", "1"])
            .lines()
            .count(),
        14
    );
}

#[test]
fn count_methods_agree() {
    let closed = stdout(&["count", "--n-max", "12", "--method", "closed"]);
    assert!(closed.starts_with("n,c_n\n0,1\n"));
    assert!(closed.ends_with("12,19343408\n"));
    assert_eq!(
        stdout(&["count", "--n-max", "12", "--method", "grammar"]),
        closed
    );
    let head: String = closed.lines().take(8).map(|l| format!("{l}\n")).collect();
    assert_eq!(stdout(&["count", "--n-max", "6", "--method", "pda"]), head);
    assert_eq!(
        stdout(&["count", "--n-max", "6", "--method", "brute"]),
        head
    );

    let json: serde_json::Value = serde_json::from_str(&stdout(&[
        "count", "--n-max", "4", "--method", "grammar", "--json",
    ]))
    .unwrap();
    assert_eq!(
        json["sequence"],
        serde_json::json!(["1", "1", "2", "6", "24"])
    );
    assert_eq!(json["order"], 13);
    assert_eq!(json["pipeline"], "grammar");
}

#[test]
fn pda_commands() {
    let doc: serde_json::Value = serde_json::from_str(&stdout(&["pda", "export"])).unwrap();
    assert_eq!(doc["transitions"].as_array().unwrap().len(), 36);
    let trace = stdout(&["pda", "trace", "rlm$"]);
    assert!(trace.lines().nth(2).unwrap().ends_with("(q3, \"10\")"));
    assert!(trace.ends_with("accepted\n"));
    assert!(stdout(&["pda", "trace", "rm$"]).ends_with("rejected after 1 letters\n"));
}

#[test]
fn grammar_export() {
    let bnf = stdout(&["grammar", "export", "--format", "bnf"]);
    assert_eq!(bnf.lines().count(), 57);
    assert!(bnf.lines().any(|l| l == "N000 -> $ | r N100"));
    let raw: serde_json::Value =
        serde_json::from_str(&stdout(&["grammar", "export", "--format", "json", "--raw"])).unwrap();
    assert_eq!(raw["start"], "S");
    assert_eq!(raw["nonterminals"].as_array().unwrap().len(), 244);
    assert!(stdout(&["--unicode", "grammar", "export"]).contains("N000 -> $ | ρ N100"));
}

#[test]
fn asymptotics() {
    let text = stdout(&["asymptotics", "--n", "100"]);
    let err: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("relative_error "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err.abs() < 0.05, "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["asymptotics", "--n", "12", "--json"])).unwrap();
    assert_eq!(json["exact"], "19343408");
}

#[test]
fn verify_quick_is_stable() {
    let a = twostack(&["verify", "--quick"]);
    assert_eq!(a.status.code(), Some(0));
    let b = twostack(&["verify", "--quick"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.ends_with("overall: PASS\n"));
    assert!(a.stderr.is_empty());
}
