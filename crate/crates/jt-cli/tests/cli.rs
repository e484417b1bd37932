use std::process::{Command, Output};

fn jt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jt"))
        .args(args)
        .output()
        .expect("spawn jt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON on stdout")
}

#[test]
fn normalize_text() {
    let out = jt(&["normalize", "l(x*y)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "x\n");

    let out = jt(&["normalize", "l(z)*r(z)"]);
    assert_eq!(stdout(&out), "z\n");
}

#[test]
fn normalize_json_schema() {
    let out = jt(&["normalize", "r(x*y)", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["kind"], "normalize");
    assert_eq!(v["result"], "y");
    assert_eq!(v["inputs"]["term"], "r(x*y)");
    assert_eq!(v["budgetExhausted"], false);
    assert!(v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn equiv_both_ways() {
    let out = jt(&["equiv", "l(x*y)", "x"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "true\n");

    // A negative answer is still a successful analysis.
    let out = jt(&["equiv", "l(x*y)", "y"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn eval_in_base() {
    let out = jt(&["eval", "x*y", "--env", "x=2,y=3", "--base", "cantor"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "18\n");

    // Missing binding is an analysis failure.
    let out = jt(&["eval", "x*y", "--env", "x=2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn encode_examples() {
    let out = jt(&["encode", "01"]);
    assert_eq!(stdout(&out), "AABABB\n");
    let out = jt(&["encode", ""]);
    assert_eq!(stdout(&out), "AAB\n");
    let out = jt(&["encode", "012"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_typeb_generator() {
    let out = jt(&["certify-typeb", "--base", "cantor", "--sigma", "AB", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "certify-typeb");
    assert_eq!(v["result"]["kind"], "Generator");
    assert_eq!(v["result"]["g"], "w*2");
    assert_eq!(v["result"]["complete"], true);
}

#[test]
fn certify_typeb_refutation() {
    let out = jt(&["certify-typeb", "--sigma", "AA", "--format", "json"]);
    // A refutation is the successful outcome for an all-A word.
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["kind"], "Refutation");
    assert_eq!(v["result"]["all_bounded"], true);
}

#[test]
fn certify_noniso() {
    let out = jt(&["certify-noniso", "AABAB", "AABBAB", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["firstDifference"], 3);

    // Bad input: diagnostic on stdout, analysis-failure exit code.
    let out = jt(&["certify-noniso", "AB", "AABAB"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn jonsson_passes_on_short_words() {
    for sigma in ["A", "B", "AB"] {
        let out = jt(&["jonsson", "--sigma", sigma, "--bound", "w+16"]);
        assert!(out.status.success(), "sigma={sigma}");
    }
}

#[test]
fn closure_json() {
    let out = jt(&["closure", "w", "--sigma", "A", "--bound", "w+8", "--format", "json"]);
    let v = json(&out);
    let found: Vec<&str> = v["result"]["found"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert!(found.contains(&"0"));
    assert!(found.contains(&"w*1+7"));
    assert_eq!(v["result"]["saturated"], true);
    assert_eq!(v["budgetExhausted"], false);
}

#[test]
fn build_table_csv() {
    let out = jt(&["build-table", "--sigma", "A", "--layer", "1", "--count", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "z,l,r\nw*1,0,w*1+2\nw*1+1,w*1,w*1\n");
}

#[test]
fn genword_replays() {
    let out = jt(&["genword", "--sigma", "A", "w", "w", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["result"]["steps"], "e");
}

#[test]
fn usage_errors_exit_2() {
    let out = jt(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jt(&["normalize", "l(x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jt(&["closure", "w", "--bound", "potato"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jt(&["freeset"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fin_lattice_from_file() {
    let dir = std::env::temp_dir().join("jt-cli-test-lattice");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("alg.txt");
    std::fs::write(
        &path,
        "size 2\nop arity=2\n0 0\n0 1\nop arity=2\n0 1\n1 1\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();

    let out = jt(&["fin-lattice", "--in", p]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("distributive: true"));

    let out = jt(&["fin-lattice", "--in", p, "--format", "dot"]);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph lattice {"));
    assert!(dot.contains("\"{}\" -> \"{0}\""));
}

#[test]
fn freeset_from_file() {
    let dir = std::env::temp_dir().join("jt-cli-test-freeset");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.json");
    std::fs::write(&path, r#"{"size":5,"images":[[1],[2],[3],[4],[0]]}"#).unwrap();
    let p = path.to_str().unwrap();

    let out = jt(&["freeset", "--in", p, "--method", "exact", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["result"]["size"], 2);

    let out = jt(&["freeset", "--in", p, "--method", "partition", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["result"]["classes"], 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["certify-typeb", "--sigma", "AB", "--format", "json"];
    let a = jt(&args);
    let b = jt(&args);
    assert_eq!(a.stdout, b.stdout);

    let args = ["closure", "w", "1", "--sigma", "AB", "--bound", "w*2+16", "--format", "json"];
    let a = jt(&args);
    let b = jt(&args);
    assert_eq!(a.stdout, b.stdout);
}
