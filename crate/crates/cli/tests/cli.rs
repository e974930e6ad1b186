use std::path::{Path, PathBuf};
use std::process::Command;

use dlupdate::interp::parse_interpretation;
use dlupdate::reductions::{oracle_3col, oracle_qbf, Graph, Qbf2};
use dlupdate::syntax::parse_formula;
use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dlupdate_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dlupdate"));
    cmd.current_dir(dir).args(args);
    for key in ["DLUPDATE_NODE_BUDGET", "DLUPDATE_CLAUSE_BUDGET", "DLUPDATE_STATE_BUDGET", "DLUPDATE_TIME_LIMIT"] {
        cmd.env_remove(key);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn dlupdate(args: &[&str]) -> Run {
    dlupdate_in(&corpus(), args, &[])
}

/// Checks a report against the published schema: required keys, no extra
/// top-level keys, primitive types, enumerations and constants.
fn check_schema(report: &Value) {
    let schema: Value =
        serde_json::from_str(include_str!("../report.schema.json")).expect("schema parses");
    let obj = report.as_object().expect("report is an object");
    for key in schema["required"].as_array().unwrap() {
        assert!(obj.contains_key(key.as_str().unwrap()), "missing {key} in {report}");
    }
    let props = schema["properties"].as_object().unwrap();
    for (key, value) in obj {
        let rule = props.get(key).unwrap_or_else(|| panic!("unexpected key {key}"));
        check_value(value, rule);
    }
    let details = schema["properties"]["details"]["properties"].as_object().unwrap();
    for (key, value) in obj["details"].as_object().unwrap() {
        if let Some(rule) = details.get(key) {
            check_value(value, rule);
        }
    }
}

fn check_value(value: &Value, rule: &Value) {
    let ok = match rule["type"].as_str().unwrap() {
        "integer" => value.is_u64() || value.is_i64(),
        "string" => value.is_string(),
        "object" => value.is_object(),
        t => panic!("type {t} not handled"),
    };
    assert!(ok, "{value} is not a {}", rule["type"]);
    if let Some(options) = rule.get("enum") {
        assert!(options.as_array().unwrap().contains(value), "{value} not in {options}");
    }
    if let Some(c) = rule.get("const") {
        assert_eq!(value, c);
    }
    if let Some(req) = rule.get("required") {
        for key in req.as_array().unwrap() {
            assert!(value.get(key.as_str().unwrap()).is_some(), "missing {key} in {value}");
        }
    }
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let r = dlupdate(&full);
    let v: Value = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout));
    check_schema(&v);
    assert_eq!(v["exit_code"].as_i64().unwrap() as i32, r.code);
    (r.code, v)
}

#[test]
fn exec_prints_the_updated_interpretation_and_trace() {
    let r = dlupdate(&["exec", "--interp", "i1.gsd", "--action", "a1.act"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let expected = std::fs::read_to_string(corpus().join("i1_after_a1.gsd")).unwrap();
    assert_eq!(r.stdout, expected);
    assert!(r.stderr.contains("Empl -= forall worksFor . {p1}  [- e1, e3]"), "{}", r.stderr);
}

#[test]
fn exec_with_bindings_writes_the_result_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("after.gsd");
    let r = dlupdate(&[
        "exec", "--interp", "i1.gsd", "--action", "a2.act",
        "--bind", "?x=e1", "--bind", "?y=p1", "--bind", "z=p2",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = parse_interpretation(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(j.models(&parse_formula("(e1, p2) : worksFor & ! (e1, p1) : worksFor").unwrap()).unwrap());
}

#[test]
fn exec_of_an_unbound_action_is_an_error() {
    let r = dlupdate(&["exec", "--interp", "i1.gsd", "--action", "a2.act"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not ground"), "{}", r.stderr);
}

#[test]
fn model_check_exit_codes() {
    assert_eq!(dlupdate(&["model-check", "--interp", "i1.gsd", "--kb", "k1.kb"]).code, 0);
    assert_eq!(dlupdate(&["model-check", "--interp", "i1_after_a1.gsd", "--kb", "k1.kb"]).code, 1);
}

#[test]
fn verify_reports_a_counterexample_that_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("cex.gsd");
    let w = w.to_str().unwrap();
    let r = dlupdate(&["verify", "--kb", "k1.kb", "--action", "a1.act", "--backend", "bounded", "--max-domain", "5", "--witness", w]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.starts_with("not preserving"));
    let k1 = corpus().join("k1.kb");
    let a1 = corpus().join("a1.act");
    let (k1, a1) = (k1.to_str().unwrap(), a1.to_str().unwrap());
    assert_eq!(dlupdate(&["model-check", "--interp", w, "--kb", k1]).code, 0);
    let after = dir.path().join("after.gsd");
    let after = after.to_str().unwrap();
    assert_eq!(dlupdate(&["exec", "--interp", w, "--action", a1, "--out", after]).code, 0);
    assert_eq!(dlupdate(&["model-check", "--interp", after, "--kb", k1]).code, 1);
}

#[test]
fn verify_with_pre_and_post() {
    let r = dlupdate(&["verify", "--pre", "k1.kb", "--post", "k1.kb", "--action", "a1p.act"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.starts_with("no counterexample up to domain size 4"));
    assert_eq!(dlupdate(&["verify", "--kb", "k1.kb", "--pre", "k1.kb", "--action", "a1p.act"]).code, 2);
}

#[test]
fn verify_json_report() {
    let (code, v) = json_report(&["verify", "--kb", "k1.kb", "--action", "a1.act"]);
    assert_eq!(code, 1);
    assert_eq!(v["verb"], "verify");
    assert_eq!(v["outcome"], "negative");
    assert_eq!(v["details"]["status"], "not_preserving");
    let cex = parse_interpretation(v["details"]["counterexample"].as_str().unwrap()).unwrap();
    assert!(cex.models(&parse_formula(&std::fs::read_to_string(corpus().join("k1.kb")).unwrap()).unwrap()).unwrap());
}

#[test]
fn fragment_violations_exit_four() {
    let (code, v) = json_report(&["verify", "--kb", "k1.kb", "--action", "a1.act", "--backend", "dllite"]);
    assert_eq!(code, 4);
    assert_eq!(v["outcome"], "fragment");
    assert!(!v["details"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn budgets_come_from_flags_or_environment() {
    let args = ["plan", "--interp", "i1.gsd", "--actions", "actions.act", "--goal", "kg.kb"];
    assert_eq!(dlupdate_in(&corpus(), &args, &[("DLUPDATE_STATE_BUDGET", "1")]).code, 3);
    let mut with_flag = vec!["--state-budget", "1"];
    with_flag.extend_from_slice(&args);
    assert_eq!(dlupdate(&with_flag).code, 3);
    assert_eq!(dlupdate(&["--node-budget", "1", "regress", "--kb", "k1.kb", "--action", "a1.act"]).code, 3);
    assert_eq!(dlupdate(&args).code, 0);
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(dlupdate(&["frobnicate"]).code, 2);
    assert_eq!(dlupdate(&["verify", "--action", "a1.act"]).code, 2);
    assert_eq!(dlupdate(&["model-check", "--interp", "missing.gsd", "--kb", "k1.kb"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kb");
    std::fs::write(&bad, "Prj <= ").unwrap();
    let (code, v) = json_report(&["check-sat", "--kb", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(v["details"]["error"].as_str().unwrap().contains("line 1"));
}

#[test]
fn deterministic_flag_is_accepted_and_output_is_stable() {
    let args = ["--deterministic", "verify", "--kb", "k1.kb", "--action", "a1.act"];
    let a = dlupdate(&args);
    let b = dlupdate(&args);
    assert_eq!(a.code, 1);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn help_documents_backends_and_exit_codes() {
    let r = dlupdate(&["--help"]);
    assert_eq!(r.code, 0);
    for needle in ["bounded", "dllite", "never claims preservation", "3  budget exceeded", "4  input outside"] {
        assert!(r.stdout.contains(needle), "help lacks `{needle}`");
    }
}

#[test]
fn check_sat_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("model.gsd");
    let r = dlupdate(&["check-sat", "--kb", "k1.kb", "--witness", w.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let k1 = corpus().join("k1.kb");
    assert_eq!(dlupdate(&["model-check", "--interp", w.to_str().unwrap(), "--kb", k1.to_str().unwrap()]).code, 0);

    let unsat = dir.path().join("unsat.kb");
    std::fs::write(&unsat, "a : A & A <= not A").unwrap();
    let r = dlupdate(&["check-sat", "--kb", unsat.to_str().unwrap(), "--backend", "dllite"]);
    assert_eq!((r.code, r.stderr.trim()), (1, "unsatisfiable"));
    let r = dlupdate(&["check-sat", "--kb", unsat.to_str().unwrap(), "--max-domain", "2", "--una", "on"]);
    assert_eq!((r.code, r.stderr.trim()), (1, "no model up to domain size 2"));
}

#[test]
fn regress_prints_formulae_and_branches() {
    let r = dlupdate(&["regress", "--kb", "k1.kb", "--action", "a1.act"]);
    assert_eq!(r.code, 0);
    assert!(parse_formula(&r.stdout).is_ok());
    let r = dlupdate(&[
        "regress", "--kb", "k1.kb", "--action", "a2.act", "--bind", "?x=e1", "--bind", "?y=p1", "--bind", "?z=p2",
        "--branches", "pos",
    ]);
    assert_eq!(r.code, 0);
    let labels: Vec<&str> = r.stdout.lines().filter_map(|l| l.strip_prefix("# branch ")).collect();
    assert_eq!(labels, ["T", "E"]);
    let (_, v) = json_report(&["regress", "--kb", "k1.kb", "--action", "a1.act", "--branches", "neg"]);
    assert_eq!(v["details"]["branches"].as_array().unwrap().len(), 1);
}

#[test]
fn plan_output_replays_to_the_goal() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.act");
    let r = dlupdate(&["plan", "--interp", "i1.gsd", "--actions", "actions.act", "--goal", "kg.kb", "--out", plan.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("# step 1: a2 {?x=e1, ?y=p1, ?z=p2}"));
    let i1 = corpus().join("i1.gsd");
    let end = dir.path().join("end.gsd");
    let r = dlupdate(&["exec", "--interp", i1.to_str().unwrap(), "--action", plan.to_str().unwrap(), "--out", end.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let kg = corpus().join("kg.kb");
    assert_eq!(dlupdate(&["model-check", "--interp", end.to_str().unwrap(), "--kb", kg.to_str().unwrap()]).code, 0);
    assert_eq!(dlupdate(&["plan", "--interp", "i1.gsd", "--actions", "actions.act", "--goal", "kg.kb", "--max-length", "1"]).code, 1);
}

#[test]
fn generated_colouring_instances_verify_like_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for (text, name) in [("vertices 3\n1 2\n2 3\n1 3\n", "triangle"), ("vertices 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n", "k4")] {
        let g = dir.path().join(format!("{name}.txt"));
        std::fs::write(&g, text).unwrap();
        let out = dir.path().join(name);
        let r = dlupdate(&["gen", "3col", "--graph", g.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let colourable = oracle_3col(&Graph::parse(text).unwrap()).unwrap();
        for backend in ["bounded", "dllite"] {
            let r = dlupdate_in(&out, &["verify", "--kb", "k.kb", "--action", "action.act", "--backend", backend, "--max-domain", "1"], &[]);
            assert_eq!(r.code, if colourable { 1 } else { 0 }, "{name} with {backend}: {}", r.stderr);
        }
    }
}

#[test]
fn generated_qbf_instances_synthesize_like_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for (text, tag) in [("exists p\nforall q\n(p | q) & (p | !q)\n", "true"), ("exists p\nforall q\np & q\n", "false")] {
        let f = dir.path().join(format!("{tag}.qbf"));
        std::fs::write(&f, text).unwrap();
        let out = dir.path().join(tag);
        let r = dlupdate(&["gen", "qbf", "--formula", f.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let k = std::fs::read_to_string(out.join("instance.txt")).unwrap();
        let k = k.trim().strip_prefix("max-length ").unwrap();
        let expected = oracle_qbf(&Qbf2::parse(text).unwrap()).unwrap();
        let plan = out.join("plan.act");
        let r = dlupdate_in(
            &out,
            &["synth", "--actions", "actions.act", "--pre", "pre.kb", "--goal", "goal.kb", "--max-length", k, "--backend", "dllite", "--out", "plan.act"],
            &[],
        );
        assert_eq!(r.code, if expected { 0 } else { 1 }, "{tag}: {}", r.stderr);
        if expected {
            let r = dlupdate_in(&out, &["certify", "--plan", plan.to_str().unwrap(), "--pre", "pre.kb", "--goal", "goal.kb", "--backend", "dllite"], &[]);
            assert_eq!((r.code, r.stderr.trim()), (0, "certified"));
        }
    }
}

#[test]
fn certify_and_plan_exists_from_a_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let pre = dir.path().join("pre.kb");
    let goal = dir.path().join("goal.kb");
    std::fs::write(&pre, "?x : FinishedPrj & ?x : Prj & FinishedPrj <= not ActivePrj").unwrap();
    std::fs::write(&goal, "?x : ActivePrj").unwrap();
    let act = dir.path().join("reopen.act");
    std::fs::write(&act, "action reopen { ActivePrj += {?y}; FinishedPrj -= {?y} }").unwrap();
    let (pre, goal, act) = (pre.to_str().unwrap(), goal.to_str().unwrap(), act.to_str().unwrap());

    let (code, v) = json_report(&["plan-exists", "--actions", act, "--pre", pre, "--goal", goal, "--max-length", "1", "--backend", "dllite"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["plan"].as_array().unwrap().len(), 1);
    parse_interpretation(v["details"]["witness"].as_str().unwrap()).unwrap();
    let r = dlupdate(&["plan-exists", "--actions", act, "--pre", pre, "--goal", goal, "--max-length", "0", "--backend", "dllite"]);
    assert_eq!(r.code, 1);

    let r = dlupdate(&["certify", "--plan", act, "--pre", pre, "--goal", goal, "--backend", "dllite"]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    let fixed = dir.path().join("fixed.act");
    std::fs::write(&fixed, "ActivePrj += {?x}").unwrap();
    let r = dlupdate(&["certify", "--plan", fixed.to_str().unwrap(), "--pre", pre, "--goal", goal, "--backend", "dllite"]);
    assert_eq!((r.code, r.stderr.trim()), (0, "certified"));
    let r = dlupdate(&["certify", "--plan", fixed.to_str().unwrap(), "--pre", pre, "--goal", goal]);
    assert_eq!((r.code, r.stderr.trim()), (0, "no counterexample up to domain size 4"));
}

#[test]
fn every_verb_emits_schema_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "vertices 2\n1 2\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["check-sat", "--kb", "k1.kb"],
        vec!["model-check", "--interp", "i1.gsd", "--kb", "k1.kb"],
        vec!["exec", "--interp", "i1.gsd", "--action", "a1.act"],
        vec!["regress", "--kb", "k1.kb", "--action", "a1p.act"],
        vec!["verify", "--kb", "k1.kb", "--action", "a1p.act"],
        vec!["plan", "--interp", "i1.gsd", "--actions", "actions.act", "--goal", "kg.kb"],
        vec!["plan-exists", "--actions", "actions.act", "--pre", "k1.kb", "--goal", "kg.kb"],
        vec!["certify", "--plan", "a1p.act", "--pre", "k1.kb", "--goal", "k1.kb"],
        vec!["synth", "--actions", "a1p.act", "--pre", "k1.kb", "--goal", "kg.kb"],
        vec!["gen", "3col", "--graph", g.to_str().unwrap(), "--out-dir", d],
    ];
    let mut verbs = Vec::new();
    for args in &runs {
        let (_, v) = json_report(args);
        verbs.push(v["verb"].as_str().unwrap().to_string());
    }
    assert_eq!(verbs.len(), 10);
    let (_, exec) = json_report(&["exec", "--interp", "i1.gsd", "--action", "a1.act"]);
    assert_eq!(exec["details"]["trace"].as_array().unwrap().len(), 3);
}
