mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dlupdate::action::execute_traced;
use dlupdate::interp::{parse_interpretation, Interpretation};
use dlupdate::planning::{certify, find_plan, plan_exists, synthesize, CertifyVerdict, Plan};
use dlupdate::reductions::{gen_3col, gen_qbf, Graph, Qbf2};
use dlupdate::regression::{tr_branches_neg, tr_branches_pos, tr_with_budget};
use dlupdate::sat::{check_sat, Backend, SatVerdict};
use dlupdate::syntax::{name, parse_action_set, parse_formula, Action, Formula, NamedAction, Substitution};
use dlupdate::verify::{verify_pre_post, VerifyVerdict};
use dlupdate::{Budget, Error};

use report::{Outcome, Report};

const AFTER_HELP: &str = "\
Backends:
  bounded  Searches models with at most --max-domain elements. Models,
           witnesses and counterexamples it reports are genuine for every
           input. A negative answer only means none exists up to the bound,
           so it never claims preservation or certification.
  dllite   Decides finite satisfiability exactly for DL-Lite_HR+ knowledge
           bases under the unique name assumption, and so reports
           preservation and certification. Inputs outside the fragment
           (after regression) are rejected with exit code 4.

Exit codes:
  0  positive or consistent answer
  1  negative answer or refutation
  2  usage or input error
  3  budget exceeded
  4  input outside the fragment of the selected backend";

#[derive(Parser, Debug)]
#[command(name = "dlupdate", version, about = "Reasoning about graph-structured data under insert/delete actions")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    verb: Verb,
}

/// Options shared by every verb.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Print a versioned JSON report on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Produce identical output across runs. Every search is already
    /// deterministic, so this only documents intent.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Estimated node limit for expanded regressions.
    #[arg(long, global = true, env = "DLUPDATE_NODE_BUDGET")]
    node_budget: Option<usize>,
    /// Clause limit per propositional encoding of the bounded backend.
    #[arg(long, global = true, env = "DLUPDATE_CLAUSE_BUDGET")]
    clause_budget: Option<usize>,
    /// Limit on states or candidates visited by a search.
    #[arg(long, global = true, env = "DLUPDATE_STATE_BUDGET")]
    state_budget: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long, global = true, env = "DLUPDATE_TIME_LIMIT")]
    time_limit: Option<f64>,
}

impl RunConfig {
    fn budget(&self) -> Result<Budget> {
        let mut b = Budget::default();
        if let Some(n) = self.node_budget {
            b.nodes = n;
        }
        if let Some(n) = self.clause_budget {
            b.clauses = n;
        }
        if let Some(n) = self.state_budget {
            b.states = n;
        }
        if let Some(t) = self.time_limit {
            if !(t.is_finite() && t >= 0.0) {
                bail!("time limit must be a non-negative number of seconds");
            }
            b = b.with_time_limit(Duration::from_secs_f64(t));
        }
        Ok(b)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BackendKind {
    Bounded,
    Dllite,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OnOff {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
struct BackendOpts {
    #[arg(long, value_enum, default_value_t = BackendKind::Bounded)]
    backend: BackendKind,
    /// Largest domain tried by the bounded backend.
    #[arg(long, default_value_t = 4)]
    max_domain: usize,
    /// Unique name assumption for the bounded backend.
    #[arg(long, value_enum, default_value_t = OnOff::Off)]
    una: OnOff,
}

impl BackendOpts {
    fn backend(&self) -> Backend {
        match self.backend {
            BackendKind::Bounded => Backend::Bounded { max_domain: self.max_domain, una: self.una == OnOff::On },
            BackendKind::Dllite => Backend::DlLite,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BranchSet {
    Pos,
    Neg,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Decide finite satisfiability of a knowledge base.
    CheckSat {
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        backend: BackendOpts,
        /// Write the model, if one is found, to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check whether an interpretation satisfies a knowledge base.
    ModelCheck {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        kb: PathBuf,
    },
    /// Execute an action (or the actions of a set, in order) and print the
    /// resulting interpretation; the trace goes to stderr.
    Exec {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        action: PathBuf,
        /// Variable binding `?x=o`; may be repeated.
        #[arg(long = "bind", value_parser = parse_binding)]
        bind: Vec<(String, String)>,
        /// Write the resulting interpretation to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regress a knowledge base through a ground action.
    Regress {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        action: PathBuf,
        #[arg(long = "bind", value_parser = parse_binding)]
        bind: Vec<(String, String)>,
        /// List the members of a branch set with their branch labels.
        #[arg(long, value_enum)]
        branches: Option<BranchSet>,
    },
    /// Check that an action maps models of the precondition to models of
    /// the postcondition.
    Verify {
        /// Constraint used as both precondition and postcondition.
        #[arg(long, required_unless_present_all = ["pre", "post"], conflicts_with_all = ["pre", "post"])]
        kb: Option<PathBuf>,
        #[arg(long, requires = "post")]
        pre: Option<PathBuf>,
        #[arg(long, requires = "pre")]
        post: Option<PathBuf>,
        #[arg(long)]
        action: PathBuf,
        #[command(flatten)]
        backend: BackendOpts,
        /// Write the counterexample, if any, to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Find a shortest plan reaching a goal from an interpretation.
    Plan {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        /// Number of fresh elements added to the domain.
        #[arg(long, default_value_t = 0)]
        fresh: usize,
        #[arg(long)]
        max_length: Option<usize>,
        /// Write the plan as an action file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a plan of bounded length exists from some model of
    /// a precondition.
    PlanExists {
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        pre: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_length: usize,
        #[command(flatten)]
        backend: BackendOpts,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Check that a fixed sequence of actions reaches the goal from every
    /// model of the precondition.
    Certify {
        /// Action file whose actions form the plan, in order.
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        pre: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        #[command(flatten)]
        backend: BackendOpts,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Search for a plan of bounded length that certification accepts.
    Synth {
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        pre: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_length: usize,
        #[command(flatten)]
        backend: BackendOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate instances from graphs or quantified boolean formulae.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Graph file (`vertices N` then `u v` per edge) to `k.kb` and
    /// `action.act`; the action violates the constraint iff the graph is
    /// 3-colourable.
    #[command(name = "3col")]
    ThreeCol {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Formula file (`exists ...`, `forall ...`, matrix) to `pre.kb`,
    /// `goal.kb`, `actions.act` and `instance.txt`; a plan exists iff the
    /// formula is true.
    Qbf {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn parse_binding(s: &str) -> std::result::Result<(String, String), String> {
    let (v, o) = s.split_once('=').ok_or_else(|| format!("expected ?x=o, got `{s}`"))?;
    let v = v.trim().trim_start_matches('?');
    let o = o.trim();
    if v.is_empty() || o.is_empty() {
        return Err(format!("expected ?x=o, got `{s}`"));
    }
    Ok((v.to_string(), o.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_formula(path: &Path) -> Result<Formula> {
    let text = read(path)?;
    parse_formula(&text).map_err(Error::from).with_context(|| format!("in {}", path.display()))
}

fn load_actions(path: &Path) -> Result<Vec<NamedAction>> {
    let text = read(path)?;
    parse_action_set(&text).map_err(Error::from).with_context(|| format!("in {}", path.display()))
}

fn load_interp(path: &Path) -> Result<Interpretation> {
    let text = read(path)?;
    parse_interpretation(&text).with_context(|| format!("in {}", path.display()))
}

/// The actions of a file run one after the other.
fn load_sequence(path: &Path) -> Result<Action> {
    Ok(load_actions(path)?.iter().fold(Action::skip(), |acc, a| acc.then(&a.action)))
}

fn substitution(bind: &[(String, String)]) -> Substitution {
    Substitution::from_pairs(bind.iter().map(|(v, o)| (name(v), name(o))))
}

fn outcome(positive: bool) -> Outcome {
    if positive {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

fn backend_json(b: Backend) -> Value {
    match b {
        Backend::Bounded { max_domain, una } => json!({ "kind": "bounded", "max_domain": max_domain, "una": una }),
        Backend::DlLite => json!({ "kind": "dllite" }),
    }
}

fn plan_json(p: &Plan) -> Value {
    Value::Array(
        p.steps
            .iter()
            .map(|s| {
                json!({
                    "source": s.source,
                    "substitution": s.substitution.0.iter().map(|(v, o)| (v.to_string(), Value::from(o.to_string()))).collect::<serde_json::Map<_, _>>(),
                    "action": s.action.to_string(),
                })
            })
            .collect(),
    )
}

fn check_sat_verb(kb: &Path, opts: &BackendOpts, witness: Option<&Path>, budget: &Budget) -> Result<Report> {
    let k = load_formula(kb)?;
    let backend = opts.backend();
    let v = check_sat(&k, backend, budget)?;
    let mut details = json!({ "backend": backend_json(backend), "satisfiable": v.is_sat() });
    let mut text = String::new();
    if let SatVerdict::Satisfiable(w) = &v {
        text = w.to_string();
        details["witness"] = Value::from(text.clone());
        if let Some(path) = witness {
            write(path, &text)?;
        }
    }
    if let SatVerdict::NoModelUpTo(n) = v {
        details["bound"] = Value::from(n);
    }
    Ok(Report::new("check-sat", outcome(v.is_sat()), v.to_string()).text(text).details(details))
}

fn model_check_verb(interp: &Path, kb: &Path) -> Result<Report> {
    let i = load_interp(interp)?;
    let k = load_formula(kb)?;
    let holds = i.models(&k)?;
    let verdict = if holds { "model" } else { "not a model" };
    Ok(Report::new("model-check", outcome(holds), verdict).details(json!({ "models": holds })))
}

fn exec_verb(interp: &Path, action: &Path, bind: &[(String, String)], out: Option<&Path>) -> Result<Report> {
    let mut cur = load_interp(interp)?;
    let sigma = substitution(bind);
    let mut trace = Vec::new();
    for na in load_actions(action)? {
        let (next, events) = execute_traced(&cur, &sigma.apply_action(&na.action))?;
        trace.extend(events.iter().map(|e| format!("{}: {e}", na.name)));
        cur = next;
    }
    let text = cur.to_string();
    if let Some(path) = out {
        write(path, &text)?;
    }
    let details = json!({ "result": text, "trace": trace });
    Ok(Report::new("exec", Outcome::Positive, "executed").text(text).log(trace).details(details))
}

fn regress_verb(kb: &Path, action: &Path, bind: &[(String, String)], branches: Option<BranchSet>, budget: &Budget) -> Result<Report> {
    let k = load_formula(kb)?;
    let alpha = substitution(bind).apply_action(&load_sequence(action)?);
    if let Some(var) = alpha.signature().variables.into_iter().next() {
        return Err(Error::NotGround { what: "action", var }.into());
    }
    let Some(set) = branches else {
        let f = tr_with_budget(&alpha, &k, budget.nodes)?;
        let text = format!("{f}\n");
        return Ok(Report::new("regress", Outcome::Positive, "regressed").text(text).details(json!({ "formula": f.to_string() })));
    };
    let members: Vec<_> = match set {
        BranchSet::Pos => tr_branches_pos(&alpha, &k).collect(),
        BranchSet::Neg => tr_branches_neg(&alpha, &k).collect(),
    };
    let mut text = String::new();
    let mut list = Vec::new();
    for (choice, f) in &members {
        text.push_str(&format!("# branch {choice}\n{f}\n"));
        list.push(json!({ "branch": choice.to_string(), "formula": f.to_string() }));
    }
    let label = if set == BranchSet::Pos { "pos" } else { "neg" };
    Ok(Report::new("regress", Outcome::Positive, format!("{} branches", members.len()))
        .text(text)
        .details(json!({ "set": label, "branches": list })))
}

#[allow(clippy::too_many_arguments)]
fn verify_verb(
    kb: Option<&Path>,
    pre: Option<&Path>,
    post: Option<&Path>,
    action: &Path,
    opts: &BackendOpts,
    witness: Option<&Path>,
    budget: &Budget,
) -> Result<Report> {
    let (pre, post) = match (kb, pre, post) {
        (Some(k), _, _) => {
            let k = load_formula(k)?;
            (k.clone(), k)
        }
        (None, Some(p), Some(q)) => (load_formula(p)?, load_formula(q)?),
        _ => bail!("give --kb or both --pre and --post"),
    };
    let alpha = load_sequence(action)?;
    let backend = opts.backend();
    let r = verify_pre_post(&alpha, &pre, &post, backend, budget)?;
    let mut details = json!({
        "backend": backend_json(backend),
        "grounding": r.grounding.to_string(),
        "branches_checked": r.branches_checked,
    });
    let mut text = String::new();
    let positive = match &r.verdict {
        VerifyVerdict::Preserving => {
            details["status"] = "preserving".into();
            true
        }
        VerifyVerdict::NoCounterexampleUpTo(n) => {
            details["status"] = "no_counterexample".into();
            details["bound"] = Value::from(*n);
            true
        }
        VerifyVerdict::NotPreserving { counterexample, branch } => {
            details["status"] = "not_preserving".into();
            details["branch"] = Value::from(branch.to_string());
            text = counterexample.to_string();
            details["counterexample"] = Value::from(text.clone());
            if let Some(path) = witness {
                write(path, &text)?;
            }
            false
        }
    };
    Ok(Report::new("verify", outcome(positive), r.verdict.to_string()).text(text).details(details))
}

fn plan_verb(
    interp: &Path,
    actions: &Path,
    goal: &Path,
    fresh: usize,
    max_length: Option<usize>,
    out: Option<&Path>,
    budget: &Budget,
) -> Result<Report> {
    let i = load_interp(interp)?;
    let acts = load_actions(actions)?;
    let goal = load_formula(goal)?;
    match find_plan(&i, &acts, &goal, fresh, max_length, budget)? {
        Some(found) => {
            let text = found.plan.to_action_file();
            if let Some(path) = out {
                write(path, &text)?;
            }
            let details = json!({
                "length": found.plan.len(),
                "plan": plan_json(&found.plan),
                "plan_file": text,
                "start": found.start.to_string(),
                "end": found.end.to_string(),
            });
            Ok(Report::new("plan", Outcome::Positive, format!("plan {}", found.plan)).text(text).details(details))
        }
        None => Ok(Report::new("plan", Outcome::Negative, "no plan")),
    }
}

fn plan_exists_verb(
    actions: &Path,
    pre: &Path,
    goal: &Path,
    max_length: usize,
    opts: &BackendOpts,
    witness: Option<&Path>,
    budget: &Budget,
) -> Result<Report> {
    let acts = load_actions(actions)?;
    let (pre, goal) = (load_formula(pre)?, load_formula(goal)?);
    let backend = opts.backend();
    match plan_exists(&acts, &pre, &goal, max_length, backend, budget)? {
        Some(w) => {
            let interp = w.witness.to_string();
            if let Some(path) = witness {
                write(path, &interp)?;
            }
            let text = format!("{interp}\n{}", w.plan.to_action_file());
            let details = json!({
                "backend": backend_json(backend),
                "substitution": w.sigma.to_string(),
                "branch": w.branch.to_string(),
                "plan": plan_json(&w.plan),
                "plan_file": w.plan.to_action_file(),
                "witness": interp,
            });
            Ok(Report::new("plan-exists", Outcome::Positive, format!("plan {} with {}", w.plan, w.sigma))
                .text(text)
                .details(details))
        }
        None => {
            let verdict = match backend {
                Backend::DlLite => "no plan".to_string(),
                Backend::Bounded { max_domain, .. } => format!("no plan from models up to domain size {max_domain}"),
            };
            Ok(Report::new("plan-exists", Outcome::Negative, verdict).details(json!({ "backend": backend_json(backend) })))
        }
    }
}

fn certify_verb(plan: &Path, pre: &Path, goal: &Path, opts: &BackendOpts, witness: Option<&Path>, budget: &Budget) -> Result<Report> {
    let steps: Vec<Action> = load_actions(plan)?.into_iter().map(|a| a.action).collect();
    let (pre, goal) = (load_formula(pre)?, load_formula(goal)?);
    let backend = opts.backend();
    let r = certify(&steps, &pre, &goal, backend, budget)?;
    let mut details = json!({ "backend": backend_json(backend), "grounding": r.grounding.to_string() });
    let mut text = String::new();
    let positive = match &r.verdict {
        CertifyVerdict::Certified => {
            details["status"] = "certified".into();
            true
        }
        CertifyVerdict::UnknownUpTo(n) => {
            details["status"] = "no_counterexample".into();
            details["bound"] = Value::from(*n);
            true
        }
        CertifyVerdict::Refuted { counterexample, branch } => {
            details["status"] = "refuted".into();
            details["branch"] = Value::from(branch.to_string());
            text = counterexample.to_string();
            details["counterexample"] = Value::from(text.clone());
            if let Some(path) = witness {
                write(path, &text)?;
            }
            false
        }
    };
    Ok(Report::new("certify", outcome(positive), r.verdict.to_string()).text(text).details(details))
}

fn synth_verb(
    actions: &Path,
    pre: &Path,
    goal: &Path,
    max_length: usize,
    opts: &BackendOpts,
    out: Option<&Path>,
    budget: &Budget,
) -> Result<Report> {
    let acts = load_actions(actions)?;
    let (pre, goal) = (load_formula(pre)?, load_formula(goal)?);
    let backend = opts.backend();
    match synthesize(&acts, &pre, &goal, max_length, backend, budget)? {
        Some(s) => {
            let text = s.plan.to_action_file();
            if let Some(path) = out {
                write(path, &text)?;
            }
            let details = json!({
                "backend": backend_json(backend),
                "status": s.verdict.to_string(),
                "length": s.plan.len(),
                "plan": plan_json(&s.plan),
                "plan_file": text,
            });
            Ok(Report::new("synth", Outcome::Positive, format!("plan {} ({})", s.plan, s.verdict)).text(text).details(details))
        }
        None => Ok(Report::new("synth", Outcome::Negative, "no plan").details(json!({ "backend": backend_json(backend) }))),
    }
}

fn gen_verb(kind: &GenKind) -> Result<Report> {
    match kind {
        GenKind::ThreeCol { graph, out_dir } => {
            let g = Graph::parse(&read(graph)?)?;
            let (k, a) = gen_3col(&g);
            fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
            let files = [("k.kb", format!("{k}\n")), ("action.act", format!("{}\n", a.pretty()))];
            write_all(out_dir, "3col", &files)
        }
        GenKind::Qbf { formula, out_dir } => {
            let q = Qbf2::parse(&read(formula)?)?;
            let inst = gen_qbf(&q);
            fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
            let files = [
                ("pre.kb", format!("{}\n", inst.pre)),
                ("goal.kb", format!("{}\n", inst.goal)),
                ("actions.act", inst.actions_file()),
                ("instance.txt", format!("max-length {}\n", inst.k)),
            ];
            write_all(out_dir, "qbf", &files)
        }
    }
}

fn write_all(dir: &Path, what: &str, files: &[(&str, String)]) -> Result<Report> {
    let mut written = Vec::new();
    for (file, text) in files {
        let path = dir.join(file);
        write(&path, text)?;
        written.push(path.display().to_string());
    }
    Ok(Report::new("gen", Outcome::Positive, format!("{what} instance written"))
        .text(written.iter().map(|p| format!("{p}\n")).collect::<String>())
        .details(json!({ "kind": what, "files": written })))
}

fn run(cli: &Cli) -> Result<Report> {
    let budget = cli.run.budget()?;
    let b = &budget;
    match &cli.verb {
        Verb::CheckSat { kb, backend, witness } => check_sat_verb(kb, backend, witness.as_deref(), b),
        Verb::ModelCheck { interp, kb } => model_check_verb(interp, kb),
        Verb::Exec { interp, action, bind, out } => exec_verb(interp, action, bind, out.as_deref()),
        Verb::Regress { kb, action, bind, branches } => regress_verb(kb, action, bind, *branches, b),
        Verb::Verify { kb, pre, post, action, backend, witness } => {
            verify_verb(kb.as_deref(), pre.as_deref(), post.as_deref(), action, backend, witness.as_deref(), b)
        }
        Verb::Plan { interp, actions, goal, fresh, max_length, out } => {
            plan_verb(interp, actions, goal, *fresh, *max_length, out.as_deref(), b)
        }
        Verb::PlanExists { actions, pre, goal, max_length, backend, witness } => {
            plan_exists_verb(actions, pre, goal, *max_length, backend, witness.as_deref(), b)
        }
        Verb::Certify { plan, pre, goal, backend, witness } => certify_verb(plan, pre, goal, backend, witness.as_deref(), b),
        Verb::Synth { actions, pre, goal, max_length, backend, out } => {
            synth_verb(actions, pre, goal, *max_length, backend, out.as_deref(), b)
        }
        Verb::Gen { kind } => gen_verb(kind),
    }
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::CheckSat { .. } => "check-sat",
        Verb::ModelCheck { .. } => "model-check",
        Verb::Exec { .. } => "exec",
        Verb::Regress { .. } => "regress",
        Verb::Verify { .. } => "verify",
        Verb::Plan { .. } => "plan",
        Verb::PlanExists { .. } => "plan-exists",
        Verb::Certify { .. } => "certify",
        Verb::Synth { .. } => "synth",
        Verb::Gen { .. } => "gen",
    }
}

fn failure(verb: &'static str, err: &anyhow::Error) -> Report {
    let kind = match err.downcast_ref::<Error>() {
        Some(Error::Budget(_)) => Outcome::Budget,
        Some(Error::Fragment(_)) => Outcome::Fragment,
        _ => Outcome::Error,
    };
    let mut details = json!({ "error": format!("{err:#}") });
    if let Some(Error::Fragment(v)) = err.downcast_ref::<Error>() {
        details["violations"] = json!(v);
    }
    Report::new(verb, kind, format!("error: {err:#}")).details(details)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verb = verb_name(&cli.verb);
    let report = run(&cli).unwrap_or_else(|e| failure(verb, &e));
    if cli.run.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.text);
        eprintln!("{}", report.verdict);
        for line in &report.log {
            eprintln!("{line}");
        }
    }
    let code = report.outcome.exit_code();
    ExitCode::from(u8::try_from(code).unwrap_or(2))
}
