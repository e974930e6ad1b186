//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! with its measured runtime against the pinned limit.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use dlupdate::action::{execute, execute_all};
use dlupdate::interp::{parse_interpretation, Interpretation};
use dlupdate::planning::{find_plan, synthesize, CertifyVerdict};
use dlupdate::reductions::{gen_3col, gen_qbf, oracle_3col, oracle_qbf, Graph, Matrix, Qbf2};
use dlupdate::regression::{tr, tr_branches_neg, tr_branches_pos, tr_neg};
use dlupdate::sat::{check_sat, Backend, SatVerdict};
use dlupdate::syntax::{
    is_dllite_formula, is_simple_action, name, parse_action, parse_action_set, parse_formula, Action, Formula, Name,
};
use dlupdate::testgen::{self, Vocab};
use dlupdate::verify::{verify_preserving, VerifyVerdict};
use dlupdate::Budget;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(file: &str) -> String {
    std::fs::read_to_string(corpus().join(file)).unwrap()
}

fn k1() -> Formula {
    parse_formula(&load("k1.kb")).unwrap()
}

fn alpha(file: &str) -> Action {
    parse_action(&load(file)).unwrap()
}

static SERIAL: Mutex<()> = Mutex::new(());

/// Runs criteria one at a time so that each timing covers only its own
/// work.
fn exclusive() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the verdict line and fails the test on a miss or a slow run.
fn verdict(n: u32, what: &str, ok: Result<String, String>, start: Instant, limit: Duration) {
    let took = start.elapsed();
    let within = took <= limit;
    let status = if ok.is_ok() && within { "PASS" } else { "FAIL" };
    let note = match &ok {
        Ok(s) | Err(s) => s.clone(),
    };
    println!("criterion {n:>2} {status}: {what}; {note}; {:.2}s of {}s", took.as_secs_f64(), limit.as_secs());
    assert!(ok.is_ok(), "criterion {n}: {note}");
    assert!(within, "criterion {n}: took {took:?}, limit {limit:?}");
}

#[test]
fn criterion_01_exec_replicates_the_updated_database() {
    let _guard = exclusive();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dlupdate"))
        .current_dir(corpus())
        .args(["exec", "--interp", "i1.gsd", "--action", "a1.act"])
        .output()
        .unwrap();
    let expected = load("i1_after_a1.gsd");
    let got = String::from_utf8(out.stdout).unwrap();
    let ok = if out.status.code() == Some(0) && got == expected {
        Ok("output file matches byte for byte".to_string())
    } else {
        Err(format!("exit {:?}, output:\n{got}", out.status.code()))
    };
    verdict(1, "exec on I1 with alpha1", ok, start, Duration::from_secs(1));
}

const K1_CONCEPTS: [&str; 4] = ["Prj", "ActivePrj", "FinishedPrj", "Empl"];

/// Bit layout of an interpretation of size `n` over the signature of K1:
/// `n` bits per concept, then `n * n` bits for `worksFor`.
fn mask_bits(n: usize) -> usize {
    K1_CONCEPTS.len() * n + n * n
}

/// The mask with the elements relabelled by `perm`.
fn permute(mask: u64, n: usize, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for c in 0..K1_CONCEPTS.len() {
        for e in 0..n {
            out |= (mask >> (c * n + e) & 1) << (c * n + perm[e]);
        }
    }
    let base = K1_CONCEPTS.len() * n;
    for a in 0..n {
        for b in 0..n {
            out |= (mask >> (base + a * n + b) & 1) << (base + perm[a] * n + perm[b]);
        }
    }
    out
}

/// Every interpretation of size `n` over the signature of K1 with `p1`
/// denoting `d0`, one per orbit under permutations of the other elements.
/// Each interpretation is isomorphic to one of these, and isomorphic
/// interpretations satisfy the same formulae.
fn k1_interpretations(n: usize) -> impl Iterator<Item = Interpretation> {
    let perms: Vec<Vec<usize>> = match n {
        3 => vec![vec![0, 2, 1]],
        _ => Vec::new(),
    };
    (0u64..1 << mask_bits(n)).filter(move |&m| perms.iter().all(|p| m <= permute(m, n, p))).map(move |mask| {
        let mut i = Interpretation::with_size(n).unwrap();
        for (ci, a) in K1_CONCEPTS.iter().enumerate() {
            let mut ext = fixed_set(n);
            for e in 0..n {
                ext.set(e, mask >> (ci * n + e) & 1 == 1);
            }
            i.set_concept(a, ext).unwrap();
        }
        let base = K1_CONCEPTS.len() * n;
        let pairs = (0..n * n).filter(|k| mask >> (base + k) & 1 == 1).map(|k| (k / n, k % n));
        i.set_role("worksFor", dlupdate::interp::Relation::from_pairs(n, pairs)).unwrap();
        i.map_individual("p1", 0).unwrap();
        i
    })
}

fn fixed_set(n: usize) -> dlupdate::interp::ElemSet {
    let mut s = dlupdate::interp::ElemSet::with_capacity(n);
    s.grow(n);
    s
}

#[test]
fn criterion_02_regression_matches_the_displayed_result() {
    let _guard = exclusive();
    let start = Instant::now();
    let displayed = parse_formula(
        "Prj <= (ActivePrj and not {p1}) or (FinishedPrj or {p1})
         & exists worksFor . Top <= Empl and exists worksFor . not {p1}
         & exists inv worksFor . Top <= Prj",
    )
    .unwrap();
    let ours = tr(&alpha("a1.act"), &k1()).unwrap();
    let (mut checked, mut disagreements) = (0u64, 0u64);
    for n in 1..=3 {
        for i in k1_interpretations(n) {
            checked += 1;
            if i.models(&ours).unwrap() != i.models(&displayed).unwrap() {
                disagreements += 1;
            }
        }
    }
    // Size 3 has (2^21 + 2^8 * 2^5) / 2 orbits: the swap of d1 and d2 fixes
    // 2^2 extensions per concept and 2^5 of the role.
    let expected = (1u64 << 5) + (1 << 12) + ((1 << 21) + (1 << 13)) / 2;
    let ok = if disagreements == 0 && checked == expected {
        Ok(format!("{checked} interpretations up to size 3 and isomorphism, no disagreement"))
    } else {
        Err(format!("{disagreements} disagreements among {checked}"))
    };
    verdict(2, "tr(alpha1, K1) equivalent to the displayed KB", ok, start, Duration::from_secs(30));
}

struct Case {
    i: Interpretation,
    alpha: Action,
    k: Formula,
}

fn population() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let vocab = Vocab::small(3, 2, 3);
    (0..1200)
        .map(|_| Case {
            i: testgen::interpretation(&mut rng, &vocab, 4, false),
            alpha: testgen::action(&mut rng, &vocab, 3, 2, 2),
            k: testgen::formula(&mut rng, &vocab, 2),
        })
        .collect()
}

#[test]
fn criterion_03_regression_agrees_with_execution() {
    let _guard = exclusive();
    let start = Instant::now();
    let cases = population();
    let mut bad = Vec::new();
    for (n, c) in cases.iter().enumerate() {
        assert!(c.i.size() <= 4 && c.alpha.conditional_count() <= 2);
        let after = execute(&c.i, &c.alpha).unwrap().models(&c.k).unwrap();
        let before = c.i.models(&tr(&c.alpha, &c.k).unwrap()).unwrap();
        if after != before {
            bad.push(n);
        }
    }
    let ok = if bad.is_empty() { Ok(format!("{} cases agree", cases.len())) } else { Err(format!("cases {bad:?} disagree")) };
    verdict(3, "execution against regression", ok, start, Duration::from_secs(120));
}

#[test]
fn criterion_04_branch_sets() {
    let _guard = exclusive();
    let start = Instant::now();
    let cases = population();
    let mut bad = Vec::new();
    for (n, c) in cases.iter().enumerate() {
        let t = c.i.models(&tr(&c.alpha, &c.k).unwrap()).unwrap();
        let t_neg = c.i.models(&tr_neg(&c.alpha, &c.k).unwrap()).unwrap();
        let any_neg = tr_branches_neg(&c.alpha, &c.k).any(|(_, f)| c.i.models(&f).unwrap());
        let any_pos = tr_branches_pos(&c.alpha, &c.k).any(|(_, f)| c.i.models(&f).unwrap());
        if t_neg == t || any_neg != t_neg || any_pos != t {
            bad.push(n);
        }
    }
    let ok = if bad.is_empty() {
        Ok(format!("{} cases agree on negation and both branch sets", cases.len()))
    } else {
        Err(format!("cases {bad:?} disagree"))
    };
    verdict(4, "negated regression and branch-set unions", ok, start, Duration::from_secs(120));
}

#[test]
fn criterion_05_verification_goldens() {
    let _guard = exclusive();
    let start = Instant::now();
    let k = k1();
    let bounded = Backend::Bounded { max_domain: 4, una: false };
    let a1 = alpha("a1.act");
    let first = verify_preserving(&a1, &k, bounded, &Budget::default()).unwrap();
    let second = verify_preserving(&alpha("a1p.act"), &k, bounded, &Budget::default()).unwrap();
    let ok = match (&first.verdict, &second.verdict) {
        (VerifyVerdict::NotPreserving { counterexample, .. }, VerifyVerdict::NoCounterexampleUpTo(4)) => {
            let before = counterexample.models(&k).unwrap();
            let after = execute(counterexample, &a1).unwrap().models(&k).unwrap();
            if before && !after {
                Ok("alpha1 not preserving with a revalidated counterexample; alpha1' none up to 4".to_string())
            } else {
                Err(format!("counterexample does not revalidate:\n{counterexample}"))
            }
        }
        (a, b) => Err(format!("alpha1: {a}; alpha1': {b}")),
    };
    verdict(5, "K1 preservation", ok, start, Duration::from_secs(60));
}

#[test]
fn criterion_06_dllite_backend_against_bounded_search() {
    let _guard = exclusive();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let vocab = Vocab::small(3, 2, 4);
    let bounded = Backend::Bounded { max_domain: 4, una: true };
    let (mut sat, mut unsat) = (0, 0);
    let mut bad = Vec::new();
    for n in 0..600 {
        let k = testgen::dllite_kb(&mut rng, &vocab, 6);
        assert!(k.conjuncts().len() <= 6 && k.signature().individuals.len() <= 4);
        let exact = check_sat(&k, Backend::DlLite, &Budget::default()).unwrap();
        let small = check_sat(&k, bounded, &Budget::default()).unwrap();
        let witnesses_hold = [&exact, &small].iter().all(|v| v.witness().is_none_or(|w| w.models(&k).unwrap()));
        match (&exact, &small) {
            (SatVerdict::Satisfiable(_), _) if witnesses_hold => sat += 1,
            (SatVerdict::Unsatisfiable, SatVerdict::NoModelUpTo(4)) => unsat += 1,
            _ => bad.push(n),
        }
    }
    let ok = if bad.is_empty() && sat > 0 && unsat > 0 {
        Ok(format!("600 KBs, {sat} satisfiable, {unsat} unsatisfiable, no contradiction"))
    } else {
        Err(format!("contradictions at {bad:?} ({sat} sat, {unsat} unsat)"))
    };
    verdict(6, "dllite against bounded search", ok, start, Duration::from_secs(300));
}

fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        Graph::new(n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)).unwrap()
    })
}

fn colourable_by(g: &Graph, backend: Backend) -> bool {
    let (k, a) = gen_3col(g);
    matches!(verify_preserving(&a, &k, backend, &Budget::default()).unwrap().verdict, VerifyVerdict::NotPreserving { .. })
}

#[test]
fn criterion_07_colouring_harness() {
    let _guard = exclusive();
    let start = Instant::now();
    let bounded = Backend::Bounded { max_domain: 1, una: false };
    let mut graphs: Vec<Graph> = (1..=4).flat_map(all_graphs).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    graphs.extend((0..60).map(|_| testgen::graph(&mut rng, 5, 0.7)));
    let mut bad = Vec::new();
    for g in &graphs {
        let expected = oracle_3col(g).unwrap();
        if colourable_by(g, bounded) != expected || colourable_by(g, Backend::DlLite) != expected {
            bad.push(g.to_string());
        }
    }
    let ok = if bad.is_empty() {
        Ok(format!("{} graphs (75 exhaustive, 60 sampled), both backends match", graphs.len()))
    } else {
        Err(format!("mismatch on {bad:?}"))
    };
    verdict(7, "3-colourability through verification", ok, start, Duration::from_secs(300));
}

/// Matrix templates; leaves are filled with literals in order.
#[derive(Clone, Copy)]
enum Shape {
    Leaf,
    And(&'static Shape, &'static Shape),
    Or(&'static Shape, &'static Shape),
}

const LEAF: Shape = Shape::Leaf;
const AND2: Shape = Shape::And(&LEAF, &LEAF);
const OR2: Shape = Shape::Or(&LEAF, &LEAF);
const OR_AND: Shape = Shape::Or(&AND2, &LEAF);
const AND_OR: Shape = Shape::And(&OR2, &LEAF);
const TEMPLATES: [Shape; 9] = [
    LEAF,
    AND2,
    OR2,
    AND_OR,
    OR_AND,
    Shape::And(&OR2, &OR2),
    Shape::Or(&AND2, &AND2),
    Shape::And(&OR_AND, &LEAF),
    Shape::Or(&AND_OR, &LEAF),
];

fn leaves(s: &Shape) -> usize {
    match s {
        Shape::Leaf => 1,
        Shape::And(a, b) | Shape::Or(a, b) => leaves(a) + leaves(b),
    }
}

fn fill(s: &Shape, lits: &mut impl Iterator<Item = (Name, bool)>) -> Matrix {
    match s {
        Shape::Leaf => {
            let (var, positive) = lits.next().unwrap();
            Matrix::Lit { var, positive }
        }
        Shape::And(a, b) => Matrix::and(fill(a, lits), fill(b, lits)),
        Shape::Or(a, b) => Matrix::or(fill(a, lits), fill(b, lits)),
    }
}

fn all_qbfs(n: usize, m: usize) -> Vec<Qbf2> {
    let exists: Vec<Name> = (1..=n).map(|i| name(format!("p{i}"))).collect();
    let forall: Vec<Name> = (1..=m).map(|i| name(format!("q{i}"))).collect();
    let vars: Vec<Name> = exists.iter().chain(&forall).cloned().collect();
    let lits: Vec<(Name, bool)> = vars.iter().flat_map(|v| [(v.clone(), true), (v.clone(), false)]).collect();
    let mut out = Vec::new();
    for t in &TEMPLATES {
        let k = leaves(t);
        for code in 0..lits.len().pow(k as u32) {
            let chosen: Vec<(Name, bool)> = (0..k).map(|i| lits[code / lits.len().pow(i as u32) % lits.len()].clone()).collect();
            if vars.iter().all(|v| chosen.iter().any(|(w, _)| w == v)) {
                out.push(Qbf2::new(exists.clone(), forall.clone(), fill(t, &mut chosen.into_iter())).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_08_qbf_harness() {
    let _guard = exclusive();
    let start = Instant::now();
    let (mut checked, mut yes) = (0, 0);
    let mut bad = Vec::new();
    for total in 1..=3 {
        for n in 0..=total {
            for q in all_qbfs(n, total - n) {
                assert!(q.matrix.depth() <= 3);
                let inst = gen_qbf(&q);
                let in_fragment = is_dllite_formula(&inst.pre).is_ok()
                    && is_dllite_formula(&inst.goal).is_ok()
                    && inst.actions.iter().all(|a| is_simple_action(&a.action).is_ok());
                let found = synthesize(&inst.actions, &inst.pre, &inst.goal, inst.k, Backend::DlLite, &Budget::default()).unwrap();
                let certified = found.as_ref().is_none_or(|s| s.verdict == CertifyVerdict::Certified);
                let expected = oracle_qbf(&q).unwrap();
                if !in_fragment || !certified || found.is_some() != expected {
                    bad.push(q.to_string());
                }
                checked += 1;
                yes += expected as usize;
            }
        }
    }
    let ok = if bad.is_empty() {
        Ok(format!("{checked} formulae ({yes} true) match, all instances in the fragment"))
    } else {
        Err(format!("{} mismatches, first {}", bad.len(), bad[0]))
    };
    verdict(8, "QBF through synthesis with the dllite backend", ok, start, Duration::from_secs(600));
}

#[test]
fn criterion_09_planning_golden() {
    let _guard = exclusive();
    let start = Instant::now();
    let i1 = parse_interpretation(&load("i1.gsd")).unwrap();
    let acts = parse_action_set(&load("actions.act")).unwrap();
    let goal = parse_formula(&load("kg.kb")).unwrap();
    let found = find_plan(&i1, &acts, &goal, 0, None, &Budget::default()).unwrap();
    let a2_ground =
        parse_action("if e1 : Empl & p1 : Prj & p2 : Prj & (e1, p1) : worksFor then { worksFor -= {(e1, p1)}; worksFor += {(e1, p2)} }")
            .unwrap();
    let ok = match found {
        Some(p) => {
            let sources: Vec<&str> = p.plan.steps.iter().map(|s| s.source.as_str()).collect();
            let end = execute_all(&i1, p.plan.actions()).unwrap();
            let expected_end = "concept Empl = {e1, e7}";
            if p.plan.len() == 2
                && sources == ["a2", "a1p"]
                && p.plan.steps[0].action == a2_ground
                && end.models(&goal).unwrap()
                && end.to_string().contains(expected_end)
                && end.models(&k1()).unwrap()
            {
                Ok(format!("plan {}", p.plan))
            } else {
                Err(format!("unexpected plan {}", p.plan))
            }
        }
        None => Err("no plan".into()),
    };
    verdict(9, "shortest plan from I1 to K_g", ok, start, Duration::from_secs(10));
}

#[test]
fn criterion_10_fragment_checkers() {
    let _guard = exclusive();
    let start = Instant::now();
    let (k3col, _) = gen_3col(&Graph::complete(3));
    let inst = gen_qbf(&Qbf2::parse("exists p\nforall q\np | q\n").unwrap());
    let a2 = alpha("a2.act");
    let checks = [
        ("K1 rejected", !is_dllite_formula(&k1()).is_ok()),
        ("colouring KB accepted", is_dllite_formula(&k3col).is_ok()),
        ("QBF precondition accepted", is_dllite_formula(&inst.pre).is_ok()),
        ("QBF goal accepted", is_dllite_formula(&inst.goal).is_ok()),
        ("alpha2 accepted as simple", is_simple_action(&a2).is_ok()),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(s, _)| *s).collect();
    let ok = if failed.is_empty() { Ok("all five checks hold".to_string()) } else { Err(format!("failed: {failed:?}")) };
    verdict(10, "fragment membership", ok, start, Duration::from_secs(1));
}
