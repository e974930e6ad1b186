use dlupdate::action::execute;
use dlupdate::regression::{tr, tr_branches_neg, tr_branches_pos, tr_neg};
use dlupdate::syntax::{parse_action, parse_formula, Action, Formula};
use dlupdate::testgen::{self, Vocab};
use dlupdate::interp::Interpretation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Case {
    i: Interpretation,
    alpha: Action,
    k: Formula,
}

/// Domains of at most 4 elements, 3 concept names, 2 role names and at
/// most 2 conditionals per action.
fn population(seed: u64, n: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = Vocab::small(3, 2, 3);
    (0..n)
        .map(|_| Case {
            i: testgen::interpretation(&mut rng, &vocab, 4, false),
            alpha: testgen::action(&mut rng, &vocab, 3, 2, 2),
            k: testgen::formula(&mut rng, &vocab, 2),
        })
        .collect()
}

#[test]
fn regression_agrees_with_execution() {
    let cases = population(21, 1200);
    for c in &cases {
        let after = execute(&c.i, &c.alpha).unwrap().models(&c.k).unwrap();
        let before = c.i.models(&tr(&c.alpha, &c.k).unwrap()).unwrap();
        assert_eq!(after, before, "action {}\nkb {}\n{}", c.alpha, c.k, c.i);
    }
}

#[test]
fn negated_regression_is_the_complement() {
    for c in &population(22, 1200) {
        let pos = c.i.models(&tr(&c.alpha, &c.k).unwrap()).unwrap();
        let neg = c.i.models(&tr_neg(&c.alpha, &c.k).unwrap()).unwrap();
        assert_ne!(pos, neg, "action {}\nkb {}", c.alpha, c.k);
    }
}

#[test]
fn branch_sets_cover_their_regressions() {
    for c in &population(23, 1200) {
        let neg = c.i.models(&tr_neg(&c.alpha, &c.k).unwrap()).unwrap();
        let mut any_neg = false;
        for (_, m) in tr_branches_neg(&c.alpha, &c.k) {
            any_neg |= c.i.models(&m).unwrap();
        }
        assert_eq!(neg, any_neg, "action {}\nkb {}", c.alpha, c.k);
        let pos = c.i.models(&tr(&c.alpha, &c.k).unwrap()).unwrap();
        let mut any_pos = false;
        for (_, m) in tr_branches_pos(&c.alpha, &c.k) {
            any_pos |= c.i.models(&m).unwrap();
        }
        assert_eq!(pos, any_pos, "action {}\nkb {}", c.alpha, c.k);
    }
}

#[test]
fn branch_counts_follow_conditionals() {
    for c in &population(24, 300) {
        let n = tr_branches_neg(&c.alpha, &c.k).count();
        assert!(n >= 1 && n <= 1 << c.alpha.conditional_count());
        assert_eq!(n, tr_branches_pos(&c.alpha, &c.k).count());
    }
}

/// Node count of each branch member, with shared subterms counted once,
/// is at most twice `|α| + |K|`.
#[test]
fn branch_members_stay_linear() {
    let bound = |a: &Action, k: &Formula| 2 * (a.size() + k.tree_size());
    for c in &population(25, 2000) {
        for (choice, m) in tr_branches_neg(&c.alpha, &c.k) {
            assert!(m.dag_size() <= bound(&c.alpha, &c.k), "branch {choice} of {} on {}", c.alpha, c.k);
        }
        for (_, m) in tr_branches_pos(&c.alpha, &c.k) {
            assert!(m.dag_size() <= bound(&c.alpha, &c.k));
        }
    }
    let chain = ["A += B and {a}; B -= exists p . A; p += p | A; if a : A then { A -= B }"; 12].join("; ");
    let alpha = parse_action(&chain).unwrap();
    let k = parse_formula("A <= B & exists p . A <= not A & (a, b) : p | (A or B)").unwrap();
    for (_, m) in tr_branches_neg(&alpha, &k).take(64) {
        assert!(m.dag_size() <= bound(&alpha, &k));
    }
}

#[test]
fn split_inclusions_are_equivalent() {
    use dlupdate::regression::split_positive_inclusions;
    use dlupdate::syntax::is_dllite_formula;
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let vocab = Vocab::small(3, 2, 3);
    let (mut members, mut in_fragment) = (0, 0);
    for _ in 0..300 {
        let k = testgen::dllite_kb(&mut rng, &vocab, 4);
        let alpha = testgen::simple_action(&mut rng, &vocab, 3, 1);
        for (_, member) in tr_branches_pos(&alpha, &k) {
            let nnf = member.nnf();
            let split = split_positive_inclusions(&nnf);
            for _ in 0..10 {
                let i = testgen::interpretation(&mut rng, &vocab, 4, true);
                assert_eq!(i.models(&nnf).unwrap(), i.models(&split).unwrap(), "{nnf}\n{split}");
            }
            members += 1;
            in_fragment += is_dllite_formula(&split).is_ok() as usize;
        }
    }
    assert!(in_fragment * 2 > members, "{in_fragment} of {members} in the fragment");
}
