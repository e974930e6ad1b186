use dlupdate::action::execute;
use dlupdate::sat::Backend;
use dlupdate::testgen::{self, Vocab};
use dlupdate::verify::{verify_pre_post, verify_preserving, VerifyVerdict};
use dlupdate::{Budget, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BOUNDED: Backend = Backend::Bounded { max_domain: 4, una: true };

/// On fragment inputs the complete backend and bounded search never
/// contradict each other, and every counterexample survives execution.
#[test]
fn verification_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let vocab = Vocab::small(3, 2, 3).with_variables(&["x"]);
    let ground = Vocab::small(3, 2, 3);
    let (mut compared, mut refuted, mut preserved) = (0, 0, 0);
    while compared < 250 {
        let k = testgen::dllite_kb(&mut rng, &ground, 4);
        let a = testgen::simple_action(&mut rng, &vocab, 3, 2);
        let exact = match verify_preserving(&a, &k, Backend::DlLite, &Budget::default()) {
            Ok(r) => r,
            Err(Error::Fragment(_)) => continue,
            Err(e) => panic!("{e} on {a} / {k}"),
        };
        let bounded = verify_preserving(&a, &k, BOUNDED, &Budget::default()).unwrap();
        for r in [&exact, &bounded] {
            if let VerifyVerdict::NotPreserving { counterexample, .. } = &r.verdict {
                assert!(counterexample.models(&k).unwrap());
                assert!(!execute(counterexample, &r.grounded).unwrap().models(&k).unwrap());
            }
        }
        match (&exact.verdict, &bounded.verdict) {
            (VerifyVerdict::NotPreserving { .. }, _) => refuted += 1,
            (VerifyVerdict::Preserving, VerifyVerdict::Preserving | VerifyVerdict::NoCounterexampleUpTo(4)) => {
                preserved += 1
            }
            (e, b) => panic!("backends disagree on {a} / {k}: {e} vs {b}"),
        }
        compared += 1;
    }
    assert!(refuted > 30 && preserved > 30, "{refuted} refuted, {preserved} preserved");
}

#[test]
fn pre_post_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let vocab = Vocab::small(2, 1, 2);
    let mut compared = 0;
    while compared < 200 {
        let pre = testgen::dllite_kb(&mut rng, &vocab, 3);
        let post = testgen::dllite_kb(&mut rng, &vocab, 2);
        let a = testgen::simple_action(&mut rng, &vocab, 2, 1);
        let exact = match verify_pre_post(&a, &pre, &post, Backend::DlLite, &Budget::default()) {
            Ok(r) => r,
            Err(Error::Fragment(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let bounded = verify_pre_post(&a, &pre, &post, BOUNDED, &Budget::default()).unwrap();
        let refuted = |v: &VerifyVerdict| matches!(v, VerifyVerdict::NotPreserving { .. });
        if refuted(&bounded.verdict) {
            assert!(refuted(&exact.verdict), "{a} / {pre} / {post}");
        }
        if exact.verdict == VerifyVerdict::Preserving {
            assert!(!refuted(&bounded.verdict));
        }
        compared += 1;
    }
}
