//! Random instances for property tests: interpretations, concepts, roles,
//! formulae and actions over a small vocabulary, plus generators that stay
//! inside the lightweight fragment.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::interp::{Interpretation, Relation};
use crate::reductions::{Graph, Matrix, Qbf2};
use crate::syntax::{name, Action, Axiom, ConceptExpr, Formula, Name, RoleExpr, Step, Term};

/// Names a generator may draw from.
#[derive(Clone, Debug)]
pub struct Vocab {
    pub concepts: Vec<Name>,
    pub roles: Vec<Name>,
    pub individuals: Vec<Name>,
    /// Variables that may stand in for individuals in actions.
    pub variables: Vec<Name>,
}

impl Vocab {
    /// Concepts `A B C ..`, roles `p q r ..`, individuals `a b c ..`.
    pub fn small(concepts: usize, roles: usize, individuals: usize) -> Self {
        let pick = |pool: &str, n: usize| pool.chars().take(n).map(|c| name(c.to_string())).collect();
        Vocab {
            concepts: pick("ABCDEFGH", concepts),
            roles: pick("pqrstuvw", roles),
            individuals: pick("abcdefgh", individuals),
            variables: Vec::new(),
        }
    }

    pub fn with_variables(mut self, vars: &[&str]) -> Self {
        self.variables = vars.iter().map(name).collect();
        self
    }

    fn concept_name<R: Rng>(&self, rng: &mut R) -> Name {
        self.concepts.choose(rng).cloned().expect("vocabulary has concept names")
    }

    fn role_name<R: Rng>(&self, rng: &mut R) -> Name {
        self.roles.choose(rng).cloned().expect("vocabulary has role names")
    }

    fn ind<R: Rng>(&self, rng: &mut R) -> Term {
        Term::Ind(self.individuals.choose(rng).cloned().expect("vocabulary has individuals"))
    }

    /// An individual, or a variable with some probability when available.
    fn term<R: Rng>(&self, rng: &mut R) -> Term {
        if !self.variables.is_empty() && rng.gen_bool(0.3) {
            Term::Var(self.variables.choose(rng).cloned().unwrap())
        } else {
            self.ind(rng)
        }
    }
}

/// A random interpretation over `vocab` with between 1 and `max_size`
/// elements. Every individual is mapped; distinct names may share an
/// element unless `una` is set, which requires enough elements.
pub fn interpretation<R: Rng>(rng: &mut R, vocab: &Vocab, max_size: usize, una: bool) -> Interpretation {
    let min = if una { vocab.individuals.len().max(1) } else { 1 };
    let n = rng.gen_range(min..=max_size.max(min));
    let mut i = Interpretation::with_size(n).expect("non-empty domain");
    for a in &vocab.concepts {
        let mut ext = FixedBitSet::with_capacity(n);
        for e in 0..n {
            ext.set(e, rng.gen_bool(0.5));
        }
        i.set_concept(a, ext).expect("matching size");
    }
    for p in &vocab.roles {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.3)).collect();
        i.set_role(p, Relation::from_pairs(n, pairs)).expect("matching size");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (k, o) in vocab.individuals.iter().enumerate() {
        let e = if una { order[k] } else { rng.gen_range(0..n) };
        i.map_individual(o, e).expect("element exists");
    }
    i.set_una(una).expect("distinct elements");
    i
}

/// A role of the surface language: names, inverses of names, singletons,
/// unions, differences and range restrictions.
pub fn role<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> RoleExpr {
    let leaf = depth == 0 || rng.gen_bool(0.5);
    if leaf {
        return match rng.gen_range(0..4) {
            0 | 1 => RoleExpr::Name(vocab.role_name(rng)),
            2 => RoleExpr::inv(RoleExpr::Name(vocab.role_name(rng))),
            _ => RoleExpr::singleton(vocab.term(rng), vocab.term(rng)),
        };
    }
    match rng.gen_range(0..3) {
        0 => RoleExpr::union(role(rng, vocab, depth - 1), role(rng, vocab, depth - 1)),
        1 => RoleExpr::diff(role(rng, vocab, depth - 1), role(rng, vocab, depth - 1)),
        _ => RoleExpr::restrict(role(rng, vocab, depth - 1), concept(rng, vocab, depth - 1)),
    }
}

/// A concept using every constructor of the language.
pub fn concept<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> ConceptExpr {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..8) {
            0..=4 => ConceptExpr::Name(vocab.concept_name(rng)),
            5 => ConceptExpr::nominal(vocab.term(rng)),
            6 => ConceptExpr::Top,
            _ => ConceptExpr::Bottom,
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => ConceptExpr::and(concept(rng, vocab, d), concept(rng, vocab, d)),
        1 => ConceptExpr::or(concept(rng, vocab, d), concept(rng, vocab, d)),
        2 => ConceptExpr::not(concept(rng, vocab, d)),
        3 => ConceptExpr::exists(role(rng, vocab, d), concept(rng, vocab, d)),
        4 => ConceptExpr::forall(role(rng, vocab, d), concept(rng, vocab, d)),
        5 => ConceptExpr::at_least(rng.gen_range(0..=2), role(rng, vocab, d), concept(rng, vocab, d)),
        _ => ConceptExpr::at_most(rng.gen_range(0..=2), role(rng, vocab, d), concept(rng, vocab, d)),
    }
}

pub fn axiom<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> Axiom {
    match rng.gen_range(0..5) {
        0 | 1 => Axiom::concept_incl(concept(rng, vocab, depth), concept(rng, vocab, depth)),
        2 => Axiom::role_incl(role(rng, vocab, depth), role(rng, vocab, depth)),
        3 => Axiom::concept_assert(vocab.term(rng), concept(rng, vocab, depth)),
        _ => Axiom::role_assert(vocab.term(rng), vocab.term(rng), role(rng, vocab, depth)),
    }
}

/// A boolean combination of axioms.
pub fn formula<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        return axiom(rng, vocab, depth.min(2)).into();
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => Formula::and(formula(rng, vocab, d), formula(rng, vocab, d)),
        1 => Formula::or(formula(rng, vocab, d), formula(rng, vocab, d)),
        _ => Formula::neg(formula(rng, vocab, d)),
    }
}

/// A boolean combination of assertions, as used in guards.
fn guard<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> Formula {
    let atom = |rng: &mut R| -> Formula {
        if rng.gen_bool(0.6) {
            Axiom::concept_assert(vocab.term(rng), concept(rng, vocab, depth)).into()
        } else {
            Axiom::role_assert(vocab.term(rng), vocab.term(rng), role(rng, vocab, depth)).into()
        }
    };
    match rng.gen_range(0..4) {
        0 => Formula::and(atom(rng), atom(rng)),
        1 => Formula::neg(atom(rng)),
        _ => atom(rng),
    }
}

fn basic_step<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> Step {
    let add = rng.gen_bool(0.5);
    if rng.gen_bool(0.6) {
        let c = concept(rng, vocab, depth).into();
        let a = vocab.concept_name(rng);
        if add {
            Step::AddConcept(a, c)
        } else {
            Step::RemoveConcept(a, c)
        }
    } else {
        let r = role(rng, vocab, depth).into();
        let p = vocab.role_name(rng);
        if add {
            Step::AddRole(p, r)
        } else {
            Step::RemoveRole(p, r)
        }
    }
}

/// An action with up to `max_steps` top-level steps and at most
/// `max_conditionals` conditionals overall.
pub fn action<R: Rng>(rng: &mut R, vocab: &Vocab, max_steps: usize, max_conditionals: usize, depth: usize) -> Action {
    let mut budget = max_conditionals;
    action_rec(rng, vocab, max_steps, &mut budget, depth)
}

fn action_rec<R: Rng>(rng: &mut R, vocab: &Vocab, max_steps: usize, conds: &mut usize, depth: usize) -> Action {
    let len = rng.gen_range(0..=max_steps);
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        if *conds > 0 && rng.gen_bool(0.3) {
            *conds -= 1;
            let g = guard(rng, vocab, depth);
            let then = action_rec(rng, vocab, 2, conds, depth);
            let otherwise = action_rec(rng, vocab, 2, conds, depth);
            steps.push(Step::Conditional { guard: g, then, otherwise });
        } else {
            steps.push(basic_step(rng, vocab, depth));
        }
    }
    Action::new(steps)
}

fn basic_role<R: Rng>(rng: &mut R, vocab: &Vocab) -> RoleExpr {
    let p = RoleExpr::Name(vocab.role_name(rng));
    if rng.gen_bool(0.5) {
        RoleExpr::inv(p)
    } else {
        p
    }
}

fn basic_concept<R: Rng>(rng: &mut R, vocab: &Vocab) -> ConceptExpr {
    if vocab.roles.is_empty() || rng.gen_bool(0.6) {
        ConceptExpr::Name(vocab.concept_name(rng))
    } else {
        ConceptExpr::exists(basic_role(rng, vocab), ConceptExpr::Top)
    }
}

/// Roles allowed under unqualified existentials in the fragment.
fn bplus_role<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> RoleExpr {
    if depth == 0 || rng.gen_bool(0.6) {
        return match rng.gen_range(0..4) {
            0 => RoleExpr::singleton(vocab.term(rng), vocab.term(rng)),
            _ => basic_role(rng, vocab),
        };
    }
    if rng.gen_bool(0.5) {
        RoleExpr::union(bplus_role(rng, vocab, depth - 1), bplus_role(rng, vocab, depth - 1))
    } else {
        RoleExpr::diff(bplus_role(rng, vocab, depth - 1), bplus_role(rng, vocab, depth - 1))
    }
}

/// A concept of the fragment's assertion language.
pub fn bplus_concept<R: Rng>(rng: &mut R, vocab: &Vocab, depth: usize) -> ConceptExpr {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..10) {
            0..=5 => ConceptExpr::Name(vocab.concept_name(rng)),
            6 | 7 if !vocab.roles.is_empty() => ConceptExpr::exists(bplus_role(rng, vocab, 1), ConceptExpr::Top),
            8 => ConceptExpr::nominal(vocab.term(rng)),
            _ => ConceptExpr::Top,
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => ConceptExpr::and(bplus_concept(rng, vocab, d), bplus_concept(rng, vocab, d)),
        1 => ConceptExpr::or(bplus_concept(rng, vocab, d), bplus_concept(rng, vocab, d)),
        _ => ConceptExpr::not(bplus_concept(rng, vocab, d)),
    }
}

fn assertion_role<R: Rng>(rng: &mut R, vocab: &Vocab) -> RoleExpr {
    let r = bplus_role(rng, vocab, 1);
    if rng.gen_bool(0.2) {
        RoleExpr::restrict(r, bplus_concept(rng, vocab, 1))
    } else {
        r
    }
}

/// A conjunct of a fragment knowledge base: a restricted inclusion or an
/// assertion, the latter possibly negated.
pub fn dllite_axiom<R: Rng>(rng: &mut R, vocab: &Vocab) -> Formula {
    let roles = !vocab.roles.is_empty();
    match rng.gen_range(0..8) {
        0..=2 => {
            let rhs = basic_concept(rng, vocab);
            let rhs = if rng.gen_bool(0.4) { ConceptExpr::not(rhs) } else { rhs };
            Axiom::concept_incl(basic_concept(rng, vocab), rhs).into()
        }
        3 if roles => {
            let rhs = basic_role(rng, vocab);
            let rhs = if rng.gen_bool(0.3) { RoleExpr::complement(rhs) } else { rhs };
            Axiom::role_incl(basic_role(rng, vocab), rhs).into()
        }
        4 | 5 if roles => {
            let a: Formula = Axiom::role_assert(vocab.ind(rng), vocab.ind(rng), assertion_role(rng, vocab)).into();
            if rng.gen_bool(0.3) {
                Formula::neg(a)
            } else {
                a
            }
        }
        _ => {
            let a: Formula = Axiom::concept_assert(vocab.ind(rng), bplus_concept(rng, vocab, 2)).into();
            if rng.gen_bool(0.3) {
                Formula::neg(a)
            } else {
                a
            }
        }
    }
}

/// A fragment knowledge base with 1 to `max_axioms` conjuncts; pairs of
/// conjuncts are occasionally joined by a disjunction.
pub fn dllite_kb<R: Rng>(rng: &mut R, vocab: &Vocab, max_axioms: usize) -> Formula {
    let n = rng.gen_range(1..=max_axioms.max(1));
    let mut parts: Vec<Formula> = (0..n).map(|_| dllite_axiom(rng, vocab)).collect();
    if parts.len() >= 2 && rng.gen_bool(0.25) {
        let b = parts.pop().unwrap();
        let a = parts.pop().unwrap();
        parts.push(Formula::or(a, b));
    }
    Formula::conj(parts)
}

/// A simple action: `B+` payloads, role payloads without complement, and
/// guards built from such assertions.
pub fn simple_action<R: Rng>(rng: &mut R, vocab: &Vocab, max_steps: usize, max_conditionals: usize) -> Action {
    let mut conds = max_conditionals;
    simple_rec(rng, vocab, max_steps, &mut conds)
}

fn simple_rec<R: Rng>(rng: &mut R, vocab: &Vocab, max_steps: usize, conds: &mut usize) -> Action {
    let len = rng.gen_range(1..=max_steps.max(1));
    let mut steps = Vec::new();
    for _ in 0..len {
        let add = rng.gen_bool(0.5);
        let roll = rng.gen_range(0..10);
        if *conds > 0 && roll < 3 {
            *conds -= 1;
            let g: Formula = Axiom::concept_assert(vocab.term(rng), bplus_concept(rng, vocab, 1)).into();
            let g = if rng.gen_bool(0.3) { Formula::neg(g) } else { g };
            let then = simple_rec(rng, vocab, 1, conds);
            let otherwise = if rng.gen_bool(0.5) { Action::skip() } else { simple_rec(rng, vocab, 1, conds) };
            steps.push(Step::Conditional { guard: g, then, otherwise });
        } else if vocab.roles.is_empty() || roll < 7 {
            let c = bplus_concept(rng, vocab, 1).into();
            let a = vocab.concept_name(rng);
            steps.push(if add { Step::AddConcept(a, c) } else { Step::RemoveConcept(a, c) });
        } else {
            let r = if rng.gen_bool(0.5) {
                RoleExpr::singleton(vocab.term(rng), vocab.term(rng))
            } else {
                bplus_role(rng, vocab, 1)
            };
            let p = vocab.role_name(rng);
            steps.push(if add { Step::AddRole(p, r.into()) } else { Step::RemoveRole(p, r.into()) });
        }
    }
    Action::new(steps)
}

/// A graph on `n` vertices with each edge present with probability `p`.
pub fn graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> =
        (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
    Graph::new(n, edges).expect("edges within range")
}

/// A random matrix over the given variables.
pub fn matrix<R: Rng>(rng: &mut R, vars: &[Name], depth: usize) -> Matrix {
    if depth == 0 || rng.gen_bool(0.3) {
        let v = vars.choose(rng).cloned().expect("at least one variable");
        return Matrix::Lit { var: v, positive: rng.gen_bool(0.5) };
    }
    let (a, b) = (matrix(rng, vars, depth - 1), matrix(rng, vars, depth - 1));
    if rng.gen_bool(0.5) {
        Matrix::and(a, b)
    } else {
        Matrix::or(a, b)
    }
}

/// A random formula with `n` existential and `m` universal variables.
pub fn qbf<R: Rng>(rng: &mut R, n: usize, m: usize, depth: usize) -> Qbf2 {
    let exists: Vec<Name> = (1..=n).map(|i| name(format!("p{i}"))).collect();
    let forall: Vec<Name> = (1..=m).map(|i| name(format!("q{i}"))).collect();
    let all: Vec<Name> = exists.iter().chain(&forall).cloned().collect();
    let m = matrix(rng, &all, depth);
    Qbf2::new(exists, forall, m).expect("well formed")
}

/// Every interpretation with domain `d0..d{n-1}` over the given names;
/// individuals range over all elements independently (no unique names).
/// Panics when there are more than 2^28 of them.
pub fn all_interpretations<'a>(
    n: usize,
    concepts: &'a [Name],
    roles: &'a [Name],
    individuals: &'a [Name],
) -> impl Iterator<Item = Interpretation> + 'a {
    let cbits = concepts.len() * n;
    let bits = cbits + roles.len() * n * n;
    let ind_choices = n.pow(individuals.len() as u32);
    assert!(bits <= 28 && (ind_choices as u64) << bits <= 1 << 28, "enumeration too large");
    (0u64..1 << bits).flat_map(move |mask| {
        (0..ind_choices).map(move |mut ind| {
            let mut i = Interpretation::with_size(n).expect("non-empty domain");
            for (ci, a) in concepts.iter().enumerate() {
                let mut ext = FixedBitSet::with_capacity(n);
                for e in 0..n {
                    ext.set(e, mask >> (ci * n + e) & 1 == 1);
                }
                i.set_concept(a, ext).expect("matching size");
            }
            for (ri, p) in roles.iter().enumerate() {
                let base = cbits + ri * n * n;
                let pairs = (0..n * n).filter(|k| mask >> (base + k) & 1 == 1).map(|k| (k / n, k % n));
                i.set_role(p, Relation::from_pairs(n, pairs)).expect("matching size");
            }
            for o in individuals {
                i.map_individual(o, ind % n).expect("element exists");
                ind /= n;
            }
            i
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{is_dllite_formula, is_simple_action};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fragment_generators_stay_in_the_fragment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = Vocab::small(3, 2, 3).with_variables(&["x"]);
        let ground = Vocab::small(3, 2, 3);
        for _ in 0..300 {
            let k = dllite_kb(&mut rng, &ground, 6);
            assert!(is_dllite_formula(&k).is_ok(), "{k}");
            let a = simple_action(&mut rng, &v, 3, 2);
            assert!(is_simple_action(&a).is_ok(), "{a}");
        }
    }

    #[test]
    fn exhaustive_enumeration_counts() {
        let c = [name("A")];
        let r = [name("p")];
        let o = [name("a"), name("b")];
        assert_eq!(all_interpretations(2, &c, &r, &o).count(), 4 * 16 * 4);
        let distinct: std::collections::HashSet<String> =
            all_interpretations(2, &c, &[], &o).map(|i| i.to_string()).collect();
        assert_eq!(distinct.len(), 16);
    }

    #[test]
    fn interpretations_respect_una() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = Vocab::small(2, 1, 3);
        for _ in 0..50 {
            let i = interpretation(&mut rng, &v, 4, true);
            assert!(i.size() >= 3 && i.size() <= 4);
            assert!(i.una());
        }
    }
}
