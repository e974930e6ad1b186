//! Substitutions, term renaming and fresh-name generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{name, Action, Axiom, ConceptExpr, Formula, Name, RoleExpr, Step, Term, TermMap};

/// Prefix of generated names. The parser rejects user names of the form
/// `_f<digit>...` so generated names never collide with input names.
pub const RESERVED_PREFIX: &str = "_f";

/// Maps variables to individual names. Variables outside the map are left
/// in place.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(pub BTreeMap<Name, Name>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        Substitution(pairs.into_iter().map(|(a, b)| (name(a), name(b))).collect())
    }

    pub fn insert(&mut self, var: Name, ind: Name) {
        self.0.insert(var, ind);
    }

    pub fn get(&self, var: &str) -> Option<&Name> {
        self.0.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn term_map(&self) -> TermMap {
        self.0.iter().map(|(v, o)| (v.clone(), Term::Ind(o.clone()))).collect()
    }

    pub fn apply_formula(&self, f: &Formula) -> Formula {
        rename_formula(f, &self.term_map())
    }

    pub fn apply_action(&self, a: &Action) -> Action {
        rename_action(a, &self.term_map())
    }

    pub fn apply_concept(&self, c: &ConceptExpr) -> ConceptExpr {
        rename_concept(c, &self.term_map())
    }

    pub fn apply_role(&self, r: &RoleExpr) -> RoleExpr {
        rename_role(r, &self.term_map())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, o)| format!("?{v}={o}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Generates `_f0`, `_f1`, ... skipping any name in the avoid set.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    next: usize,
    avoid: BTreeSet<Name>,
}

impl FreshNames {
    pub fn new(avoid: impl IntoIterator<Item = Name>) -> Self {
        FreshNames { next: 0, avoid: avoid.into_iter().collect() }
    }

    pub fn avoid(&mut self, n: Name) {
        self.avoid.insert(n);
    }

    pub fn next_name(&mut self) -> Name {
        loop {
            let candidate = name(format!("{RESERVED_PREFIX}{}", self.next));
            self.next += 1;
            if !self.avoid.contains(&candidate) {
                self.avoid.insert(candidate.clone());
                return candidate;
            }
        }
    }
}

/// Replaces every variable of `alpha` with a distinct fresh individual
/// name occurring neither in `alpha` nor in `avoid`.
pub fn canonical_grounding(alpha: &Action, avoid: &BTreeSet<Name>) -> (Action, Substitution) {
    let sig = alpha.signature();
    let mut fresh = FreshNames::new(avoid.iter().cloned().chain(sig.all_names()));
    let mut sigma = Substitution::new();
    for v in &sig.variables {
        sigma.insert(v.clone(), fresh.next_name());
    }
    (sigma.apply_action(alpha), sigma)
}

fn rename_term(t: &Term, m: &TermMap) -> Term {
    match t {
        Term::Var(v) => m.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Ind(_) => t.clone(),
    }
}

fn rc(c: &Arc<ConceptExpr>, m: &TermMap) -> Arc<ConceptExpr> {
    Arc::new(rename_concept(c, m))
}

fn rr(r: &Arc<RoleExpr>, m: &TermMap) -> Arc<RoleExpr> {
    Arc::new(rename_role(r, m))
}

/// Replaces variables according to `m`, which may map them to individuals
/// or to other variables.
pub(crate) fn rename_concept(c: &ConceptExpr, m: &TermMap) -> ConceptExpr {
    match c {
        ConceptExpr::Name(_) | ConceptExpr::Top | ConceptExpr::Bottom => c.clone(),
        ConceptExpr::Nominal(t) => ConceptExpr::Nominal(rename_term(t, m)),
        ConceptExpr::And(a, b) => ConceptExpr::And(rc(a, m), rc(b, m)),
        ConceptExpr::Or(a, b) => ConceptExpr::Or(rc(a, m), rc(b, m)),
        ConceptExpr::Not(a) => ConceptExpr::Not(rc(a, m)),
        ConceptExpr::Exists(r, d) => ConceptExpr::Exists(rr(r, m), rc(d, m)),
        ConceptExpr::Forall(r, d) => ConceptExpr::Forall(rr(r, m), rc(d, m)),
        ConceptExpr::AtMost(n, r, d) => ConceptExpr::AtMost(*n, rr(r, m), rc(d, m)),
        ConceptExpr::AtLeast(n, r, d) => ConceptExpr::AtLeast(*n, rr(r, m), rc(d, m)),
    }
}

pub(crate) fn rename_role(r: &RoleExpr, m: &TermMap) -> RoleExpr {
    match r {
        RoleExpr::Name(_) => r.clone(),
        RoleExpr::Singleton(a, b) => RoleExpr::Singleton(rename_term(a, m), rename_term(b, m)),
        RoleExpr::Inverse(a) => RoleExpr::Inverse(rr(a, m)),
        RoleExpr::Complement(a) => RoleExpr::Complement(rr(a, m)),
        RoleExpr::Union(a, b) => RoleExpr::Union(rr(a, m), rr(b, m)),
        RoleExpr::Difference(a, b) => RoleExpr::Difference(rr(a, m), rr(b, m)),
        RoleExpr::RangeRestrict(a, c) => RoleExpr::RangeRestrict(rr(a, m), rc(c, m)),
        RoleExpr::DomainRestrict(c, a) => RoleExpr::DomainRestrict(rc(c, m), rr(a, m)),
    }
}

pub(crate) fn rename_axiom(a: &Axiom, m: &TermMap) -> Axiom {
    match a {
        Axiom::ConceptInclusion(c, d) => Axiom::ConceptInclusion(rc(c, m), rc(d, m)),
        Axiom::RoleInclusion(r, s) => Axiom::RoleInclusion(rr(r, m), rr(s, m)),
        Axiom::ConceptAssertion(t, c) => Axiom::ConceptAssertion(rename_term(t, m), rc(c, m)),
        Axiom::RoleAssertion(t, u, r) => Axiom::RoleAssertion(rename_term(t, m), rename_term(u, m), rr(r, m)),
    }
}

pub(crate) fn rename_formula(f: &Formula, m: &TermMap) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(Arc::new(rename_axiom(a, m))),
        Formula::And(a, b) => Formula::and(rename_formula(a, m), rename_formula(b, m)),
        Formula::Or(a, b) => Formula::or(rename_formula(a, m), rename_formula(b, m)),
        Formula::Neg(a) => Formula::neg(rename_formula(a, m)),
    }
}

pub(crate) fn rename_action(a: &Action, m: &TermMap) -> Action {
    Action::new(
        a.steps
            .iter()
            .map(|s| match s {
                Step::AddConcept(n, c) => Step::AddConcept(n.clone(), rc(c, m)),
                Step::RemoveConcept(n, c) => Step::RemoveConcept(n.clone(), rc(c, m)),
                Step::AddRole(n, r) => Step::AddRole(n.clone(), rr(r, m)),
                Step::RemoveRole(n, r) => Step::RemoveRole(n.clone(), rr(r, m)),
                Step::Conditional { guard, then, otherwise } => Step::Conditional {
                    guard: rename_formula(guard, m),
                    then: rename_action(then, m),
                    otherwise: rename_action(otherwise, m),
                },
            })
            .collect(),
    )
}

impl Formula {
    /// Renames terms: each variable in `m` is replaced by its image, which
    /// may itself be a variable.
    pub fn rename_terms(&self, m: &BTreeMap<Name, Term>) -> Formula {
        rename_formula(self, m)
    }
}

impl Action {
    pub fn rename_terms(&self, m: &BTreeMap<Name, Term>) -> Action {
        rename_action(self, m)
    }
}
