//! Abstract syntax of concepts, roles, formulae and actions.
//!
//! Every tree node keeps its children behind an [`Arc`], so cloning a
//! formula is cheap and rewriting passes (substitution, regression) share
//! every subterm they leave untouched. Structural equality and hashing are
//! derived, so two independently built trees compare equal when they have
//! the same shape.

mod fragment;
pub(crate) mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use fragment::{is_dllite_formula, is_simple_action, is_bplus_concept, FragmentReport};
pub use parse::{
    parse_action, parse_action_set, parse_action_set_with, parse_action_with, parse_formula, parse_formula_with,
    NamedAction, ParseError, ParseOptions,
};
pub use subst::{canonical_grounding, FreshNames, Substitution, RESERVED_PREFIX};

/// Identifier used for concept, role, individual and variable names.
pub type Name = Arc<str>;

/// Builds a [`Name`] from any string-like value.
pub fn name(s: impl AsRef<str>) -> Name {
    Arc::from(s.as_ref())
}

/// An individual name or a variable. Variables print with a `?` sigil.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Ind(Name),
    Var(Name),
}

impl Term {
    pub fn ind(s: impl AsRef<str>) -> Self {
        Term::Ind(name(s))
    }

    pub fn var(s: impl AsRef<str>) -> Self {
        Term::Var(name(s))
    }

    pub fn as_ind(&self) -> Option<&Name> {
        match self {
            Term::Ind(n) => Some(n),
            Term::Var(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RoleExpr {
    Name(Name),
    /// Surface syntax only admits the inverse of a role name; regression may
    /// build inverses of arbitrary roles.
    Inverse(Arc<RoleExpr>),
    Singleton(Term, Term),
    Union(Arc<RoleExpr>, Arc<RoleExpr>),
    Difference(Arc<RoleExpr>, Arc<RoleExpr>),
    /// Complement relative to the full relation. Needed for negative role
    /// inclusions `r1 <= not r2`.
    Complement(Arc<RoleExpr>),
    /// `r | C`: pairs of `r` whose second component is in `C`.
    RangeRestrict(Arc<RoleExpr>, Arc<ConceptExpr>),
    /// Pairs of `r` whose first component is in `C`. Internal only.
    DomainRestrict(Arc<ConceptExpr>, Arc<RoleExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Name(Name),
    Nominal(Term),
    Top,
    Bottom,
    And(Arc<ConceptExpr>, Arc<ConceptExpr>),
    Or(Arc<ConceptExpr>, Arc<ConceptExpr>),
    Not(Arc<ConceptExpr>),
    Exists(Arc<RoleExpr>, Arc<ConceptExpr>),
    Forall(Arc<RoleExpr>, Arc<ConceptExpr>),
    AtMost(u32, Arc<RoleExpr>, Arc<ConceptExpr>),
    AtLeast(u32, Arc<RoleExpr>, Arc<ConceptExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    ConceptInclusion(Arc<ConceptExpr>, Arc<ConceptExpr>),
    RoleInclusion(Arc<RoleExpr>, Arc<RoleExpr>),
    ConceptAssertion(Term, Arc<ConceptExpr>),
    RoleAssertion(Term, Term, Arc<RoleExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Arc<Axiom>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Neg(Arc<Formula>),
}

/// A complex action: a sequence of steps. The empty sequence is `skip`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Action {
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    AddConcept(Name, Arc<ConceptExpr>),
    RemoveConcept(Name, Arc<ConceptExpr>),
    AddRole(Name, Arc<RoleExpr>),
    RemoveRole(Name, Arc<RoleExpr>),
    Conditional {
        guard: Formula,
        then: Action,
        otherwise: Action,
    },
}

impl RoleExpr {
    pub fn name(s: impl AsRef<str>) -> Self {
        RoleExpr::Name(name(s))
    }

    pub fn inv(r: impl Into<Arc<RoleExpr>>) -> Self {
        RoleExpr::Inverse(r.into())
    }

    pub fn singleton(a: Term, b: Term) -> Self {
        RoleExpr::Singleton(a, b)
    }

    pub fn union(a: impl Into<Arc<RoleExpr>>, b: impl Into<Arc<RoleExpr>>) -> Self {
        RoleExpr::Union(a.into(), b.into())
    }

    pub fn diff(a: impl Into<Arc<RoleExpr>>, b: impl Into<Arc<RoleExpr>>) -> Self {
        RoleExpr::Difference(a.into(), b.into())
    }

    pub fn complement(r: impl Into<Arc<RoleExpr>>) -> Self {
        RoleExpr::Complement(r.into())
    }

    pub fn restrict(r: impl Into<Arc<RoleExpr>>, c: impl Into<Arc<ConceptExpr>>) -> Self {
        RoleExpr::RangeRestrict(r.into(), c.into())
    }

    /// Converse relation, with inverses pushed to the leaves:
    /// `inv(r | C)` becomes a domain restriction of `inv r`, and so on.
    pub fn inverse(&self) -> RoleExpr {
        match self {
            RoleExpr::Name(_) => RoleExpr::Inverse(Arc::new(self.clone())),
            RoleExpr::Inverse(r) => (**r).clone(),
            RoleExpr::Singleton(a, b) => RoleExpr::Singleton(b.clone(), a.clone()),
            RoleExpr::Union(a, b) => RoleExpr::union(a.inverse(), b.inverse()),
            RoleExpr::Difference(a, b) => RoleExpr::diff(a.inverse(), b.inverse()),
            RoleExpr::Complement(r) => RoleExpr::complement(r.inverse()),
            RoleExpr::RangeRestrict(r, c) => RoleExpr::DomainRestrict(c.clone(), Arc::new(r.inverse())),
            RoleExpr::DomainRestrict(c, r) => RoleExpr::RangeRestrict(Arc::new(r.inverse()), c.clone()),
        }
    }

    /// Role name, possibly inverted: `p` or `inv p`.
    pub fn as_basic(&self) -> Option<(&Name, bool)> {
        match self {
            RoleExpr::Name(p) => Some((p, false)),
            RoleExpr::Inverse(r) => match &**r {
                RoleExpr::Name(p) => Some((p, true)),
                _ => None,
            },
            _ => None,
        }
    }
}

impl ConceptExpr {
    pub fn name(s: impl AsRef<str>) -> Self {
        ConceptExpr::Name(name(s))
    }

    pub fn nominal(t: Term) -> Self {
        ConceptExpr::Nominal(t)
    }

    pub fn and(a: impl Into<Arc<ConceptExpr>>, b: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::And(a.into(), b.into())
    }

    pub fn or(a: impl Into<Arc<ConceptExpr>>, b: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::Or(a.into(), b.into())
    }

    pub fn not(a: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::Not(a.into())
    }

    pub fn exists(r: impl Into<Arc<RoleExpr>>, c: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::Exists(r.into(), c.into())
    }

    pub fn forall(r: impl Into<Arc<RoleExpr>>, c: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::Forall(r.into(), c.into())
    }

    pub fn at_least(n: u32, r: impl Into<Arc<RoleExpr>>, c: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::AtLeast(n, r.into(), c.into())
    }

    pub fn at_most(n: u32, r: impl Into<Arc<RoleExpr>>, c: impl Into<Arc<ConceptExpr>>) -> Self {
        ConceptExpr::AtMost(n, r.into(), c.into())
    }
}

impl Axiom {
    pub fn concept_incl(a: impl Into<Arc<ConceptExpr>>, b: impl Into<Arc<ConceptExpr>>) -> Self {
        Axiom::ConceptInclusion(a.into(), b.into())
    }

    pub fn role_incl(a: impl Into<Arc<RoleExpr>>, b: impl Into<Arc<RoleExpr>>) -> Self {
        Axiom::RoleInclusion(a.into(), b.into())
    }

    pub fn concept_assert(t: Term, c: impl Into<Arc<ConceptExpr>>) -> Self {
        Axiom::ConceptAssertion(t, c.into())
    }

    pub fn role_assert(a: Term, b: Term, r: impl Into<Arc<RoleExpr>>) -> Self {
        Axiom::RoleAssertion(a, b, r.into())
    }

    pub fn is_inclusion(&self) -> bool {
        matches!(self, Axiom::ConceptInclusion(..) | Axiom::RoleInclusion(..))
    }

    pub fn is_assertion(&self) -> bool {
        !self.is_inclusion()
    }
}

impl From<Axiom> for Formula {
    fn from(a: Axiom) -> Self {
        Formula::Atom(Arc::new(a))
    }
}

impl Formula {
    pub fn atom(a: Axiom) -> Self {
        a.into()
    }

    pub fn and(a: impl Into<Arc<Formula>>, b: impl Into<Arc<Formula>>) -> Self {
        Formula::And(a.into(), b.into())
    }

    pub fn or(a: impl Into<Arc<Formula>>, b: impl Into<Arc<Formula>>) -> Self {
        Formula::Or(a.into(), b.into())
    }

    pub fn neg(a: impl Into<Arc<Formula>>) -> Self {
        Formula::Neg(a.into())
    }

    /// The tautology `Top <= Top`.
    pub fn top() -> Self {
        Axiom::concept_incl(ConceptExpr::Top, ConceptExpr::Top).into()
    }

    /// Left-nested conjunction; the empty conjunction is [`Formula::top`].
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `None` for an empty input.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Option<Self> {
        items.into_iter().reduce(Formula::or)
    }

    /// A formula without variables is a knowledge base.
    pub fn is_kb(&self) -> bool {
        self.signature().variables.is_empty()
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::default();
        s.add_formula(self);
        s
    }

    /// Flattens top-level conjunctions into their conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                _ => out.push(f),
            }
        }
        out
    }

    /// Pushes formula-level negation down to the atoms. Concept-level
    /// negation is left alone.
    pub fn nnf(&self) -> Formula {
        fn go(f: &Formula, negated: bool) -> Formula {
            match (f, negated) {
                (Formula::Atom(_), false) => f.clone(),
                (Formula::Atom(_), true) => Formula::neg(f.clone()),
                (Formula::Neg(g), n) => go(g, !n),
                (Formula::And(a, b), false) => Formula::and(go(a, false), go(b, false)),
                (Formula::And(a, b), true) => Formula::or(go(a, true), go(b, true)),
                (Formula::Or(a, b), false) => Formula::or(go(a, false), go(b, false)),
                (Formula::Or(a, b), true) => Formula::and(go(a, true), go(b, true)),
            }
        }
        go(self, false)
    }

    /// Number of distinct nodes, counting shared subterms once.
    pub fn dag_size(&self) -> usize {
        let mut seen = DagCounter::default();
        seen.formula(self);
        seen.count
    }

    /// Number of nodes when the formula is written out as a tree.
    pub fn tree_size(&self) -> usize {
        match self {
            Formula::Atom(a) => 1 + axiom_tree_size(a),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.tree_size() + b.tree_size(),
            Formula::Neg(a) => 1 + a.tree_size(),
        }
    }
}

fn axiom_tree_size(a: &Axiom) -> usize {
    match a {
        Axiom::ConceptInclusion(c, d) => c.tree_size() + d.tree_size(),
        Axiom::RoleInclusion(r, s) => r.tree_size() + s.tree_size(),
        Axiom::ConceptAssertion(_, c) => 1 + c.tree_size(),
        Axiom::RoleAssertion(_, _, r) => 2 + r.tree_size(),
    }
}

impl ConceptExpr {
    pub fn tree_size(&self) -> usize {
        match self {
            ConceptExpr::Name(_) | ConceptExpr::Nominal(_) | ConceptExpr::Top | ConceptExpr::Bottom => 1,
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => 1 + a.tree_size() + b.tree_size(),
            ConceptExpr::Not(a) => 1 + a.tree_size(),
            ConceptExpr::Exists(r, c)
            | ConceptExpr::Forall(r, c)
            | ConceptExpr::AtMost(_, r, c)
            | ConceptExpr::AtLeast(_, r, c) => 1 + r.tree_size() + c.tree_size(),
        }
    }
}

impl RoleExpr {
    pub fn tree_size(&self) -> usize {
        match self {
            RoleExpr::Name(_) | RoleExpr::Singleton(..) => 1,
            RoleExpr::Inverse(r) | RoleExpr::Complement(r) => 1 + r.tree_size(),
            RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => 1 + a.tree_size() + b.tree_size(),
            RoleExpr::RangeRestrict(r, c) | RoleExpr::DomainRestrict(c, r) => {
                1 + r.tree_size() + c.tree_size()
            }
        }
    }
}

#[derive(Default)]
struct DagCounter {
    seen: std::collections::HashSet<usize>,
    count: usize,
}

impl DagCounter {
    fn fresh<T>(&mut self, p: &Arc<T>) -> bool {
        self.seen.insert(Arc::as_ptr(p) as *const () as usize)
    }

    fn formula(&mut self, f: &Formula) {
        self.count += 1;
        match f {
            Formula::Atom(a) => {
                if self.fresh(a) {
                    self.axiom(a)
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                for x in [a, b] {
                    if self.fresh(x) {
                        self.formula(x)
                    }
                }
            }
            Formula::Neg(a) => {
                if self.fresh(a) {
                    self.formula(a)
                }
            }
        }
    }

    fn axiom(&mut self, a: &Axiom) {
        match a {
            Axiom::ConceptInclusion(c, d) => {
                self.concept(c);
                self.concept(d);
            }
            Axiom::RoleInclusion(r, s) => {
                self.role(r);
                self.role(s);
            }
            Axiom::ConceptAssertion(_, c) => self.concept(c),
            Axiom::RoleAssertion(_, _, r) => self.role(r),
        }
    }

    fn concept(&mut self, c: &Arc<ConceptExpr>) {
        if !self.fresh(c) {
            return;
        }
        self.count += 1;
        match &**c {
            ConceptExpr::Name(_) | ConceptExpr::Nominal(_) | ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                self.concept(a);
                self.concept(b);
            }
            ConceptExpr::Not(a) => self.concept(a),
            ConceptExpr::Exists(r, d)
            | ConceptExpr::Forall(r, d)
            | ConceptExpr::AtMost(_, r, d)
            | ConceptExpr::AtLeast(_, r, d) => {
                self.role(r);
                self.concept(d);
            }
        }
    }

    fn role(&mut self, r: &Arc<RoleExpr>) {
        if !self.fresh(r) {
            return;
        }
        self.count += 1;
        match &**r {
            RoleExpr::Name(_) | RoleExpr::Singleton(..) => {}
            RoleExpr::Inverse(a) | RoleExpr::Complement(a) => self.role(a),
            RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => {
                self.role(a);
                self.role(b);
            }
            RoleExpr::RangeRestrict(a, c) | RoleExpr::DomainRestrict(c, a) => {
                self.role(a);
                self.concept(c);
            }
        }
    }
}

impl Action {
    pub fn skip() -> Self {
        Action::default()
    }

    pub fn new(steps: Vec<Step>) -> Self {
        Action { steps }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sequential composition `self · other`.
    pub fn then(&self, other: &Action) -> Action {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Action { steps }
    }

    pub fn is_ground(&self) -> bool {
        self.signature().variables.is_empty()
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::default();
        s.add_action(self);
        s
    }

    /// Number of basic steps and guards, counted recursively.
    pub fn size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Conditional { guard, then, otherwise } => {
                    1 + guard.tree_size() + then.size() + otherwise.size()
                }
                Step::AddConcept(_, c) | Step::RemoveConcept(_, c) => 1 + c.tree_size(),
                Step::AddRole(_, r) | Step::RemoveRole(_, r) => 1 + r.tree_size(),
            })
            .sum()
    }

    /// True if no basic update occurs anywhere, including inside branches.
    pub fn is_effect_free(&self) -> bool {
        self.steps.iter().all(|s| match s {
            Step::Conditional { then, otherwise, .. } => then.is_effect_free() && otherwise.is_effect_free(),
            _ => false,
        })
    }

    /// Number of conditionals, counted recursively.
    pub fn conditional_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Conditional { then, otherwise, .. } => 1 + then.conditional_count() + otherwise.conditional_count(),
                _ => 0,
            })
            .sum()
    }
}

/// Names occurring in a formula or action.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Name>,
    pub roles: BTreeSet<Name>,
    pub individuals: BTreeSet<Name>,
    pub variables: BTreeSet<Name>,
    /// Largest `n` in a counting restriction.
    pub max_count: u32,
}

impl Signature {
    pub fn merge(&mut self, other: &Signature) {
        self.concepts.extend(other.concepts.iter().cloned());
        self.roles.extend(other.roles.iter().cloned());
        self.individuals.extend(other.individuals.iter().cloned());
        self.variables.extend(other.variables.iter().cloned());
        self.max_count = self.max_count.max(other.max_count);
    }

    /// Every individual and variable name, for freshness checks.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for set in [&self.concepts, &self.roles, &self.individuals, &self.variables] {
            out.extend(set.iter().cloned());
        }
        out
    }

    pub fn add_term(&mut self, t: &Term) {
        match t {
            Term::Ind(n) => self.individuals.insert(n.clone()),
            Term::Var(n) => self.variables.insert(n.clone()),
        };
    }

    pub fn add_concept(&mut self, c: &ConceptExpr) {
        match c {
            ConceptExpr::Name(n) => {
                self.concepts.insert(n.clone());
            }
            ConceptExpr::Nominal(t) => self.add_term(t),
            ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                self.add_concept(a);
                self.add_concept(b);
            }
            ConceptExpr::Not(a) => self.add_concept(a),
            ConceptExpr::Exists(r, d) | ConceptExpr::Forall(r, d) => {
                self.add_role(r);
                self.add_concept(d);
            }
            ConceptExpr::AtMost(n, r, d) | ConceptExpr::AtLeast(n, r, d) => {
                self.max_count = self.max_count.max(*n);
                self.add_role(r);
                self.add_concept(d);
            }
        }
    }

    pub fn add_role(&mut self, r: &RoleExpr) {
        match r {
            RoleExpr::Name(n) => {
                self.roles.insert(n.clone());
            }
            RoleExpr::Singleton(a, b) => {
                self.add_term(a);
                self.add_term(b);
            }
            RoleExpr::Inverse(a) | RoleExpr::Complement(a) => self.add_role(a),
            RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => {
                self.add_role(a);
                self.add_role(b);
            }
            RoleExpr::RangeRestrict(a, c) | RoleExpr::DomainRestrict(c, a) => {
                self.add_role(a);
                self.add_concept(c);
            }
        }
    }

    pub fn add_axiom(&mut self, a: &Axiom) {
        match a {
            Axiom::ConceptInclusion(c, d) => {
                self.add_concept(c);
                self.add_concept(d);
            }
            Axiom::RoleInclusion(r, s) => {
                self.add_role(r);
                self.add_role(s);
            }
            Axiom::ConceptAssertion(t, c) => {
                self.add_term(t);
                self.add_concept(c);
            }
            Axiom::RoleAssertion(t, u, r) => {
                self.add_term(t);
                self.add_term(u);
                self.add_role(r);
            }
        }
    }

    pub fn add_formula(&mut self, f: &Formula) {
        match f {
            Formula::Atom(a) => self.add_axiom(a),
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.add_formula(a);
                self.add_formula(b);
            }
            Formula::Neg(a) => self.add_formula(a),
        }
    }

    pub fn add_action(&mut self, act: &Action) {
        for s in &act.steps {
            match s {
                Step::AddConcept(a, c) | Step::RemoveConcept(a, c) => {
                    self.concepts.insert(a.clone());
                    self.add_concept(c);
                }
                Step::AddRole(p, r) | Step::RemoveRole(p, r) => {
                    self.roles.insert(p.clone());
                    self.add_role(r);
                }
                Step::Conditional { guard, then, otherwise } => {
                    self.add_formula(guard);
                    self.add_action(then);
                    self.add_action(otherwise);
                }
            }
        }
    }
}

/// Free variables of a formula, sorted by name.
pub fn free_variables_formula(f: &Formula) -> Vec<Name> {
    f.signature().variables.into_iter().collect()
}

/// Free variables of an action, sorted by name.
pub fn free_variables_action(a: &Action) -> Vec<Name> {
    a.signature().variables.into_iter().collect()
}

/// Partial map used when instantiating variables with arbitrary terms.
pub(crate) type TermMap = BTreeMap<Name, Term>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_pushes_to_leaves() {
        let r = RoleExpr::restrict(
            RoleExpr::diff(RoleExpr::name("p"), RoleExpr::singleton(Term::ind("a"), Term::ind("b"))),
            ConceptExpr::name("C"),
        );
        let inv = r.inverse();
        assert_eq!(
            inv,
            RoleExpr::DomainRestrict(
                Arc::new(ConceptExpr::name("C")),
                Arc::new(RoleExpr::diff(
                    RoleExpr::inv(RoleExpr::name("p")),
                    RoleExpr::singleton(Term::ind("b"), Term::ind("a"))
                ))
            )
        );
        assert_eq!(inv.inverse(), r);
    }

    #[test]
    fn nnf_moves_negation_to_atoms() {
        let a: Formula = Axiom::concept_assert(Term::ind("o"), ConceptExpr::name("A")).into();
        let b: Formula = Axiom::concept_incl(ConceptExpr::name("A"), ConceptExpr::name("B")).into();
        let f = Formula::neg(Formula::and(a.clone(), Formula::neg(b.clone())));
        assert_eq!(f.nnf(), Formula::or(Formula::neg(a), b));
    }

    #[test]
    fn effect_free_detection() {
        let guard: Formula = Axiom::concept_assert(Term::ind("o"), ConceptExpr::name("A")).into();
        let cond = Action::new(vec![Step::Conditional {
            guard,
            then: Action::skip(),
            otherwise: Action::skip(),
        }]);
        assert!(cond.is_effect_free());
        assert!(Action::skip().is_effect_free());
        let upd = Action::new(vec![Step::AddConcept(name("A"), Arc::new(ConceptExpr::Top))]);
        assert!(!upd.is_effect_free());
    }
}
