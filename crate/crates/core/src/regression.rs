//! Regression of knowledge bases through actions.
//!
//! `tr(α, K)` holds in an interpretation exactly when `K` holds after
//! executing `α` there. Basic steps become symbol substitutions
//! (`A ← A or C`, `A ← A and not C`, `p ← p + r`, `p ← p - r`), applied
//! after regressing the rest of the action; conditionals split into two
//! guarded cases. The branch forms enumerate one guarded case per path
//! through the conditionals, so each member stays small even when the full
//! formula would not.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{Action, Axiom, ConceptExpr, Formula, FreshNames, Name, RoleExpr, Step, Term};

/// Default limit on the estimated node count of a fully expanded
/// regression.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Replacement for a concept or role name.
#[derive(Clone, Debug)]
pub enum Replacement {
    Concept(Name, Arc<ConceptExpr>),
    Role(Name, Arc<RoleExpr>),
}

/// Replaces every occurrence of one name in a single pass. Occurrences
/// inside the replacement are not revisited. Untouched subterms are shared
/// with the input.
struct Substituter {
    rep: Replacement,
    inverse: Option<Arc<RoleExpr>>,
    formulas: HashMap<usize, Arc<Formula>>,
    axioms: HashMap<usize, Arc<Axiom>>,
    concepts: HashMap<usize, Arc<ConceptExpr>>,
    roles: HashMap<usize, Arc<RoleExpr>>,
}

fn key<T>(x: &T) -> usize {
    x as *const T as usize
}

impl Substituter {
    fn new(rep: Replacement) -> Self {
        Substituter {
            rep,
            inverse: None,
            formulas: HashMap::new(),
            axioms: HashMap::new(),
            concepts: HashMap::new(),
            roles: HashMap::new(),
        }
    }

    fn formula_arc(&mut self, f: &Arc<Formula>) -> Arc<Formula> {
        if let Some(v) = self.formulas.get(&key(&**f)) {
            return v.clone();
        }
        let out = match self.formula(f) {
            Some(g) => Arc::new(g),
            None => f.clone(),
        };
        self.formulas.insert(key(&**f), out.clone());
        out
    }

    /// `None` when nothing changed.
    fn formula(&mut self, f: &Formula) -> Option<Formula> {
        match f {
            Formula::Atom(a) => {
                let b = self.axiom_arc(a);
                (!Arc::ptr_eq(a, &b)).then_some(Formula::Atom(b))
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (x, y) = (self.formula_arc(a), self.formula_arc(b));
                if Arc::ptr_eq(a, &x) && Arc::ptr_eq(b, &y) {
                    return None;
                }
                Some(if matches!(f, Formula::And(..)) { Formula::And(x, y) } else { Formula::Or(x, y) })
            }
            Formula::Neg(a) => {
                let x = self.formula_arc(a);
                (!Arc::ptr_eq(a, &x)).then_some(Formula::Neg(x))
            }
        }
    }

    fn axiom_arc(&mut self, a: &Arc<Axiom>) -> Arc<Axiom> {
        if let Some(v) = self.axioms.get(&key(&**a)) {
            return v.clone();
        }
        let out = match &**a {
            Axiom::ConceptInclusion(c, d) => {
                let (x, y) = (self.concept(c), self.concept(d));
                if Arc::ptr_eq(c, &x) && Arc::ptr_eq(d, &y) {
                    a.clone()
                } else {
                    Arc::new(Axiom::ConceptInclusion(x, y))
                }
            }
            Axiom::RoleInclusion(r, s) => {
                let (x, y) = (self.role(r), self.role(s));
                if Arc::ptr_eq(r, &x) && Arc::ptr_eq(s, &y) {
                    a.clone()
                } else {
                    Arc::new(Axiom::RoleInclusion(x, y))
                }
            }
            Axiom::ConceptAssertion(t, c) => {
                let x = self.concept(c);
                if Arc::ptr_eq(c, &x) {
                    a.clone()
                } else {
                    Arc::new(Axiom::ConceptAssertion(t.clone(), x))
                }
            }
            Axiom::RoleAssertion(t, u, r) => {
                let x = self.role(r);
                if Arc::ptr_eq(r, &x) {
                    a.clone()
                } else {
                    Arc::new(Axiom::RoleAssertion(t.clone(), u.clone(), x))
                }
            }
        };
        self.axioms.insert(key(&**a), out.clone());
        out
    }

    fn concept(&mut self, c: &Arc<ConceptExpr>) -> Arc<ConceptExpr> {
        if let Some(v) = self.concepts.get(&key(&**c)) {
            return v.clone();
        }
        let out = match &**c {
            ConceptExpr::Name(a) => match &self.rep {
                Replacement::Concept(target, e) if target == a => e.clone(),
                _ => c.clone(),
            },
            ConceptExpr::Nominal(_) | ConceptExpr::Top | ConceptExpr::Bottom => c.clone(),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                let (x, y) = (self.concept(a), self.concept(b));
                if Arc::ptr_eq(a, &x) && Arc::ptr_eq(b, &y) {
                    c.clone()
                } else if matches!(&**c, ConceptExpr::And(..)) {
                    Arc::new(ConceptExpr::And(x, y))
                } else {
                    Arc::new(ConceptExpr::Or(x, y))
                }
            }
            ConceptExpr::Not(a) => {
                let x = self.concept(a);
                if Arc::ptr_eq(a, &x) {
                    c.clone()
                } else {
                    Arc::new(ConceptExpr::Not(x))
                }
            }
            ConceptExpr::Exists(r, d)
            | ConceptExpr::Forall(r, d)
            | ConceptExpr::AtMost(_, r, d)
            | ConceptExpr::AtLeast(_, r, d) => {
                let (x, y) = (self.role(r), self.concept(d));
                if Arc::ptr_eq(r, &x) && Arc::ptr_eq(d, &y) {
                    c.clone()
                } else {
                    Arc::new(match &**c {
                        ConceptExpr::Exists(..) => ConceptExpr::Exists(x, y),
                        ConceptExpr::Forall(..) => ConceptExpr::Forall(x, y),
                        ConceptExpr::AtMost(n, ..) => ConceptExpr::AtMost(*n, x, y),
                        ConceptExpr::AtLeast(n, ..) => ConceptExpr::AtLeast(*n, x, y),
                        _ => unreachable!(),
                    })
                }
            }
        };
        self.concepts.insert(key(&**c), out.clone());
        out
    }

    fn replacement_inverse(&mut self) -> Arc<RoleExpr> {
        if let Some(inv) = &self.inverse {
            return inv.clone();
        }
        let Replacement::Role(_, e) = &self.rep else { unreachable!() };
        let inv = Arc::new(e.inverse());
        self.inverse = Some(inv.clone());
        inv
    }

    fn role(&mut self, r: &Arc<RoleExpr>) -> Arc<RoleExpr> {
        if let Some(v) = self.roles.get(&key(&**r)) {
            return v.clone();
        }
        let out = match &**r {
            RoleExpr::Name(p) => match &self.rep {
                Replacement::Role(target, e) if target == p => e.clone(),
                _ => r.clone(),
            },
            RoleExpr::Singleton(..) => r.clone(),
            RoleExpr::Inverse(a) => {
                let is_target = matches!((&**a, &self.rep), (RoleExpr::Name(p), Replacement::Role(t, _)) if p == t);
                if is_target {
                    self.replacement_inverse()
                } else {
                    let x = self.role(a);
                    if Arc::ptr_eq(a, &x) {
                        r.clone()
                    } else {
                        Arc::new(x.inverse())
                    }
                }
            }
            RoleExpr::Complement(a) => {
                let x = self.role(a);
                if Arc::ptr_eq(a, &x) {
                    r.clone()
                } else {
                    Arc::new(RoleExpr::Complement(x))
                }
            }
            RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => {
                let (x, y) = (self.role(a), self.role(b));
                if Arc::ptr_eq(a, &x) && Arc::ptr_eq(b, &y) {
                    r.clone()
                } else if matches!(&**r, RoleExpr::Union(..)) {
                    Arc::new(RoleExpr::Union(x, y))
                } else {
                    Arc::new(RoleExpr::Difference(x, y))
                }
            }
            RoleExpr::RangeRestrict(a, c) => {
                let (x, y) = (self.role(a), self.concept(c));
                if Arc::ptr_eq(a, &x) && Arc::ptr_eq(c, &y) {
                    r.clone()
                } else {
                    Arc::new(RoleExpr::RangeRestrict(x, y))
                }
            }
            RoleExpr::DomainRestrict(c, a) => {
                let (y, x) = (self.concept(c), self.role(a));
                if Arc::ptr_eq(a, &x) && Arc::ptr_eq(c, &y) {
                    r.clone()
                } else {
                    Arc::new(RoleExpr::DomainRestrict(y, x))
                }
            }
        };
        self.roles.insert(key(&**r), out.clone());
        out
    }
}

/// Replaces every occurrence of a concept or role name by an expression.
/// Occurrences under `inv` receive the converse of the replacement.
pub fn substitute_symbol(f: &Formula, rep: &Replacement) -> Formula {
    let mut s = Substituter::new(rep.clone());
    s.formula(f).unwrap_or_else(|| f.clone())
}

/// The substitution performed by regressing through one basic step.
pub fn step_replacement(step: &Step) -> Option<Replacement> {
    Some(match step {
        Step::AddConcept(a, c) => {
            Replacement::Concept(a.clone(), Arc::new(ConceptExpr::Or(Arc::new(ConceptExpr::Name(a.clone())), c.clone())))
        }
        Step::RemoveConcept(a, c) => Replacement::Concept(
            a.clone(),
            Arc::new(ConceptExpr::And(
                Arc::new(ConceptExpr::Name(a.clone())),
                Arc::new(ConceptExpr::Not(c.clone())),
            )),
        ),
        Step::AddRole(p, r) => {
            Replacement::Role(p.clone(), Arc::new(RoleExpr::Union(Arc::new(RoleExpr::Name(p.clone())), r.clone())))
        }
        Step::RemoveRole(p, r) => {
            Replacement::Role(p.clone(), Arc::new(RoleExpr::Difference(Arc::new(RoleExpr::Name(p.clone())), r.clone())))
        }
        Step::Conditional { .. } => return None,
    })
}

fn regress_basic(f: Formula, step: &Step) -> Formula {
    match step_replacement(step) {
        Some(rep) => substitute_symbol(&f, &rep),
        None => f,
    }
}

/// Number of paths through the conditionals of a step sequence.
fn path_count(steps: &[&Step]) -> u128 {
    steps.iter().fold(1u128, |acc, s| {
        let here = match s {
            Step::Conditional { then, otherwise, .. } => {
                let t: Vec<&Step> = then.steps.iter().collect();
                let e: Vec<&Step> = otherwise.steps.iter().collect();
                path_count(&t).saturating_add(path_count(&e))
            }
            _ => 1,
        };
        acc.saturating_mul(here)
    })
}

fn check_budget(alpha: &Action, k: &Formula, budget: usize) -> Result<()> {
    let steps: Vec<&Step> = alpha.steps.iter().collect();
    let estimate = path_count(&steps).saturating_mul((k.tree_size() + alpha.size()) as u128);
    if estimate > budget as u128 {
        return Err(Error::Budget(format!(
            "regression through {} conditionals would need about {estimate} nodes (budget {budget})",
            alpha.conditional_count()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Base {
    Positive,
    Negative,
}

fn full(steps: &[&Step], k: &Formula, base: Base) -> Formula {
    let split = steps.iter().position(|s| matches!(s, Step::Conditional { .. }));
    let (prefix, core) = match split {
        None => (
            steps,
            match base {
                Base::Positive => k.clone(),
                Base::Negative => Formula::neg(k.clone()),
            },
        ),
        Some(i) => {
            let Step::Conditional { guard, then, otherwise } = steps[i] else { unreachable!() };
            let tail = &steps[i + 1..];
            let left: Vec<&Step> = then.steps.iter().chain(tail.iter().copied()).collect();
            let right: Vec<&Step> = otherwise.steps.iter().chain(tail.iter().copied()).collect();
            let t1 = full(&left, k, base);
            let t2 = full(&right, k, base);
            let g = Arc::new(guard.clone());
            let ng = Arc::new(Formula::Neg(g.clone()));
            let core = match base {
                Base::Positive => Formula::and(Formula::Or(ng, Arc::new(t1)), Formula::Or(g, Arc::new(t2))),
                Base::Negative => Formula::or(Formula::And(g, Arc::new(t1)), Formula::And(ng, Arc::new(t2))),
            };
            (&steps[..i], core)
        }
    };
    prefix.iter().rev().fold(core, |f, s| regress_basic(f, s))
}

/// `tr(α, K)` with the default node budget.
pub fn tr(alpha: &Action, k: &Formula) -> Result<Formula> {
    tr_with_budget(alpha, k, DEFAULT_NODE_BUDGET)
}

pub fn tr_with_budget(alpha: &Action, k: &Formula, budget: usize) -> Result<Formula> {
    check_budget(alpha, k, budget)?;
    let steps: Vec<&Step> = alpha.steps.iter().collect();
    Ok(full(&steps, k, Base::Positive))
}

/// The negated regression: equivalent to `! tr(α, K)` with negation kept
/// at the core and conditionals split as disjunctions.
pub fn tr_neg(alpha: &Action, k: &Formula) -> Result<Formula> {
    tr_neg_with_budget(alpha, k, DEFAULT_NODE_BUDGET)
}

pub fn tr_neg_with_budget(alpha: &Action, k: &Formula, budget: usize) -> Result<Formula> {
    check_budget(alpha, k, budget)?;
    let steps: Vec<&Step> = alpha.steps.iter().collect();
    Ok(full(&steps, k, Base::Negative))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Then,
    Else,
}

/// The branch taken at each conditional met along one path, in execution
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchChoice(pub Vec<Branch>);

impl fmt::Display for BranchChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for b in &self.0 {
            f.write_str(match b {
                Branch::Then => "T",
                Branch::Else => "E",
            })?;
        }
        Ok(())
    }
}

enum Event<'a> {
    Basic(&'a Step),
    Guard(&'a Formula, bool),
}

/// Lazily enumerates one formula per path through the conditionals of an
/// action, in lexicographic order of choices with `Then` first.
pub struct Branches<'a> {
    alpha: &'a Action,
    k: Formula,
    base: Base,
    next: Option<Vec<Branch>>,
}

impl<'a> Branches<'a> {
    fn new(alpha: &'a Action, k: &Formula, base: Base) -> Self {
        Branches { alpha, k: k.clone(), base, next: Some(Vec::new()) }
    }

    /// Walks the action following `choices`, extending it with `Then` at
    /// conditionals beyond its length.
    fn walk(&self, choices: &mut Vec<Branch>) -> Vec<Event<'a>> {
        let mut events = Vec::new();
        let mut used = 0usize;
        fn go<'a>(a: &'a Action, choices: &mut Vec<Branch>, used: &mut usize, events: &mut Vec<Event<'a>>) {
            for s in &a.steps {
                match s {
                    Step::Conditional { guard, then, otherwise } => {
                        if *used == choices.len() {
                            choices.push(Branch::Then);
                        }
                        let b = choices[*used];
                        *used += 1;
                        events.push(Event::Guard(guard, b == Branch::Then));
                        go(if b == Branch::Then { then } else { otherwise }, choices, used, events);
                    }
                    _ => events.push(Event::Basic(s)),
                }
            }
        }
        go(self.alpha, choices, &mut used, &mut events);
        choices.truncate(used);
        events
    }
}

impl Iterator for Branches<'_> {
    type Item = (BranchChoice, Formula);

    fn next(&mut self) -> Option<Self::Item> {
        let mut choices = self.next.take()?;
        let events = self.walk(&mut choices);
        let mut f = match self.base {
            Base::Positive => self.k.clone(),
            Base::Negative => Formula::neg(self.k.clone()),
        };
        for ev in events.iter().rev() {
            f = match ev {
                Event::Basic(s) => regress_basic(f, s),
                Event::Guard(g, true) => Formula::and((*g).clone(), f),
                Event::Guard(g, false) => Formula::and(Formula::neg((*g).clone()), f),
            };
        }
        let mut successor = choices.clone();
        while successor.last() == Some(&Branch::Else) {
            successor.pop();
        }
        if let Some(last) = successor.last_mut() {
            *last = Branch::Else;
            self.next = Some(successor);
        }
        Some((BranchChoice(choices), f))
    }
}

/// Members of the negated branch set: `I` satisfies `tr_neg(α, K)` iff it
/// satisfies one of them.
pub fn tr_branches_neg<'a>(alpha: &'a Action, k: &Formula) -> Branches<'a> {
    Branches::new(alpha, k, Base::Negative)
}

/// Members of the positive branch set: for every `I`, some member holds in
/// `I` iff `tr(α, K)` holds in `I`.
pub fn tr_branches_pos<'a>(alpha: &'a Action, k: &Formula) -> Branches<'a> {
    Branches::new(alpha, k, Base::Positive)
}

/// Brings formula negation down to atoms, then replaces each negated
/// inclusion by an assertion about fresh individuals: `!(B1 <= B2)` by
/// `o : B1 and not B2`, `!(r1 <= r2)` by `(o, o') : r1 - r2`, and
/// `!(r1 <= not r2)` by `(o, o') : r1 & (o, o') : r2`. The result is
/// equisatisfiable with the input when distinct names may denote the same
/// element.
pub fn eliminate_negated_inclusions(f: &Formula, fresh: &mut FreshNames) -> Formula {
    eliminate_negated_inclusions_una(f, &[], fresh)
}

/// Variant of [`eliminate_negated_inclusions`] that stays equisatisfiable
/// under the unique name assumption: the violating element (pair) may also
/// be one of `named`, so each replacement is a disjunction over the fresh
/// witness and the named candidates.
pub fn eliminate_negated_inclusions_una(f: &Formula, named: &[Name], fresh: &mut FreshNames) -> Formula {
    fn violation(x: &Term, y: &Term, r: &Arc<RoleExpr>, s: &Arc<RoleExpr>) -> Formula {
        match &**s {
            RoleExpr::Complement(s2) => Formula::and(
                Formula::from(Axiom::RoleAssertion(x.clone(), y.clone(), r.clone())),
                Formula::from(Axiom::RoleAssertion(x.clone(), y.clone(), s2.clone())),
            ),
            _ => Axiom::RoleAssertion(x.clone(), y.clone(), Arc::new(RoleExpr::Difference(r.clone(), s.clone()))).into(),
        }
    }
    fn go(f: &Formula, named: &[Term], fresh: &mut FreshNames) -> Formula {
        match f {
            Formula::And(a, b) => Formula::and(go(a, named, fresh), go(b, named, fresh)),
            Formula::Or(a, b) => Formula::or(go(a, named, fresh), go(b, named, fresh)),
            Formula::Neg(inner) => match &**inner {
                Formula::Atom(ax) => match &**ax {
                    Axiom::ConceptInclusion(c, d) => {
                        let o = Term::Ind(fresh.next_name());
                        let body = Arc::new(ConceptExpr::And(c.clone(), Arc::new(ConceptExpr::Not(d.clone()))));
                        let cases = std::iter::once(&o)
                            .chain(named)
                            .map(|x| Formula::from(Axiom::ConceptAssertion(x.clone(), body.clone())));
                        Formula::disj(cases).expect("at least the fresh witness")
                    }
                    Axiom::RoleInclusion(r, s) => {
                        let o = Term::Ind(fresh.next_name());
                        let o2 = Term::Ind(fresh.next_name());
                        let mut cases = vec![violation(&o, &o2, r, s)];
                        if !named.is_empty() {
                            let firsts: Vec<&Term> = std::iter::once(&o).chain(named).collect();
                            let seconds: Vec<&Term> = [&o, &o2].into_iter().chain(named).collect();
                            for x in &firsts {
                                for y in &seconds {
                                    if (*x, *y) != (&o, &o2) {
                                        cases.push(violation(x, y, r, s));
                                    }
                                }
                            }
                        }
                        Formula::disj(cases).expect("at least the fresh witness")
                    }
                    _ => f.clone(),
                },
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::Atom(_) => f.clone(),
        }
    }
    let named: Vec<Term> = named.iter().map(|n| Term::Ind(n.clone())).collect();
    go(&f.nnf(), &named, fresh)
}

/// Rewrites positive inclusions whose sides are built by regression into
/// equivalent conjunctions of simpler inclusions and assertions, where one
/// exists: `(C or {o}) <= D` becomes `C <= D & o : D`, `C <= D and not {o}`
/// becomes `C <= D & o : not C`, and likewise for roles. Other atoms are
/// kept. The input is expected in negation normal form.
pub fn split_positive_inclusions(f: &Formula) -> Formula {
    fn basic_role(r: &Arc<RoleExpr>) -> Arc<RoleExpr> {
        match &**r {
            RoleExpr::Inverse(x) if x.as_basic().is_none() => Arc::new(x.inverse()),
            _ => r.clone(),
        }
    }
    fn concept(c: &Arc<ConceptExpr>, d: &Arc<ConceptExpr>) -> Formula {
        let not = |x: &Arc<ConceptExpr>| Arc::new(ConceptExpr::Not(x.clone()));
        let assert = |t: &Term, x: Arc<ConceptExpr>| Formula::from(Axiom::ConceptAssertion(t.clone(), x));
        match &**c {
            ConceptExpr::Or(a, b) => return Formula::and(concept(a, d), concept(b, d)),
            ConceptExpr::Bottom => return Formula::top(),
            ConceptExpr::Nominal(t) => return assert(t, d.clone()),
            ConceptExpr::Exists(r, e) if **e == ConceptExpr::Top => match &*basic_role(r) {
                RoleExpr::Union(x, y) => {
                    let ex = |r: &Arc<RoleExpr>| Arc::new(ConceptExpr::Exists(r.clone(), e.clone()));
                    return Formula::and(concept(&ex(x), d), concept(&ex(y), d));
                }
                RoleExpr::Singleton(t, _) => return assert(t, d.clone()),
                _ => {}
            },
            _ => {}
        }
        match &**d {
            ConceptExpr::And(a, b) => Formula::and(concept(c, a), concept(c, b)),
            ConceptExpr::Top => Formula::top(),
            ConceptExpr::Not(e) => match &**e {
                ConceptExpr::Nominal(t) => assert(t, not(c)),
                ConceptExpr::Not(x) => concept(c, x),
                ConceptExpr::Or(a, b) => Formula::and(concept(c, &not(a)), concept(c, &not(b))),
                ConceptExpr::Bottom => Formula::top(),
                ConceptExpr::Exists(r, top) if **top == ConceptExpr::Top => match &*basic_role(r) {
                    RoleExpr::Union(x, y) => {
                        let nex = |r: &Arc<RoleExpr>| not(&Arc::new(ConceptExpr::Exists(r.clone(), top.clone())));
                        Formula::and(concept(c, &nex(x)), concept(c, &nex(y)))
                    }
                    RoleExpr::Singleton(t, _) => assert(t, not(c)),
                    _ => Axiom::ConceptInclusion(c.clone(), d.clone()).into(),
                },
                _ => Axiom::ConceptInclusion(c.clone(), d.clone()).into(),
            },
            _ => Axiom::ConceptInclusion(c.clone(), d.clone()).into(),
        }
    }
    fn role(r: &Arc<RoleExpr>, s: &Arc<RoleExpr>) -> Formula {
        let (r, s) = (basic_role(r), basic_role(s));
        let compl = |x: &Arc<RoleExpr>| Arc::new(RoleExpr::Complement(x.clone()));
        match &*r {
            RoleExpr::Union(x, y) => return Formula::and(role(x, &s), role(y, &s)),
            RoleExpr::Singleton(a, b) => {
                return match &*s {
                    RoleExpr::Complement(x) => Formula::neg(Formula::from(Axiom::RoleAssertion(a.clone(), b.clone(), x.clone()))),
                    _ => Axiom::RoleAssertion(a.clone(), b.clone(), s.clone()).into(),
                }
            }
            _ => {}
        }
        match &*s {
            RoleExpr::Difference(x, y) => Formula::and(role(&r, x), role(&r, &compl(y))),
            RoleExpr::Complement(x) => match &*basic_role(x) {
                RoleExpr::Union(a, b) => Formula::and(role(&r, &compl(a)), role(&r, &compl(b))),
                RoleExpr::Singleton(a, b) => Formula::neg(Formula::from(Axiom::RoleAssertion(a.clone(), b.clone(), r.clone()))),
                RoleExpr::Complement(y) => role(&r, y),
                _ => Axiom::RoleInclusion(r.clone(), s.clone()).into(),
            },
            _ => Axiom::RoleInclusion(r.clone(), s.clone()).into(),
        }
    }
    match f {
        Formula::And(a, b) => Formula::and(split_positive_inclusions(a), split_positive_inclusions(b)),
        Formula::Or(a, b) => Formula::or(split_positive_inclusions(a), split_positive_inclusions(b)),
        Formula::Atom(ax) => match &**ax {
            Axiom::ConceptInclusion(c, d) => concept(c, d),
            Axiom::RoleInclusion(r, s) => role(r, s),
            _ => f.clone(),
        },
        Formula::Neg(_) => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::parse_interpretation;
    use crate::syntax::{is_dllite_formula, parse_action, parse_formula, parse_formula_with, ParseOptions};

    const K1: &str =
        "Prj <= ActivePrj or FinishedPrj & exists worksFor . Top <= Empl & exists inv worksFor . Top <= Prj";
    const A1: &str = "ActivePrj -= {p1}; FinishedPrj += {p1}; Empl -= forall worksFor . {p1}";

    #[test]
    fn substitution_of_a_concept_name() {
        let f = parse_formula("exists worksFor . Top <= Empl").unwrap();
        let rep = Replacement::Concept(
            crate::syntax::name("Empl"),
            Arc::new(parse_concept("Empl and not forall worksFor . {p1}")),
        );
        let g = substitute_symbol(&f, &rep);
        assert_eq!(g, parse_formula("exists worksFor . Top <= Empl and not forall worksFor . {p1}").unwrap());
        let same = Replacement::Concept(crate::syntax::name("Empl"), Arc::new(ConceptExpr::name("Empl")));
        assert_eq!(substitute_symbol(&f, &same), f);
    }

    fn parse_concept(src: &str) -> ConceptExpr {
        match parse_formula(&format!("o : {src}")).unwrap() {
            Formula::Atom(a) => match &*a {
                Axiom::ConceptAssertion(_, c) => (**c).clone(),
                _ => unreachable!(),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn substitution_under_inverse() {
        let f = parse_formula("exists inv p . Top <= A").unwrap();
        let rep = Replacement::Role(crate::syntax::name("p"), Arc::new(RoleExpr::diff(RoleExpr::name("p"), RoleExpr::name("r"))));
        let g = substitute_symbol(&f, &rep);
        let expected = parse_formula_with("exists inv p - inv r . Top <= A", ParseOptions::permissive()).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn base_cases() {
        let k = parse_formula(K1).unwrap();
        assert_eq!(tr(&Action::skip(), &k).unwrap(), k);
        assert_eq!(tr_neg(&Action::skip(), &k).unwrap(), Formula::neg(k.clone()));
        let pos: Vec<_> = tr_branches_pos(&Action::skip(), &k).collect();
        assert_eq!(pos, vec![(BranchChoice::default(), k)]);
    }

    #[test]
    fn regression_of_example_action() {
        let k = parse_formula(K1).unwrap();
        let a = parse_action(A1).unwrap();
        let t = tr(&a, &k).unwrap();
        let expected = parse_formula(
            "Prj <= ActivePrj and not {p1} or (FinishedPrj or {p1}) & \
             exists worksFor . Top <= Empl and not forall worksFor . {p1} & exists inv worksFor . Top <= Prj",
        )
        .unwrap();
        assert_eq!(t, expected);
    }

    #[test]
    fn branch_counts() {
        let k = parse_formula("o : A").unwrap();
        let plain = parse_action("A += {o}; B -= A").unwrap();
        assert_eq!(tr_branches_neg(&plain, &k).count(), 1);
        let two = parse_action("if o : A then { A -= {o} }; if o : B then { B += {o} } else { A += {o} }").unwrap();
        let choices: Vec<String> = tr_branches_neg(&two, &k).map(|(c, _)| c.to_string()).collect();
        assert_eq!(choices, ["TT", "TE", "ET", "EE"]);
        let nested = parse_action("if o : A then { if o : B then { A -= {o} } } else { B += {o} }").unwrap();
        let choices: Vec<String> = tr_branches_pos(&nested, &k).map(|(c, _)| c.to_string()).collect();
        assert_eq!(choices, ["TT", "TE", "E"]);
    }

    #[test]
    fn guard_true_branch_conjoins_guard() {
        let k = parse_formula("o : A").unwrap();
        let a = parse_action("if o : B then { A += {o} }").unwrap();
        let first = tr_branches_pos(&a, &k).next().unwrap().1;
        assert_eq!(first, parse_formula("o : B & o : A or {o}").unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let k = parse_formula("o : A").unwrap();
        let src = vec!["if o : A then { A -= {o} } else { A += {o} }"; 30].join("; ");
        let a = parse_action(&src).unwrap();
        assert!(matches!(tr(&a, &k), Err(Error::Budget(_))));
        assert_eq!(tr_branches_neg(&a, &k).take(3).count(), 3);
    }

    #[test]
    fn negated_inclusions_become_assertions() {
        let f = parse_formula("!(A <= B) & !(p <= q) v !(p <= not q) & !(o : A)").unwrap();
        let mut fresh = FreshNames::new([]);
        let g = eliminate_negated_inclusions(&f, &mut fresh);
        let expected = parse_formula_with(
            "_f0 : A and not B & (_f1, _f2) : p - q v (_f3, _f4) : p & (_f3, _f4) : q & ! o : A",
            ParseOptions::permissive(),
        )
        .unwrap();
        assert_eq!(g, expected);
        assert!(is_dllite_formula(&g).is_ok());
        let plain = parse_formula("o : A").unwrap();
        assert_eq!(eliminate_negated_inclusions(&plain, &mut fresh), plain);
    }

    #[test]
    fn regression_agrees_with_execution_on_example() {
        let i1 = parse_interpretation(
            "domain p1 p2 e1 e3 e7
             name p1 = p1
             name p2 = p2
             name e1 = e1
             name e3 = e3
             name e7 = e7
             concept Prj = {p1, p2}
             concept ActivePrj = {p1, p2}
             concept Empl = {e1, e3, e7}
             role worksFor = {(e1, p1), (e3, p1), (e7, p2)}",
        )
        .unwrap();
        let k = parse_formula(K1).unwrap();
        let a = parse_action(A1).unwrap();
        let after = crate::action::execute(&i1, &a).unwrap();
        assert!(!after.models(&k).unwrap());
        assert!(!i1.models(&tr(&a, &k).unwrap()).unwrap());
        assert!(i1.models(&tr_neg(&a, &k).unwrap()).unwrap());
    }
}
