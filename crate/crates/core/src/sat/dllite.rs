//! Exact finite satisfiability for the lightweight fragment.
//!
//! A knowledge base is first read as a propositional formula over its
//! axioms; each consistent choice of axioms is then checked by expanding
//! its complex assertions into basic ones (the completion) and testing the
//! resulting inclusions plus basic assertions with a polynomial
//! saturation. A successful check yields a finite model built from the
//! saturation, with anonymous successors folded into three layers.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::SatVerdict;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::interp::{Interpretation, Relation};
use crate::syntax::{is_dllite_formula, Axiom, ConceptExpr, Formula, FreshNames, Name, RoleExpr, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Assertion {
    Concept(Name, Arc<ConceptExpr>),
    Role(Name, Name, Arc<RoleExpr>),
}

impl Assertion {
    pub fn from_axiom(a: &Axiom) -> Result<Self> {
        match a {
            Axiom::ConceptAssertion(t, c) => Ok(Assertion::Concept(ground(t)?, c.clone())),
            Axiom::RoleAssertion(t, u, r) => Ok(Assertion::Role(ground(t)?, ground(u)?, Arc::new(normalize_role(r)))),
            _ => Err(Error::Internal(format!("`{a}` is not an assertion"))),
        }
    }

    pub fn to_axiom(&self) -> Axiom {
        match self {
            Assertion::Concept(o, c) => Axiom::ConceptAssertion(Term::Ind(o.clone()), c.clone()),
            Assertion::Role(a, b, r) => Axiom::RoleAssertion(Term::Ind(a.clone()), Term::Ind(b.clone()), r.clone()),
        }
    }

    /// `o : B` for a basic concept `B`, or `(o, o') : R` for a role name
    /// or inverse `R`.
    pub fn is_basic(&self) -> bool {
        match self {
            Assertion::Concept(_, c) => basic_concept(c).is_some(),
            Assertion::Role(_, _, r) => r.as_basic().is_some(),
        }
    }
}

fn ground(t: &Term) -> Result<Name> {
    match t {
        Term::Ind(o) => Ok(o.clone()),
        Term::Var(v) => Err(Error::NotGround { what: "knowledge base", var: v.clone() }),
    }
}

/// An assertion or its negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub assertion: Assertion,
    pub positive: bool,
}

impl Literal {
    pub fn pos(assertion: Assertion) -> Self {
        Literal { assertion, positive: true }
    }

    pub fn neg(assertion: Assertion) -> Self {
        Literal { assertion, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { assertion: self.assertion.clone(), positive: !self.positive }
    }

    pub fn to_formula(&self) -> Formula {
        let atom = Formula::from(self.assertion.to_axiom());
        if self.positive {
            atom
        } else {
            Formula::neg(atom)
        }
    }

    fn concept(o: &Name, c: Arc<ConceptExpr>, positive: bool) -> Self {
        Literal { assertion: Assertion::Concept(o.clone(), c), positive }
    }

    fn role(a: &Name, b: &Name, r: Arc<RoleExpr>, positive: bool) -> Self {
        Literal { assertion: Assertion::Role(a.clone(), b.clone(), r), positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.assertion.to_axiom())
        } else {
            write!(f, "! {}", self.assertion.to_axiom())
        }
    }
}

/// Pushes inverses down to role names.
fn normalize_role(r: &RoleExpr) -> RoleExpr {
    match r {
        RoleExpr::Name(_) | RoleExpr::Singleton(..) => r.clone(),
        RoleExpr::Inverse(a) => normalize_role(a).inverse(),
        RoleExpr::Union(a, b) => RoleExpr::union(normalize_role(a), normalize_role(b)),
        RoleExpr::Difference(a, b) => RoleExpr::diff(normalize_role(a), normalize_role(b)),
        RoleExpr::Complement(a) => RoleExpr::complement(normalize_role(a)),
        RoleExpr::RangeRestrict(a, c) => RoleExpr::RangeRestrict(Arc::new(normalize_role(a)), c.clone()),
        RoleExpr::DomainRestrict(c, a) => RoleExpr::DomainRestrict(c.clone(), Arc::new(normalize_role(a))),
    }
}

// ---------------------------------------------------------------------------
// Propositional selection

fn collect_atoms(f: &Formula, seen: &mut HashSet<Arc<Axiom>>, out: &mut Vec<Arc<Axiom>>) {
    match f {
        Formula::Atom(a) => {
            if seen.insert(a.clone()) {
                out.push(a.clone());
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_atoms(a, seen, out);
            collect_atoms(b, seen, out);
        }
        Formula::Neg(a) => collect_atoms(a, seen, out),
    }
}

fn eval_propositional(f: &Formula, value: &HashMap<Arc<Axiom>, bool>) -> bool {
    match f {
        Formula::Atom(a) => value[a],
        Formula::And(a, b) => eval_propositional(a, value) && eval_propositional(b, value),
        Formula::Or(a, b) => eval_propositional(a, value) || eval_propositional(b, value),
        Formula::Neg(a) => !eval_propositional(a, value),
    }
}

/// Largest number of distinct axioms [`propositional_selections`] accepts.
pub const MAX_SELECTION_ATOMS: usize = 24;

/// Every propositional model `M` of `k` over its axioms, as the formula
/// conjoining the axioms true in `M` and the negations of the others.
pub fn propositional_selections(k: &Formula) -> Result<impl Iterator<Item = Formula>> {
    let mut atoms = Vec::new();
    collect_atoms(k, &mut HashSet::new(), &mut atoms);
    if atoms.len() > MAX_SELECTION_ATOMS {
        return Err(Error::Budget(format!(
            "{} distinct axioms exceed the selection limit of {MAX_SELECTION_ATOMS}",
            atoms.len()
        )));
    }
    let k = k.clone();
    let n = atoms.len();
    Ok((0u64..1 << n).filter_map(move |mask| {
        let value: HashMap<Arc<Axiom>, bool> =
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), mask >> i & 1 == 1)).collect();
        if !eval_propositional(&k, &value) {
            return None;
        }
        Some(Formula::conj(atoms.iter().map(|a| {
            let atom = Formula::Atom(a.clone());
            if value[a] {
                atom
            } else {
                Formula::neg(atom)
            }
        })))
    }))
}

/// Partial assignments making a formula in negation normal form true,
/// found by depth-first splitting on disjunctions. Together they cover all
/// propositional models.
struct Implicants {
    stack: Vec<ImplicantState>,
}

#[derive(Clone)]
struct ImplicantState {
    lits: Vec<(Arc<Axiom>, bool)>,
    value: HashMap<Arc<Axiom>, bool>,
    pending: Vec<Arc<Formula>>,
}

impl ImplicantState {
    fn assign(&mut self, a: &Arc<Axiom>, v: bool) -> bool {
        match self.value.get(a) {
            Some(&old) => old == v,
            None => {
                self.value.insert(a.clone(), v);
                self.lits.push((a.clone(), v));
                true
            }
        }
    }

    fn literal_holds(&self, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => self.value.get(a) == Some(&true),
            Formula::Neg(g) => matches!(&**g, Formula::Atom(a) if self.value.get(a) == Some(&false)),
            _ => false,
        }
    }
}

impl Implicants {
    fn new(nnf: Formula) -> Self {
        Implicants {
            stack: vec![ImplicantState { lits: Vec::new(), value: HashMap::new(), pending: vec![Arc::new(nnf)] }],
        }
    }
}

impl Iterator for Implicants {
    type Item = Vec<(Arc<Axiom>, bool)>;

    fn next(&mut self) -> Option<Self::Item> {
        'states: while let Some(mut st) = self.stack.pop() {
            while let Some(f) = st.pending.pop() {
                match &*f {
                    Formula::Atom(a) => {
                        if !st.assign(a, true) {
                            continue 'states;
                        }
                    }
                    Formula::Neg(g) => match &**g {
                        Formula::Atom(a) => {
                            if !st.assign(a, false) {
                                continue 'states;
                            }
                        }
                        _ => unreachable!("input is in negation normal form"),
                    },
                    Formula::And(a, b) => {
                        st.pending.push(b.clone());
                        st.pending.push(a.clone());
                    }
                    Formula::Or(a, b) => {
                        if st.literal_holds(a) || st.literal_holds(b) {
                            continue;
                        }
                        let mut alt = st.clone();
                        alt.pending.push(b.clone());
                        self.stack.push(alt);
                        st.pending.push(a.clone());
                    }
                }
            }
            return Some(st.lits);
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Core check: inclusions between basic concepts and roles plus basic
// assertions, under the unique name assumption.

type BasicRole = (Name, bool);

fn inv(r: &BasicRole) -> BasicRole {
    (r.0.clone(), !r.1)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Basic {
    Name(Name),
    Exists(BasicRole),
}

fn basic_concept(c: &ConceptExpr) -> Option<Basic> {
    match c {
        ConceptExpr::Name(a) => Some(Basic::Name(a.clone())),
        ConceptExpr::Exists(r, d) if **d == ConceptExpr::Top => {
            let (p, i) = r.as_basic()?;
            Some(Basic::Exists((p.clone(), i)))
        }
        _ => None,
    }
}

fn basic_role(r: &RoleExpr) -> Option<BasicRole> {
    r.as_basic().map(|(p, i)| (p.clone(), i))
}

/// Inclusions compiled for saturation.
#[derive(Debug, Default)]
struct TBox {
    concept_succ: HashMap<Basic, Vec<Basic>>,
    disjoint: HashMap<Basic, Vec<Basic>>,
    role_disjoint: HashMap<BasicRole, Vec<BasicRole>>,
    sup: HashMap<BasicRole, BTreeSet<BasicRole>>,
    empty_roles: HashSet<BasicRole>,
    unsat: HashSet<Basic>,
}

impl TBox {
    fn new(inclusions: &[Arc<Axiom>]) -> Result<Self> {
        let mut t = TBox::default();
        let mut role_edges: HashMap<BasicRole, Vec<BasicRole>> = HashMap::new();
        let mut roles: BTreeSet<BasicRole> = BTreeSet::new();
        let mut basics: BTreeSet<Basic> = BTreeSet::new();
        for ax in inclusions {
            match &**ax {
                Axiom::ConceptInclusion(c, d) if **c == ConceptExpr::Top && **d == ConceptExpr::Top => {}
                Axiom::ConceptInclusion(c, d) => {
                    let lhs = basic_concept(c).ok_or_else(|| shape_error(ax))?;
                    let (rhs, negative) = match &**d {
                        ConceptExpr::Not(e) => (basic_concept(e).ok_or_else(|| shape_error(ax))?, true),
                        e => (basic_concept(e).ok_or_else(|| shape_error(ax))?, false),
                    };
                    for b in [&lhs, &rhs] {
                        basics.insert(b.clone());
                        if let Basic::Exists(r) = b {
                            roles.insert(r.clone());
                            roles.insert(inv(r));
                        }
                    }
                    if negative {
                        t.disjoint.entry(lhs.clone()).or_default().push(rhs.clone());
                        t.disjoint.entry(rhs).or_default().push(lhs);
                    } else {
                        t.concept_succ.entry(lhs).or_default().push(rhs);
                    }
                }
                Axiom::RoleInclusion(r, s) => {
                    let lhs = basic_role(r).ok_or_else(|| shape_error(ax))?;
                    let (rhs, negative) = match &**s {
                        RoleExpr::Complement(e) => (basic_role(e).ok_or_else(|| shape_error(ax))?, true),
                        e => (basic_role(e).ok_or_else(|| shape_error(ax))?, false),
                    };
                    for r in [&lhs, &rhs] {
                        roles.insert(r.clone());
                        roles.insert(inv(r));
                    }
                    if negative {
                        for (a, b) in [(lhs.clone(), rhs.clone()), (inv(&lhs), inv(&rhs))] {
                            t.role_disjoint.entry(a.clone()).or_default().push(b.clone());
                            t.role_disjoint.entry(b).or_default().push(a);
                        }
                    } else {
                        role_edges.entry(lhs.clone()).or_default().push(rhs.clone());
                        role_edges.entry(inv(&lhs)).or_default().push(inv(&rhs));
                    }
                }
                _ => return Err(shape_error(ax)),
            }
        }
        for r in &roles {
            let mut seen = BTreeSet::from([r.clone()]);
            let mut work = vec![r.clone()];
            while let Some(x) = work.pop() {
                for y in role_edges.get(&x).into_iter().flatten() {
                    if seen.insert(y.clone()) {
                        work.push(y.clone());
                    }
                }
            }
            t.sup.insert(r.clone(), seen);
        }
        for r in &roles {
            let sup = &t.sup[r];
            if sup.iter().any(|a| t.role_disjoint.get(a).is_some_and(|bs| bs.iter().any(|b| sup.contains(b)))) {
                t.empty_roles.insert(r.clone());
            }
            basics.insert(Basic::Exists(r.clone()));
        }
        loop {
            let mut changed = false;
            for b in &basics {
                if t.unsat.contains(b) {
                    continue;
                }
                let cl = t.closure([b.clone()]);
                let bad = !t.type_consistent(&cl)
                    || cl.iter().any(|x| match x {
                        Basic::Exists(r) => t.unsat.contains(&Basic::Exists(inv(r))),
                        _ => false,
                    });
                if bad {
                    t.unsat.insert(b.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(t)
    }

    fn sup_of(&self, r: &BasicRole) -> BTreeSet<BasicRole> {
        self.sup.get(r).cloned().unwrap_or_else(|| BTreeSet::from([r.clone()]))
    }

    fn closure(&self, start: impl IntoIterator<Item = Basic>) -> BTreeSet<Basic> {
        let mut set = BTreeSet::new();
        let mut work: Vec<Basic> = start.into_iter().collect();
        while let Some(b) = work.pop() {
            if !set.insert(b.clone()) {
                continue;
            }
            if let Basic::Exists(r) = &b {
                for s in self.sup_of(r) {
                    work.push(Basic::Exists(s));
                }
            }
            for c in self.concept_succ.get(&b).into_iter().flatten() {
                work.push(c.clone());
            }
        }
        set
    }

    /// A closed set of basic concepts can be the type of an element.
    fn type_consistent(&self, set: &BTreeSet<Basic>) -> bool {
        set.iter().all(|b| {
            !self.disjoint.get(b).is_some_and(|ds| ds.iter().any(|d| set.contains(d)))
                && !self.unsat.contains(b)
                && !matches!(b, Basic::Exists(r) if self.empty_roles.contains(r))
        })
    }
}

fn shape_error(ax: &Axiom) -> Error {
    Error::Fragment(vec![format!("`{ax}` is not an inclusion between basic concepts or roles")])
}

/// Saturated basic facts about the named individuals.
#[derive(Debug)]
struct CoreModel {
    types: BTreeMap<Name, BTreeSet<Basic>>,
    /// Role facts `(a, b, p)` closed under the role hierarchy.
    facts: BTreeSet<(Name, Name, Name)>,
}

impl CoreModel {
    fn holds(&self, a: &Name, b: &Name, r: &BasicRole) -> bool {
        if r.1 {
            self.facts.contains(&(b.clone(), a.clone(), r.0.clone()))
        } else {
            self.facts.contains(&(a.clone(), b.clone(), r.0.clone()))
        }
    }

    fn has(&self, o: &Name, b: &Basic) -> bool {
        self.types.get(o).is_some_and(|t| t.contains(b))
    }
}

fn fact(a: &Name, b: &Name, r: &BasicRole) -> (Name, Name, Name) {
    if r.1 {
        (b.clone(), a.clone(), r.0.clone())
    } else {
        (a.clone(), b.clone(), r.0.clone())
    }
}

/// Saturates the positive basic literals. Non-basic literals are ignored.
fn saturate<'a>(t: &TBox, individuals: &[Name], lits: impl IntoIterator<Item = &'a Literal>) -> CoreModel {
    let mut start: BTreeMap<Name, Vec<Basic>> = individuals.iter().map(|o| (o.clone(), Vec::new())).collect();
    let mut facts = BTreeSet::new();
    for l in lits {
        if !l.positive {
            continue;
        }
        match &l.assertion {
            Assertion::Concept(o, c) => {
                if let Some(b) = basic_concept(c) {
                    start.entry(o.clone()).or_default().push(b);
                }
            }
            Assertion::Role(a, b, r) => {
                if let Some(r) = basic_role(r) {
                    for s in t.sup_of(&r) {
                        facts.insert(fact(a, b, &s));
                    }
                }
            }
        }
    }
    for (a, b, p) in &facts {
        start.entry(a.clone()).or_default().push(Basic::Exists((p.clone(), false)));
        start.entry(b.clone()).or_default().push(Basic::Exists((p.clone(), true)));
    }
    let types = start.into_iter().map(|(o, s)| (o, t.closure(s))).collect();
    CoreModel { types, facts }
}

/// Looks for a clash between the saturation and the literals.
fn core_clash<'a>(t: &TBox, m: &CoreModel, lits: impl IntoIterator<Item = &'a Literal>) -> bool {
    if m.types.values().any(|ty| !t.type_consistent(ty)) {
        return true;
    }
    for (a, b, p) in &m.facts {
        let r = (p.clone(), false);
        if t.role_disjoint.get(&r).is_some_and(|ds| ds.iter().any(|s| m.holds(a, b, s))) {
            return true;
        }
    }
    for l in lits {
        if l.positive {
            continue;
        }
        match &l.assertion {
            Assertion::Concept(o, c) => {
                if let Some(b) = basic_concept(c) {
                    if m.has(o, &b) {
                        return true;
                    }
                }
            }
            Assertion::Role(a, b, r) => {
                if let Some(r) = basic_role(r) {
                    if m.holds(a, b, &r) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// The truth value of a literal when it does not depend on the
/// interpretation of concept and role names.
fn trivial(l: &Literal) -> Option<bool> {
    let holds = match &l.assertion {
        Assertion::Concept(o, c) => match &**c {
            ConceptExpr::Top => true,
            ConceptExpr::Bottom => false,
            ConceptExpr::Nominal(Term::Ind(x)) => x == o,
            _ => return None,
        },
        Assertion::Role(a, b, r) => match &**r {
            RoleExpr::Singleton(Term::Ind(x), Term::Ind(y)) => x == a && y == b,
            _ => return None,
        },
    };
    Some(holds == l.positive)
}

fn pinned_individuals(lits: &[Literal]) -> BTreeMap<Name, Vec<Name>> {
    type Pairs = BTreeSet<(Name, Name)>;
    fn role(r: &RoleExpr, out: &mut Pairs) {
        match r {
            RoleExpr::Name(_) => {}
            RoleExpr::Singleton(Term::Ind(a), Term::Ind(b)) => {
                out.insert((a.clone(), b.clone()));
                out.insert((b.clone(), a.clone()));
            }
            RoleExpr::Singleton(..) => {}
            RoleExpr::Inverse(s) | RoleExpr::Complement(s) => role(s, out),
            RoleExpr::Union(x, y) | RoleExpr::Difference(x, y) => {
                role(x, out);
                role(y, out);
            }
            RoleExpr::RangeRestrict(s, c) | RoleExpr::DomainRestrict(c, s) => {
                role(s, out);
                concept(c, out);
            }
        }
    }
    fn concept(c: &ConceptExpr, out: &mut Pairs) {
        match c {
            ConceptExpr::Name(_) | ConceptExpr::Nominal(_) | ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                concept(a, out);
                concept(b, out);
            }
            ConceptExpr::Not(a) => concept(a, out),
            ConceptExpr::Exists(r, d)
            | ConceptExpr::Forall(r, d)
            | ConceptExpr::AtMost(_, r, d)
            | ConceptExpr::AtLeast(_, r, d) => {
                role(r, out);
                concept(d, out);
            }
        }
    }
    let mut pairs = Pairs::new();
    for l in lits {
        match &l.assertion {
            Assertion::Concept(_, c) => concept(c, &mut pairs),
            Assertion::Role(_, _, r) => role(r, &mut pairs),
        }
    }
    let mut out: BTreeMap<Name, Vec<Name>> = BTreeMap::new();
    for (a, b) in pairs {
        out.entry(a).or_default().push(b);
    }
    out
}

/// Every individual occurring in the literals, including those inside
/// nominals and singleton roles.
fn individuals_of<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Vec<Name> {
    let mut sig = Signature::default();
    for l in lits {
        sig.add_axiom(&l.assertion.to_axiom());
    }
    sig.individuals.into_iter().collect()
}

/// Satisfiability of inclusions between basic concepts and roles (or
/// their negations) together with basic assertions and their negations,
/// with distinct individuals denoting distinct elements.
pub fn sat_dllite_core(inclusions: &[Axiom], basic: &[Literal]) -> Result<bool> {
    let t = TBox::new(&inclusions.iter().cloned().map(Arc::new).collect::<Vec<_>>())?;
    if let Some(l) = basic.iter().find(|l| !l.assertion.is_basic()) {
        return Err(Error::Fragment(vec![format!("`{l}` is not a basic assertion")]));
    }
    let m = saturate(&t, &individuals_of(basic), basic);
    Ok(!core_clash(&t, &m, basic))
}

// ---------------------------------------------------------------------------
// Completion

/// An assertion set closed under the completion conditions and free of
/// direct clashes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub literals: Vec<Literal>,
    /// Individuals introduced for existential assertions.
    pub fresh: Vec<Name>,
}

impl Completion {
    /// The literals over basic assertions.
    pub fn basic(&self) -> Vec<Literal> {
        self.literals.iter().filter(|l| l.assertion.is_basic()).cloned().collect()
    }

    /// Rechecks every completion condition from scratch and describes each
    /// one that fails. `individuals` are the individuals of the selection the
    /// completion was computed for; the inclusion conditions range over them.
    pub fn violations(&self, inclusions: &[Axiom], individuals: &[Name]) -> Vec<String> {
        let set: HashSet<&Literal> = self.literals.iter().collect();
        let has = |l: &Literal| set.contains(l);
        let mut all_inds: BTreeSet<Name> = individuals.iter().cloned().collect();
        all_inds.extend(individuals_of(&self.literals));
        let mut out = Vec::new();
        let mut fail = |msg: String| out.push(msg);
        for l in &self.literals {
            if has(&l.negated()) {
                fail(format!("both `{l}` and its negation"));
            }
            match (&l.assertion, l.positive) {
                (Assertion::Concept(o, c), true) => match &**c {
                    ConceptExpr::And(a, b) => {
                        if !has(&Literal::concept(o, a.clone(), true)) || !has(&Literal::concept(o, b.clone(), true)) {
                            fail(format!("`{l}` not decomposed"));
                        }
                    }
                    ConceptExpr::Or(a, b) => {
                        if !has(&Literal::concept(o, a.clone(), true)) && !has(&Literal::concept(o, b.clone(), true)) {
                            fail(format!("`{l}` has no chosen disjunct"));
                        }
                    }
                    ConceptExpr::Exists(r, _) => {
                        let r = normalize_role(r);
                        let witnessed = self.literals.iter().any(|m| {
                            m.positive && matches!(&m.assertion, Assertion::Role(a, _, s) if a == o && **s == r)
                        });
                        if !witnessed {
                            fail(format!("`{l}` has no successor"));
                        }
                    }
                    ConceptExpr::Nominal(Term::Ind(x)) if x != o => fail(format!("`{l}` equates distinct names")),
                    ConceptExpr::Bottom => fail(format!("`{l}` asserts Bot")),
                    ConceptExpr::Not(d) => {
                        if !has(&Literal::concept(o, d.clone(), false)) {
                            fail(format!("`{l}` without the negated assertion"));
                        }
                        match &**d {
                            ConceptExpr::Not(e) => {
                                if !has(&Literal::concept(o, e.clone(), true)) {
                                    fail(format!("`{l}` double negation not removed"));
                                }
                            }
                            ConceptExpr::And(a, b) => {
                                if !has(&Literal::concept(o, a.clone(), false))
                                    && !has(&Literal::concept(o, b.clone(), false))
                                {
                                    fail(format!("`{l}` negated conjunction not split"));
                                }
                            }
                            ConceptExpr::Or(a, b) => {
                                if !has(&Literal::concept(o, a.clone(), false))
                                    || !has(&Literal::concept(o, b.clone(), false))
                                {
                                    fail(format!("`{l}` negated disjunction not split"));
                                }
                            }
                            ConceptExpr::Exists(r, _) => {
                                let r = Arc::new(normalize_role(r));
                                for x in &all_inds {
                                    if !has(&Literal::role(o, x, r.clone(), false)) {
                                        fail(format!("`{l}` without the negated role assertion towards {x}"));
                                    }
                                }
                            }
                            ConceptExpr::Top => fail(format!("`{l}` denies Top")),
                            ConceptExpr::Nominal(Term::Ind(x)) if x == o => fail(format!("`{l}` denies identity")),
                            _ => {}
                        }
                    }
                    _ => {}
                },
                (Assertion::Concept(o, c), false) => {
                    if !has(&Literal::concept(o, Arc::new(ConceptExpr::Not(c.clone())), true)) {
                        fail(format!("`{l}` without the complemented assertion"));
                    }
                }
                (Assertion::Role(a, b, r), true) => {
                    if !has(&Literal::role(b, a, Arc::new(r.inverse()), true)) {
                        fail(format!("`{l}` without its inverse"));
                    }
                    match &**r {
                        RoleExpr::Union(x, y) => {
                            if !has(&Literal::role(a, b, x.clone(), true)) && !has(&Literal::role(a, b, y.clone(), true)) {
                                fail(format!("`{l}` has no chosen member"));
                            }
                        }
                        RoleExpr::Difference(x, y) => {
                            if !has(&Literal::role(a, b, x.clone(), true)) || !has(&Literal::role(a, b, y.clone(), false)) {
                                fail(format!("`{l}` not decomposed"));
                            }
                        }
                        RoleExpr::Singleton(Term::Ind(x), Term::Ind(y)) if x != a || y != b => {
                            fail(format!("`{l}` equates distinct names"))
                        }
                        _ => {}
                    }
                }
                (Assertion::Role(a, b, r), false) => match &**r {
                    RoleExpr::Union(x, y) => {
                        if !has(&Literal::role(a, b, x.clone(), false)) || !has(&Literal::role(a, b, y.clone(), false)) {
                            fail(format!("`{l}` not decomposed"));
                        }
                    }
                    RoleExpr::Difference(x, y) => {
                        if !has(&Literal::role(a, b, x.clone(), false)) && !has(&Literal::role(a, b, y.clone(), true)) {
                            fail(format!("`{l}` has no chosen case"));
                        }
                    }
                    RoleExpr::Singleton(Term::Ind(x), Term::Ind(y)) if x == a && y == b => {
                        fail(format!("`{l}` denies identity"))
                    }
                    _ => {}
                },
            }
        }
        for ax in inclusions {
            match ax {
                Axiom::ConceptInclusion(c, d) => {
                    for o in individuals {
                        if !has(&Literal::concept(o, c.clone(), false)) && !has(&Literal::concept(o, d.clone(), true)) {
                            fail(format!("`{ax}` not decided for {o}"));
                        }
                    }
                }
                Axiom::RoleInclusion(r, s) => {
                    let (r, s) = (Arc::new(normalize_role(r)), Arc::new(normalize_role(s)));
                    for a in individuals {
                        for b in individuals {
                            if !has(&Literal::role(a, b, r.clone(), false)) && !has(&Literal::role(a, b, s.clone(), true)) {
                                fail(format!("`{ax}` not decided for ({a}, {b})"));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }
}

struct Context {
    concept_incl: Vec<(Arc<ConceptExpr>, Arc<ConceptExpr>, Option<Basic>)>,
    role_incl: Vec<(Arc<RoleExpr>, Arc<RoleExpr>, Option<BasicRole>)>,
    /// Individuals the inclusion conditions range over.
    selection_individuals: Vec<Name>,
    /// Present when branches failing the core check are cut early.
    prune: Option<TBox>,
}

#[derive(Clone)]
struct State {
    lits: Vec<Literal>,
    set: HashSet<Literal>,
    cursor: usize,
    individuals: Vec<Name>,
    negated_exists: Vec<(Name, Arc<RoleExpr>)>,
    choices: Vec<(Literal, Literal)>,
    /// For each individual, the individuals it shares a singleton role
    /// with. Only these can behave differently from a fresh individual as
    /// its successor in an existential assertion.
    pinned: Arc<BTreeMap<Name, Vec<Name>>>,
    /// Existential assertions waiting for a successor: one of the pinned
    /// individuals of the subject or a fresh one.
    successors: Vec<(Name, Arc<RoleExpr>)>,
    fresh: Vec<Name>,
    names: FreshNames,
    saturated: Option<(usize, Arc<CoreModel>)>,
}

impl State {
    /// Adds a literal; false on a direct clash.
    fn add(&mut self, l: Literal) -> bool {
        if self.set.contains(&l) {
            return true;
        }
        if self.set.contains(&l.negated()) {
            return false;
        }
        self.set.insert(l.clone());
        self.lits.push(l);
        true
    }

    fn new_individual(&mut self) -> Result<Name> {
        let x = self.names.next_name();
        self.individuals.push(x.clone());
        self.fresh.push(x.clone());
        for (o, r) in self.negated_exists.clone() {
            if !self.add(Literal::role(&o, &x, r, false)) {
                return Err(Error::Internal("fresh individual clashes".into()));
            }
        }
        Ok(x)
    }

    /// Applies the deterministic consequences of one literal, recording
    /// disjunctive ones as pending choices. Ok(false) on a clash.
    fn expand(&mut self, l: &Literal) -> Result<bool> {
        match (&l.assertion, l.positive) {
            (Assertion::Concept(o, c), true) => self.expand_concept(o, c),
            (Assertion::Concept(o, c), false) => Ok(self.add(Literal::concept(o, Arc::new(ConceptExpr::Not(c.clone())), true))),
            (Assertion::Role(a, b, r), true) => {
                if !self.add(Literal::role(b, a, Arc::new(r.inverse()), true)) {
                    return Ok(false);
                }
                Ok(match &**r {
                    RoleExpr::Name(_) | RoleExpr::Inverse(_) => true,
                    RoleExpr::Singleton(x, y) => ground(x)? == *a && ground(y)? == *b,
                    RoleExpr::Union(x, y) => {
                        self.choose(Literal::role(a, b, x.clone(), true), Literal::role(a, b, y.clone(), true))
                    }
                    RoleExpr::Difference(x, y) => {
                        self.add(Literal::role(a, b, x.clone(), true)) && self.add(Literal::role(a, b, y.clone(), false))
                    }
                    RoleExpr::RangeRestrict(x, c) => {
                        self.add(Literal::role(a, b, x.clone(), true)) && self.add(Literal::concept(b, c.clone(), true))
                    }
                    RoleExpr::DomainRestrict(c, x) => {
                        self.add(Literal::concept(a, c.clone(), true)) && self.add(Literal::role(a, b, x.clone(), true))
                    }
                    RoleExpr::Complement(x) => self.add(Literal::role(a, b, x.clone(), false)),
                })
            }
            (Assertion::Role(a, b, r), false) => Ok(match &**r {
                RoleExpr::Name(_) | RoleExpr::Inverse(_) => true,
                RoleExpr::Singleton(x, y) => !(ground(x)? == *a && ground(y)? == *b),
                RoleExpr::Union(x, y) => {
                    self.add(Literal::role(a, b, x.clone(), false)) && self.add(Literal::role(a, b, y.clone(), false))
                }
                RoleExpr::Difference(x, y) => {
                    self.choose(Literal::role(a, b, x.clone(), false), Literal::role(a, b, y.clone(), true))
                }
                RoleExpr::RangeRestrict(x, c) => {
                    self.choose(
                        Literal::role(a, b, x.clone(), false),
                        Literal::concept(b, Arc::new(ConceptExpr::Not(c.clone())), true),
                    )
                }
                RoleExpr::DomainRestrict(c, x) => {
                    self.choose(
                        Literal::concept(a, Arc::new(ConceptExpr::Not(c.clone())), true),
                        Literal::role(a, b, x.clone(), false),
                    )
                }
                RoleExpr::Complement(x) => self.add(Literal::role(a, b, x.clone(), true)),
            }),
        }
    }

    fn expand_concept(&mut self, o: &Name, c: &Arc<ConceptExpr>) -> Result<bool> {
        Ok(match &**c {
            ConceptExpr::Name(_) | ConceptExpr::Top => true,
            ConceptExpr::Bottom => false,
            ConceptExpr::Nominal(t) => ground(t)? == *o,
            ConceptExpr::And(a, b) => self.add(Literal::concept(o, a.clone(), true)) && self.add(Literal::concept(o, b.clone(), true)),
            ConceptExpr::Or(a, b) => {
                self.choose(Literal::concept(o, a.clone(), true), Literal::concept(o, b.clone(), true))
            }
            ConceptExpr::Exists(r, d) if **d == ConceptExpr::Top => {
                let r = Arc::new(normalize_role(r));
                if !self.pinned.contains_key(o) {
                    let x = self.new_individual()?;
                    self.add(Literal::role(o, &x, r, true))
                } else {
                    self.successors.push((o.clone(), r));
                    true
                }
            }
            ConceptExpr::Not(d) => {
                if !self.add(Literal::concept(o, d.clone(), false)) {
                    return Ok(false);
                }
                match &**d {
                    ConceptExpr::Name(_) | ConceptExpr::Bottom => true,
                    ConceptExpr::Top => false,
                    ConceptExpr::Nominal(t) => ground(t)? != *o,
                    ConceptExpr::Not(e) => self.add(Literal::concept(o, e.clone(), true)),
                    ConceptExpr::And(a, b) => {
                        self.choose(Literal::concept(o, a.clone(), false), Literal::concept(o, b.clone(), false))
                    }
                    ConceptExpr::Or(a, b) => {
                        self.add(Literal::concept(o, a.clone(), false)) && self.add(Literal::concept(o, b.clone(), false))
                    }
                    ConceptExpr::Exists(r, e) if **e == ConceptExpr::Top => {
                        let r = Arc::new(normalize_role(r));
                        if let RoleExpr::Union(x, y) = &*r {
                            let none = |s: &Arc<RoleExpr>| {
                                let e = ConceptExpr::Exists(s.clone(), Arc::new(ConceptExpr::Top));
                                Literal::concept(o, Arc::new(ConceptExpr::Not(Arc::new(e))), true)
                            };
                            if !(self.add(none(x)) && self.add(none(y))) {
                                return Ok(false);
                            }
                        }
                        self.negated_exists.push((o.clone(), r.clone()));
                        let inds = self.individuals.clone();
                        inds.iter().all(|x| self.add(Literal::role(o, x, r.clone(), false)))
                    }
                    _ => return Err(unsupported(c)),
                }
            }
            _ => return Err(unsupported(c)),
        })
    }

    /// Records a disjunctive condition, resolving it at once when either
    /// option is decided by the names alone. False on a clash.
    fn choose(&mut self, a: Literal, b: Literal) -> bool {
        match (trivial(&a), trivial(&b)) {
            (Some(true), _) | (None, Some(false)) => self.add(a),
            (_, Some(true)) | (Some(false), None) => self.add(b),
            (Some(false), Some(false)) => false,
            (None, None) => {
                self.choices.push((a, b));
                true
            }
        }
    }

    fn run(&mut self) -> Result<bool> {
        while self.cursor < self.lits.len() {
            let l = self.lits[self.cursor].clone();
            self.cursor += 1;
            if !self.expand(&l)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn open_choice(&self) -> Option<(Literal, Literal)> {
        self.choices.iter().find(|(a, b)| !self.set.contains(a) && !self.set.contains(b)).cloned()
    }

    /// States for each way of giving `o` an `r` successor: the pinned
    /// individuals of `o` in order, then a fresh one.
    fn successor_alternatives(&self, o: &Name, r: &Arc<RoleExpr>) -> Result<Vec<State>> {
        let mut out = Vec::new();
        for y in self.pinned.get(o).into_iter().flatten() {
            let mut alt = self.clone();
            if alt.add(Literal::role(o, y, r.clone(), true)) {
                out.push(alt);
            }
        }
        let mut alt = self.clone();
        let x = alt.new_individual()?;
        if alt.add(Literal::role(o, &x, r.clone(), true)) {
            out.push(alt);
        }
        Ok(out)
    }

    /// Failed-literal propagation over the open choices and successors: an
    /// alternative that clashes after expansion is discarded, a condition
    /// left with one alternative is committed, and None means no
    /// alternative survives for some condition.
    fn lookahead(mut self) -> Result<Option<State>> {
        'outer: loop {
            let open: Vec<(Literal, Literal)> = self
                .choices
                .iter()
                .filter(|(a, b)| !self.set.contains(a) && !self.set.contains(b))
                .cloned()
                .collect();
            for (a, b) in open {
                let viable = |l: &Literal| -> Result<bool> {
                    let mut alt = self.clone();
                    Ok(alt.add(l.clone()) && alt.run()?)
                };
                let (va, vb) = (viable(&a)?, viable(&b)?);
                if !va && !vb {
                    return Ok(None);
                }
                if va != vb {
                    if !(self.add(if va { a } else { b }) && self.run()?) {
                        return Ok(None);
                    }
                    continue 'outer;
                }
            }
            let pending: Vec<(Name, Arc<RoleExpr>)> = self
                .successors
                .iter()
                .filter(|(o, r)| !self.individuals.iter().any(|y| self.set.contains(&Literal::role(o, y, r.clone(), true))))
                .cloned()
                .collect();
            for (o, r) in pending {
                let mut alts = Vec::new();
                for mut alt in self.successor_alternatives(&o, &r)? {
                    if alt.run()? {
                        alts.push(alt);
                    }
                }
                match alts.len() {
                    0 => return Ok(None),
                    1 => {
                        self = alts.pop().expect("one alternative");
                        continue 'outer;
                    }
                    _ => {}
                }
            }
            return Ok(Some(self));
        }
    }

    fn open_successor(&self) -> Option<(Name, Arc<RoleExpr>)> {
        self.successors
            .iter()
            .find(|(o, r)| !self.individuals.iter().any(|y| self.set.contains(&Literal::role(o, y, r.clone(), true))))
            .cloned()
    }

    fn saturation(&mut self, t: &TBox) -> Arc<CoreModel> {
        if let Some((n, m)) = &self.saturated {
            if *n == self.lits.len() {
                return m.clone();
            }
        }
        let m = Arc::new(saturate(t, &self.individuals, &self.lits));
        self.saturated = Some((self.lits.len(), m.clone()));
        m
    }

    /// An inclusion condition not yet decided, as (premise negated,
    /// conclusion, premise derived by saturation). Derived conditions come
    /// first since they need no branching.
    fn open_inclusion(&mut self, ctx: &Context) -> Option<(Literal, Literal, bool)> {
        let model = ctx.prune.as_ref().map(|t| self.saturation(t));
        let mut first = None;
        for o in &ctx.selection_individuals {
            for (c, d, basic) in &ctx.concept_incl {
                let no = Literal::concept(o, c.clone(), false);
                let yes = Literal::concept(o, d.clone(), true);
                if !self.set.contains(&no) && !self.set.contains(&yes) {
                    if let (Some(m), Some(b)) = (&model, basic) {
                        if m.has(o, b) {
                            return Some((no, yes, true));
                        }
                    }
                    first.get_or_insert((no, yes, false));
                }
            }
        }
        for a in &ctx.selection_individuals {
            for b in &ctx.selection_individuals {
                for (r, s, basic) in &ctx.role_incl {
                    let no = Literal::role(a, b, r.clone(), false);
                    let yes = Literal::role(a, b, s.clone(), true);
                    if !self.set.contains(&no) && !self.set.contains(&yes) {
                        if let (Some(m), Some(r)) = (&model, basic) {
                            if m.holds(a, b, r) {
                                return Some((no, yes, true));
                            }
                        }
                        first.get_or_insert((no, yes, false));
                    }
                }
            }
        }
        first
    }
}

fn unsupported(c: &ConceptExpr) -> Error {
    Error::Fragment(vec![format!("concept `{c}` is not in B+")])
}

/// Lazy enumeration of completions by depth-first search over the
/// disjunctive conditions.
pub struct Completions {
    ctx: Context,
    stack: Vec<State>,
    visited: usize,
    max_states: usize,
}

impl Completions {
    fn new(inclusions: &[Arc<Axiom>], assertions: &[Literal], extra: &[Name], prune: bool) -> Result<Self> {
        let mut concept_incl = Vec::new();
        let mut role_incl = Vec::new();
        for ax in inclusions {
            match &**ax {
                Axiom::ConceptInclusion(c, d) if **c == ConceptExpr::Top && **d == ConceptExpr::Top => {}
                Axiom::ConceptInclusion(c, d) => concept_incl.push((c.clone(), d.clone(), basic_concept(c))),
                Axiom::RoleInclusion(r, s) => {
                    let r = Arc::new(normalize_role(r));
                    let basic = basic_role(&r);
                    role_incl.push((r, Arc::new(normalize_role(s)), basic));
                }
                _ => return Err(shape_error(ax)),
            }
        }
        let mut inds: BTreeSet<Name> = individuals_of(assertions).into_iter().collect();
        inds.extend(extra.iter().cloned());
        let selection_individuals: Vec<Name> = inds.into_iter().collect();
        let prune = if prune { Some(TBox::new(inclusions)?) } else { None };
        let mut start = State {
            lits: Vec::new(),
            set: HashSet::new(),
            cursor: 0,
            individuals: selection_individuals.clone(),
            negated_exists: Vec::new(),
            choices: Vec::new(),
            pinned: Arc::new(pinned_individuals(assertions)),
            successors: Vec::new(),
            fresh: Vec::new(),
            names: FreshNames::new(selection_individuals.iter().cloned()),
            saturated: None,
        };
        let mut stack = Vec::new();
        if assertions.iter().all(|l| {
            let l = match &l.assertion {
                Assertion::Role(a, b, r) => Literal::role(a, b, Arc::new(normalize_role(r)), l.positive),
                _ => l.clone(),
            };
            start.add(l)
        }) {
            stack.push(start);
        }
        Ok(Completions {
            ctx: Context { concept_incl, role_incl, selection_individuals, prune },
            stack,
            visited: 0,
            max_states: usize::MAX,
        })
    }

    fn with_budget(mut self, budget: &Budget) -> Self {
        self.max_states = budget.states;
        self
    }

    fn branch(&mut self, st: State, first: Literal, second: Literal) {
        let mut alt = st.clone();
        if alt.add(second) {
            self.stack.push(alt);
        }
        let mut st = st;
        if st.add(first) {
            self.stack.push(st);
        }
    }

    fn step(&mut self) -> Result<Option<State>> {
        while let Some(mut st) = self.stack.pop() {
            self.visited += 1;
            if self.visited > self.max_states {
                return Err(Error::Budget(format!("completion search exceeded {} states", self.max_states)));
            }
            if !st.run()? {
                continue;
            }
            if let Some(t) = &self.ctx.prune {
                let m = st.saturation(t);
                if core_clash(t, &m, &st.lits) {
                    continue;
                }
            }
            let Some(mut st) = st.lookahead()? else {
                continue;
            };
            if let Some((a, b)) = st.open_choice() {
                self.branch(st, a, b);
                continue;
            }
            if let Some((o, r)) = st.open_successor() {
                for alt in st.successor_alternatives(&o, &r)?.into_iter().rev() {
                    self.stack.push(alt);
                }
                continue;
            }
            if let Some((no, yes, derived)) = st.open_inclusion(&self.ctx) {
                if derived {
                    if st.add(yes) {
                        self.stack.push(st);
                    }
                } else {
                    self.branch(st, no, yes);
                }
                continue;
            }
            return Ok(Some(st));
        }
        Ok(None)
    }
}

impl Iterator for Completions {
    type Item = Result<Completion>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.step() {
            Ok(Some(st)) => Some(Ok(Completion { literals: st.lits, fresh: st.fresh })),
            Ok(None) => None,
            Err(e) => {
                self.stack.clear();
                Some(Err(e))
            }
        }
    }
}

/// All completions of `assertions` with respect to `inclusions`. The
/// inclusion conditions range over the individuals of `assertions`.
pub fn complete_abox(inclusions: &[Axiom], assertions: &[Literal]) -> Result<Completions> {
    let incl: Vec<Arc<Axiom>> = inclusions.iter().cloned().map(Arc::new).collect();
    Completions::new(&incl, assertions, &[], false)
}

// ---------------------------------------------------------------------------
// Model construction

struct WitnessBuilder<'a> {
    t: &'a TBox,
    elements: Vec<Name>,
    types: Vec<BTreeSet<Basic>>,
    edges: BTreeSet<(usize, usize, Name)>,
    generators: HashMap<(BasicRole, usize), usize>,
    taken: HashSet<Name>,
    counter: usize,
}

impl WitnessBuilder<'_> {
    fn anonymous_name(&mut self) -> Name {
        loop {
            let n: Name = format!("w{}", self.counter).into();
            self.counter += 1;
            if self.taken.insert(n.clone()) {
                return n;
            }
        }
    }

    fn connect(&mut self, x: usize, y: usize, r: &BasicRole) {
        for s in self.t.sup_of(r) {
            if s.1 {
                self.edges.insert((y, x, s.0.clone()));
            } else {
                self.edges.insert((x, y, s.0.clone()));
            }
        }
    }

    /// The anonymous element reached through `r` at layer `level`, whose
    /// own successors live on the next layer.
    fn generator(&mut self, r: &BasicRole, level: usize) -> usize {
        if let Some(&e) = self.generators.get(&(r.clone(), level)) {
            return e;
        }
        let e = self.elements.len();
        let n = self.anonymous_name();
        self.elements.push(n);
        self.types.push(self.t.closure([Basic::Exists(inv(r))]));
        self.generators.insert((r.clone(), level), e);
        let incoming = self.t.sup_of(r);
        for b in self.types[e].clone() {
            if let Basic::Exists(s) = b {
                if incoming.contains(&inv(&s)) {
                    continue;
                }
                let y = self.generator(&s, (level + 1) % 3);
                self.connect(e, y, &s);
            }
        }
        e
    }
}

fn build_witness(
    t: &TBox,
    model: &CoreModel,
    named: &[Name],
    completion_fresh: &[Name],
    k: &Formula,
) -> Result<Interpretation> {
    let sig = k.signature();
    let mut b = WitnessBuilder {
        t,
        elements: Vec::new(),
        types: Vec::new(),
        edges: BTreeSet::new(),
        generators: HashMap::new(),
        taken: named.iter().chain(completion_fresh).cloned().collect(),
        counter: 0,
    };
    let mut index: HashMap<Name, usize> = HashMap::new();
    for o in named {
        index.insert(o.clone(), b.elements.len());
        b.elements.push(o.clone());
        b.types.push(model.types.get(o).cloned().unwrap_or_default());
    }
    for o in completion_fresh {
        let n = b.anonymous_name();
        index.insert(o.clone(), b.elements.len());
        b.elements.push(n);
        b.types.push(model.types.get(o).cloned().unwrap_or_default());
    }
    for (x, y, p) in &model.facts {
        b.edges.insert((index[x], index[y], p.clone()));
    }
    let individuals: Vec<Name> = named.iter().chain(completion_fresh).cloned().collect();
    for o in &individuals {
        let x = index[o];
        for basic in model.types[o].clone() {
            if let Basic::Exists(r) = basic {
                if individuals.iter().any(|y| model.holds(o, y, &r)) {
                    continue;
                }
                let y = b.generator(&r, 0);
                b.connect(x, y, &r);
            }
        }
    }
    if b.elements.is_empty() {
        let e = b.anonymous_name();
        b.elements.push(e);
        b.types.push(BTreeSet::new());
    }
    let n = b.elements.len();
    let mut out = Interpretation::new(b.elements.iter())?;
    let mut concepts: BTreeMap<Name, FixedBitSet> = BTreeMap::new();
    for (e, ty) in b.types.iter().enumerate() {
        for basic in ty {
            if let Basic::Name(a) = basic {
                concepts.entry(a.clone()).or_insert_with(|| FixedBitSet::with_capacity(n)).insert(e);
            }
        }
    }
    let mut roles: BTreeMap<Name, Relation> = BTreeMap::new();
    for (x, y, p) in &b.edges {
        roles.entry(p.clone()).or_insert_with(|| Relation::empty(n)).insert(*x, *y);
    }
    for a in &sig.concepts {
        out.declare_concept(a);
    }
    for p in &sig.roles {
        out.declare_role(p);
    }
    for (a, ext) in concepts {
        out.set_concept(&a, ext)?;
    }
    for (p, ext) in roles {
        out.set_role(&p, ext)?;
    }
    for o in named {
        out.map_individual(o, index[o])?;
    }
    out.set_una(true)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Full procedure

/// Decides finite satisfiability of a knowledge base in the lightweight
/// fragment, under the unique name assumption.
pub fn sat_dllite(k: &Formula) -> Result<SatVerdict> {
    sat_dllite_with_budget(k, &Budget::default())
}

pub fn sat_dllite_with_budget(k: &Formula, budget: &Budget) -> Result<SatVerdict> {
    let report = is_dllite_formula(k);
    if !report.is_ok() {
        return Err(Error::Fragment(report.violations));
    }
    let sig = k.signature();
    if let Some(var) = sig.variables.into_iter().next() {
        return Err(Error::NotGround { what: "knowledge base", var });
    }
    let named: Vec<Name> = sig.individuals.into_iter().collect();
    let mut explored = 0usize;
    for implicant in Implicants::new(k.nnf()) {
        budget.check_time()?;
        let mut inclusions = Vec::new();
        let mut assertions = Vec::new();
        for (ax, value) in implicant {
            if ax.is_inclusion() {
                if value {
                    inclusions.push(ax);
                }
            } else {
                let a = Assertion::from_axiom(&ax)?;
                assertions.push(if value { Literal::pos(a) } else { Literal::neg(a) });
            }
        }
        let t = TBox::new(&inclusions)?;
        let remaining = Budget { states: budget.states.saturating_sub(explored), ..budget.clone() };
        let mut completions = Completions::new(&inclusions, &assertions, &named, true)?.with_budget(&remaining);
        let found = completions.next().transpose()?;
        explored += completions.visited;
        if let Some(c) = found {
            let mut inds = completions.ctx.selection_individuals.clone();
            inds.extend(c.fresh.iter().cloned());
            let model = saturate(&t, &inds, &c.literals);
            if core_clash(&t, &model, &c.literals) {
                return Err(Error::Internal("completion passed pruning but fails the core check".into()));
            }
            let named_all = completions.ctx.selection_individuals.clone();
            let w = build_witness(&t, &model, &named_all, &c.fresh, k)?;
            if !w.models(k)? {
                return Err(Error::Internal(format!("constructed model does not satisfy the input:\n{w}")));
            }
            return Ok(SatVerdict::Satisfiable(w));
        }
    }
    Ok(SatVerdict::Unsatisfiable)
}
