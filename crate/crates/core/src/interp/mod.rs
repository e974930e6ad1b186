//! Finite interpretations, evaluation of concepts and roles, and model
//! checking.

mod fingerprint;
mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::syntax::{name, Axiom, ConceptExpr, Formula, Name, RoleExpr, Term, RESERVED_PREFIX};

pub use fingerprint::Fingerprint;
pub use format::parse_interpretation;

/// A set of domain elements, indexed by position in the domain.
pub type ElemSet = FixedBitSet;

/// A binary relation over the domain stored as successor rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { rows: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn full(n: usize) -> Self {
        let mut row = FixedBitSet::with_capacity(n);
        row.insert_range(..);
        Relation { rows: vec![row; n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a].set(b, false);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.size());
        for (a, b) in self.pairs() {
            t.insert(b, a);
        }
        t
    }

    pub fn union_with(&mut self, other: &Relation) {
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            r.union_with(o);
        }
    }

    pub fn difference_with(&mut self, other: &Relation) {
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            r.difference_with(o);
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(r, o)| r.is_subset(o))
    }

    fn complement(&self) -> Relation {
        let mut out = Relation::full(self.size());
        out.difference_with(self);
        out
    }

    fn grow(&mut self, n: usize) {
        for row in &mut self.rows {
            row.grow(n);
        }
        self.rows.resize(n, FixedBitSet::with_capacity(n));
    }
}

/// A finite interpretation with named elements. Concept and role names
/// absent from the maps have empty extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    elements: Vec<Name>,
    index: BTreeMap<Name, usize>,
    concepts: BTreeMap<Name, ElemSet>,
    roles: BTreeMap<Name, Relation>,
    individuals: BTreeMap<Name, usize>,
    una: bool,
}

impl Interpretation {
    /// Creates an interpretation over the given element ids with all
    /// extensions empty.
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let elements: Vec<Name> = elements.into_iter().map(name).collect();
        if elements.is_empty() {
            return Err(Error::InvalidInterpretation("the domain must not be empty".into()));
        }
        let mut index = BTreeMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidInterpretation(format!("element `{e}` is listed twice")));
            }
        }
        Ok(Interpretation {
            elements,
            index,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            individuals: BTreeMap::new(),
            una: false,
        })
    }

    /// Domain `d0 .. d{n-1}`.
    pub fn with_size(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("d{i}")))
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Name] {
        &self.elements
    }

    pub fn element_index(&self, e: &str) -> Result<usize> {
        self.index.get(e).copied().ok_or_else(|| Error::UnknownElement(name(e)))
    }

    pub fn element_name(&self, i: usize) -> &Name {
        &self.elements[i]
    }

    pub fn una(&self) -> bool {
        self.una
    }

    pub fn set_una(&mut self, una: bool) -> Result<()> {
        self.una = una;
        self.check_una()
    }

    fn check_una(&self) -> Result<()> {
        if !self.una {
            return Ok(());
        }
        let mut owner: BTreeMap<usize, &Name> = BTreeMap::new();
        for (o, &e) in &self.individuals {
            if let Some(prev) = owner.insert(e, o) {
                return Err(Error::InvalidInterpretation(format!(
                    "individuals `{prev}` and `{o}` share element `{}` under the unique name assumption",
                    self.elements[e]
                )));
            }
        }
        Ok(())
    }

    pub fn map_individual(&mut self, o: impl AsRef<str>, e: usize) -> Result<()> {
        if e >= self.size() {
            return Err(Error::InvalidInterpretation(format!("element index {e} out of range")));
        }
        self.individuals.insert(name(o), e);
        self.check_una()
    }

    pub fn individual(&self, o: &str) -> Result<usize> {
        self.individuals.get(o).copied().ok_or_else(|| Error::UnknownIndividual(name(o)))
    }

    pub fn individuals(&self) -> &BTreeMap<Name, usize> {
        &self.individuals
    }

    /// Individual names sorted alphabetically.
    pub fn individual_names(&self) -> Vec<Name> {
        self.individuals.keys().cloned().collect()
    }

    pub fn concept(&self, a: &str) -> ElemSet {
        self.concepts
            .get(a)
            .cloned()
            .unwrap_or_else(|| FixedBitSet::with_capacity(self.size()))
    }

    pub fn role(&self, p: &str) -> Relation {
        self.roles.get(p).cloned().unwrap_or_else(|| Relation::empty(self.size()))
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &Name> {
        self.concepts.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &Name> {
        self.roles.keys()
    }

    pub fn set_concept(&mut self, a: impl AsRef<str>, ext: ElemSet) -> Result<()> {
        if ext.len() != self.size() {
            return Err(Error::Arity(format!("concept extension has length {} for domain size {}", ext.len(), self.size())));
        }
        self.concepts.insert(name(a), ext);
        Ok(())
    }

    pub fn set_role(&mut self, p: impl AsRef<str>, ext: Relation) -> Result<()> {
        if ext.size() != self.size() {
            return Err(Error::Arity(format!("role extension has size {} for domain size {}", ext.size(), self.size())));
        }
        self.roles.insert(name(p), ext);
        Ok(())
    }

    /// Makes `a` an explicitly listed concept name, empty if new.
    pub fn declare_concept(&mut self, a: impl AsRef<str>) {
        let n = self.size();
        self.concepts.entry(name(a)).or_insert_with(|| FixedBitSet::with_capacity(n));
    }

    pub fn declare_role(&mut self, p: impl AsRef<str>) {
        let n = self.size();
        self.roles.entry(name(p)).or_insert_with(|| Relation::empty(n));
    }

    pub(crate) fn concept_mut(&mut self, a: &Name) -> &mut ElemSet {
        let n = self.size();
        self.concepts.entry(a.clone()).or_insert_with(|| FixedBitSet::with_capacity(n))
    }

    pub(crate) fn role_mut(&mut self, p: &Name) -> &mut Relation {
        let n = self.size();
        self.roles.entry(p.clone()).or_insert_with(|| Relation::empty(n))
    }

    /// Adds `k` fresh elements belonging to no extension, each named by a
    /// fresh reserved-prefix individual name that also serves as its id.
    pub fn expand_domain(&self, k: usize) -> Interpretation {
        let mut out = self.clone();
        let mut counter = 0usize;
        for _ in 0..k {
            let fresh = loop {
                let candidate = name(format!("{RESERVED_PREFIX}{counter}"));
                counter += 1;
                if !out.index.contains_key(&candidate) && !out.individuals.contains_key(&candidate) {
                    break candidate;
                }
            };
            let idx = out.elements.len();
            out.elements.push(fresh.clone());
            out.index.insert(fresh.clone(), idx);
            out.individuals.insert(fresh, idx);
        }
        let n = out.elements.len();
        for ext in out.concepts.values_mut() {
            ext.grow(n);
        }
        for rel in out.roles.values_mut() {
            rel.grow(n);
        }
        out
    }

    pub fn eval_concept(&self, c: &ConceptExpr) -> Result<ElemSet> {
        Evaluator::new(self).concept(c)
    }

    pub fn eval_role(&self, r: &RoleExpr) -> Result<Relation> {
        Evaluator::new(self).role(r)
    }

    /// Satisfaction of a ground formula.
    pub fn models(&self, f: &Formula) -> Result<bool> {
        Evaluator::new(self).formula(f)
    }

    /// Element names of a set, in domain order.
    pub fn names_of(&self, set: &ElemSet) -> Vec<Name> {
        set.ones().map(|i| self.elements[i].clone()).collect()
    }

    /// Pairs of element names, in row-major domain order.
    pub fn pair_names_of(&self, rel: &Relation) -> Vec<(Name, Name)> {
        rel.pairs()
            .map(|(a, b)| (self.elements[a].clone(), self.elements[b].clone()))
            .collect()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        fingerprint::canonical_fingerprint(self)
    }

    /// Concept, role and individual names mentioned by this interpretation.
    pub fn signature_names(&self) -> BTreeSet<Name> {
        self.concepts
            .keys()
            .chain(self.roles.keys())
            .chain(self.individuals.keys())
            .chain(self.elements.iter())
            .cloned()
            .collect()
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::print_interpretation(self))
    }
}

/// Evaluates expressions on one interpretation, caching results per
/// subterm address so that shared subterms of large regressed formulas are
/// evaluated once.
pub struct Evaluator<'a> {
    interp: &'a Interpretation,
    concepts: HashMap<usize, ElemSet>,
    roles: HashMap<usize, Relation>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a Interpretation) -> Self {
        Evaluator { interp, concepts: HashMap::new(), roles: HashMap::new() }
    }

    fn term(&self, t: &Term) -> Result<usize> {
        match t {
            Term::Ind(o) => self.interp.individual(o),
            Term::Var(v) => Err(Error::NotGround { what: "expression", var: v.clone() }),
        }
    }

    fn empty(&self) -> ElemSet {
        FixedBitSet::with_capacity(self.interp.size())
    }

    fn full(&self) -> ElemSet {
        let mut s = self.empty();
        s.insert_range(..);
        s
    }

    pub fn concept(&mut self, c: &ConceptExpr) -> Result<ElemSet> {
        let key = c as *const ConceptExpr as usize;
        if let Some(v) = self.concepts.get(&key) {
            return Ok(v.clone());
        }
        let n = self.interp.size();
        let out = match c {
            ConceptExpr::Name(a) => self.interp.concept(a),
            ConceptExpr::Nominal(t) => {
                let mut s = self.empty();
                s.insert(self.term(t)?);
                s
            }
            ConceptExpr::Top => self.full(),
            ConceptExpr::Bottom => self.empty(),
            ConceptExpr::And(a, b) => {
                let mut s = self.concept(a)?;
                s.intersect_with(&self.concept(b)?);
                s
            }
            ConceptExpr::Or(a, b) => {
                let mut s = self.concept(a)?;
                s.union_with(&self.concept(b)?);
                s
            }
            ConceptExpr::Not(a) => {
                let mut s = self.concept(a)?;
                s.toggle_range(..);
                s
            }
            ConceptExpr::Exists(r, d) | ConceptExpr::AtLeast(_, r, d) | ConceptExpr::AtMost(_, r, d) | ConceptExpr::Forall(r, d) => {
                let rel = self.role(r)?;
                let filler = self.concept(d)?;
                let mut s = self.empty();
                for e in 0..n {
                    let row = rel.successors(e);
                    let keep = match c {
                        ConceptExpr::Exists(..) => row.intersection(&filler).next().is_some(),
                        ConceptExpr::Forall(..) => row.is_subset(&filler),
                        ConceptExpr::AtLeast(k, ..) => row.intersection_count(&filler) >= *k as usize,
                        ConceptExpr::AtMost(k, ..) => row.intersection_count(&filler) <= *k as usize,
                        _ => unreachable!(),
                    };
                    s.set(e, keep);
                }
                s
            }
        };
        self.concepts.insert(key, out.clone());
        Ok(out)
    }

    pub fn role(&mut self, r: &RoleExpr) -> Result<Relation> {
        let key = r as *const RoleExpr as usize;
        if let Some(v) = self.roles.get(&key) {
            return Ok(v.clone());
        }
        let n = self.interp.size();
        let out = match r {
            RoleExpr::Name(p) => self.interp.role(p),
            RoleExpr::Inverse(a) => self.role(a)?.transpose(),
            RoleExpr::Singleton(a, b) => Relation::from_pairs(n, [(self.term(a)?, self.term(b)?)]),
            RoleExpr::Union(a, b) => {
                let mut x = self.role(a)?;
                x.union_with(&self.role(b)?);
                x
            }
            RoleExpr::Difference(a, b) => {
                let mut x = self.role(a)?;
                x.difference_with(&self.role(b)?);
                x
            }
            RoleExpr::Complement(a) => self.role(a)?.complement(),
            RoleExpr::RangeRestrict(a, c) => {
                let mut x = self.role(a)?;
                let filter = self.concept(c)?;
                for row in &mut x.rows {
                    row.intersect_with(&filter);
                }
                x
            }
            RoleExpr::DomainRestrict(c, a) => {
                let mut x = self.role(a)?;
                let filter = self.concept(c)?;
                for (e, row) in x.rows.iter_mut().enumerate() {
                    if !filter.contains(e) {
                        row.clear();
                    }
                }
                x
            }
        };
        self.roles.insert(key, out.clone());
        Ok(out)
    }

    pub fn axiom(&mut self, a: &Axiom) -> Result<bool> {
        Ok(match a {
            Axiom::ConceptInclusion(c, d) => self.concept(c)?.is_subset(&self.concept(d)?),
            Axiom::RoleInclusion(r, s) => self.role(r)?.is_subset(&self.role(s)?),
            Axiom::ConceptAssertion(t, c) => {
                let e = self.term(t)?;
                self.concept(c)?.contains(e)
            }
            Axiom::RoleAssertion(t, u, r) => {
                let (a, b) = (self.term(t)?, self.term(u)?);
                self.role(r)?.contains(a, b)
            }
        })
    }

    pub fn formula(&mut self, f: &Formula) -> Result<bool> {
        Ok(match f {
            Formula::Atom(a) => self.axiom(a)?,
            Formula::And(a, b) => self.formula(a)? && self.formula(b)?,
            Formula::Or(a, b) => self.formula(a)? || self.formula(b)?,
            Formula::Neg(a) => !self.formula(a)?,
        })
    }
}
