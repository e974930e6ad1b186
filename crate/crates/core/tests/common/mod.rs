#![allow(dead_code)]

use std::collections::BTreeSet;

use dlupdate::interp::Interpretation;
use dlupdate::syntax::{Axiom, ConceptExpr, Formula, RoleExpr, Term};

pub type Set = BTreeSet<usize>;
pub type Rel = BTreeSet<(usize, usize)>;

/// Set-based evaluation written directly from the semantics, sharing no
/// code with the library's evaluator beyond reading extensions.
pub struct Naive<'a> {
    pub i: &'a Interpretation,
}

impl Naive<'_> {
    fn all(&self) -> Set {
        (0..self.i.size()).collect()
    }

    fn term(&self, t: &Term) -> usize {
        match t {
            Term::Ind(o) => self.i.individual(o).expect("mapped individual"),
            Term::Var(v) => panic!("variable ?{v} in naive evaluation"),
        }
    }

    pub fn concept(&self, c: &ConceptExpr) -> Set {
        let n = self.i.size();
        match c {
            ConceptExpr::Name(a) => self.i.concept(a).ones().collect(),
            ConceptExpr::Nominal(t) => Set::from([self.term(t)]),
            ConceptExpr::Top => self.all(),
            ConceptExpr::Bottom => Set::new(),
            ConceptExpr::And(a, b) => self.concept(a).intersection(&self.concept(b)).copied().collect(),
            ConceptExpr::Or(a, b) => self.concept(a).union(&self.concept(b)).copied().collect(),
            ConceptExpr::Not(a) => self.all().difference(&self.concept(a)).copied().collect(),
            ConceptExpr::Exists(r, d) => {
                let (r, d) = (self.role(r), self.concept(d));
                (0..n).filter(|&e| r.iter().any(|&(a, b)| a == e && d.contains(&b))).collect()
            }
            ConceptExpr::Forall(r, d) => {
                let (r, d) = (self.role(r), self.concept(d));
                (0..n).filter(|&e| r.iter().all(|&(a, b)| a != e || d.contains(&b))).collect()
            }
            ConceptExpr::AtLeast(k, r, d) => {
                let (r, d) = (self.role(r), self.concept(d));
                (0..n).filter(|&e| r.iter().filter(|&&(a, b)| a == e && d.contains(&b)).count() >= *k as usize).collect()
            }
            ConceptExpr::AtMost(k, r, d) => {
                let (r, d) = (self.role(r), self.concept(d));
                (0..n).filter(|&e| r.iter().filter(|&&(a, b)| a == e && d.contains(&b)).count() <= *k as usize).collect()
            }
        }
    }

    pub fn role(&self, r: &RoleExpr) -> Rel {
        let n = self.i.size();
        match r {
            RoleExpr::Name(p) => self.i.role(p).pairs().collect(),
            RoleExpr::Inverse(s) => self.role(s).into_iter().map(|(a, b)| (b, a)).collect(),
            RoleExpr::Singleton(a, b) => Rel::from([(self.term(a), self.term(b))]),
            RoleExpr::Union(a, b) => self.role(a).union(&self.role(b)).copied().collect(),
            RoleExpr::Difference(a, b) => self.role(a).difference(&self.role(b)).copied().collect(),
            RoleExpr::Complement(s) => {
                let s = self.role(s);
                (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|p| !s.contains(p)).collect()
            }
            RoleExpr::RangeRestrict(s, c) => {
                let c = self.concept(c);
                self.role(s).into_iter().filter(|(_, b)| c.contains(b)).collect()
            }
            RoleExpr::DomainRestrict(c, s) => {
                let c = self.concept(c);
                self.role(s).into_iter().filter(|(a, _)| c.contains(a)).collect()
            }
        }
    }

    pub fn axiom(&self, a: &Axiom) -> bool {
        match a {
            Axiom::ConceptInclusion(c, d) => self.concept(c).is_subset(&self.concept(d)),
            Axiom::RoleInclusion(r, s) => self.role(r).is_subset(&self.role(s)),
            Axiom::ConceptAssertion(t, c) => self.concept(c).contains(&self.term(t)),
            Axiom::RoleAssertion(a, b, r) => self.role(r).contains(&(self.term(a), self.term(b))),
        }
    }

    pub fn formula(&self, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => self.axiom(a),
            Formula::And(a, b) => self.formula(a) && self.formula(b),
            Formula::Or(a, b) => self.formula(a) || self.formula(b),
            Formula::Neg(a) => !self.formula(a),
        }
    }
}
