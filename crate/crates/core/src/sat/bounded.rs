//! Bounded finite-model search. For each domain size in turn the question
//! "does `K` have a model with exactly `d` elements" is encoded as a
//! propositional formula and handed to a SAT solver.

use std::collections::{BTreeMap, HashMap};

use varisat::{ExtendFormula, Lit, Solver};

use super::SatVerdict;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::interp::{Interpretation, Relation};
use crate::syntax::{Axiom, ConceptExpr, Formula, Name, RoleExpr, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Val {
    True,
    False,
    Lit(Lit),
}

impl Val {
    fn not(self) -> Val {
        match self {
            Val::True => Val::False,
            Val::False => Val::True,
            Val::Lit(l) => Val::Lit(!l),
        }
    }
}

struct Encoder<'b> {
    solver: Solver<'static>,
    d: usize,
    clauses: usize,
    budget: &'b Budget,
    concepts: BTreeMap<Name, Vec<Lit>>,
    roles: BTreeMap<Name, Vec<Lit>>,
    individuals: BTreeMap<Name, Vec<Val>>,
    concept_memo: HashMap<(usize, usize), Val>,
    role_memo: HashMap<(usize, usize, usize), Val>,
}

impl<'b> Encoder<'b> {
    fn new(d: usize, k: &Formula, una: bool, budget: &'b Budget) -> Result<Self> {
        let sig = k.signature();
        let mut enc = Encoder {
            solver: Solver::new(),
            d,
            clauses: 0,
            budget,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            individuals: BTreeMap::new(),
            concept_memo: HashMap::new(),
            role_memo: HashMap::new(),
        };
        for a in &sig.concepts {
            let lits = (0..d).map(|_| enc.solver.new_lit()).collect();
            enc.concepts.insert(a.clone(), lits);
        }
        for p in &sig.roles {
            let lits = (0..d * d).map(|_| enc.solver.new_lit()).collect();
            enc.roles.insert(p.clone(), lits);
        }
        // The j-th individual (alphabetically) may only use elements 0..=j:
        // every model can be permuted into this shape.
        for (j, o) in sig.individuals.iter().enumerate() {
            let mut vals = vec![Val::False; d];
            let allowed = (j + 1).min(d);
            let lits: Vec<Lit> = (0..allowed).map(|_| enc.solver.new_lit()).collect();
            for (e, &l) in lits.iter().enumerate() {
                vals[e] = Val::Lit(l);
            }
            enc.add_clause(&lits)?;
            for a in 0..lits.len() {
                for b in a + 1..lits.len() {
                    enc.add_clause(&[!lits[a], !lits[b]])?;
                }
            }
            enc.individuals.insert(o.clone(), vals);
        }
        if una {
            for e in 0..d {
                let on_e: Vec<Lit> = enc
                    .individuals
                    .values()
                    .filter_map(|v| match v[e] {
                        Val::Lit(l) => Some(l),
                        _ => None,
                    })
                    .collect();
                for a in 0..on_e.len() {
                    for b in a + 1..on_e.len() {
                        enc.add_clause(&[!on_e[a], !on_e[b]])?;
                    }
                }
            }
        }
        Ok(enc)
    }

    fn add_clause(&mut self, lits: &[Lit]) -> Result<()> {
        self.clauses += 1;
        if self.clauses > self.budget.clauses {
            return Err(Error::Budget(format!(
                "bounded model search exceeded {} clauses at domain size {}",
                self.budget.clauses, self.d
            )));
        }
        self.solver.add_clause(lits);
        Ok(())
    }

    fn and(&mut self, vals: &[Val]) -> Result<Val> {
        let mut lits = Vec::with_capacity(vals.len());
        for v in vals {
            match v {
                Val::False => return Ok(Val::False),
                Val::True => {}
                Val::Lit(l) => lits.push(*l),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        match lits.len() {
            0 => Ok(Val::True),
            1 => Ok(Val::Lit(lits[0])),
            _ => {
                let g = self.solver.new_lit();
                let mut long = Vec::with_capacity(lits.len() + 1);
                for &l in &lits {
                    self.add_clause(&[!g, l])?;
                    long.push(!l);
                }
                long.push(g);
                self.add_clause(&long)?;
                Ok(Val::Lit(g))
            }
        }
    }

    fn or(&mut self, vals: &[Val]) -> Result<Val> {
        let negated: Vec<Val> = vals.iter().map(|v| v.not()).collect();
        Ok(self.and(&negated)?.not())
    }

    /// True iff at least `n` of `vals` are true.
    fn at_least(&mut self, n: u32, vals: &[Val]) -> Result<Val> {
        let n = n as usize;
        if n == 0 {
            return Ok(Val::True);
        }
        if n > vals.len() {
            return Ok(Val::False);
        }
        // row[j] = "at least j of the values seen so far", j = 0..=n
        let mut row = vec![Val::False; n + 1];
        row[0] = Val::True;
        for v in vals {
            let mut next = row.clone();
            for j in 1..=n {
                let carried = self.and(&[row[j - 1], *v])?;
                next[j] = self.or(&[row[j], carried])?;
            }
            row = next;
        }
        Ok(row[n])
    }

    fn term(&self, t: &Term) -> Result<&Vec<Val>> {
        match t {
            Term::Ind(o) => self.individuals.get(o).ok_or_else(|| Error::Internal(format!("individual {o} not encoded"))),
            Term::Var(v) => Err(Error::NotGround { what: "knowledge base", var: v.clone() }),
        }
    }

    fn concept(&mut self, c: &ConceptExpr, e: usize) -> Result<Val> {
        let key = (c as *const ConceptExpr as usize, e);
        if let Some(v) = self.concept_memo.get(&key) {
            return Ok(*v);
        }
        let d = self.d;
        let v = match c {
            ConceptExpr::Name(a) => Val::Lit(self.concepts[a][e]),
            ConceptExpr::Nominal(t) => self.term(t)?[e],
            ConceptExpr::Top => Val::True,
            ConceptExpr::Bottom => Val::False,
            ConceptExpr::And(a, b) => {
                let (x, y) = (self.concept(a, e)?, self.concept(b, e)?);
                self.and(&[x, y])?
            }
            ConceptExpr::Or(a, b) => {
                let (x, y) = (self.concept(a, e)?, self.concept(b, e)?);
                self.or(&[x, y])?
            }
            ConceptExpr::Not(a) => self.concept(a, e)?.not(),
            ConceptExpr::Exists(r, f) | ConceptExpr::AtLeast(_, r, f) | ConceptExpr::AtMost(_, r, f) => {
                let mut succ = Vec::with_capacity(d);
                for g in 0..d {
                    let (x, y) = (self.role(r, e, g)?, self.concept(f, g)?);
                    succ.push(self.and(&[x, y])?);
                }
                match c {
                    ConceptExpr::Exists(..) => self.or(&succ)?,
                    ConceptExpr::AtLeast(n, ..) => self.at_least(*n, &succ)?,
                    ConceptExpr::AtMost(n, ..) => self.at_least(n.saturating_add(1), &succ)?.not(),
                    _ => unreachable!(),
                }
            }
            ConceptExpr::Forall(r, f) => {
                let mut each = Vec::with_capacity(d);
                for g in 0..d {
                    let (x, y) = (self.role(r, e, g)?, self.concept(f, g)?);
                    each.push(self.or(&[x.not(), y])?);
                }
                self.and(&each)?
            }
        };
        self.concept_memo.insert(key, v);
        Ok(v)
    }

    fn role(&mut self, r: &RoleExpr, e: usize, f: usize) -> Result<Val> {
        let key = (r as *const RoleExpr as usize, e, f);
        if let Some(v) = self.role_memo.get(&key) {
            return Ok(*v);
        }
        let v = match r {
            RoleExpr::Name(p) => Val::Lit(self.roles[p][e * self.d + f]),
            RoleExpr::Inverse(a) => self.role(a, f, e)?,
            RoleExpr::Singleton(a, b) => {
                let (x, y) = (self.term(a)?[e], self.term(b)?[f]);
                self.and(&[x, y])?
            }
            RoleExpr::Union(a, b) => {
                let (x, y) = (self.role(a, e, f)?, self.role(b, e, f)?);
                self.or(&[x, y])?
            }
            RoleExpr::Difference(a, b) => {
                let (x, y) = (self.role(a, e, f)?, self.role(b, e, f)?);
                self.and(&[x, y.not()])?
            }
            RoleExpr::Complement(a) => self.role(a, e, f)?.not(),
            RoleExpr::RangeRestrict(a, c) => {
                let (x, y) = (self.role(a, e, f)?, self.concept(c, f)?);
                self.and(&[x, y])?
            }
            RoleExpr::DomainRestrict(c, a) => {
                let (x, y) = (self.concept(c, e)?, self.role(a, e, f)?);
                self.and(&[x, y])?
            }
        };
        self.role_memo.insert(key, v);
        Ok(v)
    }

    fn axiom(&mut self, a: &Axiom) -> Result<Val> {
        let d = self.d;
        match a {
            Axiom::ConceptInclusion(c, dd) => {
                let mut each = Vec::with_capacity(d);
                for e in 0..d {
                    let (x, y) = (self.concept(c, e)?, self.concept(dd, e)?);
                    each.push(self.or(&[x.not(), y])?);
                }
                self.and(&each)
            }
            Axiom::RoleInclusion(r, s) => {
                let mut each = Vec::with_capacity(d * d);
                for e in 0..d {
                    for f in 0..d {
                        let (x, y) = (self.role(r, e, f)?, self.role(s, e, f)?);
                        each.push(self.or(&[x.not(), y])?);
                    }
                }
                self.and(&each)
            }
            Axiom::ConceptAssertion(t, c) => {
                let place = self.term(t)?.clone();
                let mut cases = Vec::new();
                for e in 0..d {
                    if place[e] == Val::False {
                        continue;
                    }
                    let x = self.concept(c, e)?;
                    cases.push(self.and(&[place[e], x])?);
                }
                self.or(&cases)
            }
            Axiom::RoleAssertion(t, u, r) => {
                let (pt, pu) = (self.term(t)?.clone(), self.term(u)?.clone());
                let mut cases = Vec::new();
                for e in 0..d {
                    for f in 0..d {
                        if pt[e] == Val::False || pu[f] == Val::False {
                            continue;
                        }
                        let x = self.role(r, e, f)?;
                        cases.push(self.and(&[pt[e], pu[f], x])?);
                    }
                }
                self.or(&cases)
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<Val> {
        match f {
            Formula::Atom(a) => self.axiom(a),
            Formula::And(a, b) => {
                let (x, y) = (self.formula(a)?, self.formula(b)?);
                self.and(&[x, y])
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.formula(a)?, self.formula(b)?);
                self.or(&[x, y])
            }
            Formula::Neg(a) => Ok(self.formula(a)?.not()),
        }
    }

    fn solve(mut self, una: bool) -> Result<Option<Interpretation>> {
        let sat = self
            .solver
            .solve()
            .map_err(|e| Error::Internal(format!("SAT solver failure: {e}")))?;
        if !sat {
            return Ok(None);
        }
        let model = self.solver.model().ok_or_else(|| Error::Internal("SAT solver returned no model".into()))?;
        let mut truth = vec![false; model.iter().map(|l| l.var().index() + 1).max().unwrap_or(0)];
        for l in &model {
            truth[l.var().index()] = l.is_positive();
        }
        let holds = |l: Lit| truth.get(l.var().index()).copied().unwrap_or(false) == l.is_positive();
        let d = self.d;
        let mut out = Interpretation::with_size(d)?;
        for (a, lits) in &self.concepts {
            let mut set = fixedbitset::FixedBitSet::with_capacity(d);
            for (e, &l) in lits.iter().enumerate() {
                set.set(e, holds(l));
            }
            out.set_concept(a, set)?;
        }
        for (p, lits) in &self.roles {
            let mut rel = Relation::empty(d);
            for e in 0..d {
                for f in 0..d {
                    if holds(lits[e * d + f]) {
                        rel.insert(e, f);
                    }
                }
            }
            out.set_role(p, rel)?;
        }
        for (o, vals) in &self.individuals {
            let e = vals
                .iter()
                .position(|v| matches!(v, Val::Lit(l) if holds(*l)))
                .ok_or_else(|| Error::Internal(format!("individual {o} has no element")))?;
            out.map_individual(o, e)?;
        }
        out.set_una(una)?;
        Ok(Some(out))
    }
}

/// Looks for a model of `k` with at most `max_domain` elements, trying
/// domain sizes in increasing order. Individuals not occurring in `k` are
/// not interpreted. With `una`, distinct individuals get distinct elements.
pub fn sat_bounded(k: &Formula, max_domain: usize, una: bool, budget: &Budget) -> Result<SatVerdict> {
    if let Some(var) = k.signature().variables.into_iter().next() {
        return Err(Error::NotGround { what: "knowledge base", var });
    }
    let n_ind = k.signature().individuals.len();
    for d in 1..=max_domain {
        if una && n_ind > d {
            continue;
        }
        budget.check_time()?;
        let mut enc = Encoder::new(d, k, una, budget)?;
        let root = enc.formula(k)?;
        match root {
            Val::False => continue,
            Val::True => {}
            Val::Lit(l) => enc.add_clause(&[l])?,
        }
        if let Some(model) = enc.solve(una)? {
            if !model.models(k)? {
                return Err(Error::Internal("bounded search produced an invalid model".into()));
            }
            return Ok(SatVerdict::Satisfiable(model));
        }
    }
    Ok(SatVerdict::NoModelUpTo(max_domain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn run(src: &str, max: usize, una: bool) -> SatVerdict {
        sat_bounded(&parse_formula(src).unwrap(), max, una, &Budget::default()).unwrap()
    }

    #[test]
    fn contradictory_assertion() {
        assert_eq!(run("o : A & A <= not A", 3, false), SatVerdict::NoModelUpTo(3));
    }

    #[test]
    fn singleton_model() {
        match run("o : A", 1, false) {
            SatVerdict::Satisfiable(m) => assert_eq!(m.size(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example_kb_is_satisfiable() {
        let k1 = "Prj <= ActivePrj or FinishedPrj & exists worksFor . Top <= Empl & exists inv worksFor . Top <= Prj";
        assert!(matches!(run(k1, 5, false), SatVerdict::Satisfiable(_)));
    }

    #[test]
    fn una_and_counting() {
        assert!(matches!(run("a : {b}", 2, false), SatVerdict::Satisfiable(_)));
        assert_eq!(run("a : {b}", 3, true), SatVerdict::NoModelUpTo(3));
        // Three distinct successors need at least three elements besides none.
        match run("o : atleast 3 p . Top", 4, false) {
            SatVerdict::Satisfiable(m) => assert_eq!(m.size(), 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(run("o : atleast 2 p . A & o : atmost 1 p . Top", 4, false), SatVerdict::NoModelUpTo(4));
    }

    #[test]
    fn smallest_domain_first() {
        match run("a : A & b : not A", 3, false) {
            SatVerdict::Satisfiable(m) => assert_eq!(m.size(), 2),
            other => panic!("{other:?}"),
        }
    }
}
