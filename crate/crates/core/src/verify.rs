//! Static verification: does every execution of an action from a model of
//! a knowledge base end in a model of it (or of a second, post-condition
//! knowledge base)?
//!
//! The action's variables are replaced by fresh individuals. The action
//! then fails to preserve `K` exactly when `K` together with some member of
//! the negated branch set of `K` is finitely satisfiable; each member is
//! handed to a satisfiability backend in turn.

use std::collections::BTreeSet;
use std::fmt;

use crate::action::execute;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::interp::Interpretation;
use crate::regression::{eliminate_negated_inclusions_una, split_positive_inclusions, tr_branches_neg, BranchChoice};
use crate::sat::{check_sat, Backend, SatVerdict};
use crate::syntax::{
    canonical_grounding, is_dllite_formula, is_simple_action, Action, Axiom, ConceptExpr, Formula, FreshNames, Name,
    Substitution, Term,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyVerdict {
    /// Every execution from a model of the precondition ends in a model of
    /// the postcondition. Only complete backends report this.
    Preserving,
    /// An interpretation satisfying the precondition from which the
    /// grounded action leads outside the postcondition, found on the given
    /// branch.
    NotPreserving { counterexample: Interpretation, branch: BranchChoice },
    /// No counterexample with at most this many elements.
    NoCounterexampleUpTo(usize),
}

impl fmt::Display for VerifyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyVerdict::Preserving => f.write_str("preserving"),
            VerifyVerdict::NotPreserving { branch, .. } => write!(f, "not preserving (branch {branch})"),
            VerifyVerdict::NoCounterexampleUpTo(n) => write!(f, "no counterexample up to domain size {n}"),
        }
    }
}

/// A verdict with the grounding of the action it refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdict: VerifyVerdict,
    /// Variables of the action mapped to fresh individuals.
    pub grounding: Substitution,
    pub grounded: Action,
    pub branches_checked: usize,
}

/// `o : Top` for each name, so that a model interprets all of them.
pub(crate) fn mention_all(names: &BTreeSet<Name>) -> Formula {
    Formula::conj(
        names.iter().map(|o| Axiom::concept_assert(Term::Ind(o.clone()), ConceptExpr::Top).into()),
    )
}

fn require_kb(f: &Formula, what: &'static str) -> Result<()> {
    match f.signature().variables.into_iter().next() {
        Some(var) => Err(Error::NotGround { what, var }),
        None => Ok(()),
    }
}

pub(crate) fn fragment_check(kbs: &[&Formula], actions: &[&Action]) -> Result<()> {
    let mut violations = Vec::new();
    for k in kbs {
        violations.extend(is_dllite_formula(k).violations);
    }
    for a in actions {
        violations.extend(is_simple_action(a).violations);
    }
    let mut seen = BTreeSet::new();
    violations.retain(|v| seen.insert(v.clone()));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Fragment(violations))
    }
}

/// Prepares a satisfiability target for the chosen backend. The complete
/// backend needs negated inclusions turned into assertions about fresh or
/// named individuals and the result to stay in its fragment.
pub(crate) fn prepare_target(target: Formula, backend: Backend) -> Result<Formula> {
    match backend {
        Backend::Bounded { .. } => Ok(target),
        Backend::DlLite => {
            let sig = target.signature();
            let named: Vec<Name> = sig.individuals.iter().cloned().collect();
            let mut fresh = FreshNames::new(sig.all_names());
            let out = split_positive_inclusions(&eliminate_negated_inclusions_una(&target, &named, &mut fresh));
            let report = is_dllite_formula(&out);
            if !report.is_ok() {
                return Err(Error::Fragment(
                    report.violations.into_iter().map(|v| format!("after regression: {v}")).collect(),
                ));
            }
            Ok(out)
        }
    }
}

/// Checks that `alpha` maps every model of `k` to a model of `k`.
pub fn verify_preserving(alpha: &Action, k: &Formula, backend: Backend, budget: &Budget) -> Result<VerifyReport> {
    verify_pre_post(alpha, k, k, backend, budget)
}

/// Checks that `alpha` maps every model of `pre` to a model of `post`.
pub fn verify_pre_post(
    alpha: &Action,
    pre: &Formula,
    post: &Formula,
    backend: Backend,
    budget: &Budget,
) -> Result<VerifyReport> {
    require_kb(pre, "precondition")?;
    require_kb(post, "postcondition")?;
    if backend == Backend::DlLite {
        fragment_check(&[pre, post], &[alpha])?;
    }
    let mut avoid = pre.signature().all_names();
    avoid.extend(post.signature().all_names());
    let (grounded, grounding) = canonical_grounding(alpha, &avoid);
    let mut report = VerifyReport { verdict: VerifyVerdict::Preserving, grounding, grounded, branches_checked: 0 };
    if report.grounded.is_effect_free() && pre == post {
        return Ok(report);
    }
    let mut names = report.grounded.signature().individuals;
    names.extend(pre.signature().individuals);
    names.extend(post.signature().individuals);
    let mentions = mention_all(&names);
    let mut exhausted = None;
    for (branch, member) in tr_branches_neg(&report.grounded, post) {
        budget.check_time()?;
        report.branches_checked += 1;
        let target = prepare_target(Formula::and(Formula::and(pre.clone(), member), mentions.clone()), backend)?;
        match check_sat(&target, backend, budget)? {
            SatVerdict::Satisfiable(w) => {
                validate_counterexample(&w, &report.grounded, pre, post)?;
                report.verdict = VerifyVerdict::NotPreserving { counterexample: w, branch };
                return Ok(report);
            }
            SatVerdict::Unsatisfiable => {}
            SatVerdict::NoModelUpTo(n) => exhausted = Some(n),
        }
    }
    if let Some(n) = exhausted {
        report.verdict = VerifyVerdict::NoCounterexampleUpTo(n);
    }
    Ok(report)
}

/// Executes the action on the candidate directly, independently of the
/// regression that produced it.
fn validate_counterexample(w: &Interpretation, alpha: &Action, pre: &Formula, post: &Formula) -> Result<()> {
    if !w.models(pre)? {
        return Err(Error::Internal("counterexample violates the precondition".into()));
    }
    if execute(w, alpha)?.models(post)? {
        return Err(Error::Internal("counterexample satisfies the postcondition after execution".into()));
    }
    Ok(())
}
