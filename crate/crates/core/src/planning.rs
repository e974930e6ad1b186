//! Bounded planning: plan search from a concrete interpretation, plan
//! existence from a precondition, certification of a fixed plan, and
//! synthesis of a plan that works from every model of a precondition.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::{self, Write};

use crate::action::{execute, execute_all};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::interp::Interpretation;
use crate::regression::{tr_branches_pos, BranchChoice};
use crate::sat::{check_sat, Backend, SatVerdict};
use crate::syntax::{
    free_variables_formula, Action, Formula, FreshNames, Name, NamedAction, Signature, Substitution,
};
use crate::verify::{fragment_check, mention_all, prepare_target, verify_pre_post, VerifyVerdict};

/// One step of a plan: a ground instance of a member of the action set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanStep {
    /// Name of the action-set member this step instantiates.
    pub source: String,
    pub substitution: Substitution,
    pub action: Action,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn actions(&self) -> Vec<&Action> {
        self.steps.iter().map(|s| &s.action).collect()
    }

    /// The steps as one action.
    pub fn concatenated(&self) -> Action {
        self.steps.iter().fold(Action::skip(), |acc, s| acc.then(&s.action))
    }

    /// An action-set file with one block per step, each preceded by a
    /// comment naming its source and substitution.
    pub fn to_action_file(&self) -> String {
        let mut out = String::new();
        if self.steps.is_empty() {
            out.push_str("# empty plan\n");
        }
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "# step {}: {} {}", i + 1, s.source, s.substitution);
            let _ = writeln!(out, "action step{} {{", i + 1);
            for line in s.action.pretty().lines() {
                let _ = writeln!(out, "  {line}");
            }
            out.push_str("}\n");
        }
        out
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("<>");
        }
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| if s.substitution.is_empty() { s.source.clone() } else { format!("{}{}", s.source, s.substitution) })
            .collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// All ground instances of the members of `acts` with variables ranging
/// over `universe`, in member order and then lexicographically.
pub fn ground_instances(acts: &[NamedAction], universe: &[Name]) -> Vec<PlanStep> {
    let mut out = Vec::new();
    for na in acts {
        let vars: Vec<Name> = na.action.signature().variables.into_iter().collect();
        if !vars.is_empty() && universe.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; vars.len()];
        loop {
            let sigma = Substitution::from_pairs(vars.iter().cloned().zip(idx.iter().map(|&i| universe[i].clone())));
            out.push(PlanStep { source: na.name.clone(), action: sigma.apply_action(&na.action), substitution: sigma });
            let mut pos = vars.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < universe.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if vars.is_empty() || pos == usize::MAX {
                break;
            }
        }
    }
    out
}

/// A plan found from a concrete interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundPlan {
    pub plan: Plan,
    /// The initial interpretation after adding the fresh elements.
    pub start: Interpretation,
    pub end: Interpretation,
}

/// Number of interpretations over a fixed domain of `d` elements and the
/// given signature, saturating at `usize::MAX`.
pub fn state_bound(concepts: usize, roles: usize, d: usize) -> usize {
    let exp = roles.saturating_mul(d.saturating_mul(d)).saturating_add(concepts.saturating_mul(d));
    if exp >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        1usize << exp
    }
}

/// Breadth-first search for a shortest plan reaching `goal` from `i` with
/// `k` fresh elements added to its domain. Ground instances range over the
/// individuals of the expanded interpretation; states equal up to renaming
/// anonymous elements are visited once. `None` means the reachable states
/// are exhausted or no plan of at most `length_cap` steps exists.
pub fn find_plan(
    i: &Interpretation,
    acts: &[NamedAction],
    goal: &Formula,
    k: usize,
    length_cap: Option<usize>,
    budget: &Budget,
) -> Result<Option<FoundPlan>> {
    if let Some(var) = goal.signature().variables.into_iter().next() {
        return Err(Error::NotGround { what: "goal", var });
    }
    let start = i.expand_domain(k);
    let universe = start.individual_names();
    let steps = ground_instances(acts, &universe);
    let mut sig = goal.signature();
    for na in acts {
        sig.merge(&na.action.signature());
    }
    let mut concepts: BTreeSet<Name> = sig.concepts;
    concepts.extend(start.concept_names().cloned());
    let mut roles: BTreeSet<Name> = sig.roles;
    roles.extend(start.role_names().cloned());
    let cap = state_bound(concepts.len(), roles.len(), start.size()).min(length_cap.unwrap_or(usize::MAX));

    struct Node {
        state: Interpretation,
        parent: usize,
        step: usize,
        depth: usize,
    }
    let mut nodes = vec![Node { state: start.clone(), parent: usize::MAX, step: usize::MAX, depth: 0 }];
    let mut visited = HashSet::from([start.fingerprint()]);
    let mut queue = VecDeque::from([0usize]);
    let rebuild = |nodes: &[Node], mut at: usize| {
        let mut out = Vec::new();
        while nodes[at].parent != usize::MAX {
            out.push(steps[nodes[at].step].clone());
            at = nodes[at].parent;
        }
        out.reverse();
        Plan { steps: out }
    };
    if start.models(goal)? {
        return Ok(Some(FoundPlan { plan: Plan::default(), end: start.clone(), start }));
    }
    while let Some(at) = queue.pop_front() {
        budget.check_time()?;
        if nodes[at].depth >= cap {
            continue;
        }
        for (si, step) in steps.iter().enumerate() {
            let next = execute(&nodes[at].state, &step.action)?;
            if !visited.insert(next.fingerprint()) {
                continue;
            }
            if visited.len() > budget.states {
                return Err(Error::Budget(format!("plan search visited more than {} states", budget.states)));
            }
            let depth = nodes[at].depth + 1;
            let reached = next.models(goal)?;
            nodes.push(Node { state: next, parent: at, step: si, depth });
            let id = nodes.len() - 1;
            if reached {
                let plan = rebuild(&nodes, id);
                let end = nodes.swap_remove(id).state;
                return Ok(Some(FoundPlan { plan, start, end }));
            }
            queue.push_back(id);
        }
    }
    Ok(None)
}

/// Substitutions for `vars` up to renaming of fresh names: each variable
/// maps to one of `base` or to a fresh name, with fresh names introduced
/// in order.
fn canonical_substitutions(vars: &[Name], base: &[Name], fresh: &mut FreshNames) -> Vec<Substitution> {
    let pool: Vec<Name> = (0..vars.len()).map(|_| fresh.next_name()).collect();
    let mut out = Vec::new();
    fn go(i: usize, vars: &[Name], base: &[Name], pool: &[Name], used: usize, cur: &mut Vec<Name>, out: &mut Vec<Substitution>) {
        if i == vars.len() {
            out.push(Substitution::from_pairs(vars.iter().cloned().zip(cur.iter().cloned())));
            return;
        }
        for b in base.iter().chain(&pool[..used]) {
            cur.push(b.clone());
            go(i + 1, vars, base, pool, used, cur, out);
            cur.pop();
        }
        if used < pool.len() {
            cur.push(pool[used].clone());
            go(i + 1, vars, base, pool, used + 1, cur, out);
            cur.pop();
        }
    }
    go(0, vars, base, &pool, 0, &mut Vec::new(), &mut out);
    out
}

fn formula_names(fs: &[&Formula], acts: &[NamedAction]) -> Signature {
    let mut sig = Signature::default();
    for f in fs {
        sig.merge(&f.signature());
    }
    for a in acts {
        sig.merge(&a.action.signature());
    }
    sig
}

/// A positive answer to plan existence from a precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanWitness {
    /// Shared substitution for the variables of the precondition and goal.
    pub sigma: Substitution,
    pub plan: Plan,
    /// An interpretation satisfying the substituted precondition from
    /// which the plan reaches the substituted goal.
    pub witness: Interpretation,
    pub branch: BranchChoice,
}

/// Searches for a substitution, a plan of at most `k` steps and a finite
/// interpretation satisfying the substituted precondition from which the
/// plan reaches the substituted goal. Shorter plans are tried first.
pub fn plan_exists(
    acts: &[NamedAction],
    pre: &Formula,
    goal: &Formula,
    k: usize,
    backend: Backend,
    budget: &Budget,
) -> Result<Option<PlanWitness>> {
    if backend == Backend::DlLite {
        fragment_check(&[pre, goal], &acts.iter().map(|a| &a.action).collect::<Vec<_>>())?;
    }
    let sig = formula_names(&[pre, goal], acts);
    let base: Vec<Name> = sig.individuals.iter().cloned().collect();
    let mut fresh = FreshNames::new(sig.all_names());
    let mut vars: Vec<Name> = free_variables_formula(pre);
    for v in free_variables_formula(goal) {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let sigmas = canonical_substitutions(&vars, &base, &mut fresh);
    let mut candidates = 0usize;
    for len in 0..=k {
        for sigma in &sigmas {
            let pre_s = sigma.apply_formula(pre);
            let goal_s = sigma.apply_formula(goal);
            let mut names: Vec<Name> = base.clone();
            names.extend(sigma.0.values().cloned());
            names.sort();
            names.dedup();
            let mut search = SequenceSearch {
                acts,
                len,
                fresh: fresh.clone(),
                pre: &pre_s,
                goal: &goal_s,
                backend,
                budget,
                candidates: &mut candidates,
            };
            if let Some((plan, witness, branch)) = search.run(&mut Vec::new(), &mut names)? {
                return Ok(Some(PlanWitness { sigma: sigma.clone(), plan, witness, branch }));
            }
        }
    }
    Ok(None)
}

struct SequenceSearch<'a, 'c> {
    acts: &'a [NamedAction],
    len: usize,
    fresh: FreshNames,
    pre: &'a Formula,
    goal: &'a Formula,
    backend: Backend,
    budget: &'a Budget,
    candidates: &'c mut usize,
}

impl SequenceSearch<'_, '_> {
    /// Extends `prefix` to the target length; action variables range over
    /// the names seen so far and one new fresh name.
    fn run(&mut self, prefix: &mut Vec<PlanStep>, names: &mut Vec<Name>) -> Result<Option<(Plan, Interpretation, BranchChoice)>> {
        if prefix.len() == self.len {
            return self.check(prefix);
        }
        for na in self.acts {
            let vars: Vec<Name> = na.action.signature().variables.into_iter().collect();
            let mut fresh = self.fresh.clone();
            let sigmas = canonical_substitutions(&vars, names, &mut fresh);
            for sigma in sigmas {
                let added: Vec<Name> = sigma.0.values().filter(|n| !names.contains(n)).cloned().collect();
                let saved = self.fresh.clone();
                for n in &added {
                    self.fresh.avoid(n.clone());
                    names.push(n.clone());
                }
                prefix.push(PlanStep { source: na.name.clone(), action: sigma.apply_action(&na.action), substitution: sigma });
                let found = self.run(prefix, names)?;
                prefix.pop();
                names.truncate(names.len() - added.len());
                self.fresh = saved;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }

    fn check(&mut self, prefix: &[PlanStep]) -> Result<Option<(Plan, Interpretation, BranchChoice)>> {
        *self.candidates += 1;
        if *self.candidates > self.budget.states {
            return Err(Error::Budget(format!("plan existence examined more than {} candidates", self.budget.states)));
        }
        self.budget.check_time()?;
        let plan = Plan { steps: prefix.to_vec() };
        let whole = plan.concatenated();
        let mut names = whole.signature().individuals;
        names.extend(self.pre.signature().individuals);
        names.extend(self.goal.signature().individuals);
        let mentions = mention_all(&names);
        for (branch, member) in tr_branches_pos(&whole, self.goal) {
            let target =
                prepare_target(Formula::and(Formula::and(self.pre.clone(), member), mentions.clone()), self.backend)?;
            if let SatVerdict::Satisfiable(w) = check_sat(&target, self.backend, self.budget)? {
                if !w.models(self.pre)? || !execute_all(&w, plan.actions())?.models(self.goal)? {
                    return Err(Error::Internal("plan witness fails re-validation".into()));
                }
                return Ok(Some((plan, w, branch)));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifyVerdict {
    /// The plan reaches the goal from every model of the precondition.
    /// Only complete backends report this.
    Certified,
    /// A model of the precondition from which the plan misses the goal.
    Refuted { counterexample: Interpretation, branch: BranchChoice },
    /// No counterexample with at most this many elements.
    UnknownUpTo(usize),
}

impl fmt::Display for CertifyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyVerdict::Certified => f.write_str("certified"),
            CertifyVerdict::Refuted { branch, .. } => write!(f, "refuted (branch {branch})"),
            CertifyVerdict::UnknownUpTo(n) => write!(f, "no counterexample up to domain size {n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyReport {
    pub verdict: CertifyVerdict,
    /// Every variable of the plan, precondition and goal, mapped to a
    /// fresh individual.
    pub grounding: Substitution,
}

/// Checks that the plan reaches `goal` from every model of `pre`, for
/// every substitution of the variables. Variables, shared between the
/// plan and the formulae, are replaced by fresh individuals.
pub fn certify(plan: &[Action], pre: &Formula, goal: &Formula, backend: Backend, budget: &Budget) -> Result<CertifyReport> {
    let mut sig = pre.signature();
    sig.merge(&goal.signature());
    for a in plan {
        sig.merge(&a.signature());
    }
    let mut fresh = FreshNames::new(sig.all_names());
    let grounding = Substitution::from_pairs(sig.variables.iter().map(|v| (v.clone(), fresh.next_name())));
    if backend == Backend::DlLite {
        fragment_check(&[pre, goal], &plan.iter().collect::<Vec<_>>())?;
    }
    let whole = plan.iter().fold(Action::skip(), |acc, a| acc.then(&grounding.apply_action(a)));
    let pre_g = grounding.apply_formula(pre);
    let goal_g = grounding.apply_formula(goal);
    let report = verify_pre_post(&whole, &pre_g, &goal_g, backend, budget)?;
    let verdict = match report.verdict {
        VerifyVerdict::Preserving => CertifyVerdict::Certified,
        VerifyVerdict::NotPreserving { counterexample, branch } => CertifyVerdict::Refuted { counterexample, branch },
        VerifyVerdict::NoCounterexampleUpTo(n) => CertifyVerdict::UnknownUpTo(n),
    };
    Ok(CertifyReport { verdict, grounding })
}

/// A synthesized plan with the certification result that accepted it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesized {
    pub plan: Plan,
    /// `Certified`, or `UnknownUpTo` for the bounded backend.
    pub verdict: CertifyVerdict,
}

/// Candidate steps for synthesis: each member with its variables mapped to
/// individuals of the input or left as (universally quantified) variables.
fn synthesis_steps(acts: &[NamedAction], base: &[Name]) -> Vec<PlanStep> {
    let mut out = Vec::new();
    for na in acts {
        let vars: Vec<Name> = na.action.signature().variables.into_iter().collect();
        let mut choices: Vec<Option<usize>> = vec![None; vars.len()];
        loop {
            let sigma = Substitution::from_pairs(
                vars.iter().zip(&choices).filter_map(|(v, c)| c.map(|i| (v.clone(), base[i].clone()))),
            );
            out.push(PlanStep { source: na.name.clone(), action: sigma.apply_action(&na.action), substitution: sigma });
            let mut pos = 0;
            while pos < choices.len() {
                choices[pos] = match choices[pos] {
                    None if !base.is_empty() => Some(0),
                    Some(i) if i + 1 < base.len() => Some(i + 1),
                    _ => None,
                };
                if choices[pos].is_some() {
                    break;
                }
                pos += 1;
            }
            if pos == choices.len() {
                break;
            }
        }
    }
    out
}

/// Searches, in order of length and then lexicographically over candidate
/// steps, for a plan of at most `k` steps that certification accepts.
pub fn synthesize(
    acts: &[NamedAction],
    pre: &Formula,
    goal: &Formula,
    k: usize,
    backend: Backend,
    budget: &Budget,
) -> Result<Option<Synthesized>> {
    if backend == Backend::DlLite {
        fragment_check(&[pre, goal], &acts.iter().map(|a| &a.action).collect::<Vec<_>>())?;
    }
    let sig = formula_names(&[pre, goal], acts);
    let base: Vec<Name> = sig.individuals.into_iter().collect();
    let steps = synthesis_steps(acts, &base);
    let mut examined = 0usize;
    for len in 0..=k {
        if len > 0 && steps.is_empty() {
            break;
        }
        let mut idx = vec![0usize; len];
        loop {
            examined += 1;
            if examined > budget.states {
                return Err(Error::Budget(format!("synthesis examined more than {} candidates", budget.states)));
            }
            let plan = Plan { steps: idx.iter().map(|&i| steps[i].clone()).collect() };
            let actions: Vec<Action> = plan.steps.iter().map(|s| s.action.clone()).collect();
            let report = certify(&actions, pre, goal, backend, budget)?;
            match report.verdict {
                CertifyVerdict::Refuted { .. } => {}
                verdict => return Ok(Some(Synthesized { plan, verdict })),
            }
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < steps.len() {
                    pos += 1;
                    break;
                }
                idx[pos] = 0;
            }
            if pos == 0 {
                break;
            }
        }
    }
    Ok(None)
}
