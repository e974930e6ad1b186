//! Interpretation updates and execution of ground actions.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::interp::{Evaluator, Interpretation, Relation};
use crate::syntax::{Action, Formula, Name, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Add,
    Remove,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Elements(BTreeSet<Name>),
    Pairs(BTreeSet<(Name, Name)>),
}

/// Adds or removes a set of elements (pairs) to or from a concept (role)
/// name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateOp {
    pub target: Name,
    pub mode: Mode,
    pub payload: Payload,
}

/// Applies one update. Only the target's extension changes.
pub fn update(i: &Interpretation, u: &UpdateOp) -> Result<Interpretation> {
    let mut out = i.clone();
    match &u.payload {
        Payload::Elements(elems) => {
            let mut set = FixedBitSet::with_capacity(i.size());
            for e in elems {
                set.insert(i.element_index(e)?);
            }
            apply_concept(&mut out, &u.target, u.mode, &set);
        }
        Payload::Pairs(pairs) => {
            let mut rel = Relation::empty(i.size());
            for (a, b) in pairs {
                rel.insert(i.element_index(a)?, i.element_index(b)?);
            }
            apply_role(&mut out, &u.target, u.mode, &rel);
        }
    }
    Ok(out)
}

fn apply_concept(i: &mut Interpretation, a: &Name, mode: Mode, set: &FixedBitSet) {
    let ext = i.concept_mut(a);
    match mode {
        Mode::Add => ext.union_with(set),
        Mode::Remove => ext.difference_with(set),
    }
}

fn apply_role(i: &mut Interpretation, p: &Name, mode: Mode, rel: &Relation) {
    let ext = i.role_mut(p);
    match mode {
        Mode::Add => ext.union_with(rel),
        Mode::Remove => ext.difference_with(rel),
    }
}

/// One entry of an execution trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Update {
        step: String,
        added: Vec<String>,
        removed: Vec<String>,
    },
    Guard {
        guard: Formula,
        holds: bool,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Update { step, added, removed } => {
                write!(f, "{step}")?;
                if !added.is_empty() {
                    write!(f, "  [+ {}]", added.join(", "))?;
                }
                if !removed.is_empty() {
                    write!(f, "  [- {}]", removed.join(", "))?;
                }
                if added.is_empty() && removed.is_empty() {
                    write!(f, "  [no change]")?;
                }
                Ok(())
            }
            TraceEvent::Guard { guard, holds } => {
                write!(f, "if {guard}  [{}]", if *holds { "then" } else { "else" })
            }
        }
    }
}

fn require_ground(a: &Action) -> Result<()> {
    match a.signature().variables.into_iter().next() {
        Some(var) => Err(Error::NotGround { what: "action", var }),
        None => Ok(()),
    }
}

/// Executes a ground action: each basic step evaluates its payload on the
/// interpretation produced by the previous steps.
pub fn execute(i: &Interpretation, a: &Action) -> Result<Interpretation> {
    require_ground(a)?;
    let mut cur = i.clone();
    run(&mut cur, a, None)?;
    Ok(cur)
}

/// Like [`execute`], also recording every update and guard decision.
pub fn execute_traced(i: &Interpretation, a: &Action) -> Result<(Interpretation, Vec<TraceEvent>)> {
    require_ground(a)?;
    let mut cur = i.clone();
    let mut trace = Vec::new();
    run(&mut cur, a, Some(&mut trace))?;
    Ok((cur, trace))
}

/// Executes a sequence of ground actions one after the other.
pub fn execute_all<'a>(i: &Interpretation, actions: impl IntoIterator<Item = &'a Action>) -> Result<Interpretation> {
    let mut cur = i.clone();
    for a in actions {
        require_ground(a)?;
        run(&mut cur, a, None)?;
    }
    Ok(cur)
}

fn run(cur: &mut Interpretation, a: &Action, mut trace: Option<&mut Vec<TraceEvent>>) -> Result<()> {
    for step in &a.steps {
        match step {
            Step::AddConcept(name, c) | Step::RemoveConcept(name, c) => {
                let set = Evaluator::new(cur).concept(c)?;
                let mode = if matches!(step, Step::AddConcept(..)) { Mode::Add } else { Mode::Remove };
                let before = cur.concept(name);
                apply_concept(cur, name, mode, &set);
                if let Some(t) = trace.as_deref_mut() {
                    let after = cur.concept(name);
                    let added = after.difference(&before).map(|e| cur.element_name(e).to_string()).collect();
                    let removed = before.difference(&after).map(|e| cur.element_name(e).to_string()).collect();
                    t.push(TraceEvent::Update { step: step.to_string(), added, removed });
                }
            }
            Step::AddRole(name, r) | Step::RemoveRole(name, r) => {
                let rel = Evaluator::new(cur).role(r)?;
                let mode = if matches!(step, Step::AddRole(..)) { Mode::Add } else { Mode::Remove };
                let before = cur.role(name);
                apply_role(cur, name, mode, &rel);
                if let Some(t) = trace.as_deref_mut() {
                    let after = cur.role(name);
                    let fmt_pair = |(x, y): (usize, usize)| format!("({}, {})", cur.element_name(x), cur.element_name(y));
                    let added = after.pairs().filter(|&(x, y)| !before.contains(x, y)).map(fmt_pair).collect();
                    let removed = before.pairs().filter(|&(x, y)| !after.contains(x, y)).map(fmt_pair).collect();
                    t.push(TraceEvent::Update { step: step.to_string(), added, removed });
                }
            }
            Step::Conditional { guard, then, otherwise } => {
                let holds = cur.models(guard)?;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceEvent::Guard { guard: guard.clone(), holds });
                }
                run(cur, if holds { then } else { otherwise }, trace.as_deref_mut())?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::parse_interpretation;
    use crate::syntax::{name, parse_action};

    fn i1() -> Interpretation {
        parse_interpretation(
            "domain p1 p2 e1 e3 e7
             name p1 = p1
             name p2 = p2
             name e1 = e1
             name e3 = e3
             name e7 = e7
             concept Prj = {p1, p2}
             concept ActivePrj = {p1, p2}
             concept Empl = {e1, e3, e7}
             concept FinishedPrj = {}
             role worksFor = {(e1, p1), (e3, p1), (e7, p2)}",
        )
        .unwrap()
    }

    fn op(target: &str, mode: Mode, elems: &[&str]) -> UpdateOp {
        UpdateOp {
            target: name(target),
            mode,
            payload: Payload::Elements(elems.iter().map(name).collect()),
        }
    }

    #[test]
    fn updates() {
        let i = i1();
        let j = update(&update(&i, &op("Empl", Mode::Add, &["p1"])).unwrap(), &op("Empl", Mode::Remove, &["p1"])).unwrap();
        assert_eq!(j, i);
        let k = update(&i, &op("ActivePrj", Mode::Remove, &["p1"])).unwrap();
        assert_eq!(k.names_of(&k.concept("ActivePrj")), vec![name("p2")]);
        assert_eq!(update(&i, &op("ActivePrj", Mode::Add, &[])).unwrap(), i);
        assert!(update(&i, &op("A", Mode::Add, &["nope"])).is_err());
    }

    #[test]
    fn example_one() {
        let a1 = parse_action("ActivePrj -= {p1}; FinishedPrj += {p1}; Empl -= forall worksFor . {p1}").unwrap();
        let j = execute(&i1(), &a1).unwrap();
        assert_eq!(j.names_of(&j.concept("ActivePrj")), vec![name("p2")]);
        assert_eq!(j.names_of(&j.concept("FinishedPrj")), vec![name("p1")]);
        assert_eq!(j.names_of(&j.concept("Empl")), vec![name("e7")]);
        assert_eq!(j.role("worksFor"), i1().role("worksFor"));
    }

    #[test]
    fn plan_from_the_planning_example() {
        let a2 = parse_action(
            "if e1:Empl & p1:Prj & p2:Prj & (e1,p1):worksFor then { worksFor -= {(e1,p1)}; worksFor += {(e1,p2)} }",
        )
        .unwrap();
        let a1p = parse_action(
            "ActivePrj -= {p1}; FinishedPrj += {p1}; Empl -= forall worksFor . {p1}; worksFor -= worksFor | {p1}",
        )
        .unwrap();
        let j = execute_all(&i1(), [&a2, &a1p]).unwrap();
        assert_eq!(j.names_of(&j.concept("Empl")), vec![name("e1"), name("e7")]);
        assert_eq!(
            j.pair_names_of(&j.role("worksFor")),
            vec![(name("e1"), name("p2")), (name("e7"), name("p2"))]
        );
        assert_eq!(j.names_of(&j.concept("ActivePrj")), vec![name("p2")]);
        assert_eq!(j.names_of(&j.concept("FinishedPrj")), vec![name("p1")]);
    }

    #[test]
    fn skip_and_non_ground() {
        assert_eq!(execute(&i1(), &Action::skip()).unwrap(), i1());
        let a = parse_action("Empl += {?x}").unwrap();
        assert!(matches!(execute(&i1(), &a), Err(Error::NotGround { .. })));
    }

    #[test]
    fn payload_sees_current_state() {
        let a = parse_action("Empl += Prj; Empl -= Empl").unwrap();
        let j = execute(&i1(), &a).unwrap();
        assert!(j.concept("Empl").is_clear());
    }

    #[test]
    fn trace_records_guards_and_changes() {
        let a = parse_action("if p1 : ActivePrj then { ActivePrj -= {p1} } else { Empl += {p1} }").unwrap();
        let (_, trace) = execute_traced(&i1(), &a).unwrap();
        assert_eq!(trace.len(), 2);
        assert!(matches!(&trace[0], TraceEvent::Guard { holds: true, .. }));
        assert!(matches!(&trace[1], TraceEvent::Update { removed, .. } if removed == &vec!["p1".to_string()]));
    }
}
