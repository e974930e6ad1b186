//! Syntactic checks for the lightweight fragment: restricted inclusions,
//! assertions over `B+` concepts, and formula negation only in front of
//! assertions.

use super::{Action, Axiom, ConceptExpr, Formula, RoleExpr, Step};

/// Result of a fragment check: empty `violations` means the input is in
/// the fragment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FragmentReport {
    pub violations: Vec<String>,
}

impl FragmentReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

fn is_basic_role(r: &RoleExpr) -> bool {
    r.as_basic().is_some()
}

/// `A`, `exists p . Top` or `exists inv p . Top`.
pub(crate) fn is_basic_concept(c: &ConceptExpr) -> bool {
    match c {
        ConceptExpr::Name(_) => true,
        ConceptExpr::Exists(r, d) => is_basic_role(r) && **d == ConceptExpr::Top,
        _ => false,
    }
}

/// Roles allowed under `exists r . Top` inside `B+`: names, inverses,
/// singletons and their unions and differences.
pub(crate) fn is_bplus_role(r: &RoleExpr) -> bool {
    match r {
        RoleExpr::Name(_) | RoleExpr::Singleton(..) => true,
        RoleExpr::Inverse(a) => is_bplus_role(a),
        RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => is_bplus_role(a) && is_bplus_role(b),
        _ => false,
    }
}

/// Membership in `B+`: names, nominals, `Top`, `Bot`, unqualified
/// existentials, closed under `and`, `or`, `not`.
pub fn is_bplus_concept(c: &ConceptExpr) -> bool {
    match c {
        ConceptExpr::Name(_) | ConceptExpr::Nominal(_) | ConceptExpr::Top | ConceptExpr::Bottom => true,
        ConceptExpr::Exists(r, d) => **d == ConceptExpr::Top && is_bplus_role(r),
        ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => is_bplus_concept(a) && is_bplus_concept(b),
        ConceptExpr::Not(a) => is_bplus_concept(a),
        _ => false,
    }
}

/// Roles allowed in role assertions: the `B+` roles plus range and domain
/// restrictions by `B+` concepts.
pub(crate) fn is_assertion_role(r: &RoleExpr) -> bool {
    match r {
        RoleExpr::Name(_) | RoleExpr::Singleton(..) => true,
        RoleExpr::Inverse(a) => is_assertion_role(a),
        RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => is_assertion_role(a) && is_assertion_role(b),
        RoleExpr::RangeRestrict(a, c) | RoleExpr::DomainRestrict(c, a) => {
            is_assertion_role(a) && is_bplus_concept(c)
        }
        RoleExpr::Complement(_) => false,
    }
}

fn is_tautology(a: &Axiom) -> bool {
    matches!(a, Axiom::ConceptInclusion(c, d) if **c == ConceptExpr::Top && **d == ConceptExpr::Top)
}

fn check_axiom(a: &Axiom, report: &mut FragmentReport) {
    match a {
        Axiom::ConceptInclusion(c, d) => {
            if is_tautology(a) {
                return;
            }
            if !is_basic_concept(c) {
                report.push(format!("`{a}`: left-hand side `{c}` is not a basic concept"));
            }
            let rhs_ok = match &**d {
                ConceptExpr::Not(inner) => is_basic_concept(inner),
                other => is_basic_concept(other),
            };
            if !rhs_ok {
                report.push(format!("`{a}`: right-hand side `{d}` is not a basic concept or its negation"));
            }
        }
        Axiom::RoleInclusion(r, s) => {
            if !is_basic_role(r) {
                report.push(format!("`{a}`: left-hand side `{r}` is not a role name or inverse"));
            }
            let rhs_ok = match &**s {
                RoleExpr::Complement(inner) => is_basic_role(inner),
                other => is_basic_role(other),
            };
            if !rhs_ok {
                report.push(format!("`{a}`: right-hand side `{s}` is not a role name, inverse, or negation of one"));
            }
        }
        Axiom::ConceptAssertion(_, c) => {
            if !is_bplus_concept(c) {
                report.push(format!("`{a}`: concept `{c}` is not in B+"));
            }
        }
        Axiom::RoleAssertion(_, _, r) => {
            if !is_assertion_role(r) {
                report.push(format!("`{a}`: role `{r}` is not allowed in assertions"));
            }
        }
    }
}

fn check_formula(f: &Formula, report: &mut FragmentReport) {
    match f {
        Formula::Atom(a) => check_axiom(a, report),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_formula(a, report);
            check_formula(b, report);
        }
        Formula::Neg(inner) => match &**inner {
            Formula::Atom(a) if a.is_assertion() => check_axiom(a, report),
            _ => report.push(format!("`{f}`: negation is only allowed in front of assertions")),
        },
    }
}

/// Checks membership in the lightweight fragment.
pub fn is_dllite_formula(f: &Formula) -> FragmentReport {
    let mut report = FragmentReport::default();
    check_formula(f, &mut report);
    report
}

fn check_guard_formula(f: &Formula, report: &mut FragmentReport) {
    match f {
        Formula::Atom(a) => match &**a {
            Axiom::ConceptInclusion(..) | Axiom::RoleInclusion(..) => {
                report.push(format!("guard contains the inclusion `{a}`"))
            }
            Axiom::ConceptAssertion(_, c) => check_payload_concept(c, report),
            Axiom::RoleAssertion(_, _, r) => check_payload_role(r, report),
        },
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_guard_formula(a, report);
            check_guard_formula(b, report);
        }
        Formula::Neg(a) => check_guard_formula(a, report),
    }
}

fn check_payload_concept(c: &ConceptExpr, report: &mut FragmentReport) {
    if !is_bplus_concept(c) {
        report.push(format!("concept `{c}` is not in B+"));
    }
}

fn check_payload_role(r: &RoleExpr, report: &mut FragmentReport) {
    match r {
        RoleExpr::Name(_) | RoleExpr::Singleton(..) => {}
        RoleExpr::Inverse(a) => check_payload_role(a, report),
        RoleExpr::Union(a, b) | RoleExpr::Difference(a, b) => {
            check_payload_role(a, report);
            check_payload_role(b, report);
        }
        RoleExpr::RangeRestrict(a, c) | RoleExpr::DomainRestrict(c, a) => {
            check_payload_role(a, report);
            check_payload_concept(c, report);
        }
        RoleExpr::Complement(_) => report.push(format!("role `{r}` uses complement")),
    }
}

/// An action is simple if no inclusion occurs in it and all its concepts,
/// including those nested inside roles, are in `B+`.
pub fn is_simple_action(a: &Action) -> FragmentReport {
    let mut report = FragmentReport::default();
    check_action(a, &mut report);
    report
}

fn check_action(a: &Action, report: &mut FragmentReport) {
    for s in &a.steps {
        match s {
            Step::AddConcept(_, c) | Step::RemoveConcept(_, c) => check_payload_concept(c, report),
            Step::AddRole(_, r) | Step::RemoveRole(_, r) => check_payload_role(r, report),
            Step::Conditional { guard, then, otherwise } => {
                check_guard_formula(guard, report);
                check_action(then, report);
                check_action(otherwise, report);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_action, parse_formula};
    use super::*;

    #[test]
    fn disjunctive_right_hand_side_is_rejected() {
        let k1 = parse_formula(
            "Prj <= ActivePrj or FinishedPrj & exists worksFor . Top <= Empl & exists inv worksFor . Top <= Prj",
        )
        .unwrap();
        let r = is_dllite_formula(&k1);
        assert_eq!(r.violations.len(), 1, "{:?}", r.violations);
        assert!(r.violations[0].contains("ActivePrj or FinishedPrj"));
    }

    #[test]
    fn accepted_shapes() {
        for src in [
            "A <= not B & o : A",
            "exists p . Top <= not exists inv q . Top",
            "p <= inv q & inv p <= not r",
            "o : A or exists (p - {(o, o2)}) . Top v ! (o, o2) : p + q",
            "! o : not {o2} & (o, o2) : p | (A and B)",
        ] {
            let f = parse_formula(src).unwrap();
            assert!(is_dllite_formula(&f).is_ok(), "{src}: {:?}", is_dllite_formula(&f));
        }
    }

    #[test]
    fn rejected_shapes() {
        for src in [
            "! (A <= B)",
            "A and B <= C",
            "o : exists p . A",
            "o : forall p . Top",
            "p + q <= r",
            "o : atleast 1 p . Top",
        ] {
            let f = parse_formula(src).unwrap();
            assert!(!is_dllite_formula(&f).is_ok(), "{src}");
        }
    }

    #[test]
    fn simple_actions() {
        let a2 = parse_action(
            "if ?x:Empl & ?y:Prj & ?z:Prj & (?x,?y):worksFor then { worksFor -= {(?x,?y)}; worksFor += {(?x,?z)} }",
        )
        .unwrap();
        assert!(is_simple_action(&a2).is_ok());
        assert!(is_simple_action(&Action::skip()).is_ok());
        let guarded = parse_action("if A <= B then { A += {o} }").unwrap();
        assert!(!is_simple_action(&guarded).is_ok());
        let a1 = parse_action("Empl -= forall worksFor . {p1}").unwrap();
        assert!(!is_simple_action(&a1).is_ok());
    }
}
