//! Printing in the concrete syntax accepted by the parser, with the minimal
//! parentheses needed to reproduce the same tree.

use std::fmt::{self, Display, Formatter, Write};

use super::{Action, Axiom, ConceptExpr, Formula, RoleExpr, Step, Term};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Ind(n) => write!(f, "{n}"),
            Term::Var(n) => write!(f, "?{n}"),
        }
    }
}

fn concept_prec(c: &ConceptExpr) -> u8 {
    match c {
        ConceptExpr::Or(..) => 1,
        ConceptExpr::And(..) => 2,
        ConceptExpr::Not(_)
        | ConceptExpr::Exists(..)
        | ConceptExpr::Forall(..)
        | ConceptExpr::AtMost(..)
        | ConceptExpr::AtLeast(..) => 3,
        _ => 4,
    }
}

fn role_prec(r: &RoleExpr) -> u8 {
    match r {
        RoleExpr::Union(..) | RoleExpr::Difference(..) => 1,
        RoleExpr::RangeRestrict(..) => 2,
        _ => 3,
    }
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Neg(_) => 3,
        Formula::Atom(_) => 4,
    }
}

fn concept_at(c: &ConceptExpr, min: u8, f: &mut Formatter<'_>) -> fmt::Result {
    if concept_prec(c) < min {
        write!(f, "({c})")
    } else {
        write!(f, "{c}")
    }
}

fn role_at(r: &RoleExpr, min: u8, f: &mut Formatter<'_>) -> fmt::Result {
    if role_prec(r) < min {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

fn formula_at(x: &Formula, min: u8, f: &mut Formatter<'_>) -> fmt::Result {
    if formula_prec(x) < min {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

impl Display for ConceptExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Name(n) => write!(f, "{n}"),
            ConceptExpr::Nominal(t) => write!(f, "{{{t}}}"),
            ConceptExpr::Top => f.write_str("Top"),
            ConceptExpr::Bottom => f.write_str("Bot"),
            ConceptExpr::Or(a, b) => {
                concept_at(a, 1, f)?;
                f.write_str(" or ")?;
                concept_at(b, 2, f)
            }
            ConceptExpr::And(a, b) => {
                concept_at(a, 2, f)?;
                f.write_str(" and ")?;
                concept_at(b, 3, f)
            }
            ConceptExpr::Not(a) => {
                f.write_str("not ")?;
                concept_at(a, 3, f)
            }
            ConceptExpr::Exists(r, c) => quantifier(f, "exists", r, c),
            ConceptExpr::Forall(r, c) => quantifier(f, "forall", r, c),
            ConceptExpr::AtLeast(n, r, c) => quantifier(f, &format!("atleast {n}"), r, c),
            ConceptExpr::AtMost(n, r, c) => quantifier(f, &format!("atmost {n}"), r, c),
        }
    }
}

fn quantifier(f: &mut Formatter<'_>, head: &str, r: &RoleExpr, c: &ConceptExpr) -> fmt::Result {
    write!(f, "{head} {r} . ")?;
    concept_at(c, 3, f)
}

impl Display for RoleExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            RoleExpr::Name(n) => write!(f, "{n}"),
            RoleExpr::Inverse(r) => {
                f.write_str("inv ")?;
                role_at(r, 3, f)
            }
            RoleExpr::Complement(r) => {
                f.write_str("not ")?;
                role_at(r, 3, f)
            }
            RoleExpr::Singleton(a, b) => write!(f, "{{({a}, {b})}}"),
            RoleExpr::Union(a, b) => {
                role_at(a, 1, f)?;
                f.write_str(" + ")?;
                role_at(b, 2, f)
            }
            RoleExpr::Difference(a, b) => {
                role_at(a, 1, f)?;
                f.write_str(" - ")?;
                role_at(b, 2, f)
            }
            RoleExpr::RangeRestrict(r, c) => {
                role_at(r, 2, f)?;
                f.write_str(" | ")?;
                concept_at(c, 3, f)
            }
            RoleExpr::DomainRestrict(c, r) => {
                write!(f, "restrict ({c}) ")?;
                role_at(r, 3, f)
            }
        }
    }
}

impl Display for Axiom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::ConceptInclusion(c, d) => write!(f, "{c} <= {d}"),
            Axiom::RoleInclusion(r, s) => write!(f, "{r} <= {s}"),
            Axiom::ConceptAssertion(t, c) => write!(f, "{t} : {c}"),
            Axiom::RoleAssertion(a, b, r) => write!(f, "({a}, {b}) : {r}"),
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Or(a, b) => {
                formula_at(a, 1, f)?;
                f.write_str(" v ")?;
                formula_at(b, 2, f)
            }
            Formula::And(a, b) => {
                formula_at(a, 2, f)?;
                f.write_str(" & ")?;
                formula_at(b, 3, f)
            }
            Formula::Neg(a) => {
                f.write_str("! ")?;
                formula_at(a, 3, f)
            }
        }
    }
}

impl Formula {
    /// Prints a top-level conjunction one conjunct per line.
    pub fn pretty(&self) -> String {
        let parts: Vec<String> = self
            .conjuncts()
            .into_iter()
            .map(|c| {
                if formula_prec(c) < 2 {
                    format!("({c})")
                } else {
                    c.to_string()
                }
            })
            .collect();
        parts.join(" &\n")
    }
}

impl Display for Step {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Step::AddConcept(a, c) => write!(f, "{a} += {c}"),
            Step::RemoveConcept(a, c) => write!(f, "{a} -= {c}"),
            Step::AddRole(p, r) => write!(f, "{p} += {r}"),
            Step::RemoveRole(p, r) => write!(f, "{p} -= {r}"),
            Step::Conditional { guard, then, otherwise } => {
                write!(f, "if {guard} then {{ {} }}", inline_seq(then))?;
                if !otherwise.is_empty() {
                    write!(f, " else {{ {} }}", inline_seq(otherwise))?;
                }
                Ok(())
            }
        }
    }
}

fn inline_seq(a: &Action) -> String {
    a.steps.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Display for Action {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            f.write_str("skip")
        } else {
            f.write_str(&inline_seq(self))
        }
    }
}

impl Action {
    /// Multi-line rendering with one step per line and indented branches.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        if self.steps.is_empty() {
            out.push_str("skip\n");
        } else {
            pretty_seq(self, 0, &mut out);
        }
        out
    }
}

fn pretty_seq(a: &Action, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (i, s) in a.steps.iter().enumerate() {
        let sep = if i + 1 < a.steps.len() { ";" } else { "" };
        match s {
            Step::Conditional { guard, then, otherwise } => {
                let _ = writeln!(out, "{pad}if {guard} then {{");
                pretty_seq(then, depth + 1, out);
                if otherwise.is_empty() {
                    let _ = writeln!(out, "{pad}}}{sep}");
                } else {
                    let _ = writeln!(out, "{pad}}} else {{");
                    pretty_seq(otherwise, depth + 1, out);
                    let _ = writeln!(out, "{pad}}}{sep}");
                }
            }
            _ => {
                let _ = writeln!(out, "{pad}{s}{sep}");
            }
        }
    }
}
