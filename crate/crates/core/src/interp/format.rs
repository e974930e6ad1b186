//! Text format for interpretations.
//!
//! ```text
//! domain e1 e2 p1
//! name p1 = p1
//! concept Prj = {p1}
//! role worksFor = {(e1, p1)}
//! una off
//! ```

use std::fmt::Write;

use fixedbitset::FixedBitSet;

use super::{Interpretation, Relation};
use crate::error::{Error, Result};
use crate::syntax::parse::{Parser, Tok};
use crate::syntax::{ParseError, ParseOptions};

const SECTION_WORDS: &[&str] = &["domain", "name", "concept", "role", "una"];

enum Entry {
    Domain(Vec<String>),
    Name(String, String),
    Concept(String, Vec<String>),
    Role(String, Vec<(String, String)>),
    Una(bool),
}

fn entries(text: &str) -> std::result::Result<Vec<Entry>, ParseError> {
    let opts = ParseOptions { allow_reserved: true, allow_internal: false };
    let mut p = Parser::new(text, opts)?;
    let mut out = Vec::new();
    let r: std::result::Result<(), ()> = (|| {
        loop {
            if matches!(p.peek(), Tok::Eof) {
                return Ok(());
            }
            if p.eat_kw("domain") {
                let mut elems = Vec::new();
                while matches!(p.peek(), Tok::Ident(s) if !SECTION_WORDS.contains(&s.as_str())) {
                    elems.push(p.plain_ident("element")?);
                }
                if elems.is_empty() {
                    return p.fail("element");
                }
                out.push(Entry::Domain(elems));
            } else if p.eat_kw("name") {
                let o = p.plain_ident("individual name")?;
                p.expect_sym("=")?;
                let e = p.plain_ident("element")?;
                out.push(Entry::Name(o, e));
            } else if p.eat_kw("concept") {
                let a = p.plain_ident("concept name")?;
                p.expect_sym("=")?;
                p.expect_sym("{")?;
                let mut elems = Vec::new();
                if !p.at_sym("}") {
                    loop {
                        elems.push(p.plain_ident("element")?);
                        if !p.eat_sym(",") {
                            break;
                        }
                    }
                }
                p.expect_sym("}")?;
                out.push(Entry::Concept(a, elems));
            } else if p.eat_kw("role") {
                let r = p.plain_ident("role name")?;
                p.expect_sym("=")?;
                p.expect_sym("{")?;
                let mut pairs = Vec::new();
                if !p.at_sym("}") {
                    loop {
                        p.expect_sym("(")?;
                        let a = p.plain_ident("element")?;
                        p.expect_sym(",")?;
                        let b = p.plain_ident("element")?;
                        p.expect_sym(")")?;
                        pairs.push((a, b));
                        if !p.eat_sym(",") {
                            break;
                        }
                    }
                }
                p.expect_sym("}")?;
                out.push(Entry::Role(r, pairs));
            } else if p.eat_kw("una") {
                if p.eat_kw("on") {
                    out.push(Entry::Una(true));
                } else if p.eat_kw("off") {
                    out.push(Entry::Una(false));
                } else {
                    return Err(());
                }
            } else {
                return Err(());
            }
        }
    })();
    r.map_err(|_| p.error())?;
    Ok(out)
}

/// Parses an interpretation file. The `domain` line must precede every
/// other entry.
pub fn parse_interpretation(text: &str) -> Result<Interpretation> {
    let entries = entries(text)?;
    let mut interp: Option<Interpretation> = None;
    let mut una = false;
    for entry in entries {
        if let Entry::Domain(elems) = &entry {
            if interp.is_some() {
                return Err(Error::InvalidInterpretation("`domain` given more than once".into()));
            }
            interp = Some(Interpretation::new(elems)?);
            continue;
        }
        let Some(i) = interp.as_mut() else {
            return Err(Error::InvalidInterpretation("`domain` must come first".into()));
        };
        match entry {
            Entry::Domain(_) => unreachable!(),
            Entry::Name(o, e) => {
                let idx = i.element_index(&e)?;
                if i.individuals.contains_key(o.as_str()) {
                    return Err(Error::InvalidInterpretation(format!("individual `{o}` is named twice")));
                }
                i.map_individual(&o, idx)?;
            }
            Entry::Concept(a, elems) => {
                if i.concepts.contains_key(a.as_str()) {
                    return Err(Error::InvalidInterpretation(format!("concept `{a}` is defined twice")));
                }
                let mut set = FixedBitSet::with_capacity(i.size());
                for e in elems {
                    set.insert(i.element_index(&e)?);
                }
                i.set_concept(&a, set)?;
            }
            Entry::Role(r, pairs) => {
                if i.roles.contains_key(r.as_str()) {
                    return Err(Error::InvalidInterpretation(format!("role `{r}` is defined twice")));
                }
                let mut rel = Relation::empty(i.size());
                for (a, b) in pairs {
                    rel.insert(i.element_index(&a)?, i.element_index(&b)?);
                }
                i.set_role(&r, rel)?;
            }
            Entry::Una(flag) => una = flag,
        }
    }
    let mut interp = interp.ok_or_else(|| Error::InvalidInterpretation("missing `domain` line".into()))?;
    interp.set_una(una)?;
    Ok(interp)
}

/// Normalized rendering: names in alphabetical order, set members in domain
/// order, every declared extension listed even when empty.
pub(super) fn print_interpretation(i: &Interpretation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", i.elements.join(" "));
    let _ = writeln!(out, "una {}", if i.una { "on" } else { "off" });
    for (o, &e) in &i.individuals {
        let _ = writeln!(out, "name {o} = {}", i.elements[e]);
    }
    for (a, ext) in &i.concepts {
        let members: Vec<&str> = ext.ones().map(|e| &*i.elements[e]).collect();
        let _ = writeln!(out, "concept {a} = {{{}}}", members.join(", "));
    }
    for (r, rel) in &i.roles {
        let pairs: Vec<String> = rel
            .pairs()
            .map(|(a, b)| format!("({}, {})", i.elements[a], i.elements[b]))
            .collect();
        let _ = writeln!(out, "role {r} = {{{}}}", pairs.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "domain a b c\nuna on\nname x = a\nname y = b\nconcept A = {a, c}\nconcept B = {}\nrole p = {(a, b), (c, c)}\n";
        let i = parse_interpretation(src).unwrap();
        assert_eq!(print_interpretation(&i), src);
        assert_eq!(parse_interpretation(&print_interpretation(&i)).unwrap(), i);
    }

    #[test]
    fn errors() {
        assert!(parse_interpretation("name x = a").is_err());
        assert!(parse_interpretation("domain a\nconcept A = {b}").is_err());
        assert!(parse_interpretation("domain a b\nuna on\nname x = a\nname y = a").is_err());
        assert!(matches!(parse_interpretation("domain a\nconcept A = {a"), Err(Error::Parse(_))));
        assert!(parse_interpretation("").is_err());
    }
}
