//! Recursive-descent parser for formulae and actions.
//!
//! Concept names start with an uppercase letter; role and individual names
//! start with a lowercase letter or an underscore. Variables carry a `?`
//! sigil. The grammar is ambiguous only at the start of a formula atom,
//! where a parenthesis may open a nested formula or an operand of an
//! inclusion; the parser backtracks there and reports the failure that got
//! furthest into the input.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{name, Action, Axiom, ConceptExpr, Formula, RoleExpr, Step, Term, RESERVED_PREFIX};

const KEYWORDS: &[&str] = &[
    "not", "and", "or", "exists", "forall", "atleast", "atmost", "inv", "Top", "Bot", "skip", "if",
    "then", "else", "v", "restrict", "action",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: BTreeSet<String>,
    pub found: String,
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        if let Some(m) = &self.message {
            return write!(f, "{m}");
        }
        let exp: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        match exp.len() {
            0 => write!(f, "unexpected {}", self.found),
            1 => write!(f, "expected {}, found {}", exp[0], self.found),
            _ => write!(f, "expected one of {}, found {}", exp.join(", "), self.found),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept names with the reserved fresh-name prefix.
    pub allow_reserved: bool,
    /// Accept constructs that only regression produces: `inv` applied to a
    /// complex role and `restrict (C) R` domain restrictions.
    pub allow_internal: bool,
}

impl ParseOptions {
    pub fn permissive() -> Self {
        ParseOptions { allow_reserved: true, allow_internal: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Int(u32),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Var(s) => write!(f, "`?{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &[
    "<=", "+=", "-=", "+", "-", "|", ":", ",", ".", "(", ")", "{", "}", "&", "!", ";", "=",
];

pub(crate) fn is_reserved(s: &str) -> bool {
    s.strip_prefix(RESERVED_PREFIX)
        .is_some_and(|rest| rest.starts_with(|c: char| c.is_ascii_digit()))
}

pub(crate) fn lex(text: &str, opts: ParseOptions) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, found: String, message: Option<String>| ParseError {
        line,
        col,
        expected: BTreeSet::new(),
        found,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
        if c.is_ascii_alphabetic() || c == '_' || c == '?' {
            let start = if c == '?' { i + 1 } else { i };
            let mut j = start;
            while j < chars.len() && ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            if c == '?' && (word.is_empty() || word.starts_with(|c: char| c.is_ascii_digit())) {
                return Err(err(l0, c0, "`?`".into(), Some("expected a variable name after `?`".into())));
            }
            if !opts.allow_reserved && is_reserved(&word) {
                return Err(err(
                    l0,
                    c0,
                    format!("`{word}`"),
                    Some(format!("name `{word}` uses the reserved prefix `{RESERVED_PREFIX}`")),
                ));
            }
            col += j - i;
            i = j;
            out.push(Token {
                tok: if c == '?' { Tok::Var(word) } else { Tok::Ident(word) },
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n: u32 = digits
                .parse()
                .map_err(|_| err(l0, c0, format!("`{digits}`"), Some(format!("number `{digits}` is too large"))))?;
            col += j - i;
            i = j;
            out.push(Token { tok: Tok::Int(n), line: l0, col: c0 });
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            let s: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&s)
        });
        match sym {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token { tok: Tok::Sym(s), line: l0, col: c0 });
            }
            None => return Err(err(l0, c0, format!("`{c}`"), Some(format!("unexpected character `{c}`")))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

type P<T> = Result<T, ()>;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
    furthest: usize,
    expected: BTreeSet<String>,
}

impl Parser {
    pub(crate) fn new(text: &str, opts: ParseOptions) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, opts)?,
            pos: 0,
            opts,
            furthest: 0,
            expected: BTreeSet::new(),
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn fail<T>(&mut self, what: &str) -> P<T> {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(what.to_string());
        }
        Err(())
    }

    pub(crate) fn error(&self) -> ParseError {
        let t = &self.toks[self.furthest];
        ParseError {
            line: t.line,
            col: t.col,
            expected: self.expected.clone(),
            found: t.tok.to_string(),
            message: None,
        }
    }

    pub(crate) fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn at_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            let _ = self.fail::<()>(&format!("`{s}`"));
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> P<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(())
        }
    }

    pub(crate) fn eat_kw(&mut self, s: &str) -> bool {
        if self.at_kw(s) {
            self.bump();
            true
        } else {
            let _ = self.fail::<()>(&format!("`{s}`"));
            false
        }
    }

    fn expect_kw(&mut self, s: &str) -> P<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            Err(())
        }
    }

    pub(crate) fn expect_eof(&mut self) -> P<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    /// Any identifier that is not a keyword. Used for element ids and
    /// action labels.
    pub(crate) fn plain_ident(&mut self, what: &str) -> P<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn concept_name(&mut self) -> P<String> {
        match self.peek() {
            Tok::Ident(s) if starts_upper(s) && !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail("concept name"),
        }
    }

    fn lower_name(&mut self, what: &str) -> P<String> {
        match self.peek() {
            Tok::Ident(s) if !starts_upper(s) && !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    fn term(&mut self) -> P<Term> {
        if let Tok::Var(v) = self.peek() {
            let v = v.clone();
            self.bump();
            return Ok(Term::Var(name(v)));
        }
        match self.lower_name("individual or variable") {
            Ok(s) => Ok(Term::Ind(name(s))),
            Err(()) => Err(()),
        }
    }

    fn is_term_start(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Tok::Var(_) => true,
            Tok::Ident(s) => !starts_upper(s) && !KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    fn with_backtrack<T>(&mut self, f: impl FnOnce(&mut Self) -> P<T>) -> P<T> {
        let save = self.pos;
        let r = f(self);
        if r.is_err() {
            self.pos = save;
        }
        r
    }

    // formula := conj ('v' conj)*
    pub(crate) fn formula(&mut self) -> P<Formula> {
        let mut f = self.conj()?;
        while self.at_kw("v") {
            self.bump();
            let g = self.conj()?;
            f = Formula::or(f, g);
        }
        let _ = self.fail::<()>("`v`");
        Ok(f)
    }

    fn conj(&mut self) -> P<Formula> {
        let mut f = self.funary()?;
        while self.at_sym("&") {
            self.bump();
            let g = self.funary()?;
            f = Formula::and(f, g);
        }
        let _ = self.fail::<()>("`&`");
        Ok(f)
    }

    fn funary(&mut self) -> P<Formula> {
        if self.at_sym("!") {
            self.bump();
            return Ok(Formula::neg(self.funary()?));
        }
        let _ = self.fail::<()>("`!`");
        self.fprimary()
    }

    fn fprimary(&mut self) -> P<Formula> {
        // (t, t') : R
        if self.at_sym("(") && self.is_term_start(1) && matches!(self.peek_at(2), Tok::Sym(",")) {
            self.bump();
            let a = self.term()?;
            self.expect_sym(",")?;
            let b = self.term()?;
            self.expect_sym(")")?;
            self.expect_sym(":")?;
            let r = self.role()?;
            return Ok(Axiom::role_assert(a, b, r).into());
        }
        // t : C
        if self.is_term_start(0) && matches!(self.peek_at(1), Tok::Sym(":")) {
            let t = self.term()?;
            self.bump();
            let c = self.concept()?;
            return Ok(Axiom::concept_assert(t, c).into());
        }
        if self.at_sym("(") {
            let nested = self.with_backtrack(|p| {
                p.bump();
                let f = p.formula()?;
                p.expect_sym(")")?;
                if p.at_sym("<=") {
                    return Err(());
                }
                Ok(f)
            });
            if let Ok(f) = nested {
                return Ok(f);
            }
        }
        if let Ok(ax) = self.with_backtrack(|p| {
            let c = p.concept()?;
            p.expect_sym("<=")?;
            let d = p.concept()?;
            Ok(Axiom::concept_incl(c, d))
        }) {
            return Ok(ax.into());
        }
        self.with_backtrack(|p| {
            let r = p.role()?;
            p.expect_sym("<=")?;
            let s = p.role()?;
            Ok(Axiom::role_incl(r, s).into())
        })
    }

    // concept := cand ('or' cand)*
    pub(crate) fn concept(&mut self) -> P<ConceptExpr> {
        let mut c = self.cand()?;
        while self.at_kw("or") {
            self.bump();
            let d = self.cand()?;
            c = ConceptExpr::or(c, d);
        }
        let _ = self.fail::<()>("`or`");
        Ok(c)
    }

    fn cand(&mut self) -> P<ConceptExpr> {
        let mut c = self.cunary()?;
        while self.at_kw("and") {
            self.bump();
            let d = self.cunary()?;
            c = ConceptExpr::and(c, d);
        }
        let _ = self.fail::<()>("`and`");
        Ok(c)
    }

    fn cunary(&mut self) -> P<ConceptExpr> {
        if self.at_kw("not") {
            self.bump();
            return Ok(ConceptExpr::not(self.cunary()?));
        }
        for kw in ["exists", "forall"] {
            if self.at_kw(kw) {
                self.bump();
                let r = self.role()?;
                self.expect_sym(".")?;
                let c = self.cunary()?;
                return Ok(if kw == "exists" {
                    ConceptExpr::exists(r, c)
                } else {
                    ConceptExpr::forall(r, c)
                });
            }
        }
        for kw in ["atleast", "atmost"] {
            if self.at_kw(kw) {
                self.bump();
                let n = match self.peek() {
                    Tok::Int(n) => *n,
                    _ => return self.fail("number"),
                };
                self.bump();
                let r = self.role()?;
                self.expect_sym(".")?;
                let c = self.cunary()?;
                return Ok(if kw == "atleast" {
                    ConceptExpr::at_least(n, r, c)
                } else {
                    ConceptExpr::at_most(n, r, c)
                });
            }
        }
        self.catom()
    }

    fn catom(&mut self) -> P<ConceptExpr> {
        if self.at_kw("Top") {
            self.bump();
            return Ok(ConceptExpr::Top);
        }
        if self.at_kw("Bot") {
            self.bump();
            return Ok(ConceptExpr::Bottom);
        }
        if self.at_sym("{") {
            self.bump();
            let t = self.term()?;
            self.expect_sym("}")?;
            return Ok(ConceptExpr::Nominal(t));
        }
        if self.at_sym("(") {
            self.bump();
            let c = self.concept()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        for what in ["`not`", "`exists`", "`forall`", "`atleast`", "`atmost`", "`Top`", "`Bot`", "`{`", "`(`"] {
            let _ = self.fail::<()>(what);
        }
        Ok(ConceptExpr::Name(name(self.concept_name()?)))
    }

    // role := rpost (('+' | '-') rpost)*
    pub(crate) fn role(&mut self) -> P<RoleExpr> {
        let mut r = self.rpost()?;
        loop {
            if self.at_sym("+") {
                self.bump();
                r = RoleExpr::union(r, self.rpost()?);
            } else if self.at_sym("-") {
                self.bump();
                r = RoleExpr::diff(r, self.rpost()?);
            } else {
                let _ = self.fail::<()>("`+`");
                let _ = self.fail::<()>("`-`");
                return Ok(r);
            }
        }
    }

    fn rpost(&mut self) -> P<RoleExpr> {
        let mut r = self.rprim()?;
        while self.at_sym("|") {
            self.bump();
            let c = self.cunary()?;
            r = RoleExpr::restrict(r, c);
        }
        let _ = self.fail::<()>("`|`");
        Ok(r)
    }

    fn rprim(&mut self) -> P<RoleExpr> {
        if self.at_kw("inv") {
            self.bump();
            let inner = self.rprim()?;
            if !self.opts.allow_internal && !matches!(inner, RoleExpr::Name(_)) {
                return self.fail("role name after `inv`");
            }
            return Ok(RoleExpr::inv(inner));
        }
        if self.at_kw("not") {
            self.bump();
            return Ok(RoleExpr::complement(self.rprim()?));
        }
        if self.opts.allow_internal && self.at_kw("restrict") {
            self.bump();
            self.expect_sym("(")?;
            let c = self.concept()?;
            self.expect_sym(")")?;
            let r = self.rprim()?;
            return Ok(RoleExpr::DomainRestrict(Arc::new(c), Arc::new(r)));
        }
        if self.at_sym("{") {
            self.bump();
            self.expect_sym("(")?;
            let a = self.term()?;
            self.expect_sym(",")?;
            let b = self.term()?;
            self.expect_sym(")")?;
            self.expect_sym("}")?;
            return Ok(RoleExpr::Singleton(a, b));
        }
        if self.at_sym("(") {
            self.bump();
            let r = self.role()?;
            self.expect_sym(")")?;
            return Ok(r);
        }
        for what in ["`inv`", "`not`", "`{`", "`(`"] {
            let _ = self.fail::<()>(what);
        }
        Ok(RoleExpr::Name(name(self.lower_name("role name")?)))
    }

    // seq := (step (';' step)* ';'?)?   terminated by '}' or end of input
    fn seq(&mut self) -> P<Action> {
        let mut steps = Vec::new();
        loop {
            if self.at_sym("}") || matches!(self.peek(), Tok::Eof) {
                return Ok(Action::new(steps));
            }
            self.step(&mut steps)?;
            if !self.eat_sym(";") {
                let _ = self.fail::<()>("`}`");
                return Ok(Action::new(steps));
            }
        }
    }

    fn step(&mut self, steps: &mut Vec<Step>) -> P<()> {
        if self.at_kw("skip") {
            self.bump();
            return Ok(());
        }
        if self.at_kw("if") {
            self.bump();
            let guard = self.formula()?;
            self.expect_kw("then")?;
            self.expect_sym("{")?;
            let then = self.seq()?;
            self.expect_sym("}")?;
            let otherwise = if self.at_kw("else") {
                self.bump();
                self.expect_sym("{")?;
                let e = self.seq()?;
                self.expect_sym("}")?;
                e
            } else {
                let _ = self.fail::<()>("`else`");
                Action::skip()
            };
            steps.push(Step::Conditional { guard, then, otherwise });
            return Ok(());
        }
        let _ = self.fail::<()>("`skip`");
        let _ = self.fail::<()>("`if`");
        let is_concept = matches!(self.peek(), Tok::Ident(s) if starts_upper(s));
        let target = if is_concept { self.concept_name()? } else { self.lower_name("concept or role name")? };
        let add = if self.at_sym("+=") {
            true
        } else if self.at_sym("-=") {
            false
        } else {
            let _ = self.fail::<()>("`+=`");
            return self.fail("`-=`");
        };
        self.bump();
        let target = name(target);
        steps.push(if is_concept {
            let c = Arc::new(self.concept()?);
            if add {
                Step::AddConcept(target, c)
            } else {
                Step::RemoveConcept(target, c)
            }
        } else {
            let r = Arc::new(self.role()?);
            if add {
                Step::AddRole(target, r)
            } else {
                Step::RemoveRole(target, r)
            }
        });
        Ok(())
    }
}

fn starts_upper(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

/// Parses a formula; an empty input is an error.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, ParseOptions::default())
}

pub fn parse_formula_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, opts)?;
    let r = p.formula().and_then(|f| p.expect_eof().map(|_| f));
    r.map_err(|_| p.error())
}

/// Parses an action. `skip` denotes the empty action; an input with no
/// steps at all is an error.
pub fn parse_action(text: &str) -> Result<Action, ParseError> {
    parse_action_with(text, ParseOptions::default())
}

pub fn parse_action_with(text: &str, opts: ParseOptions) -> Result<Action, ParseError> {
    let mut p = Parser::new(text, opts)?;
    if matches!(p.peek(), Tok::Eof) {
        let _ = p.fail::<()>("action");
        return Err(p.error());
    }
    let r = p.seq().and_then(|a| p.expect_eof().map(|_| a));
    r.map_err(|_| p.error())
}

/// An action with a label, as listed in an action-set file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedAction {
    pub name: String,
    pub action: Action,
}

/// Parses a sequence of `action NAME { ... }` blocks. A file without any
/// block is read as a single unnamed action.
pub fn parse_action_set(text: &str) -> Result<Vec<NamedAction>, ParseError> {
    parse_action_set_with(text, ParseOptions::default())
}

pub fn parse_action_set_with(text: &str, opts: ParseOptions) -> Result<Vec<NamedAction>, ParseError> {
    let mut p = Parser::new(text, opts)?;
    if !p.at_kw("action") {
        let action = parse_action_with(text, opts)?;
        return Ok(vec![NamedAction { name: "a1".into(), action }]);
    }
    let mut out = Vec::new();
    let r: P<()> = (|| {
        while p.at_kw("action") {
            p.bump();
            let name = p.plain_ident("action name")?;
            p.expect_sym("{")?;
            let action = p.seq()?;
            p.expect_sym("}")?;
            out.push(NamedAction { name, action });
        }
        let _ = p.fail::<()>("`action`");
        p.expect_eof()
    })();
    r.map_err(|_| p.error())?;
    Ok(out)
}
