//! Instance generators: graph 3-colouring compiled to static verification,
//! and ∃∀ quantified boolean formulae compiled to bounded synthesis, each
//! with a brute-force oracle.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::error::{Error, Result};
use crate::syntax::{name, Action, Axiom, ConceptExpr, Formula, Name, NamedAction, Step, Term};

/// An undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph { n, edges: BTreeSet::new() };
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        Graph { n, edges }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::Input(format!("self-loop on vertex {u}")));
        }
        if u == 0 || v == 0 || u > self.n || v > self.n {
            return Err(Error::Input(format!("edge ({u}, {v}) outside vertices 1..={}", self.n)));
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges with the smaller endpoint first, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Reads `vertices N` followed by one `u v` edge per line; `#` starts
    /// a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::Input("empty graph file".into()))?;
        let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["vertices", n] => n.parse().map_err(|_| Error::Input(format!("line {ln}: bad vertex count `{n}`")))?,
            _ => return Err(Error::Input(format!("line {ln}: expected `vertices N`"))),
        };
        let mut g = Graph { n, edges: BTreeSet::new() };
        for (ln, l) in lines {
            let parts: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Input(format!("line {ln}: bad vertex `{t}`"))))
                .collect::<Result<_>>()?;
            match parts[..] {
                [u, v] => g.add_edge(u, v).map_err(|e| Error::Input(format!("line {ln}: {e}")))?,
                _ => return Err(Error::Input(format!("line {ln}: expected `u v`"))),
            }
        }
        Ok(g)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.n)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

fn colour(v: usize, c: usize) -> ConceptExpr {
    ConceptExpr::name(format!("A{v}c{c}"))
}

/// Compiles `g` to a knowledge base and an action such that `g` is
/// 3-colourable exactly when the action is not preserving for the
/// knowledge base. Concept `A{v}c{c}` says vertex `v` has colour `c`.
pub fn gen_3col(g: &Graph) -> (Formula, Action) {
    let d = || ConceptExpr::name("D");
    let mut kb = vec![Formula::from(Axiom::concept_incl(d(), ConceptExpr::not(d())))];
    for (u, v) in g.edges() {
        for c in 0..3 {
            kb.push(Axiom::concept_incl(colour(u, c), ConceptExpr::not(colour(v, c))).into());
        }
    }
    let o = || ConceptExpr::nominal(Term::ind("o"));
    let b = |i: usize| name(format!("B{i}"));
    let mut steps = vec![Step::AddConcept(name("D"), o().into())];
    steps.extend((1..=g.n).map(|i| Step::AddConcept(b(i), o().into())));
    for i in 1..=g.n {
        steps.extend((0..3).map(|c| Step::RemoveConcept(b(i), colour(i, c).into())));
    }
    steps.extend((1..=g.n).map(|i| Step::RemoveConcept(name("D"), ConceptExpr::name(b(i)).into())));
    (Formula::conj(kb), Action::new(steps))
}

/// Whether `g` has a proper 3-colouring, by exhaustive search.
pub fn oracle_3col(g: &Graph) -> Result<bool> {
    if g.n > 12 {
        return Err(Error::Budget(format!("colouring oracle limited to 12 vertices, got {}", g.n)));
    }
    let mut col = vec![0usize; g.n + 1];
    loop {
        if g.edges().all(|(u, v)| col[u] != col[v]) {
            return Ok(true);
        }
        let mut i = 1;
        while i <= g.n {
            col[i] += 1;
            if col[i] < 3 {
                break;
            }
            col[i] = 0;
            i += 1;
        }
        if i > g.n {
            return Ok(false);
        }
    }
}

/// A quantifier-free matrix with negation on variables only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matrix {
    Lit { var: Name, positive: bool },
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

impl Matrix {
    pub fn var(v: impl AsRef<str>) -> Self {
        Matrix::Lit { var: name(v), positive: true }
    }

    pub fn neg_var(v: impl AsRef<str>) -> Self {
        Matrix::Lit { var: name(v), positive: false }
    }

    pub fn and(a: Matrix, b: Matrix) -> Self {
        Matrix::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Matrix, b: Matrix) -> Self {
        Matrix::Or(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, value: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Matrix::Lit { var, positive } => value(var) == *positive,
            Matrix::And(a, b) => a.eval(value) && b.eval(value),
            Matrix::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Matrix::Lit { .. } => 0,
            Matrix::And(a, b) | Matrix::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Matrix::Lit { var, .. } => {
                out.insert(var.clone());
            }
            Matrix::And(a, b) | Matrix::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matrix::Lit { var, positive: true } => write!(f, "{var}"),
            Matrix::Lit { var, positive: false } => write!(f, "!{var}"),
            Matrix::And(a, b) => write!(f, "({a} & {b})"),
            Matrix::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// A closed formula `exists p1..pn forall q1..qm . matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf2 {
    pub exists: Vec<Name>,
    pub forall: Vec<Name>,
    pub matrix: Matrix,
}

impl Qbf2 {
    pub fn new(exists: Vec<Name>, forall: Vec<Name>, matrix: Matrix) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in exists.iter().chain(&forall) {
            if !seen.insert(v.clone()) {
                return Err(Error::Input(format!("variable `{v}` quantified twice")));
            }
        }
        let mut used = BTreeSet::new();
        matrix.collect_vars(&mut used);
        if let Some(v) = used.difference(&seen).next() {
            return Err(Error::Input(format!("variable `{v}` is not quantified")));
        }
        Ok(Qbf2 { exists, forall, matrix })
    }

    /// Reads an `exists` line, an optional `forall` line and the matrix.
    /// The matrix uses `&`, `|`, parentheses and `!` before variables.
    pub fn parse(text: &str) -> Result<Self> {
        let body: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        let mut exists = Vec::new();
        let mut forall = Vec::new();
        let mut matrix = String::new();
        for line in body {
            let mut words = line.split_whitespace();
            match words.next() {
                Some("exists") if matrix.is_empty() => exists.extend(words.map(name)),
                Some("forall") if matrix.is_empty() => forall.extend(words.map(name)),
                _ => {
                    matrix.push_str(line);
                    matrix.push(' ');
                }
            }
        }
        let matrix = MatrixParser::new(&matrix).parse()?;
        Qbf2::new(exists, forall, matrix)
    }

    /// Truth value by exhaustive evaluation.
    pub fn oracle(&self) -> Result<bool> {
        oracle_qbf(self)
    }
}

impl fmt::Display for Qbf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |vs: &[Name]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "exists {}", join(&self.exists))?;
        if !self.forall.is_empty() {
            writeln!(f, "forall {}", join(&self.forall))?;
        }
        writeln!(f, "{}", self.matrix)
    }
}

struct MatrixParser {
    toks: Vec<String>,
    pos: usize,
}

impl MatrixParser {
    fn new(text: &str) -> Self {
        let mut toks = Vec::new();
        let mut cur = String::new();
        for c in text.chars() {
            if c.is_ascii_alphanumeric() || c == '_' {
                cur.push(c);
                continue;
            }
            if !cur.is_empty() {
                toks.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                toks.push(c.to_string());
            }
        }
        if !cur.is_empty() {
            toks.push(cur);
        }
        MatrixParser { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn parse(mut self) -> Result<Matrix> {
        let m = self.or()?;
        match self.peek() {
            None => Ok(m),
            Some(t) => Err(Error::Input(format!("unexpected `{t}` in matrix"))),
        }
    }

    fn or(&mut self) -> Result<Matrix> {
        let mut m = self.and()?;
        while self.peek() == Some("|") {
            self.pos += 1;
            m = Matrix::or(m, self.and()?);
        }
        Ok(m)
    }

    fn and(&mut self) -> Result<Matrix> {
        let mut m = self.atom()?;
        while self.peek() == Some("&") {
            self.pos += 1;
            m = Matrix::and(m, self.atom()?);
        }
        Ok(m)
    }

    fn atom(&mut self) -> Result<Matrix> {
        let tok = self.peek().map(str::to_owned);
        self.pos += 1;
        match tok.as_deref() {
            Some("(") => {
                let m = self.or()?;
                if self.peek() != Some(")") {
                    return Err(Error::Input("expected `)` in matrix".into()));
                }
                self.pos += 1;
                Ok(m)
            }
            Some("!") => match self.peek().map(str::to_owned) {
                Some(v) if is_var(&v) => {
                    self.pos += 1;
                    Ok(Matrix::neg_var(v))
                }
                _ => Err(Error::Input("negation applies to variables only".into())),
            },
            Some(v) if is_var(v) => Ok(Matrix::var(v)),
            Some(t) => Err(Error::Input(format!("unexpected `{t}` in matrix"))),
            None => Err(Error::Input("unexpected end of matrix".into())),
        }
    }
}

fn is_var(t: &str) -> bool {
    t.starts_with(|c: char| c.is_ascii_alphabetic())
}

/// Truth value of `q` by exhaustive evaluation.
pub fn oracle_qbf(q: &Qbf2) -> Result<bool> {
    let (n, m) = (q.exists.len(), q.forall.len());
    if n + m > 16 {
        return Err(Error::Budget(format!("formula oracle limited to 16 variables, got {}", n + m)));
    }
    let value = |bits: u32, vars: &[Name], v: &str| vars.iter().position(|x| &**x == v).map(|i| bits >> i & 1 == 1);
    Ok((0..1u32 << n).any(|p| {
        (0..1u32 << m).all(|qb| {
            q.matrix.eval(&|v| value(p, &q.exists, v).or_else(|| value(qb, &q.forall, v)).unwrap_or(false))
        })
    }))
}

/// A bounded synthesis instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisInstance {
    pub actions: Vec<NamedAction>,
    pub pre: Formula,
    pub goal: Formula,
    pub k: usize,
}

impl SynthesisInstance {
    pub fn actions_file(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            let _ = writeln!(out, "action {} {{", a.name);
            for line in a.action.pretty().lines() {
                let _ = writeln!(out, "  {line}");
            }
            out.push_str("}\n");
        }
        out
    }
}

fn individual(v: &str) -> Name {
    name(format!("o_{v}"))
}

/// Compiles `q` to a synthesis instance that is positive exactly when `q`
/// is true. Individual `o_v` stands for variable `v`; membership in `T`
/// or `F` is its truth value. Existential variables start unassigned and
/// are set by the actions `set_v_true` / `set_v_false`.
pub fn gen_qbf(q: &Qbf2) -> SynthesisInstance {
    let t = || ConceptExpr::name("T");
    let f = || ConceptExpr::name("F");
    let at = |v: &str, c: ConceptExpr| -> Formula { Axiom::concept_assert(Term::Ind(individual(v)), c).into() };
    let mut pre = Vec::new();
    for p in &q.exists {
        pre.push(at(p, ConceptExpr::not(ConceptExpr::or(t(), f()))));
    }
    for v in &q.forall {
        pre.push(at(
            v,
            ConceptExpr::and(ConceptExpr::or(t(), f()), ConceptExpr::or(ConceptExpr::not(t()), ConceptExpr::not(f()))),
        ));
    }
    let mut actions = Vec::new();
    for p in &q.exists {
        let nominal = || ConceptExpr::nominal(Term::Ind(individual(p)));
        let set = |target: &str, guard: ConceptExpr| {
            Action::new(vec![Step::Conditional {
                guard: at(p, guard),
                then: Action::new(vec![Step::AddConcept(name(target), nominal().into())]),
                otherwise: Action::skip(),
            }])
        };
        actions.push(NamedAction { name: format!("set_{p}_true"), action: set("T", ConceptExpr::not(f())) });
        actions.push(NamedAction { name: format!("set_{p}_false"), action: set("F", ConceptExpr::not(t())) });
    }
    fn goal(m: &Matrix) -> Formula {
        match m {
            Matrix::Lit { var, positive } => Axiom::concept_assert(
                Term::Ind(individual(var)),
                ConceptExpr::name(if *positive { "T" } else { "F" }),
            )
            .into(),
            Matrix::And(a, b) => Formula::and(goal(a), goal(b)),
            Matrix::Or(a, b) => Formula::or(goal(a), goal(b)),
        }
    }
    SynthesisInstance { actions, pre: Formula::conj(pre), goal: goal(&q.matrix), k: q.exists.len() }
}
