//! Lexer and recursive-descent parser for `.htsl` property files and for the
//! LTL and HyperLTL formula syntax.
//!
//! Operator precedence, loosest first: `<->`, `->` (right associative), `||`,
//! `&&`, the binary temporal operators `U W R` (right associative), and the
//! prefix operators `! X F G`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{
    Ap, AtomTags, Flavor, Formula, FunctionTerm, HyperLtlFormula, HyperTslAtom, HyperTslFormula,
    IndexedAp, LtlFormula, PredicateTerm, QuantKind, Quantifier, TraceVar, TslAtom, TslFormula,
    UpdateTerm,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("`{name}` is applied to {found} arguments but was first used with {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("trace variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("trace variable `{0}` is bound more than once")]
    DuplicateVariable(String),
    #[error("cell `{0}` is used as an input")]
    CellAsInput(String),
    #[error("`{0}` is declared as an input but is the target of an update")]
    InputUpdated(String),
    #[error("`{0}` is updated but not declared as a cell")]
    UndeclaredCell(String),
    #[error("arguments of `{0}` carry different trace variables; this needs `flavor: rel`")]
    MixedTags(String),
    #[error("missing trace annotation `@var`")]
    MissingTag,
    #[error("{0}")]
    Invalid(String),
}

/// A parse or validation error with its source position (1-based).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    At,
    Colon,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Assign,
    True,
    False,
    Forall,
    Exists,
    Next,
    Finally,
    Globally,
    Until,
    WeakUntil,
    Release,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::At => "`@`",
            Tok::Colon => "`:`",
            Tok::Not => "`!`",
            Tok::And => "`&&`",
            Tok::Or => "`||`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::Assign => "`<-`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::Next => "`X`",
            Tok::Finally => "`F`",
            Tok::Globally => "`G`",
            Tok::Until => "`U`",
            Tok::WeakUntil => "`W`",
            Tok::Release => "`R`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '@' => (Tok::At, 1),
            ':' => (Tok::Colon, 1),
            '!' => (Tok::Not, 1),
            '&' if rest(1) == Some('&') => (Tok::And, 2),
            '|' if rest(1) == Some('|') => (Tok::Or, 2),
            '-' if rest(1) == Some('>') => (Tok::Implies, 2),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => (Tok::Iff, 3),
            '<' if rest(1) == Some('-') => (Tok::Assign, 2),
            c if is_ident_start(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "X" => Tok::Next,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "W" => Tok::WeakUntil,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                };
                (tok, j - start)
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    column: tc,
                    kind: ParseErrorKind::Lexical(other),
                })
            }
        };
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
        advance(len, &mut i, &mut col);
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// Leaf as read from the source, before the logic-specific checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum RawKind {
    Bare(String),
    Pred(PredicateTerm),
    Update(UpdateTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct RawAtom {
    kind: RawKind,
    tags: Option<AtomTags>,
    line: usize,
    column: usize,
}

struct RawFormula {
    prefix: Vec<(Quantifier, usize, usize)>,
    body: Formula<RawAtom>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    arities: HashMap<String, usize>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            arities: HashMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn check_arity(&mut self, name: &str, n: usize, at: (usize, usize)) -> PResult<()> {
        match self.arities.get(name) {
            Some(&k) if k != n => Err(ParseError {
                line: at.0,
                column: at.1,
                kind: ParseErrorKind::Arity {
                    name: name.to_string(),
                    expected: k,
                    found: n,
                },
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), n);
                Ok(())
            }
        }
    }

    fn function_term(&mut self) -> PResult<FunctionTerm> {
        let at = self.here();
        let name = self.ident("a function term")?;
        if *self.peek() != Tok::LParen {
            return Ok(FunctionTerm::Symbol(name));
        }
        self.bump();
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.function_term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.check_arity(&name, args.len(), at)?;
        Ok(FunctionTerm::Apply { name, args })
    }

    fn optional_tag(&mut self) -> PResult<Option<TraceVar>> {
        if *self.peek() == Tok::At {
            self.bump();
            Ok(Some(TraceVar(self.ident("a trace variable")?)))
        } else {
            Ok(None)
        }
    }

    fn leaf(&mut self) -> PResult<RawAtom> {
        let (line, column) = self.here();
        if *self.peek() == Tok::LBrack {
            self.bump();
            let cell = self.ident("a cell name")?;
            self.expect(Tok::Assign)?;
            let source = self.function_term()?;
            self.expect(Tok::RBrack)?;
            let tags = self.optional_tag()?.map(AtomTags::Single);
            return Ok(RawAtom {
                kind: RawKind::Update(UpdateTerm { cell, source }),
                tags,
                line,
                column,
            });
        }
        let name = self.ident("a formula")?;
        if *self.peek() != Tok::LParen {
            let tags = self.optional_tag()?.map(AtomTags::Single);
            return Ok(RawAtom {
                kind: RawKind::Bare(name),
                tags,
                line,
                column,
            });
        }
        self.bump();
        let mut args = Vec::new();
        let mut arg_tags = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.function_term()?);
                arg_tags.push(self.optional_tag()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.check_arity(&name, args.len(), (line, column))?;
        let trailing = self.optional_tag()?;
        let tagged = arg_tags.iter().filter(|t| t.is_some()).count();
        let tags = if tagged == 0 {
            trailing.map(AtomTags::Single)
        } else if tagged == args.len() && trailing.is_none() {
            Some(AtomTags::canonical(
                arg_tags.into_iter().flatten().collect(),
            ))
        } else {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::Invalid(format!(
                    "either every argument of `{name}` is annotated or none is"
                )),
            });
        };
        Ok(RawAtom {
            kind: RawKind::Pred(PredicateTerm::Apply { name, args }),
            tags,
            line,
            column,
        })
    }

    fn primary(&mut self) -> PResult<Formula<RawAtom>> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) | Tok::LBrack => Ok(Formula::Atom(self.leaf()?)),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn unary(&mut self) -> PResult<Formula<RawAtom>> {
        let op = self.peek().clone();
        match op {
            Tok::Not | Tok::Next | Tok::Finally | Tok::Globally => {
                self.bump();
                let inner = self.unary()?;
                Ok(match op {
                    Tok::Not => Formula::not(inner),
                    Tok::Next => Formula::next(inner),
                    Tok::Finally => Formula::eventually(inner),
                    _ => Formula::globally(inner),
                })
            }
            _ => self.primary(),
        }
    }

    fn binary_temporal(&mut self) -> PResult<Formula<RawAtom>> {
        let lhs = self.unary()?;
        let op = self.peek().clone();
        match op {
            Tok::Until | Tok::WeakUntil | Tok::Release => {
                self.bump();
                let rhs = self.binary_temporal()?;
                Ok(match op {
                    Tok::Until => Formula::until(lhs, rhs),
                    Tok::WeakUntil => Formula::weak_until(lhs, rhs),
                    _ => Formula::release(lhs, rhs),
                })
            }
            _ => Ok(lhs),
        }
    }

    fn and(&mut self) -> PResult<Formula<RawAtom>> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula<RawAtom>> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Formula<RawAtom>> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn iff(&mut self) -> PResult<Formula<RawAtom>> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            lhs = Formula::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> PResult<RawFormula> {
        let mut prefix = Vec::new();
        loop {
            let kind = match self.peek() {
                Tok::Forall => QuantKind::Forall,
                Tok::Exists => QuantKind::Exists,
                _ => break,
            };
            self.bump();
            loop {
                let (line, column) = self.here();
                let var = TraceVar(self.ident("a trace variable")?);
                prefix.push((Quantifier { kind, var }, line, column));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Dot)?;
        }
        let body = self.iff()?;
        Ok(RawFormula { prefix, body })
    }

    fn at_header(&self) -> Option<String> {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(s), Tok::Colon) => Some(s.clone()),
            _ => None,
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.ident("a name")?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.ident("a name")?);
        }
        Ok(out)
    }

    fn end(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// One section of a property file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Section {
    /// A TSL formula without quantifiers or trace annotations.
    Trace(TslFormula),
    Hyper(HyperTslFormula),
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Trace(t) => write!(f, "{t}"),
            Section::Hyper(h) => write!(f, "{h}"),
        }
    }
}

/// A parsed `.htsl` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyFile {
    pub flavor: Flavor,
    pub inputs: Option<Vec<String>>,
    pub cells: Option<Vec<String>>,
    pub assume: Option<Section>,
    pub guarantee: Section,
}

const DEFAULT_VAR: &str = "pi";

fn lift_universal(psi: &TslFormula, flavor: Flavor) -> HyperTslFormula {
    let var = TraceVar::new(DEFAULT_VAR);
    HyperTslFormula {
        flavor,
        prefix: vec![Quantifier {
            kind: QuantKind::Forall,
            var: var.clone(),
        }],
        body: HyperTslFormula::lift(psi, &var),
    }
}

impl PropertyFile {
    /// The single closed formula described by the file.
    ///
    /// An assumption becomes the antecedent of an implication inside the
    /// guarantee's prefix. A trace-level assumption is instantiated for every
    /// quantified variable; a hyper assumption must have a prefix of the same
    /// shape, and its variables are renamed position by position.
    pub fn combined(&self) -> Result<HyperTslFormula, ParseError> {
        let guarantee = match &self.guarantee {
            Section::Hyper(h) => h.clone(),
            Section::Trace(t) => lift_universal(t, self.flavor),
        };
        let Some(assume) = &self.assume else {
            return Ok(guarantee);
        };
        let antecedent = match assume {
            Section::Trace(t) => Formula::conj(
                guarantee
                    .prefix
                    .iter()
                    .map(|q| HyperTslFormula::lift(t, &q.var)),
            ),
            Section::Hyper(a) => {
                let same_shape = a.prefix.len() == guarantee.prefix.len()
                    && a.prefix
                        .iter()
                        .zip(&guarantee.prefix)
                        .all(|(x, y)| x.kind == y.kind);
                if !same_shape {
                    return Err(ParseError {
                        line: 1,
                        column: 1,
                        kind: ParseErrorKind::Invalid(
                            "assumption and guarantee need quantifier prefixes of the same shape"
                                .into(),
                        ),
                    });
                }
                let map: HashMap<TraceVar, TraceVar> = a
                    .prefix
                    .iter()
                    .zip(&guarantee.prefix)
                    .map(|(x, y)| (x.var.clone(), y.var.clone()))
                    .collect();
                a.body
                    .map_atoms(&mut |atom| atom.retag(&|v: &TraceVar| map[v].clone()))
            }
        };
        Ok(HyperTslFormula {
            flavor: self.flavor,
            prefix: guarantee.prefix.clone(),
            body: Formula::implies(antecedent, guarantee.body),
        })
    }
}

impl fmt::Display for PropertyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flavor == Flavor::Rel {
            writeln!(f, "flavor: rel")?;
        }
        if let Some(i) = &self.inputs {
            writeln!(f, "inputs: {}", i.join(", "))?;
        }
        if let Some(c) = &self.cells {
            writeln!(f, "cells: {}", c.join(", "))?;
        }
        if let Some(a) = &self.assume {
            writeln!(f, "assume:\n  {a}")?;
        }
        writeln!(f, "guarantee:\n  {}", self.guarantee)
    }
}

struct Declarations<'a> {
    flavor: Flavor,
    inputs: Option<&'a [String]>,
    cells: Option<&'a [String]>,
}

fn pos_error(a: &RawAtom, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line: a.line,
        column: a.column,
        kind,
    }
}

fn predicate_name(p: &PredicateTerm) -> String {
    match p {
        PredicateTerm::Signal(s) => s.clone(),
        PredicateTerm::Apply { name, .. } => name.clone(),
    }
}

fn raw_tsl_atom(a: &RawAtom) -> TslAtom {
    match &a.kind {
        RawKind::Bare(s) => TslAtom::Predicate(PredicateTerm::Signal(s.clone())),
        RawKind::Pred(p) => TslAtom::Predicate(p.clone()),
        RawKind::Update(u) => TslAtom::Update(u.clone()),
    }
}

/// Checks cell/input usage over all formulas of a file at once.
fn check_cells(formulas: &[&RawFormula], decl: &Declarations) -> PResult<()> {
    let mut cells: BTreeSet<String> = decl.cells.unwrap_or(&[]).iter().cloned().collect();
    for f in formulas {
        for a in f.body.atoms() {
            if let RawKind::Update(u) = &a.kind {
                if let Some(inputs) = decl.inputs {
                    if inputs.contains(&u.cell) {
                        return Err(pos_error(a, ParseErrorKind::InputUpdated(u.cell.clone())));
                    }
                }
                if let Some(declared) = decl.cells {
                    if !declared.contains(&u.cell) {
                        return Err(pos_error(a, ParseErrorKind::UndeclaredCell(u.cell.clone())));
                    }
                }
                cells.insert(u.cell.clone());
            }
        }
    }
    if let Some(inputs) = decl.inputs {
        if let Some(c) = inputs.iter().find(|i| cells.contains(*i)) {
            return Err(ParseError {
                line: 1,
                column: 1,
                kind: ParseErrorKind::CellAsInput(c.clone()),
            });
        }
    }
    for f in formulas {
        for a in f.body.atoms() {
            if let RawKind::Bare(s) = &a.kind {
                if cells.contains(s) {
                    return Err(pos_error(a, ParseErrorKind::CellAsInput(s.clone())));
                }
            }
        }
    }
    Ok(())
}

fn check_prefix(f: &RawFormula) -> PResult<()> {
    let mut seen = BTreeSet::new();
    for (q, line, column) in &f.prefix {
        if !seen.insert(q.var.clone()) {
            return Err(ParseError {
                line: *line,
                column: *column,
                kind: ParseErrorKind::DuplicateVariable(q.var.0.clone()),
            });
        }
    }
    Ok(())
}

fn to_section(f: &RawFormula, decl: &Declarations) -> PResult<Section> {
    check_prefix(f)?;
    if f.prefix.is_empty() {
        let body = f.body.try_map_atoms(&mut |a: &RawAtom| match &a.tags {
            None => Ok(raw_tsl_atom(a)),
            Some(t) => Err(pos_error(
                a,
                ParseErrorKind::UnboundVariable(t.vars()[0].0.clone()),
            )),
        })?;
        return Ok(Section::Trace(body));
    }
    let bound: BTreeSet<&TraceVar> = f.prefix.iter().map(|(q, _, _)| &q.var).collect();
    let body = f.body.try_map_atoms(&mut |a: &RawAtom| {
        let tags = a
            .tags
            .clone()
            .ok_or_else(|| pos_error(a, ParseErrorKind::MissingTag))?;
        if let Some(v) = tags.vars().into_iter().find(|v| !bound.contains(v)) {
            return Err(pos_error(a, ParseErrorKind::UnboundVariable(v.0.clone())));
        }
        let atom = raw_tsl_atom(a);
        if let (AtomTags::PerArgument(_), Flavor::Plain) = (&tags, decl.flavor) {
            let name = match &atom {
                TslAtom::Predicate(p) => predicate_name(p),
                TslAtom::Update(u) => u.cell.clone(),
            };
            return Err(pos_error(a, ParseErrorKind::MixedTags(name)));
        }
        Ok(HyperTslAtom { atom, tags })
    })?;
    Ok(Section::Hyper(HyperTslFormula {
        flavor: decl.flavor,
        prefix: f.prefix.iter().map(|(q, _, _)| q.clone()).collect(),
        body,
    }))
}

/// Parses a `.htsl` file into its sections.
pub fn parse_property_file(src: &str) -> Result<PropertyFile, ParseError> {
    let mut p = Parser::new(src)?;
    let mut flavor = Flavor::Plain;
    let mut inputs = None;
    let mut cells = None;
    let mut assume = None;
    let mut guarantee = None;
    let mut sectioned = false;
    while let Some(head) = p.at_header() {
        let at = p.here();
        match head.as_str() {
            "flavor" => {
                p.bump();
                p.bump();
                flavor = match p.ident("`plain` or `rel`")?.as_str() {
                    "plain" => Flavor::Plain,
                    "rel" => Flavor::Rel,
                    other => {
                        return Err(ParseError {
                            line: at.0,
                            column: at.1,
                            kind: ParseErrorKind::Invalid(format!("unknown flavor `{other}`")),
                        })
                    }
                };
            }
            "inputs" => {
                p.bump();
                p.bump();
                inputs = Some(p.ident_list()?);
            }
            "cells" => {
                p.bump();
                p.bump();
                cells = Some(p.ident_list()?);
            }
            "assume" | "guarantee" => {
                p.bump();
                p.bump();
                sectioned = true;
                let f = p.quantified()?;
                let slot = if head == "assume" {
                    &mut assume
                } else {
                    &mut guarantee
                };
                if slot.is_some() {
                    return Err(ParseError {
                        line: at.0,
                        column: at.1,
                        kind: ParseErrorKind::Invalid(format!("section `{head}` appears twice")),
                    });
                }
                *slot = Some(f);
            }
            other => {
                return Err(ParseError {
                    line: at.0,
                    column: at.1,
                    kind: ParseErrorKind::Invalid(format!("unknown header `{other}`")),
                })
            }
        }
    }
    if !sectioned {
        guarantee = Some(p.quantified()?);
    }
    p.end()?;
    let Some(guarantee) = guarantee else {
        return Err(p.unexpected("a `guarantee:` section"));
    };
    let decl = Declarations {
        flavor,
        inputs: inputs.as_deref(),
        cells: cells.as_deref(),
    };
    let all: Vec<&RawFormula> = assume.iter().chain(std::iter::once(&guarantee)).collect();
    check_cells(&all, &decl)?;
    let assume = assume.as_ref().map(|a| to_section(a, &decl)).transpose()?;
    let guarantee = to_section(&guarantee, &decl)?;
    Ok(PropertyFile {
        flavor,
        inputs,
        cells,
        assume,
        guarantee,
    })
}

/// Parses a property file and combines its sections into one closed formula.
pub fn parse_property(src: &str) -> Result<HyperTslFormula, ParseError> {
    parse_property_file(src)?.combined()
}

/// Parses a TSL formula: no quantifiers and no trace annotations.
pub fn parse_tsl(src: &str) -> Result<TslFormula, ParseError> {
    match parse_property_file(src)?.guarantee {
        Section::Trace(t) => Ok(t),
        Section::Hyper(_) => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Invalid("expected a TSL formula without quantifiers".into()),
        }),
    }
}

fn raw_ap(a: &RawAtom) -> Ap {
    match &a.kind {
        RawKind::Bare(s) => Ap::predicate(PredicateTerm::Signal(s.clone())),
        RawKind::Pred(p) => Ap::predicate(p.clone()),
        RawKind::Update(u) => Ap::update(u.clone()),
    }
}

/// Parses an LTL formula. A bare name `a` is the signal proposition `a`.
pub fn parse_ltl(src: &str) -> Result<LtlFormula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.iff()?;
    p.end()?;
    f.try_map_atoms(&mut |a: &RawAtom| match &a.tags {
        None => Ok(raw_ap(a)),
        Some(t) => Err(pos_error(
            a,
            ParseErrorKind::UnboundVariable(t.vars()[0].0.clone()),
        )),
    })
}

/// Parses a HyperLTL formula; every proposition carries one `@var`.
pub fn parse_hyperltl(src: &str) -> Result<HyperLtlFormula, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.quantified()?;
    p.end()?;
    check_prefix(&raw)?;
    let bound: BTreeSet<&TraceVar> = raw.prefix.iter().map(|(q, _, _)| &q.var).collect();
    let body = raw.body.try_map_atoms(&mut |a: &RawAtom| match &a.tags {
        None => Err(pos_error(a, ParseErrorKind::MissingTag)),
        Some(AtomTags::PerArgument(_)) => Err(pos_error(
            a,
            ParseErrorKind::Invalid("HyperLTL propositions take a single annotation".into()),
        )),
        Some(AtomTags::Single(v)) if !bound.contains(v) => {
            Err(pos_error(a, ParseErrorKind::UnboundVariable(v.0.clone())))
        }
        Some(AtomTags::Single(v)) => Ok(IndexedAp {
            ap: raw_ap(a),
            var: v.clone(),
        }),
    })?;
    Ok(HyperLtlFormula {
        prefix: raw.prefix.into_iter().map(|(q, _, _)| q).collect(),
        body,
    })
}

/// Parses a function term such as `addOne(votesA)` or `A()`.
pub fn parse_function_term(src: &str) -> Result<FunctionTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.function_term()?;
    p.end()?;
    Ok(t)
}

/// Parses an untagged predicate term such as `gt(votesA, votesB)` or `voteA`.
pub fn parse_predicate_term(src: &str) -> Result<PredicateTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.leaf()?;
    p.end()?;
    match (&a.kind, &a.tags) {
        (RawKind::Bare(s), None) => Ok(PredicateTerm::Signal(s.clone())),
        (RawKind::Pred(pt), None) => Ok(pt.clone()),
        _ => Err(pos_error(
            &a,
            ParseErrorKind::Invalid("expected an untagged predicate term".into()),
        )),
    }
}

/// Parses an untagged update term `[cell <- term]`.
pub fn parse_update_term(src: &str) -> Result<UpdateTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.leaf()?;
    p.end()?;
    match (&a.kind, &a.tags) {
        (RawKind::Update(u), None) => Ok(u.clone()),
        _ => Err(pos_error(
            &a,
            ParseErrorKind::Invalid("expected an untagged update term".into()),
        )),
    }
}
