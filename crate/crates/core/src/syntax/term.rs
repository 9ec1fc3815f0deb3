//! Function, predicate and update terms, plus the leaf types of every logic.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A function term: a symbol (input or cell) or a function application.
///
/// Constants are zero-argument applications and print as `name()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionTerm {
    Symbol(String),
    Apply {
        name: String,
        args: Vec<FunctionTerm>,
    },
}

impl FunctionTerm {
    pub fn symbol(name: impl Into<String>) -> Self {
        FunctionTerm::Symbol(name.into())
    }

    pub fn apply(name: impl Into<String>, args: Vec<FunctionTerm>) -> Self {
        FunctionTerm::Apply {
            name: name.into(),
            args,
        }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        FunctionTerm::apply(name, vec![])
    }

    /// Every symbol (input or cell name) occurring in the term.
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            FunctionTerm::Symbol(s) => out.push(s.clone()),
            FunctionTerm::Apply { args, .. } => args.iter().for_each(|a| a.symbols(out)),
        }
    }

    /// Every applied function symbol with its arity.
    pub fn functions(&self, out: &mut Vec<(String, usize)>) {
        if let FunctionTerm::Apply { name, args } = self {
            out.push((name.clone(), args.len()));
            args.iter().for_each(|a| a.functions(out));
        }
    }

    /// Renames symbols; function names are left alone.
    pub fn rename_symbols(&self, f: &impl Fn(&str) -> String) -> FunctionTerm {
        match self {
            FunctionTerm::Symbol(s) => FunctionTerm::Symbol(f(s)),
            FunctionTerm::Apply { name, args } => FunctionTerm::Apply {
                name: name.clone(),
                args: args.iter().map(|a| a.rename_symbols(f)).collect(),
            },
        }
    }
}

impl fmt::Display for FunctionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionTerm::Symbol(s) => write!(f, "{s}"),
            FunctionTerm::Apply { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A predicate term.
///
/// `Signal` is a boolean input read directly, as in `voteA`; it is true when
/// the input carries the domain value `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PredicateTerm {
    Signal(String),
    Apply {
        name: String,
        args: Vec<FunctionTerm>,
    },
}

impl PredicateTerm {
    pub fn signal(name: impl Into<String>) -> Self {
        PredicateTerm::Signal(name.into())
    }

    pub fn apply(name: impl Into<String>, args: Vec<FunctionTerm>) -> Self {
        PredicateTerm::Apply {
            name: name.into(),
            args,
        }
    }

    pub fn args(&self) -> &[FunctionTerm] {
        match self {
            PredicateTerm::Signal(_) => &[],
            PredicateTerm::Apply { args, .. } => args,
        }
    }

    pub fn rename_symbols(&self, f: &impl Fn(&str) -> String) -> PredicateTerm {
        match self {
            PredicateTerm::Signal(s) => PredicateTerm::Signal(f(s)),
            PredicateTerm::Apply { name, args } => PredicateTerm::Apply {
                name: name.clone(),
                args: args.iter().map(|a| a.rename_symbols(f)).collect(),
            },
        }
    }
}

impl fmt::Display for PredicateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateTerm::Signal(s) => write!(f, "{s}"),
            PredicateTerm::Apply { name, args } => {
                write!(f, "{}", FunctionTerm::apply(name.clone(), args.clone()))
            }
        }
    }
}

/// `[cell <- source]`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UpdateTerm {
    pub cell: String,
    pub source: FunctionTerm,
}

impl UpdateTerm {
    pub fn new(cell: impl Into<String>, source: FunctionTerm) -> Self {
        UpdateTerm {
            cell: cell.into(),
            source,
        }
    }

    /// The self-update `[c <- c]`.
    pub fn identity(cell: impl Into<String>) -> Self {
        let cell = cell.into();
        UpdateTerm {
            source: FunctionTerm::Symbol(cell.clone()),
            cell,
        }
    }

    pub fn rename_symbols(&self, f: &impl Fn(&str) -> String) -> UpdateTerm {
        UpdateTerm {
            cell: f(&self.cell),
            source: self.source.rename_symbols(f),
        }
    }
}

impl fmt::Display for UpdateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} <- {}]", self.cell, self.source)
    }
}

/// Leaf of a TSL formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TslAtom {
    Predicate(PredicateTerm),
    Update(UpdateTerm),
}

impl fmt::Display for TslAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TslAtom::Predicate(p) => write!(f, "{p}"),
            TslAtom::Update(u) => write!(f, "{u}"),
        }
    }
}

/// Name of a trace (or execution) variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceVar(pub String);

impl TraceVar {
    pub fn new(name: impl Into<String>) -> Self {
        TraceVar(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Trace annotation of a HyperTSL leaf.
///
/// `PerArgument` only appears in the rel flavor and always names at least two
/// distinct variables; uniform tags are stored as `Single`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomTags {
    Single(TraceVar),
    PerArgument(Vec<TraceVar>),
}

impl AtomTags {
    /// Collapses a per-argument list whose entries all agree.
    pub fn canonical(tags: Vec<TraceVar>) -> AtomTags {
        match tags.first() {
            Some(first) if tags.iter().all(|t| t == first) => AtomTags::Single(first.clone()),
            _ => AtomTags::PerArgument(tags),
        }
    }

    pub fn vars(&self) -> Vec<&TraceVar> {
        match self {
            AtomTags::Single(v) => vec![v],
            AtomTags::PerArgument(vs) => vs.iter().collect(),
        }
    }

    pub fn map(&self, f: &impl Fn(&TraceVar) -> TraceVar) -> AtomTags {
        match self {
            AtomTags::Single(v) => AtomTags::Single(f(v)),
            AtomTags::PerArgument(vs) => AtomTags::canonical(vs.iter().map(f).collect()),
        }
    }
}

/// Leaf of a HyperTSL formula: a TSL atom plus its trace annotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperTslAtom {
    pub atom: TslAtom,
    pub tags: AtomTags,
}

impl HyperTslAtom {
    pub fn single(atom: TslAtom, var: TraceVar) -> Self {
        HyperTslAtom {
            atom,
            tags: AtomTags::Single(var),
        }
    }

    pub fn predicate(p: PredicateTerm, var: &str) -> Self {
        HyperTslAtom::single(TslAtom::Predicate(p), TraceVar::new(var))
    }

    pub fn update(u: UpdateTerm, var: &str) -> Self {
        HyperTslAtom::single(TslAtom::Update(u), TraceVar::new(var))
    }

    /// The trace variable when the leaf is uniformly tagged.
    pub fn single_var(&self) -> Option<&TraceVar> {
        match &self.tags {
            AtomTags::Single(v) => Some(v),
            AtomTags::PerArgument(_) => None,
        }
    }

    pub fn retag(&self, f: &impl Fn(&TraceVar) -> TraceVar) -> HyperTslAtom {
        HyperTslAtom {
            atom: self.atom.clone(),
            tags: self.tags.map(f),
        }
    }
}

impl fmt::Display for HyperTslAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.atom, &self.tags) {
            (atom, AtomTags::Single(v)) => write!(f, "{atom}@{v}"),
            (
                TslAtom::Predicate(PredicateTerm::Apply { name, args }),
                AtomTags::PerArgument(vs),
            ) if args.len() == vs.len() => {
                write!(f, "{name}(")?;
                for (i, (a, v)) in args.iter().zip(vs).enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}@{v}")?;
                }
                write!(f, ")")
            }
            (atom, AtomTags::PerArgument(vs)) => {
                // Not constructible through the parser; printed for debugging only.
                write!(f, "{atom}@{{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// The kind of an atomic proposition: the term it abstracts, or a bare name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ApKind {
    Predicate(PredicateTerm),
    Update(UpdateTerm),
    Plain(String),
}

/// Atomic proposition of LTL and HyperLTL.
///
/// Equality is structural over the wrapped term, so `p(f(x))` and a predicate
/// literally named `p_f` applied to `x` stay distinct. `copy` distinguishes the
/// copies created by self-composition and by zipping several traces into one.
///
/// In JSON an `Ap` is its printed form; a trailing `#j` is read back as the
/// copy index and a bare name as a signal predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ap {
    pub kind: ApKind,
    pub copy: Option<u32>,
}

impl Ap {
    pub fn predicate(p: PredicateTerm) -> Self {
        Ap {
            kind: ApKind::Predicate(p),
            copy: None,
        }
    }

    pub fn update(u: UpdateTerm) -> Self {
        Ap {
            kind: ApKind::Update(u),
            copy: None,
        }
    }

    pub fn plain(name: impl Into<String>) -> Self {
        Ap {
            kind: ApKind::Plain(name.into()),
            copy: None,
        }
    }

    pub fn from_tsl(atom: &TslAtom) -> Self {
        match atom {
            TslAtom::Predicate(p) => Ap::predicate(p.clone()),
            TslAtom::Update(u) => Ap::update(u.clone()),
        }
    }

    pub fn with_copy(&self, copy: u32) -> Self {
        Ap {
            kind: self.kind.clone(),
            copy: Some(copy),
        }
    }

    pub fn base(&self) -> Self {
        Ap {
            kind: self.kind.clone(),
            copy: None,
        }
    }

    pub fn is_update(&self) -> bool {
        matches!(self.kind, ApKind::Update(_))
    }
}

impl fmt::Display for Ap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ApKind::Predicate(p) => write!(f, "{p}")?,
            ApKind::Update(u) => write!(f, "{u}")?,
            ApKind::Plain(n) => write!(f, "{n}")?,
        }
        if let Some(c) = self.copy {
            write!(f, "#{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Ap {
    type Err = super::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (base, copy) = match s.rsplit_once('#') {
            Some((b, d)) if !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit()) => {
                (b, d.parse::<u32>().ok())
            }
            _ => (s, None),
        };
        let kind = if base.starts_with('[') {
            ApKind::Update(super::parse_update_term(base)?)
        } else {
            ApKind::Predicate(super::parse_predicate_term(base)?)
        };
        Ok(Ap { kind, copy })
    }
}

impl Serialize for Ap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Leaf of a HyperLTL formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexedAp {
    pub ap: Ap,
    pub var: TraceVar,
}

impl IndexedAp {
    pub fn new(ap: Ap, var: impl Into<String>) -> Self {
        IndexedAp {
            ap,
            var: TraceVar::new(var),
        }
    }
}

impl fmt::Display for IndexedAp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.ap, self.var)
    }
}
