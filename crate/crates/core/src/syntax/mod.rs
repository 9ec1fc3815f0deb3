//! Abstract syntax, parsing and printing for TSL, HyperTSL, LTL and HyperLTL.

mod formula;
mod parse;
mod print;
mod term;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use formula::Formula;
pub use parse::{
    parse_function_term, parse_hyperltl, parse_ltl, parse_predicate_term, parse_property,
    parse_property_file, parse_tsl, parse_update_term, ParseError, PropertyFile, Section,
};
pub use print::print_property;
pub use term::{
    Ap, ApKind, AtomTags, FunctionTerm, HyperTslAtom, IndexedAp, PredicateTerm, TraceVar, TslAtom,
    UpdateTerm,
};

pub type TslFormula = Formula<TslAtom>;
pub type LtlFormula = Formula<Ap>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub var: TraceVar,
}

impl Quantifier {
    pub fn forall(var: impl Into<String>) -> Self {
        Quantifier {
            kind: QuantKind::Forall,
            var: TraceVar::new(var),
        }
    }

    pub fn exists(var: impl Into<String>) -> Self {
        Quantifier {
            kind: QuantKind::Exists,
            var: TraceVar::new(var),
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match self.kind {
            QuantKind::Forall => "forall",
            QuantKind::Exists => "exists",
        };
        write!(f, "{kw} {}.", self.var)
    }
}

/// Whether predicates may relate several executions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[default]
    Plain,
    Rel,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Plain => "plain",
            Flavor::Rel => "rel",
        })
    }
}

fn prefix_is(prefix: &[Quantifier], kind: QuantKind) -> bool {
    prefix.iter().all(|q| q.kind == kind)
}

/// A quantifier prefix over a TSL body with trace-tagged leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperTslFormula {
    pub flavor: Flavor,
    pub prefix: Vec<Quantifier>,
    pub body: Formula<HyperTslAtom>,
}

impl HyperTslFormula {
    pub fn is_universal(&self) -> bool {
        prefix_is(&self.prefix, QuantKind::Forall)
    }

    pub fn is_existential(&self) -> bool {
        prefix_is(&self.prefix, QuantKind::Exists)
    }

    pub fn vars(&self) -> Vec<TraceVar> {
        self.prefix.iter().map(|q| q.var.clone()).collect()
    }

    /// Tags a TSL formula with a single trace variable.
    pub fn lift(psi: &TslFormula, var: &TraceVar) -> Formula<HyperTslAtom> {
        psi.map_atoms(&mut |a| HyperTslAtom::single(a.clone(), var.clone()))
    }

    /// Drops all tags; meaningful when the body mentions one variable only.
    pub fn strip(body: &Formula<HyperTslAtom>) -> TslFormula {
        body.map_atoms(&mut |a| a.atom.clone())
    }
}

impl fmt::Display for HyperTslFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.prefix {
            write!(f, "{q} ")?;
        }
        write!(f, "{}", self.body)
    }
}

/// A quantifier prefix over an LTL body with trace-tagged propositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperLtlFormula {
    pub prefix: Vec<Quantifier>,
    pub body: Formula<IndexedAp>,
}

impl HyperLtlFormula {
    pub fn is_universal(&self) -> bool {
        prefix_is(&self.prefix, QuantKind::Forall)
    }

    pub fn is_existential(&self) -> bool {
        prefix_is(&self.prefix, QuantKind::Exists)
    }

    pub fn vars(&self) -> Vec<TraceVar> {
        self.prefix.iter().map(|q| q.var.clone()).collect()
    }

    /// The body as plain LTL over a zipped trace: propositions of the `j`-th
    /// prefix variable become copy `j + 1`. `None` if the body mentions an
    /// unbound variable.
    pub fn zipped_body(&self) -> Option<LtlFormula> {
        let vars = self.vars();
        self.body
            .try_map_atoms(&mut |a: &IndexedAp| {
                let j = vars.iter().position(|v| *v == a.var).ok_or(())?;
                Ok::<_, ()>(a.ap.with_copy(j as u32 + 1))
            })
            .ok()
    }

    /// Every proposition of the body with its tag removed.
    pub fn base_aps(&self) -> BTreeSet<Ap> {
        self.body
            .atoms()
            .into_iter()
            .map(|a| a.ap.clone())
            .collect()
    }
}

impl fmt::Display for HyperLtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.prefix {
            write!(f, "{q} ")?;
        }
        write!(f, "{}", self.body)
    }
}

/// Terms occurring in a formula, with trace annotations removed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSets {
    pub predicates: BTreeSet<PredicateTerm>,
    pub updates: BTreeSet<UpdateTerm>,
    pub cells: BTreeSet<String>,
    pub inputs: BTreeSet<String>,
}

impl TermSets {
    pub fn union(&self, other: &TermSets) -> TermSets {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn extend(&mut self, other: &TermSets) {
        self.predicates.extend(other.predicates.iter().cloned());
        self.updates.extend(other.updates.iter().cloned());
        self.cells.extend(other.cells.iter().cloned());
        self.inputs.extend(other.inputs.iter().cloned());
        let cells = self.cells.clone();
        self.inputs.retain(|i| !cells.contains(i));
    }

    /// Adds `[c <- c]` for every cell that lacks it.
    pub fn with_self_updates(&self) -> TermSets {
        let mut out = self.clone();
        for c in &self.cells {
            out.updates.insert(UpdateTerm::identity(c.clone()));
        }
        out
    }

    /// The update terms targeting `cell`, in sorted order.
    pub fn updates_of(&self, cell: &str) -> Vec<&UpdateTerm> {
        self.updates.iter().filter(|u| u.cell == cell).collect()
    }

    /// Propositions of the ⌊·⌋ image: one per predicate and per update term.
    pub fn aps(&self) -> BTreeSet<Ap> {
        self.predicates
            .iter()
            .cloned()
            .map(Ap::predicate)
            .chain(self.updates.iter().cloned().map(Ap::update))
            .collect()
    }

    fn add_atom(&mut self, atom: &TslAtom) {
        let mut syms = Vec::new();
        match atom {
            TslAtom::Predicate(p) => {
                self.predicates.insert(p.clone());
                match p {
                    PredicateTerm::Signal(s) => syms.push(s.clone()),
                    PredicateTerm::Apply { args, .. } => {
                        args.iter().for_each(|a| a.symbols(&mut syms))
                    }
                }
            }
            TslAtom::Update(u) => {
                self.updates.insert(u.clone());
                self.cells.insert(u.cell.clone());
                u.source.symbols(&mut syms);
            }
        }
        self.inputs.extend(syms);
    }

    fn finish(mut self) -> Self {
        let cells = self.cells.clone();
        self.inputs.retain(|i| !cells.contains(i));
        self
    }

    pub fn of_tsl(psi: &TslFormula) -> TermSets {
        let mut out = TermSets::default();
        psi.for_each_atom(&mut |a| out.add_atom(a));
        out.finish()
    }

    pub fn of_hyper(phi: &HyperTslFormula) -> TermSets {
        let mut out = TermSets::default();
        phi.body.for_each_atom(&mut |a| out.add_atom(&a.atom));
        out.finish()
    }
}

/// `T_P`, `T_U`, cells and inputs of a HyperTSL formula.
pub fn collect_terms(phi: &HyperTslFormula) -> TermSets {
    TermSets::of_hyper(phi)
}
