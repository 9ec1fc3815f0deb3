//! The bundled fixture corpus.
//!
//! Machines are kept twice: the symbolic description with guards and notes,
//! and the explicit transition list obtained by expanding it.

use hypertsl_core::machine::{MachineError, MealyMachine, SymbolicMachine};
use hypertsl_core::{parse_property_file, HyperTslFormula, ParseError};

/// Version directory of the corpus.
pub const VERSION: &str = "v1";

macro_rules! fixture {
    ($($path:tt)+) => {
        (
            concat!($($path)+),
            include_str!(concat!("../fixtures/v1/", $($path)+)),
        )
    };
}

/// A named property file.
#[derive(Debug, Clone, Copy)]
pub struct PropertyFixture {
    /// Label used in tables.
    pub label: &'static str,
    pub path: &'static str,
    pub source: &'static str,
}

impl PropertyFixture {
    pub fn formula(&self) -> Result<HyperTslFormula, ParseError> {
        parse_property_file(self.source)?.combined()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MachineFixture {
    /// Column label used in tables.
    pub label: &'static str,
    pub symbolic_path: &'static str,
    pub symbolic: &'static str,
    pub explicit_path: &'static str,
    pub explicit: &'static str,
    /// Number of free choices the machine is built to have.
    pub expected_choices: usize,
    pub properties: &'static [PropertyFixture],
}

impl MachineFixture {
    pub fn machine(&self) -> Result<MealyMachine, MachineError> {
        MealyMachine::from_json(self.explicit)
    }

    pub fn symbolic(&self) -> Result<SymbolicMachine, MachineError> {
        SymbolicMachine::from_json(self.symbolic)
    }
}

macro_rules! property {
    ($label:literal, $($path:tt)+) => {{
        let (path, source) = fixture!($($path)+);
        PropertyFixture {
            label: $label,
            path,
            source,
        }
    }};
}

macro_rules! voting {
    ($label:literal, $dir:literal, $choices:literal) => {{
        let (symbolic_path, symbolic) = fixture!(concat!("voting/", $dir, "/machine.sym.json"));
        let (explicit_path, explicit) = fixture!(concat!("voting/", $dir, "/machine.json"));
        MachineFixture {
            label: $label,
            symbolic_path,
            symbolic,
            explicit_path,
            explicit,
            expected_choices: $choices,
            properties: &[
                property!(
                    "Local determinism",
                    "voting/properties/local_determinism.htsl"
                ),
                property!("Local symmetry", "voting/properties/local_symmetry.htsl"),
                property!(
                    "Global no harm",
                    concat!("voting/", $dir, "/global_no_harm.htsl")
                ),
                property!("Determinism", "voting/properties/determinism.htsl"),
                property!("Symmetry", "voting/properties/symmetry.htsl"),
                property!("No harm", concat!("voting/", $dir, "/no_harm.htsl")),
                property!(
                    "Determinism + Symmetry + No harm",
                    concat!("voting/", $dir, "/determinism_symmetry_no_harm.htsl")
                ),
            ],
        }
    }};
}

/// The four voting variants in table order.
pub const VOTING: [MachineFixture; 4] = [
    voting!("only vote", "only_vote", 2),
    voting!("+ close", "close", 4),
    voting!("+ owner", "owner", 8),
    voting!("full", "full", 8),
];

/// Label of the voting property whose repair must be unique.
pub const CONJUNCTION: &str = "Determinism + Symmetry + No harm";

pub const AUCTION: MachineFixture = {
    let (symbolic_path, symbolic) = fixture!("auction/machine.sym.json");
    let (explicit_path, explicit) = fixture!("auction/machine.json");
    MachineFixture {
        label: "blind auction",
        symbolic_path,
        symbolic,
        explicit_path,
        explicit,
        expected_choices: 4,
        properties: &[
            property!("Local determinism", "auction/local_determinism.htsl"),
            property!("Local symmetry", "auction/local_symmetry.htsl"),
        ],
    }
};

/// Number of states carrying free choices in the auction.
pub const AUCTION_CHOICE_STATES: usize = 2;

/// Trace specification fixing the tie-break to the current vote, together
/// with the voting obligations it refines.
pub const TIE_CONTEXT: (&str, &str) = fixture!("pseudo/tie_context.tsl");
pub const PSEUDO_NO_HARM: PropertyFixture = property!("No harm", "pseudo/no_harm.htsl");
pub const PSEUDO_CONJUNCTION: PropertyFixture = property!(
    "Local determinism + Symmetry + No harm",
    "pseudo/local_determinism_symmetry_no_harm.htsl"
);

/// `forall pi. forall pi'. false`.
pub const PSEUDO_FALSE: (&str, &str) = fixture!("pseudo/false.hltl");
/// Traces agreeing on `p(a)` at the first position.
pub const PSEUDO_SAME_SIGNAL: (&str, &str) = fixture!("pseudo/same_signal.hltl");
/// The input/output trio over signals `i` and `o`.
pub const TRIO: (&str, &str) = fixture!("pseudo/trio.hltl");
/// The same trio over a predicate input and an update output.
pub const TRIO_TSL: PropertyFixture = property!("Trio", "pseudo/trio.htsl");
pub const EXISTS_CONTRADICTION: PropertyFixture =
    property!("Contradiction", "pseudo/exists_contradiction.htsl");
pub const EXISTS_SATISFIABLE: PropertyFixture =
    property!("Eventually f", "pseudo/exists_satisfiable.htsl");
pub const EXISTS_PAIR: PropertyFixture = property!("Pair", "pseudo/exists_pair.htsl");

/// Every machine fixture.
pub fn machines() -> impl Iterator<Item = &'static MachineFixture> {
    VOTING.iter().chain(std::iter::once(&AUCTION))
}

/// Every property fixture, each listed once.
pub fn properties() -> Vec<PropertyFixture> {
    let mut out: Vec<PropertyFixture> = Vec::new();
    let all = machines()
        .flat_map(|m| m.properties.iter().copied())
        .chain([
            PSEUDO_NO_HARM,
            PSEUDO_CONJUNCTION,
            TRIO_TSL,
            EXISTS_CONTRADICTION,
            EXISTS_SATISFIABLE,
            EXISTS_PAIR,
        ]);
    for p in all {
        if !out.iter().any(|q| q.path == p.path) {
            out.push(p);
        }
    }
    out
}
