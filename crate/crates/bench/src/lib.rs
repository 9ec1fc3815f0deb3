//! Shared inputs for the criterion benchmarks.

use hypertsl_cli::fixtures::{CONJUNCTION, VOTING};
use hypertsl_core::machine::MealyMachine;
use hypertsl_core::{parse_ltl, HyperTslFormula, LtlFormula};

/// LTL formulas of growing size for the satisfiability benchmark.
pub const LTL_CASES: [(&str, &str); 4] = [
    ("response", "G (req -> F grant)"),
    ("fairness", "G F a && G F b && G !(a && b)"),
    ("until chain", "(a U (b U (c U d))) && G (d -> X !a)"),
    (
        "mutex",
        "G ((a && !b && !c) || (b && !a && !c) || (c && !a && !b)) && G F a && G F b && G F c",
    ),
];

pub fn ltl_cases() -> Vec<(&'static str, LtlFormula)> {
    LTL_CASES
        .iter()
        .map(|(name, src)| (*name, parse_ltl(src).expect("valid benchmark formula")))
        .collect()
}

/// A voting machine together with one of its table properties.
pub fn voting_cell(variant: usize, property: &str) -> (MealyMachine, HyperTslFormula) {
    let v = &VOTING[variant];
    let p = v
        .properties
        .iter()
        .find(|p| p.label == property)
        .expect("known property label");
    (
        v.machine().expect("fixture machine"),
        p.formula().expect("fixture property"),
    )
}

/// The conjunction on the "+ owner" variant, the largest refinement space of
/// the voting table.
pub fn owner_conjunction() -> (MealyMachine, HyperTslFormula) {
    voting_cell(2, CONJUNCTION)
}
