//! Compact machine descriptions with propositional guards.
//!
//! Each edge carries a guard over the predicate inputs and one update map.
//! Expansion produces a transition for every input valuation that satisfies
//! both the guard and the global environment constraint. Edges with
//! overlapping guards from the same state give rise to free choices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{parse_input, MachineError, MealyMachine, Transition};
use crate::approx::syntactic_conversion;
use crate::semantics::{eval_ltl, LassoTrace, Valuation};
use crate::syntax::{parse_function_term, parse_tsl, Ap, LtlFormula, TslAtom};

const MAX_INPUTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicEdge {
    pub from: String,
    pub guard: String,
    pub updates: BTreeMap<String, String>,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicMachine {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub cells: Vec<String>,
    pub inputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    /// Constraint every input valuation satisfies.
    #[serde(default = "always")]
    pub environment: String,
    pub edges: Vec<SymbolicEdge>,
}

fn always() -> String {
    "true".into()
}

fn guard(src: &str) -> Result<LtlFormula, MachineError> {
    let f = parse_tsl(src)?;
    let bad = !f.is_propositional()
        || f.atoms()
            .into_iter()
            .any(|a| matches!(a, TslAtom::Update(_)));
    if bad {
        return Err(MachineError::BadGuard(src.to_string()));
    }
    Ok(syntactic_conversion(&f))
}

impl SymbolicMachine {
    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        serde_json::from_str(text).map_err(|e| MachineError::Json(e.to_string()))
    }

    /// Input valuations allowed by the environment, in binary order with the
    /// first declared input most significant.
    pub fn valuations(&self) -> Result<Vec<Valuation>, MachineError> {
        let inputs = self
            .inputs
            .iter()
            .map(|s| parse_input(s))
            .collect::<Result<Vec<Ap>, _>>()?;
        if inputs.len() > MAX_INPUTS {
            return Err(MachineError::Json(format!(
                "{} inputs exceed the limit of {MAX_INPUTS}",
                inputs.len()
            )));
        }
        let env = guard(&self.environment)?;
        let n = inputs.len();
        Ok((0u32..1 << n)
            .map(|bits| {
                inputs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> (n - 1 - i) & 1 == 1)
                    .map(|(_, a)| a.clone())
                    .collect::<Valuation>()
            })
            .filter(|v| holds(&env, v))
            .collect())
    }

    pub fn expand(&self) -> Result<MealyMachine, MachineError> {
        let vals = self.valuations()?;
        let index: BTreeMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let state = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| MachineError::UnknownState(s.to_string()))
        };
        let initial = state(&self.initial)?;
        let mut transitions = Vec::new();
        for e in &self.edges {
            let g = guard(&e.guard)?;
            let (from, to) = (state(&e.from)?, state(&e.to)?);
            let updates = e
                .updates
                .iter()
                .map(|(c, s)| Ok((c.clone(), parse_function_term(s)?)))
                .collect::<Result<BTreeMap<_, _>, MachineError>>()?;
            for v in vals.iter().filter(|v| holds(&g, v)) {
                transitions.push(Transition {
                    from,
                    input: v.clone(),
                    updates: updates.clone(),
                    to,
                });
            }
        }
        MealyMachine::new(
            self.cells.clone(),
            self.inputs
                .iter()
                .map(|s| parse_input(s))
                .collect::<Result<_, _>>()?,
            self.states.clone(),
            initial,
            transitions,
        )
    }
}

fn holds(f: &LtlFormula, v: &Valuation) -> bool {
    eval_ltl(&LassoTrace::constant(v.clone()), 0, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYM: &str = r#"{
        "cells": ["c"],
        "inputs": ["a", "b"],
        "states": ["s"],
        "initial": "s",
        "environment": "!(a && b)",
        "edges": [
            {"from": "s", "guard": "a", "updates": {"c": "f(c)"}, "to": "s"},
            {"from": "s", "guard": "a || b", "updates": {"c": "c"}, "to": "s"},
            {"from": "s", "guard": "!a && !b", "updates": {"c": "c"}, "to": "s"}
        ]
    }"#;

    #[test]
    fn overlapping_guards_become_free_choices() {
        let m = SymbolicMachine::from_json(SYM).unwrap().expand().unwrap();
        assert_eq!(m.transitions.len(), 4);
        let fc = m.free_choices();
        assert_eq!(fc.len(), 1);
        assert_eq!(super::super::canonical(&fc[0].input), "{a}");
    }

    #[test]
    fn environment_filters_valuations() {
        let s = SymbolicMachine::from_json(SYM).unwrap();
        let v: Vec<String> = s
            .valuations()
            .unwrap()
            .iter()
            .map(super::super::canonical)
            .collect();
        assert_eq!(v, vec!["{}", "{b}", "{a}"]);
    }

    #[test]
    fn temporal_guards_are_rejected() {
        let bad = SYM.replace(r#""guard": "a""#, r#""guard": "F a""#);
        assert!(matches!(
            SymbolicMachine::from_json(&bad).unwrap().expand(),
            Err(MachineError::BadGuard(_))
        ));
        let upd = SYM.replace(r#""guard": "a""#, r#""guard": "[c <- c]""#);
        assert!(matches!(
            SymbolicMachine::from_json(&upd).unwrap().expand(),
            Err(MachineError::BadGuard(_))
        ));
    }
}
