//! Mealy machines over predicate inputs and update outputs, and their repair
//! against universal hyperproperties.
//!
//! A synthesized winning region may offer several transitions for the same
//! state and input. [`repair`] resolves every such free choice to a single
//! transition, trying the refinements in a fixed order until the k-fold
//! self-composition satisfies the formula.

mod repair;
mod symbolic;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::approx::ApproxError;
use crate::automata::{AutomataError, Lts};
use crate::semantics::Valuation;
use crate::syntax::{
    parse_function_term, Ap, ApKind, FunctionTerm, ParseError, TermSets, UpdateTerm,
};

pub use repair::{
    check_models, check_models_tsl, repair, repair_tsl, translate_for, ModelsResult, RepairMode,
    RepairOptions, RepairOutcome, RepairReport,
};
pub use symbolic::{SymbolicEdge, SymbolicMachine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("invalid machine file: {0}")]
    Json(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("`{0}` is not a predicate input")]
    NotPredicate(String),
    #[error("input `{0}` is not declared")]
    UnknownInput(String),
    #[error("transition from `{from}` updates unknown cell `{cell}`")]
    UnknownCell { from: String, cell: String },
    #[error("transition from `{from}` updates cell `{cell}` twice")]
    DuplicateUpdate { from: String, cell: String },
    #[error("transition from `{from}` to `{to}` lacks an update for cell `{cell}`")]
    MissingUpdate {
        from: String,
        to: String,
        cell: String,
    },
    #[error("transition from `{from}` to `{to}` is listed twice")]
    DuplicateTransition { from: String, to: String },
    #[error("reachable state `{0}` has no outgoing transition")]
    DeadEnd(String),
    #[error("guard `{0}` is not a propositional formula over predicate inputs")]
    BadGuard(String),
    #[error("expected a purely universal prefix")]
    NotUniversal,
    #[error("trace variable `{0}` is not quantified")]
    UnboundVariable(String),
    #[error("{0} refinements exceed the enumeration limit")]
    TooManyCandidates(String),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// One entry of the transition relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    /// The predicate inputs that hold; every other declared input is false.
    pub input: Valuation,
    /// Source term assigned to each cell.
    pub updates: BTreeMap<String, FunctionTerm>,
    pub to: usize,
}

impl Transition {
    pub fn output(&self) -> Valuation {
        self.updates
            .iter()
            .map(|(c, s)| Ap::update(UpdateTerm::new(c.clone(), s.clone())))
            .collect()
    }

    pub fn label(&self) -> Valuation {
        let mut v = self.input.clone();
        v.extend(self.output());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    pub cells: Vec<String>,
    pub inputs: Vec<Ap>,
    pub states: Vec<String>,
    pub initial: usize,
    pub transitions: Vec<Transition>,
}

/// A state and input served by several distinct (output, successor) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeChoice {
    pub state: usize,
    pub input: Valuation,
    /// Indices into the machine's transitions, sorted by output and then by
    /// successor.
    pub options: Vec<usize>,
}

/// Printed form of a valuation used for ordering and display.
pub fn canonical(v: &Valuation) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

#[derive(Serialize, Deserialize)]
struct RawMachine {
    cells: Vec<String>,
    inputs: Vec<String>,
    states: Vec<String>,
    initial: String,
    transitions: Vec<RawTransition>,
}

#[derive(Serialize, Deserialize)]
struct RawTransition {
    from: String,
    input: Vec<String>,
    updates: UpdateEntries,
    to: String,
}

/// JSON object kept as an ordered list so that repeated keys are detected.
#[derive(Default)]
struct UpdateEntries(Vec<(String, String)>);

impl Serialize for UpdateEntries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

impl<'de> Deserialize<'de> for UpdateEntries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = UpdateEntries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from cells to terms")
            }
            fn visit_map<M: MapAccess<'de>>(self, mut m: M) -> Result<UpdateEntries, M::Error> {
                let mut out = Vec::new();
                while let Some(entry) = m.next_entry::<String, String>()? {
                    out.push(entry);
                }
                Ok(UpdateEntries(out))
            }
        }
        d.deserialize_map(V)
    }
}

pub(crate) fn parse_input(s: &str) -> Result<Ap, MachineError> {
    let ap: Ap = s.parse()?;
    match ap.kind {
        ApKind::Predicate(_) if ap.copy.is_none() => Ok(ap),
        _ => Err(MachineError::NotPredicate(s.to_string())),
    }
}

impl MealyMachine {
    /// Builds and validates a machine.
    pub fn new(
        cells: Vec<String>,
        inputs: Vec<Ap>,
        states: Vec<String>,
        initial: usize,
        transitions: Vec<Transition>,
    ) -> Result<Self, MachineError> {
        let m = MealyMachine {
            cells,
            inputs,
            states,
            initial,
            transitions,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self, MachineError> {
        let raw: RawMachine =
            serde_json::from_str(text).map_err(|e| MachineError::Json(e.to_string()))?;
        let mut index = BTreeMap::new();
        for (i, s) in raw.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(MachineError::DuplicateState(s.clone()));
            }
        }
        let state = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| MachineError::UnknownState(s.to_string()))
        };
        let inputs = raw
            .inputs
            .iter()
            .map(|s| parse_input(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut transitions = Vec::with_capacity(raw.transitions.len());
        for t in &raw.transitions {
            let mut updates = BTreeMap::new();
            for (cell, src) in &t.updates.0 {
                let term = parse_function_term(src)?;
                if updates.insert(cell.clone(), term).is_some() {
                    return Err(MachineError::DuplicateUpdate {
                        from: t.from.clone(),
                        cell: cell.clone(),
                    });
                }
            }
            transitions.push(Transition {
                from: state(&t.from)?,
                input: t
                    .input
                    .iter()
                    .map(|s| parse_input(s))
                    .collect::<Result<_, _>>()?,
                updates,
                to: state(&t.to)?,
            });
        }
        MealyMachine::new(
            raw.cells,
            inputs,
            raw.states.clone(),
            state(&raw.initial)?,
            transitions,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = RawMachine {
            cells: self.cells.clone(),
            inputs: self.inputs.iter().map(ToString::to_string).collect(),
            states: self.states.clone(),
            initial: self.states[self.initial].clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| RawTransition {
                    from: self.states[t.from].clone(),
                    input: t.input.iter().map(ToString::to_string).collect(),
                    updates: UpdateEntries(
                        t.updates
                            .iter()
                            .map(|(c, s)| (c.clone(), s.to_string()))
                            .collect(),
                    ),
                    to: self.states[t.to].clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("machine serializes")
    }

    fn validate(&self) -> Result<(), MachineError> {
        let n = self.states.len();
        if self.initial >= n {
            return Err(MachineError::UnknownState(self.initial.to_string()));
        }
        let declared: BTreeSet<&Ap> = self.inputs.iter().collect();
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            if t.from >= n || t.to >= n {
                return Err(MachineError::UnknownState(t.from.max(t.to).to_string()));
            }
            let from = &self.states[t.from];
            if let Some(a) = t.input.iter().find(|a| !declared.contains(a)) {
                return Err(MachineError::UnknownInput(a.to_string()));
            }
            if let Some(c) = t.updates.keys().find(|c| !self.cells.contains(c)) {
                return Err(MachineError::UnknownCell {
                    from: from.clone(),
                    cell: c.clone(),
                });
            }
            if let Some(c) = self.cells.iter().find(|c| !t.updates.contains_key(*c)) {
                return Err(MachineError::MissingUpdate {
                    from: from.clone(),
                    to: self.states[t.to].clone(),
                    cell: c.clone(),
                });
            }
            if !seen.insert((t.from, &t.input, &t.updates, t.to)) {
                return Err(MachineError::DuplicateTransition {
                    from: from.clone(),
                    to: self.states[t.to].clone(),
                });
            }
        }
        let reach = self.reachable();
        for (s, &reached) in reach.iter().enumerate().take(n) {
            if reached && !self.transitions.iter().any(|t| t.from == s) {
                return Err(MachineError::DeadEnd(self.states[s].clone()));
            }
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.from == s) {
                if !seen[t.to] {
                    seen[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        seen
    }

    /// States not reachable from the initial state; these are tolerated but
    /// worth a warning.
    pub fn unreachable_states(&self) -> Vec<&str> {
        self.reachable()
            .into_iter()
            .zip(&self.states)
            .filter(|(r, _)| !r)
            .map(|(_, s)| s.as_str())
            .collect()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Predicate inputs and update outputs occurring in the machine.
    pub fn terms(&self) -> TermSets {
        let mut t = TermSets::default();
        for a in &self.inputs {
            if let ApKind::Predicate(p) = &a.kind {
                t.predicates.insert(p.clone());
            }
        }
        for tr in &self.transitions {
            for (c, s) in &tr.updates {
                t.updates.insert(UpdateTerm::new(c.clone(), s.clone()));
            }
        }
        t.cells.extend(self.cells.iter().cloned());
        t
    }

    pub fn to_lts(&self) -> Lts {
        let mut k = Lts::new();
        for s in &self.states {
            k.add_state(s.clone());
        }
        k.initial = self.initial;
        for t in &self.transitions {
            k.add_edge(t.from, t.label(), t.to);
        }
        k
    }

    /// The synchronous product of `k` copies, labels restricted to the
    /// propositions accepted by `keep`; copy `j` carries index `j`.
    pub fn self_compose(&self, k: usize, keep: &dyn Fn(&Ap) -> bool) -> Lts {
        self.to_lts().self_compose(k, keep)
    }

    /// Free choices sorted by state index and then by the printed input.
    pub fn free_choices(&self) -> Vec<FreeChoice> {
        let mut groups: BTreeMap<(usize, String), (Valuation, Vec<usize>)> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            groups
                .entry((t.from, canonical(&t.input)))
                .or_insert_with(|| (t.input.clone(), Vec::new()))
                .1
                .push(i);
        }
        groups
            .into_iter()
            .filter(|(_, (_, opts))| opts.len() >= 2)
            .map(|((state, _), (input, mut options))| {
                options.sort_by_cached_key(|&i| {
                    let t = &self.transitions[i];
                    (canonical(&t.output()), t.to)
                });
                FreeChoice {
                    state,
                    input,
                    options,
                }
            })
            .collect()
    }

    /// Keeps option `picks[c]` of every choice `c` and drops its siblings.
    pub fn refine(&self, choices: &[FreeChoice], picks: &[usize]) -> MealyMachine {
        let mut drop = vec![false; self.transitions.len()];
        for (c, &p) in choices.iter().zip(picks) {
            for (j, &t) in c.options.iter().enumerate() {
                drop[t] = j != p;
            }
        }
        MealyMachine {
            cells: self.cells.clone(),
            inputs: self.inputs.clone(),
            states: self.states.clone(),
            initial: self.initial,
            transitions: self
                .transitions
                .iter()
                .zip(&drop)
                .filter(|(_, d)| !**d)
                .map(|(t, _)| t.clone())
                .collect(),
        }
    }

    /// Whether `self` keeps a subset of the transitions of `base` while still
    /// serving every state and input that `base` serves.
    pub fn is_refinement_of(&self, base: &MealyMachine) -> bool {
        if self.states != base.states || self.initial != base.initial {
            return false;
        }
        let all: BTreeSet<&Transition> = base.transitions.iter().collect();
        if !self.transitions.iter().all(|t| all.contains(t)) {
            return false;
        }
        let served: BTreeSet<(usize, &Valuation)> = self
            .transitions
            .iter()
            .map(|t| (t.from, &t.input))
            .collect();
        base.transitions
            .iter()
            .all(|t| served.contains(&(t.from, &t.input)))
    }
}

/// Mixed-radix enumeration of one option per choice, the first choice most
/// significant.
#[derive(Debug, Clone)]
pub struct Refinements {
    radix: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Refinements {
    pub fn new(choices: &[FreeChoice]) -> Self {
        Refinements {
            radix: choices.iter().map(|c| c.options.len()).collect(),
            next: Some(vec![0; choices.len()]),
        }
    }

    /// The picks of the refinement with the given position in the order.
    pub fn nth_picks(choices: &[FreeChoice], mut idx: usize) -> Vec<usize> {
        let mut picks = vec![0; choices.len()];
        for (p, c) in picks.iter_mut().zip(choices).rev() {
            *p = idx % c.options.len();
            idx /= c.options.len();
        }
        picks
    }

    /// Number of refinements, if it fits.
    pub fn count(choices: &[FreeChoice]) -> Option<usize> {
        choices
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.options.len()))
    }
}

impl Iterator for Refinements {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        if crate::automata::advance(&mut n, |j| self.radix[j]) {
            self.next = Some(n);
        }
        Some(cur)
    }
}

/// All refinements of `machine`, in enumeration order.
pub fn enumerate_refinements<'a>(
    machine: &'a MealyMachine,
    choices: &'a [FreeChoice],
) -> impl Iterator<Item = MealyMachine> + 'a {
    Refinements::new(choices).map(move |p| machine.refine(choices, &p))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TOGGLE: &str = r#"{
        "cells": ["c"],
        "inputs": ["a"],
        "states": ["s", "t"],
        "initial": "s",
        "transitions": [
            {"from": "s", "input": ["a"], "updates": {"c": "f(c)"}, "to": "t"},
            {"from": "s", "input": ["a"], "updates": {"c": "c"}, "to": "s"},
            {"from": "s", "input": [], "updates": {"c": "c"}, "to": "s"},
            {"from": "t", "input": [], "updates": {"c": "c"}, "to": "t"},
            {"from": "t", "input": ["a"], "updates": {"c": "g(c)"}, "to": "t"},
            {"from": "t", "input": ["a"], "updates": {"c": "c"}, "to": "t"}
        ]
    }"#;

    #[test]
    fn loads_and_round_trips() {
        let m = MealyMachine::from_json(TOGGLE).unwrap();
        assert_eq!(m.states.len(), 2);
        assert_eq!(m.transitions.len(), 6);
        let again = MealyMachine::from_json(&m.to_json()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_malformed_updates() {
        let missing = TOGGLE.replacen(r#"{"c": "f(c)"}"#, "{}", 1);
        assert!(matches!(
            MealyMachine::from_json(&missing),
            Err(MachineError::MissingUpdate { .. })
        ));
        let twice = TOGGLE.replacen(r#"{"c": "f(c)"}"#, r#"{"c": "f(c)", "c": "c"}"#, 1);
        assert!(matches!(
            MealyMachine::from_json(&twice),
            Err(MachineError::DuplicateUpdate { .. })
        ));
        let unknown = TOGGLE.replacen(r#"{"c": "f(c)"}"#, r#"{"c": "c", "d": "d"}"#, 1);
        assert!(matches!(
            MealyMachine::from_json(&unknown),
            Err(MachineError::UnknownCell { .. })
        ));
    }

    #[test]
    fn dead_ends_are_errors_and_unreachable_states_are_reported() {
        let dead = TOGGLE.replace(r#""from": "t""#, r#""from": "s""#);
        assert_eq!(
            MealyMachine::from_json(&dead),
            Err(MachineError::DeadEnd("t".into()))
        );
        let extra = TOGGLE.replace(r#"["s", "t"]"#, r#"["s", "t", "u"]"#);
        let m = MealyMachine::from_json(&extra).unwrap();
        assert_eq!(m.unreachable_states(), vec!["u"]);
    }

    #[test]
    fn free_choices_are_sorted_with_sorted_options() {
        let m = MealyMachine::from_json(TOGGLE).unwrap();
        let fc = m.free_choices();
        assert_eq!(fc.len(), 2);
        assert_eq!((fc[0].state, fc[1].state), (0, 1));
        let outs: Vec<String> = fc[0]
            .options
            .iter()
            .map(|&i| canonical(&m.transitions[i].output()))
            .collect();
        assert_eq!(outs, vec!["{[c <- c]}", "{[c <- f(c)]}"]);
    }

    #[test]
    fn refinements_enumerate_the_product() {
        let m = MealyMachine::from_json(TOGGLE).unwrap();
        let fc = m.free_choices();
        let all: Vec<Vec<usize>> = Refinements::new(&fc).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(&Refinements::nth_picks(&fc, i), p);
        }
        for r in enumerate_refinements(&m, &fc) {
            assert!(r.is_refinement_of(&m));
            assert!(r.free_choices().is_empty());
        }
        assert_eq!(Refinements::new(&[]).count(), 1);
    }

    #[test]
    fn dropping_a_served_input_is_not_a_refinement() {
        let m = MealyMachine::from_json(TOGGLE).unwrap();
        let mut r = m.clone();
        r.transitions
            .retain(|t| !(t.from == 0 && t.input.is_empty()));
        assert!(!r.is_refinement_of(&m));
    }

    #[test]
    fn self_composition_of_one_state_squares_edges() {
        let one = r#"{"cells": [], "inputs": ["a", "b"], "states": ["s"], "initial": "s",
            "transitions": [
              {"from": "s", "input": [], "updates": {}, "to": "s"},
              {"from": "s", "input": ["a"], "updates": {}, "to": "s"},
              {"from": "s", "input": ["b"], "updates": {}, "to": "s"}
            ]}"#;
        let m = MealyMachine::from_json(one).unwrap();
        let k = m.self_compose(2, &|_| true);
        assert_eq!(k.state_count(), 1);
        assert_eq!(k.edge_count(), 9);
        let k1 = m.self_compose(1, &|_| true);
        assert!(k1.labels.iter().flatten().all(|a| a.copy == Some(1)));
    }
}
