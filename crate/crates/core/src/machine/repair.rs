use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{FreeChoice, MachineError, MealyMachine, Refinements};
use crate::approx::{translate_hyper_over, ApproxOptions};
use crate::automata::{McResult, ModelChecker};
use crate::semantics::LassoTrace;
use crate::syntax::{Ap, HyperLtlFormula, HyperTslFormula, LtlFormula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "traces", rename_all = "snake_case")]
pub enum ModelsResult {
    Holds,
    /// One trace per quantified variable, in prefix order.
    Violated(Vec<LassoTrace>),
}

impl ModelsResult {
    pub fn holds(&self) -> bool {
        matches!(self, ModelsResult::Holds)
    }
}

/// A universal formula prepared for checking many machines.
#[derive(Clone)]
struct Prepared {
    checker: ModelChecker,
    k: usize,
    keep: BTreeSet<Ap>,
}

impl Prepared {
    fn new(phi: &HyperLtlFormula) -> Result<Self, MachineError> {
        if !phi.is_universal() {
            return Err(MachineError::NotUniversal);
        }
        let body: LtlFormula = phi.zipped_body().ok_or_else(|| {
            let vars = phi.vars();
            let free = phi
                .body
                .atoms()
                .into_iter()
                .find(|a| !vars.contains(&a.var))
                .map(|a| a.var.to_string())
                .unwrap_or_default();
            MachineError::UnboundVariable(free)
        })?;
        Ok(Prepared {
            checker: ModelChecker::new(&body),
            k: phi.prefix.len(),
            keep: phi.base_aps(),
        })
    }

    fn check(&mut self, m: &MealyMachine) -> Result<ModelsResult, MachineError> {
        let composed = m.self_compose(self.k, &|a| self.keep.contains(a));
        Ok(match self.checker.check(&composed)? {
            McResult::Holds => ModelsResult::Holds,
            McResult::Violated(c) => ModelsResult::Violated(
                (1..=self.k as u32)
                    .map(|j| c.trace.project_copy(j).normalize())
                    .collect(),
            ),
        })
    }
}

/// Whether every `k`-tuple of traces of `machine` satisfies the universal
/// formula `phi`.
pub fn check_models(
    machine: &MealyMachine,
    phi: &HyperLtlFormula,
) -> Result<ModelsResult, MachineError> {
    Prepared::new(phi)?.check(machine)
}

/// The HyperLTL formula checked for a HyperTSL property: ⌊φ⌋ with `cellProps`
/// over the terms of both the formula and the machine.
pub fn translate_for(
    machine: &MealyMachine,
    phi: &HyperTslFormula,
    opts: ApproxOptions,
) -> Result<HyperLtlFormula, MachineError> {
    Ok(translate_hyper_over(phi, &machine.terms(), opts)?)
}

pub fn check_models_tsl(
    machine: &MealyMachine,
    phi: &HyperTslFormula,
    opts: ApproxOptions,
) -> Result<ModelsResult, MachineError> {
    check_models(machine, &translate_for(machine, phi, opts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairMode {
    /// Stop at the first refinement in enumeration order that satisfies the
    /// formula.
    #[default]
    First,
    /// Check every refinement and record each verdict.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RepairOptions {
    pub mode: RepairMode,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Largest number of refinements that will be enumerated.
    pub max_candidates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RepairOutcome {
    /// The machine already satisfies the formula.
    AlreadyHolds,
    Repaired {
        /// Position in the enumeration order.
        index: usize,
        /// The option kept at every free choice.
        picks: Vec<usize>,
        #[serde(skip)]
        machine: MealyMachine,
    },
    NoRepair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairReport {
    pub outcome: RepairOutcome,
    pub free_choices: Vec<FreeChoice>,
    pub candidates_total: usize,
    pub candidates_tried: usize,
    /// Model-checker invocations counted in enumeration order, including the
    /// initial check of the unrefined machine.
    pub mc_calls: usize,
    /// Verdict per refinement; filled in [`RepairMode::All`] only.
    pub verdicts: Vec<bool>,
    /// The counterexample of the unrefined machine, if any.
    pub initial_violation: Option<Vec<LassoTrace>>,
}

impl RepairReport {
    /// Indices of the passing refinements; meaningful in [`RepairMode::All`].
    pub fn passing(&self) -> Vec<usize> {
        (0..self.verdicts.len())
            .filter(|&i| self.verdicts[i])
            .collect()
    }
}

/// Searches the refinements of `machine` for one whose self-composition
/// satisfies `phi`.
pub fn repair(
    machine: &MealyMachine,
    phi: &HyperLtlFormula,
    opts: RepairOptions,
) -> Result<RepairReport, MachineError> {
    match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| MachineError::Json(e.to_string()))?
            .install(|| repair_in_pool(machine, phi, opts)),
        None => repair_in_pool(machine, phi, opts),
    }
}

/// [`repair`] against ⌊φ⌋, with `cellProps` over the terms of both the
/// formula and the machine.
pub fn repair_tsl(
    machine: &MealyMachine,
    phi: &HyperTslFormula,
    approx: ApproxOptions,
    opts: RepairOptions,
) -> Result<RepairReport, MachineError> {
    repair(machine, &translate_for(machine, phi, approx)?, opts)
}

fn repair_in_pool(
    machine: &MealyMachine,
    phi: &HyperLtlFormula,
    opts: RepairOptions,
) -> Result<RepairReport, MachineError> {
    let mut prepared = Prepared::new(phi)?;
    let choices = machine.free_choices();
    let total = Refinements::count(&choices)
        .filter(|&n| opts.max_candidates.is_none_or(|cap| n <= cap))
        .ok_or_else(|| {
            let exact: u128 = choices.iter().map(|c| c.options.len() as u128).product();
            MachineError::TooManyCandidates(exact.to_string())
        })?;
    let mut report = RepairReport {
        outcome: RepairOutcome::NoRepair,
        free_choices: choices.clone(),
        candidates_total: total,
        candidates_tried: 0,
        mc_calls: 1,
        verdicts: Vec::new(),
        initial_violation: None,
    };
    match prepared.check(machine)? {
        ModelsResult::Holds => {
            report.outcome = RepairOutcome::AlreadyHolds;
            return Ok(report);
        }
        ModelsResult::Violated(ts) => report.initial_violation = Some(ts),
    }
    let verdict = |p: &mut Prepared, i: usize| -> Result<bool, MachineError> {
        let picks = Refinements::nth_picks(&choices, i);
        Ok(p.check(&machine.refine(&choices, &picks))?.holds())
    };
    let found = match opts.mode {
        RepairMode::First => {
            let hit = (0..total)
                .into_par_iter()
                .map_init(
                    || prepared.clone(),
                    |p, i| verdict(p, i).map(|ok| ok.then_some(i)),
                )
                .find_first(|r| !matches!(r, Ok(None)));
            let hit = hit.transpose()?.flatten();
            report.candidates_tried = hit.map_or(total, |i| i + 1);
            hit
        }
        RepairMode::All => {
            report.verdicts = (0..total)
                .into_par_iter()
                .map_init(|| prepared.clone(), verdict)
                .collect::<Result<_, _>>()?;
            report.candidates_tried = total;
            report.verdicts.iter().position(|&b| b)
        }
    };
    report.mc_calls = 1 + report.candidates_tried;
    if let Some(index) = found {
        let picks = Refinements::nth_picks(&choices, index);
        report.outcome = RepairOutcome::Repaired {
            index,
            machine: machine.refine(&choices, &picks),
            picks,
        };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval_hyperltl;
    use crate::syntax::{parse_hyperltl, parse_property};

    const TOGGLE: &str = r#"{
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

    fn toggle() -> MealyMachine {
        MealyMachine::from_json(TOGGLE).unwrap()
    }

    const DET: &str = "forall pi. forall pi'. ([c <- c]@pi <-> [c <- c]@pi') W !(a@pi <-> a@pi')";

    #[test]
    fn violations_split_into_reverifying_traces() {
        let phi = parse_hyperltl(DET).unwrap();
        let ModelsResult::Violated(ts) = check_models(&toggle(), &phi).unwrap() else {
            panic!("nondeterministic machine must violate");
        };
        assert_eq!(ts.len(), 2);
        assert!(!eval_hyperltl(&ts, &phi));
    }

    #[test]
    fn first_mode_returns_the_minimal_index() {
        let phi = parse_hyperltl(DET).unwrap();
        let all = repair(
            &toggle(),
            &phi,
            RepairOptions {
                mode: RepairMode::All,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(all.candidates_total, 4);
        assert_eq!(all.passing(), vec![0, 1, 2, 3]);
        let first = repair(&toggle(), &phi, RepairOptions::default()).unwrap();
        let RepairOutcome::Repaired { index, machine, .. } = &first.outcome else {
            panic!("expected a repair");
        };
        assert_eq!(*index, 0);
        assert_eq!(first.mc_calls, 2);
        assert!(machine.is_refinement_of(&toggle()));
        assert!(check_models(machine, &phi).unwrap().holds());
    }

    #[test]
    fn all_mode_matches_individual_checks() {
        let phi = parse_property("forall pi. G ([c <- c]@pi || [c <- g(c)]@pi)").unwrap();
        let m = toggle();
        let report = repair_tsl(
            &m,
            &phi,
            ApproxOptions::default(),
            RepairOptions {
                mode: RepairMode::All,
                jobs: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        let choices = m.free_choices();
        for (i, &v) in report.verdicts.iter().enumerate() {
            let r = m.refine(&choices, &Refinements::nth_picks(&choices, i));
            let single = check_models_tsl(&r, &phi, ApproxOptions::default()).unwrap();
            assert_eq!(single.holds(), v);
        }
        assert_eq!(report.passing(), vec![0, 1]);
        assert_eq!(report.mc_calls, 5);
    }

    #[test]
    fn holds_without_refining() {
        let phi = parse_hyperltl("forall pi. G (a@pi || !a@pi)").unwrap();
        let r = repair(&toggle(), &phi, RepairOptions::default()).unwrap();
        assert_eq!(r.outcome, RepairOutcome::AlreadyHolds);
        assert_eq!(r.mc_calls, 1);
    }

    #[test]
    fn unrepairable_and_rejected_inputs() {
        let phi = parse_hyperltl("forall pi. G !a@pi").unwrap();
        let r = repair(&toggle(), &phi, RepairOptions::default()).unwrap();
        assert_eq!(r.outcome, RepairOutcome::NoRepair);
        assert_eq!(r.mc_calls, 5);
        let ex = parse_hyperltl("exists pi. G a@pi").unwrap();
        assert_eq!(
            check_models(&toggle(), &ex),
            Err(MachineError::NotUniversal)
        );
        let capped = RepairOptions {
            max_candidates: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            repair(&toggle(), &phi, capped),
            Err(MachineError::TooManyCandidates(_))
        ));
    }
}
