//! Structural properties of refinement, model checking and repair on small
//! random machines, plus soundness of the pseudo check on random trace sets.

use std::collections::{BTreeMap, BTreeSet};

use hypertsl_core::gen::{letters, random_formula, random_lasso};
use hypertsl_core::machine::{
    check_models, enumerate_refinements, repair, MealyMachine, ModelsResult, Refinements,
    RepairMode, RepairOptions, RepairOutcome, Transition,
};
use hypertsl_core::pseudo::{is_pseudo_hyperltl, PseudoVerdict};
use hypertsl_core::{
    eval_hyperltl, parse_function_term, Ap, HyperLtlFormula, IndexedAp, LassoTrace, Quantifier,
    Valuation,
};
use rand::rngs::StdRng;
use rand::{Rng, RngExt, SeedableRng};

const UPDATES: [&str; 3] = ["c", "f(c)", "K()"];

/// A machine over inputs `a`, `b` and cell `c` where every state answers
/// every input with one or two distinct (update, successor) options.
fn random_machine<R: Rng>(rng: &mut R) -> MealyMachine {
    let n_states = rng.random_range(1..=3);
    let n_inputs = rng.random_range(1..=2);
    let inputs: Vec<Ap> = ["a", "b"][..n_inputs]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut transitions = Vec::new();
    for from in 0..n_states {
        for bits in 0..(1u32 << n_inputs) {
            let input: Valuation = inputs
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            let mut seen = BTreeSet::new();
            for _ in 0..rng.random_range(1..=2) {
                let up = UPDATES[rng.random_range(0..UPDATES.len())];
                let to = rng.random_range(0..n_states);
                if seen.insert((up, to)) {
                    transitions.push(Transition {
                        from,
                        input: input.clone(),
                        updates: BTreeMap::from([(
                            "c".to_string(),
                            parse_function_term(up).unwrap(),
                        )]),
                        to,
                    });
                }
            }
        }
    }
    MealyMachine::new(
        vec!["c".into()],
        inputs,
        (0..n_states).map(|i| format!("s{i}")).collect(),
        0,
        transitions,
    )
    .expect("total by construction")
}

fn machine_aps(m: &MealyMachine) -> Vec<Ap> {
    let mut aps = m.inputs.clone();
    aps.extend(
        UPDATES
            .iter()
            .map(|u| format!("[c <- {u}]").parse::<Ap>().unwrap()),
    );
    aps
}

fn random_universal<R: Rng>(rng: &mut R, aps: &[Ap], k: usize, size: usize) -> HyperLtlFormula {
    let vars: Vec<String> = (1..=k).map(|i| format!("p{i}")).collect();
    let leaves: Vec<IndexedAp> = aps
        .iter()
        .flat_map(|a| vars.iter().map(|v| IndexedAp::new(a.clone(), v.as_str())))
        .collect();
    HyperLtlFormula {
        prefix: vars
            .iter()
            .map(|v| Quantifier::forall(v.as_str()))
            .collect(),
        body: random_formula(rng, &leaves, size),
    }
}

/// Whether the lasso labels some infinite path of `m` from its initial state,
/// comparing labels on the propositions of `keep` only.
fn is_trace_of(m: &MealyMachine, t: &LassoTrace, keep: &BTreeSet<Ap>) -> bool {
    let step = |from: &BTreeSet<usize>, v: &Valuation| -> BTreeSet<usize> {
        m.transitions
            .iter()
            .filter(|tr| from.contains(&tr.from))
            .filter(|tr| {
                let l: Valuation = tr
                    .label()
                    .into_iter()
                    .filter(|a| keep.contains(a))
                    .collect();
                &l == v
            })
            .map(|tr| tr.to)
            .collect()
    };
    let mut cur = BTreeSet::from([m.initial]);
    for v in &t.stem {
        cur = step(&cur, v);
    }
    let mut seen = Vec::new();
    loop {
        if cur.is_empty() {
            return false;
        }
        if seen.contains(&cur) {
            return true;
        }
        seen.push(cur.clone());
        for v in &t.loop_ {
            cur = step(&cur, v);
        }
    }
}

#[test]
fn refinements_are_total_deterministic_and_indexed() {
    let mut rng = StdRng::seed_from_u64(0xc0_0001);
    for _ in 0..60 {
        let m = random_machine(&mut rng);
        let choices = m.free_choices();
        let expected: usize = choices.iter().map(|c| c.options.len()).product();
        assert_eq!(Refinements::count(&choices), Some(expected));
        let all: Vec<MealyMachine> = enumerate_refinements(&m, &choices).collect();
        assert_eq!(all.len(), expected);
        for (i, r) in all.iter().enumerate() {
            assert!(r.is_refinement_of(&m));
            assert!(r.free_choices().is_empty());
            assert_eq!(&m.refine(&choices, &Refinements::nth_picks(&choices, i)), r);
        }
        let distinct: BTreeSet<String> = all.iter().map(MealyMachine::to_json).collect();
        assert_eq!(distinct.len(), expected);
    }
}

#[test]
fn counterexamples_are_traces_that_violate() {
    let mut rng = StdRng::seed_from_u64(0xc0_0002);
    let mut violated = 0;
    for _ in 0..150 {
        let m = random_machine(&mut rng);
        let aps = machine_aps(&m);
        let k = rng.random_range(1..=2);
        let size = rng.random_range(1..=8);
        let phi = random_universal(&mut rng, &aps, k, size);
        if let ModelsResult::Violated(ts) = check_models(&m, &phi).unwrap() {
            violated += 1;
            assert_eq!(ts.len(), k);
            let keep = phi.base_aps();
            for t in &ts {
                assert!(
                    is_trace_of(&m, t, &keep),
                    "{t} is not a path of\n{}",
                    m.to_json()
                );
            }
            assert!(
                !eval_hyperltl(&ts, &phi),
                "{phi} holds on its counterexample"
            );
        }
    }
    assert!(violated > 20, "{violated}");
}

#[test]
fn satisfaction_is_closed_under_refinement() {
    let mut rng = StdRng::seed_from_u64(0xc0_0003);
    let mut holding = 0;
    for _ in 0..120 {
        let m = random_machine(&mut rng);
        let aps = machine_aps(&m);
        let k = rng.random_range(1..=2);
        let size = rng.random_range(1..=6);
        let phi = random_universal(&mut rng, &aps, k, size);
        if !check_models(&m, &phi).unwrap().holds() {
            continue;
        }
        holding += 1;
        let choices = m.free_choices();
        for r in enumerate_refinements(&m, &choices) {
            assert!(check_models(&r, &phi).unwrap().holds(), "{phi}");
        }
    }
    assert!(holding > 10, "{holding}");
}

#[test]
fn repair_modes_agree_and_results_reverify() {
    let mut rng = StdRng::seed_from_u64(0xc0_0004);
    let mut repaired = 0;
    for _ in 0..120 {
        let m = random_machine(&mut rng);
        let aps = machine_aps(&m);
        let k = rng.random_range(1..=2);
        let size = rng.random_range(2..=7);
        let phi = random_universal(&mut rng, &aps, k, size);
        let first = repair(&m, &phi, RepairOptions::default()).unwrap();
        let all = repair(
            &m,
            &phi,
            RepairOptions {
                mode: RepairMode::All,
                ..RepairOptions::default()
            },
        )
        .unwrap();
        let choices = m.free_choices();
        let oracle: Vec<usize> = enumerate_refinements(&m, &choices)
            .enumerate()
            .filter(|(_, r)| check_models(r, &phi).unwrap().holds())
            .map(|(i, _)| i)
            .collect();
        match &first.outcome {
            RepairOutcome::AlreadyHolds => {
                assert!(check_models(&m, &phi).unwrap().holds());
                assert_eq!(first.mc_calls, 1);
            }
            RepairOutcome::NoRepair => assert!(oracle.is_empty(), "{phi}"),
            RepairOutcome::Repaired {
                index,
                picks,
                machine,
            } => {
                repaired += 1;
                assert_eq!(Some(index), oracle.first());
                assert_eq!(picks, &Refinements::nth_picks(&choices, *index));
                assert!(machine.is_refinement_of(&m));
                assert!(check_models(machine, &phi).unwrap().holds());
                assert_eq!(first.candidates_tried, index + 1);
                assert_eq!(first.mc_calls, 1 + first.candidates_tried);
            }
        }
        if !matches!(first.outcome, RepairOutcome::AlreadyHolds) {
            assert_eq!(all.passing(), oracle, "{phi}");
            assert_eq!(all.candidates_tried, all.candidates_total);
        }
    }
    assert!(repaired > 10, "{repaired}");
}

#[test]
fn pseudo_verdicts_are_sound_on_trace_sets() {
    let mut rng = StdRng::seed_from_u64(0xc0_0005);
    let aps = letters(2);
    let (mut pseudo, mut not_pseudo) = (0, 0);
    for _ in 0..200 {
        let size = rng.random_range(1..=7);
        let phi = random_universal(&mut rng, &aps, 2, size);
        match is_pseudo_hyperltl(&phi).unwrap() {
            PseudoVerdict::Pseudo(collapsed) => {
                pseudo += 1;
                for _ in 0..10 {
                    let n = rng.random_range(1..=3);
                    let ts: Vec<LassoTrace> =
                        (0..n).map(|_| random_lasso(&mut rng, &aps, 4)).collect();
                    let each = ts
                        .iter()
                        .all(|t| eval_hyperltl(std::slice::from_ref(t), &collapsed));
                    assert_eq!(eval_hyperltl(&ts, &phi), each, "{phi}");
                }
            }
            PseudoVerdict::NotPseudo(ws) => {
                not_pseudo += 1;
                assert!(!eval_hyperltl(&ws, &phi), "{phi}");
                for w in &ws {
                    assert!(eval_hyperltl(std::slice::from_ref(w), &phi), "{phi} on {w}");
                }
            }
            PseudoVerdict::Unknown => panic!("HyperLTL checks are complete"),
        }
    }
    assert!(pseudo > 20 && not_pseudo > 20, "{pseudo} / {not_pseudo}");
}
