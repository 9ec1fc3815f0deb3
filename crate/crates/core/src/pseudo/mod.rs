//! Pseudo hyperproperties: universal formulas that only constrain traces one
//! at a time.
//!
//! A `∀^n` HyperLTL formula is a pseudo hyperproperty exactly when it is
//! equivalent to its collapse `φ[π]`. Equivalence reduces to unsatisfiability
//! of an `∃^n ∀^1` formula, which [`decide_exists_forall_sat`] settles with
//! the LTL engine. HyperTSL formulas are checked through the ⌊·⌋
//! approximation, where only a positive answer carries over.
//!
//! The module also hosts two related decisions: the `∃*` unrealizability
//! encoding ([`exists_encoding`], [`check_exists_unrealizable`]) and the
//! positional-strategy decision for formulas with a local-determinism
//! conjunct ([`local_determinism_hyperltl`], [`local_determinism_hypertsl`]).

mod exists;
mod local;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::approx::{translate_hyper, ApproxError, ApproxOptions};
use crate::automata::{ltl_sat, AutomataError, SatResult};
use crate::semantics::{eval_hyperltl, LassoTrace};
use crate::syntax::{
    Flavor, Formula, HyperLtlFormula, HyperTslFormula, IndexedAp, LtlFormula, QuantKind,
    Quantifier, TraceVar, TslFormula,
};

pub use exists::{check_exists_unrealizable, exists_encoding, ExistsVerdict};
pub use local::{
    local_determinism_hyperltl, local_determinism_hypertsl, match_local_determinism,
    LocalDeterminism, LocalDeterminismDecision, LocalDeterminismOptions, PositionalStrategy,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PseudoError {
    #[error("expected a purely universal prefix")]
    NotUniversal,
    #[error("expected a purely existential prefix")]
    NotExistential,
    #[error("expected an existential block followed by a universal block")]
    NotExistsForall,
    #[error("the rel flavor is not supported here")]
    RelFlavor,
    #[error("trace variable `{0}` is not quantified")]
    UnboundVariable(String),
    #[error("no conjunct of the form G((p <-> p') -> (u <-> u'))")]
    NoLocalDeterminism,
    #[error("local determinism conjunct does not cover {0}")]
    SchemaMismatch(String),
    #[error("{found} input propositions exceed the enumeration cap of {cap}")]
    TooManyInputs { found: usize, cap: usize },
    #[error("{found} positional strategies exceed the enumeration cap of {cap}")]
    TooManyStrategies { found: String, cap: usize },
    #[error("satisfiability witness failed re-verification")]
    WitnessRejected,
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// Outcome of a pseudo-hyperproperty check.
///
/// `NotPseudo` carries a trace set on which every trace satisfies the
/// collapsed formula while the set as a whole violates the original.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum PseudoVerdict<F> {
    Pseudo(F),
    NotPseudo(Vec<LassoTrace>),
    Unknown,
}

impl<F> PseudoVerdict<F> {
    pub fn is_pseudo(&self) -> bool {
        matches!(self, PseudoVerdict::Pseudo(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            PseudoVerdict::Pseudo(_) => "pseudo",
            PseudoVerdict::NotPseudo(_) => "not_pseudo",
            PseudoVerdict::Unknown => "unknown",
        }
    }
}

/// Satisfiability of an `∃^n ∀^m` HyperLTL formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "witnesses", rename_all = "snake_case")]
pub enum HyperSat {
    Sat(Vec<LassoTrace>),
    Unsat,
}

/// Both levels of a HyperTSL check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TslPseudoReport {
    /// The formula that was checked, with the context conjoined.
    pub checked: HyperTslFormula,
    pub translated: HyperLtlFormula,
    pub tsl: PseudoVerdict<HyperTslFormula>,
    pub ltl: PseudoVerdict<HyperLtlFormula>,
}

fn require_universal(prefix: &[Quantifier]) -> Result<(), PseudoError> {
    if prefix.iter().all(|q| q.kind == QuantKind::Forall) {
        Ok(())
    } else {
        Err(PseudoError::NotUniversal)
    }
}

/// `φ[π]`: one universal variable, named after the first, replaces all.
pub fn collapse_hyperltl(phi: &HyperLtlFormula) -> Result<HyperLtlFormula, PseudoError> {
    require_universal(&phi.prefix)?;
    let Some(first) = phi.prefix.first() else {
        return Ok(phi.clone());
    };
    let v = first.var.clone();
    Ok(HyperLtlFormula {
        prefix: vec![first.clone()],
        body: phi.body.map_atoms(&mut |a| IndexedAp {
            ap: a.ap.clone(),
            var: v.clone(),
        }),
    })
}

/// `φ[π]` for HyperTSL; per-argument tags of the rel flavor become uniform.
pub fn collapse_hypertsl(phi: &HyperTslFormula) -> Result<HyperTslFormula, PseudoError> {
    require_universal(&phi.prefix)?;
    let Some(first) = phi.prefix.first() else {
        return Ok(phi.clone());
    };
    let v = first.var.clone();
    Ok(HyperTslFormula {
        flavor: phi.flavor,
        prefix: vec![first.clone()],
        body: phi.body.map_atoms(&mut |a| a.retag(&|_| v.clone())),
    })
}

fn fresh_var(taken: &[Quantifier]) -> TraceVar {
    let used = |name: &str| taken.iter().any(|q| q.var.as_str() == name);
    let mut name = "pi".to_string();
    let mut i = 0;
    while used(&name) {
        name = format!("pi{i}");
        i += 1;
    }
    TraceVar(name)
}

/// `∃π1 … ∃πn. ∀π. ¬ψ ∧ ψ[π1 ↦ π, …, πn ↦ π]` for `φ = ∀π1 … ∀πn. ψ`.
pub fn build_pseudo_check(phi: &HyperLtlFormula) -> Result<HyperLtlFormula, PseudoError> {
    require_universal(&phi.prefix)?;
    let pi = fresh_var(&phi.prefix);
    let collapsed = phi.body.map_atoms(&mut |a| IndexedAp {
        ap: a.ap.clone(),
        var: pi.clone(),
    });
    let mut prefix: Vec<Quantifier> = phi
        .prefix
        .iter()
        .map(|q| Quantifier {
            kind: QuantKind::Exists,
            var: q.var.clone(),
        })
        .collect();
    prefix.push(Quantifier {
        kind: QuantKind::Forall,
        var: pi,
    });
    Ok(HyperLtlFormula {
        prefix,
        body: Formula::and(Formula::not(phi.body.clone()), collapsed),
    })
}

/// Satisfiability of an `∃^n ∀^m` formula.
///
/// If any trace set satisfies the formula then so does the set of the `n`
/// traces chosen for the existential variables. Over that set each universal
/// variable ranges over the existential ones, so the body unrolls into `n^m`
/// conjuncts over `n` traces, which are zipped into one and handed to LTL
/// satisfiability. With `n = 0` a single trace stands in for the set.
///
/// A SAT answer carries the witness traces, already re-verified.
pub fn decide_exists_forall_sat(phi: &HyperLtlFormula) -> Result<HyperSat, PseudoError> {
    let split = phi
        .prefix
        .iter()
        .position(|q| q.kind == QuantKind::Forall)
        .unwrap_or(phi.prefix.len());
    let (exists, forall) = phi.prefix.split_at(split);
    if forall.iter().any(|q| q.kind == QuantKind::Exists) {
        return Err(PseudoError::NotExistsForall);
    }
    let n = exists.len().max(1);
    let mut slot: BTreeMap<&TraceVar, usize> = BTreeMap::new();
    for (i, q) in exists.iter().enumerate() {
        slot.insert(&q.var, i);
    }
    let mut conjuncts = Vec::new();
    let mut choice = vec![0usize; forall.len()];
    loop {
        let mut asg = slot.clone();
        for (q, &c) in forall.iter().zip(&choice) {
            asg.insert(&q.var, c);
        }
        conjuncts.push(zip_atoms(&phi.body, &asg)?);
        if !crate::automata::advance(&mut choice, |_| n) {
            break;
        }
    }
    let unrolled: LtlFormula = Formula::conj(conjuncts);
    let SatResult::Sat(w) = ltl_sat(&unrolled) else {
        return Ok(HyperSat::Unsat);
    };
    let mut traces: Vec<LassoTrace> = Vec::new();
    for j in 1..=n as u32 {
        let t = w.project_copy(j).normalize();
        if !traces.iter().any(|u| u.same_word(&t)) {
            traces.push(t);
        }
    }
    if !eval_hyperltl(&traces, phi) {
        return Err(PseudoError::WitnessRejected);
    }
    Ok(HyperSat::Sat(traces))
}

fn zip_atoms(
    body: &Formula<IndexedAp>,
    asg: &BTreeMap<&TraceVar, usize>,
) -> Result<LtlFormula, PseudoError> {
    body.try_map_atoms(&mut |a: &IndexedAp| match asg.get(&a.var) {
        Some(&i) => Ok(a.ap.with_copy(i as u32 + 1)),
        None => Err(PseudoError::UnboundVariable(a.var.to_string())),
    })
}

/// Decides whether a `∀^n` HyperLTL formula is a pseudo hyperproperty.
pub fn is_pseudo_hyperltl(
    phi: &HyperLtlFormula,
) -> Result<PseudoVerdict<HyperLtlFormula>, PseudoError> {
    let check = build_pseudo_check(phi)?;
    Ok(match decide_exists_forall_sat(&check)? {
        HyperSat::Unsat => PseudoVerdict::Pseudo(collapse_hyperltl(phi)?),
        HyperSat::Sat(witnesses) => PseudoVerdict::NotPseudo(witnesses),
    })
}

/// Checks a plain `∀^n` HyperTSL formula through ⌊·⌋.
///
/// The optional trace specification is tagged with every quantified variable
/// and conjoined first. A pseudo verdict for the translation transfers to the
/// HyperTSL formula; a negative one does not, and is reported as `Unknown`.
pub fn is_pseudo_hypertsl(
    phi: &HyperTslFormula,
    context: Option<&TslFormula>,
    opts: ApproxOptions,
) -> Result<TslPseudoReport, PseudoError> {
    if phi.flavor == Flavor::Rel {
        return Err(PseudoError::RelFlavor);
    }
    require_universal(&phi.prefix)?;
    let mut checked = phi.clone();
    if let Some(ctx) = context {
        let lifted = phi
            .prefix
            .iter()
            .map(|q| HyperTslFormula::lift(ctx, &q.var));
        checked.body = Formula::conj(std::iter::once(phi.body.clone()).chain(lifted));
    }
    let translated = translate_hyper(&checked, opts)?;
    let ltl = is_pseudo_hyperltl(&translated)?;
    let tsl = match &ltl {
        PseudoVerdict::Pseudo(_) => PseudoVerdict::Pseudo(collapse_hypertsl(&checked)?),
        _ => PseudoVerdict::Unknown,
    };
    Ok(TslPseudoReport {
        checked,
        translated,
        tsl,
        ltl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_hyperltl, parse_property, parse_tsl};

    fn hl(s: &str) -> HyperLtlFormula {
        parse_hyperltl(s).unwrap()
    }

    #[test]
    fn collapse_unifies_tags() {
        let c = collapse_hyperltl(&hl("forall pi. forall pi'. a@pi <-> a@pi'")).unwrap();
        assert_eq!(c, hl("forall pi. a@pi <-> a@pi"));
        let one = hl("forall pi. G a@pi");
        assert_eq!(collapse_hyperltl(&one).unwrap(), one);
        assert_eq!(
            collapse_hyperltl(&hl("exists pi. a@pi")),
            Err(PseudoError::NotUniversal)
        );
    }

    #[test]
    fn check_formula_shape() {
        let phi = hl("forall pi. forall pi'. a@pi -> b@pi'");
        let c = build_pseudo_check(&phi).unwrap();
        assert_eq!(
            c,
            hl("exists pi. exists pi'. forall pi0. !(a@pi -> b@pi') && (a@pi0 -> b@pi0)")
        );
        let c1 = build_pseudo_check(&hl("forall x. a@x")).unwrap();
        assert_eq!(c1, hl("exists x. forall pi. !a@x && a@pi"));
    }

    #[test]
    fn exists_forall_examples() {
        let HyperSat::Sat(ws) = decide_exists_forall_sat(&hl("exists pi. a@pi")).unwrap() else {
            panic!("expected SAT");
        };
        assert!(ws[0].at(0).contains(&"a".parse().unwrap()));
        let unsat = decide_exists_forall_sat(&hl("exists pi. forall pi'. a@pi && !a@pi'"));
        assert_eq!(unsat, Ok(HyperSat::Unsat));
        assert_eq!(
            decide_exists_forall_sat(&hl("forall pi. exists pi'. a@pi")),
            Err(PseudoError::NotExistsForall)
        );
    }

    #[test]
    fn forall_only_uses_one_witness() {
        assert!(matches!(
            decide_exists_forall_sat(&hl("forall pi. G a@pi")),
            Ok(HyperSat::Sat(_))
        ));
        assert_eq!(
            decide_exists_forall_sat(&hl("forall pi. a@pi && !a@pi")),
            Ok(HyperSat::Unsat)
        );
    }

    #[test]
    fn false_is_pseudo() {
        let v = is_pseudo_hyperltl(&hl("forall pi. forall pi'. false")).unwrap();
        assert_eq!(v, PseudoVerdict::Pseudo(hl("forall pi. false")));
    }

    #[test]
    fn agreement_is_not_pseudo() {
        let phi = hl("forall pi. forall pi'. p(a)@pi <-> p(a)@pi'");
        let PseudoVerdict::NotPseudo(ws) = is_pseudo_hyperltl(&phi).unwrap() else {
            panic!("expected a witness");
        };
        assert_eq!(ws.len(), 2);
        assert!(!eval_hyperltl(&ws, &phi));
        let collapsed = collapse_hyperltl(&phi).unwrap();
        for w in &ws {
            assert!(eval_hyperltl(std::slice::from_ref(w), &collapsed));
        }
    }

    #[test]
    fn vacuous_variable_is_pseudo() {
        let v = is_pseudo_hyperltl(&hl("forall pi. forall pi'. G a@pi")).unwrap();
        assert!(v.is_pseudo());
    }

    #[test]
    fn hypertsl_false_is_pseudo() {
        let phi = parse_property("forall pi. forall pi'. false").unwrap();
        let r = is_pseudo_hypertsl(&phi, None, ApproxOptions::default()).unwrap();
        assert!(r.tsl.is_pseudo());
    }

    #[test]
    fn hypertsl_negative_is_unknown() {
        let phi = parse_property("forall pi. forall pi'. G (p(x)@pi <-> p(x)@pi')").unwrap();
        let r = is_pseudo_hypertsl(&phi, None, ApproxOptions::default()).unwrap();
        assert_eq!(r.tsl, PseudoVerdict::Unknown);
        assert!(matches!(r.ltl, PseudoVerdict::NotPseudo(_)));
    }

    #[test]
    fn context_can_make_pseudo() {
        let phi = parse_property("forall pi. forall pi'. G (p(x)@pi <-> p(x)@pi')").unwrap();
        let ctx = parse_tsl("G p(x)").unwrap();
        let r = is_pseudo_hypertsl(&phi, Some(&ctx), ApproxOptions::default()).unwrap();
        assert!(r.tsl.is_pseudo());
    }

    #[test]
    fn rel_flavor_rejected() {
        let phi = parse_property("flavor: rel\nforall pi. forall pi'. G q(x@pi, x@pi')").unwrap();
        assert_eq!(
            is_pseudo_hypertsl(&phi, None, ApproxOptions::default()),
            Err(PseudoError::RelFlavor)
        );
    }
}
