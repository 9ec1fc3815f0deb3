//! Under-approximating unrealizability of existential HyperTSL.

use serde::Serialize;

use super::PseudoError;
use crate::approx::{translate_tsl, ApproxOptions};
use crate::automata::{ltl_sat, SatResult};
use crate::semantics::LassoTrace;
use crate::syntax::{
    Flavor, Formula, HyperTslFormula, PredicateTerm, QuantKind, TermSets, TslAtom, TslFormula,
    UpdateTerm,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "model", rename_all = "snake_case")]
pub enum ExistsVerdict {
    Unrealizable,
    /// The LTL approximation has a model, which may be spurious.
    Unknown(LassoTrace),
}

fn copy_name(name: &str, j: usize) -> String {
    format!("{name}#{j}")
}

fn rename_atom(atom: &TslAtom, j: usize) -> TslAtom {
    let f = |s: &str| copy_name(s, j);
    match atom {
        TslAtom::Predicate(p) => TslAtom::Predicate(p.rename_symbols(&f)),
        TslAtom::Update(u) => TslAtom::Update(u.rename_symbols(&f)),
    }
}

fn strategy_constraint(
    preds: &[&PredicateTerm],
    updates: &[&UpdateTerm],
    i: usize,
    j: usize,
) -> TslFormula {
    let at = |a: TslAtom, k: usize| Formula::atom(rename_atom(&a, k));
    let same_out = Formula::conj(updates.iter().map(|u| {
        let u = TslAtom::Update((*u).clone());
        Formula::iff(at(u.clone(), i), at(u, j))
    }));
    let diff_in = Formula::disj(preds.iter().map(|p| {
        let p = TslAtom::Predicate((*p).clone());
        Formula::xor(at(p.clone(), i), at(p, j))
    }));
    Formula::weak_until(same_out, diff_in)
}

/// ψ_TSL for `∃π1 … ∃πn. ψ`.
///
/// Every input and cell gets one copy per variable, named `name#j` for the
/// `j`-th variable. The body is conjoined with the strategy constraint for
/// every ordered pair of copies: updates agree until some predicate differs.
/// The update terms compared are those of `psi`, plus the self-updates when
/// the options inject them.
pub fn exists_encoding(
    phi: &HyperTslFormula,
    opts: ApproxOptions,
) -> Result<TslFormula, PseudoError> {
    if phi.flavor == Flavor::Rel {
        return Err(PseudoError::RelFlavor);
    }
    if phi.prefix.iter().any(|q| q.kind != QuantKind::Exists) {
        return Err(PseudoError::NotExistential);
    }
    let vars = phi.vars();
    let body = phi.body.try_map_atoms(&mut |a| {
        let v = a.single_var().ok_or(PseudoError::RelFlavor)?;
        let j = vars
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| PseudoError::UnboundVariable(v.to_string()))?;
        Ok::<_, PseudoError>(rename_atom(&a.atom, j + 1))
    })?;
    let terms = opts.universe(&TermSets::of_hyper(phi));
    let preds: Vec<&PredicateTerm> = terms.predicates.iter().collect();
    let updates: Vec<&UpdateTerm> = terms.updates.iter().collect();
    let n = vars.len();
    let strat = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| strategy_constraint(&preds, &updates, i, j));
    Ok(Formula::conj(std::iter::once(body).chain(strat)))
}

/// Unrealizable when ⌊ψ_TSL⌋ is unsatisfiable; otherwise undetermined.
pub fn check_exists_unrealizable(
    phi: &HyperTslFormula,
    opts: ApproxOptions,
) -> Result<ExistsVerdict, PseudoError> {
    let psi = exists_encoding(phi, opts)?;
    let ltl = translate_tsl(&psi, opts)?;
    Ok(match ltl_sat(&ltl) {
        SatResult::Unsat => ExistsVerdict::Unrealizable,
        SatResult::Sat(w) => ExistsVerdict::Unknown(w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_property, parse_tsl};

    fn weak_untils(f: &TslFormula) -> usize {
        f.conjuncts()
            .into_iter()
            .filter(|c| matches!(c, Formula::WeakUntil(..)))
            .count()
    }

    #[test]
    fn two_variables_give_four_constraints() {
        let phi = parse_property("exists pi. exists pi'. G ([u <- f(u)]@pi && p(x)@pi')").unwrap();
        let psi = exists_encoding(&phi, ApproxOptions::default()).unwrap();
        assert_eq!(weak_untils(&psi), 4);
        let terms = TermSets::of_tsl(&psi);
        assert!(terms.inputs.contains("x#2"));
        assert!(terms.cells.contains("u#1"));
        assert!(!terms.cells.contains("u"));
    }

    #[test]
    fn single_variable_is_the_renamed_body() {
        let phi = parse_property("exists pi. F [c <- g(c)]@pi").unwrap();
        let opts = ApproxOptions {
            inject_self_updates: false,
        };
        let psi = exists_encoding(&phi, opts).unwrap();
        let conj = psi.conjuncts();
        assert_eq!(conj.len(), 2);
        assert_eq!(*conj[0], parse_tsl("F [c#1 <- g(c#1)]").unwrap());
        assert_eq!(weak_untils(&psi), 1);
    }

    #[test]
    fn contradiction_is_unrealizable() {
        let phi = parse_property("exists pi. G [c <- f(c)]@pi && G ![c <- f(c)]@pi").unwrap();
        assert_eq!(
            check_exists_unrealizable(&phi, ApproxOptions::default()).unwrap(),
            ExistsVerdict::Unrealizable
        );
    }

    #[test]
    fn satisfiable_is_unknown() {
        let phi = parse_property("exists pi. exists pi'. F [c <- f(c)]@pi && G p(x)@pi'").unwrap();
        let v = check_exists_unrealizable(&phi, ApproxOptions::default()).unwrap();
        assert!(matches!(v, ExistsVerdict::Unknown(_)));
    }

    #[test]
    fn universal_prefix_rejected() {
        let phi = parse_property("forall pi. G p(x)@pi").unwrap();
        assert_eq!(
            exists_encoding(&phi, ApproxOptions::default()),
            Err(PseudoError::NotExistential)
        );
    }
}
