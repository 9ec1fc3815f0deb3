//! The ⌊·⌋ approximation of TSL by LTL and of HyperTSL by HyperLTL.
//!
//! Predicate and update terms become atomic propositions. Because LTL has no
//! notion of cells, the translation adds `cellProps`, which demands that in
//! every step exactly one update proposition holds per cell.

use thiserror::Error;

use crate::semantics::{Interpretation, LassoExecution, LassoTrace, SemanticsError, Unfolded};
use crate::syntax::{
    Ap, AtomTags, Flavor, Formula, HyperLtlFormula, HyperTslFormula, IndexedAp, LtlFormula,
    TermSets, TslFormula,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("predicates relating several executions have no LTL counterpart")]
    RelFlavor,
    #[error("cell `{0}` has no update term")]
    NoUpdates(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Options of the translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxOptions {
    /// Add `[c <- c]` to the update terms of every cell before building
    /// `cellProps`.
    pub inject_self_updates: bool,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            inject_self_updates: true,
        }
    }
}

impl ApproxOptions {
    /// The update universe used for `terms` under these options.
    pub fn universe(&self, terms: &TermSets) -> TermSets {
        if self.inject_self_updates {
            terms.with_self_updates()
        } else {
            terms.clone()
        }
    }
}

/// Replaces every predicate and update term by its proposition.
pub fn syntactic_conversion(psi: &TslFormula) -> LtlFormula {
    psi.map_atoms(&mut Ap::from_tsl)
}

/// Leaf-wise conversion of a plain HyperTSL formula, keeping tags and prefix.
pub fn syntactic_conversion_hyper(phi: &HyperTslFormula) -> Result<HyperLtlFormula, ApproxError> {
    if phi.flavor == Flavor::Rel {
        return Err(ApproxError::RelFlavor);
    }
    let body = phi.body.try_map_atoms(&mut |a| match &a.tags {
        AtomTags::Single(v) => Ok(IndexedAp {
            ap: Ap::from_tsl(&a.atom),
            var: v.clone(),
        }),
        AtomTags::PerArgument(_) => Err(ApproxError::RelFlavor),
    })?;
    Ok(HyperLtlFormula {
        prefix: phi.prefix.clone(),
        body,
    })
}

/// `G ∧_c ∨_{τ ∈ T_U^c} (a_τ ∧ ∧_{τ' ≠ τ} ¬a_τ')` over the cells of `terms`.
///
/// With `inject_self` the self-update of every cell joins its update terms.
/// Returns `None` when there are no cells.
pub fn cell_props(terms: &TermSets, inject_self: bool) -> Result<Option<LtlFormula>, ApproxError> {
    let terms = ApproxOptions {
        inject_self_updates: inject_self,
    }
    .universe(terms);
    if terms.cells.is_empty() {
        return Ok(None);
    }
    let mut blocks = Vec::new();
    for c in &terms.cells {
        let ups = terms.updates_of(c);
        if ups.is_empty() {
            return Err(ApproxError::NoUpdates(c.clone()));
        }
        let options = ups.iter().map(|u| {
            let this = Formula::atom(Ap::update((*u).clone()));
            let others = ups
                .iter()
                .filter(|v| *v != u)
                .map(|v| Formula::not(Formula::atom(Ap::update((*v).clone()))));
            Formula::conj(std::iter::once(this).chain(others))
        });
        blocks.push(Formula::disj(options));
    }
    Ok(Some(Formula::globally(Formula::conj(blocks))))
}

/// ⌊ψ⌋ with `cellProps` over the terms of `psi`.
pub fn translate_tsl(psi: &TslFormula, opts: ApproxOptions) -> Result<LtlFormula, ApproxError> {
    translate_tsl_over(psi, &TermSets::of_tsl(psi), opts)
}

/// ⌊ψ⌋ with `cellProps` over `terms` joined with the terms of `psi`.
pub fn translate_tsl_over(
    psi: &TslFormula,
    terms: &TermSets,
    opts: ApproxOptions,
) -> Result<LtlFormula, ApproxError> {
    let all = terms.union(&TermSets::of_tsl(psi));
    let conv = syntactic_conversion(psi);
    Ok(match cell_props(&all, opts.inject_self_updates)? {
        Some(cp) => Formula::and(conv, cp),
        None => conv,
    })
}

/// ⌊φ⌋: the converted body conjoined with `cellProps` for every quantified
/// variable.
pub fn translate_hyper(
    phi: &HyperTslFormula,
    opts: ApproxOptions,
) -> Result<HyperLtlFormula, ApproxError> {
    translate_hyper_over(phi, &TermSets::of_hyper(phi), opts)
}

pub fn translate_hyper_over(
    phi: &HyperTslFormula,
    terms: &TermSets,
    opts: ApproxOptions,
) -> Result<HyperLtlFormula, ApproxError> {
    let conv = syntactic_conversion_hyper(phi)?;
    let all = terms.union(&TermSets::of_hyper(phi));
    let Some(cp) = cell_props(&all, opts.inject_self_updates)? else {
        return Ok(conv);
    };
    let per_var = phi
        .prefix
        .iter()
        .map(|q| cp.map_atoms(&mut |a| IndexedAp::new(a.clone(), q.var.as_str())));
    Ok(HyperLtlFormula {
        prefix: conv.prefix,
        body: Formula::conj(std::iter::once(conv.body).chain(per_var)),
    })
}

/// ⌊e⌋ over the propositions of `universe`.
///
/// Position `i` holds `a_τ` for every predicate term that evaluates to true
/// and for every update term syntactically equal to the assignment of its
/// cell. The result is the shortest lasso denoting the image; with finite
/// interpretations the image is always ultimately periodic.
pub fn translate_execution(
    e: &LassoExecution,
    interp: &Interpretation,
    universe: &TermSets,
) -> Result<LassoTrace, ApproxError> {
    let u = Unfolded::new(e, interp)?;
    translate_unfolded(&u, universe)
}

pub fn translate_unfolded(
    u: &Unfolded<'_>,
    universe: &TermSets,
) -> Result<LassoTrace, ApproxError> {
    let shape = u.shape();
    let mut classes = Vec::with_capacity(shape.len());
    for k in 0..shape.len() {
        let mut v = crate::semantics::Valuation::new();
        for p in &universe.predicates {
            if u.predicate_at(k, p)? {
                v.insert(Ap::predicate(p.clone()));
            }
        }
        for t in &universe.updates {
            if u.update_at(k, t) {
                v.insert(Ap::update(t.clone()));
            }
        }
        classes.push(v);
    }
    let loop_ = classes.split_off(shape.stem);
    Ok(LassoTrace {
        stem: classes,
        loop_,
    }
    .normalize())
}

/// ⌊E⌋ = {⌊e⌋ | e ∈ E}, keeping one trace per execution.
pub fn translate_executions(
    execs: &[LassoExecution],
    interp: &Interpretation,
    universe: &TermSets,
) -> Result<Vec<LassoTrace>, ApproxError> {
    execs
        .iter()
        .map(|e| translate_execution(e, interp, universe))
        .collect()
}
