//! Realizability of formulas with a local-determinism conjunct.
//!
//! When `φ = localDeterminism ∧ φ′`, every realizing strategy may be taken to
//! be positional: it maps the current predicate valuation to one update per
//! cell. There are finitely many such maps. Each one induces a one-state
//! system whose self-composition is model checked against the body.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::{require_universal, PseudoError};
use crate::approx::{translate_hyper, ApproxOptions};
use crate::automata::{advance, Lts, ModelChecker};
use crate::semantics::Valuation;
use crate::syntax::{
    Ap, Flavor, Formula, HyperLtlFormula, HyperTslFormula, TermSets, TraceVar, TslAtom,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDeterminismOptions {
    /// Largest number of input propositions accepted.
    pub max_inputs: usize,
    /// Largest number of positional strategies accepted.
    pub max_strategies: usize,
    /// Check every strategy instead of stopping at the first success.
    pub exhaustive: bool,
}

impl Default for LocalDeterminismOptions {
    fn default() -> Self {
        LocalDeterminismOptions {
            max_inputs: 6,
            max_strategies: 1 << 16,
            exhaustive: false,
        }
    }
}

/// A matched `G((∧ p_π ↔ p_π′) → (∧ u_π ↔ u_π′))` conjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDeterminism<B> {
    pub vars: (TraceVar, TraceVar),
    pub inputs: BTreeSet<B>,
    pub outputs: BTreeSet<B>,
}

/// Collects the leaves of a conjunction of `x_π ↔ x_π′` over one pair of
/// variables; `True` is the empty conjunction.
fn agreement_list<A, B: Ord>(
    f: &Formula<A>,
    split: &impl Fn(&A) -> Option<(B, TraceVar)>,
    pair: &mut Option<(TraceVar, TraceVar)>,
) -> Option<BTreeSet<B>> {
    let mut out = BTreeSet::new();
    if matches!(f, Formula::True) {
        return Some(out);
    }
    for c in f.conjuncts() {
        let Formula::Iff(l, r) = c else {
            return None;
        };
        let (Formula::Atom(l), Formula::Atom(r)) = (&**l, &**r) else {
            return None;
        };
        let ((x, v), (y, w)) = (split(l)?, split(r)?);
        if x != y || v == w {
            return None;
        }
        match pair {
            None => *pair = Some((v, w)),
            Some((a, b)) if (*a == v && *b == w) || (*a == w && *b == v) => {}
            Some(_) => return None,
        }
        out.insert(x);
    }
    Some(out)
}

/// Finds the first conjunct of `body` following the local-determinism schema.
///
/// `split` separates a leaf into its untagged term and its trace variable.
pub fn match_local_determinism<A, B: Ord>(
    body: &Formula<A>,
    split: impl Fn(&A) -> Option<(B, TraceVar)>,
) -> Option<LocalDeterminism<B>> {
    body.conjuncts().into_iter().find_map(|c| {
        let Formula::Globally(inner) = c else {
            return None;
        };
        let (pre, post) = match &**inner {
            Formula::Implies(l, r) => (&**l, &**r),
            Formula::Or(l, r) => match &**l {
                Formula::Not(l) => (&**l, &**r),
                _ => return None,
            },
            _ => return None,
        };
        let mut pair = None;
        let inputs = agreement_list(pre, &split, &mut pair)?;
        let outputs = agreement_list(post, &split, &mut pair)?;
        Some(LocalDeterminism {
            vars: pair?,
            inputs,
            outputs,
        })
    })
}

/// A map from input valuations to output valuations, listed in enumeration
/// order of the inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionalStrategy {
    pub inputs: Vec<Ap>,
    pub table: Vec<(Valuation, Valuation)>,
}

impl fmt::Display for PositionalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &Valuation| {
            let items: Vec<String> = v.iter().map(ToString::to_string).collect();
            format!("{{{}}}", items.join(", "))
        };
        for (i, o) in &self.table {
            writeln!(f, "{} -> {}", set(i), set(o))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalDeterminismDecision {
    /// The first satisfying strategy in enumeration order.
    pub strategy: Option<PositionalStrategy>,
    /// Indices of the satisfying strategies found; all of them in exhaustive
    /// mode, otherwise at most the first.
    pub survivors: Vec<usize>,
    pub total: usize,
    pub checked: usize,
}

/// Input valuations in binary order, the first input most significant.
fn input_rows(inputs: &[Ap]) -> Vec<Valuation> {
    let n = inputs.len();
    (0..1usize << n)
        .map(|b| {
            inputs
                .iter()
                .enumerate()
                .filter(|(j, _)| b >> (n - 1 - j) & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

struct Space {
    inputs: Vec<Ap>,
    rows: Vec<Valuation>,
    options: Vec<Valuation>,
}

impl Space {
    fn strategy(&self, mut idx: usize) -> Vec<usize> {
        let radix = self.options.len();
        let mut digits = vec![0; self.rows.len()];
        for d in digits.iter_mut().rev() {
            *d = idx % radix;
            idx /= radix;
        }
        digits
    }

    fn system(&self, digits: &[usize]) -> Lts {
        let mut k = Lts::new();
        k.add_state("q");
        for (row, &d) in self.rows.iter().zip(digits) {
            let label = row.iter().chain(&self.options[d]).cloned().collect();
            k.add_edge(0, label, 0);
        }
        k
    }

    fn table(&self, digits: &[usize]) -> PositionalStrategy {
        PositionalStrategy {
            inputs: self.inputs.clone(),
            table: self
                .rows
                .iter()
                .zip(digits)
                .map(|(r, &d)| (r.clone(), self.options[d].clone()))
                .collect(),
        }
    }
}

fn decide(
    phi: &HyperLtlFormula,
    space: Space,
    opts: LocalDeterminismOptions,
) -> Result<LocalDeterminismDecision, PseudoError> {
    let body = phi.zipped_body().ok_or_else(|| {
        let bound = phi.vars();
        let free = phi
            .body
            .atoms()
            .into_iter()
            .find(|a| !bound.contains(&a.var))
            .map(|a| a.var.to_string())
            .unwrap_or_default();
        PseudoError::UnboundVariable(free)
    })?;
    let total = u32::try_from(space.rows.len())
        .ok()
        .and_then(|r| space.options.len().checked_pow(r))
        .filter(|&t| t <= opts.max_strategies)
        .ok_or_else(|| PseudoError::TooManyStrategies {
            found: format!("{}^{}", space.options.len(), space.rows.len()),
            cap: opts.max_strategies,
        })?;
    let copies = phi.prefix.len();
    let checker = ModelChecker::new(&body);
    let run = |mc: &mut ModelChecker, idx: usize| -> Result<bool, PseudoError> {
        let k = space
            .system(&space.strategy(idx))
            .self_compose(copies, &|_| true);
        Ok(mc.check(&k)?.holds())
    };
    let (survivors, checked) = if opts.exhaustive {
        let results: Vec<Result<bool, PseudoError>> = (0..total)
            .into_par_iter()
            .map_init(|| checker.clone(), |mc, idx| run(mc, idx))
            .collect();
        let mut survivors = Vec::new();
        for (idx, r) in results.into_iter().enumerate() {
            if r? {
                survivors.push(idx);
            }
        }
        (survivors, total)
    } else {
        let first = (0..total)
            .into_par_iter()
            .map_init(|| checker.clone(), |mc, idx| (idx, run(mc, idx)))
            .find_first(|(_, r)| !matches!(r, Ok(false)));
        match first {
            Some((idx, r)) => {
                r?;
                (vec![idx], idx + 1)
            }
            None => (Vec::new(), total),
        }
    };
    Ok(LocalDeterminismDecision {
        strategy: survivors
            .first()
            .map(|&idx| space.table(&space.strategy(idx))),
        survivors,
        total,
        checked,
    })
}

fn check_inputs(n: usize, opts: &LocalDeterminismOptions) -> Result<(), PseudoError> {
    if n > opts.max_inputs {
        return Err(PseudoError::TooManyInputs {
            found: n,
            cap: opts.max_inputs,
        });
    }
    Ok(())
}

/// Decides realizability of a universal HyperLTL formula with a
/// local-determinism conjunct over the declared inputs and Boolean outputs.
///
/// Output valuations are enumerated in binary order, the first output most
/// significant, and strategies in mixed radix with the row of the empty
/// input valuation most significant.
pub fn local_determinism_hyperltl(
    phi: &HyperLtlFormula,
    inputs: &[Ap],
    outputs: &[Ap],
    opts: LocalDeterminismOptions,
) -> Result<LocalDeterminismDecision, PseudoError> {
    require_universal(&phi.prefix)?;
    let m = match_local_determinism(&phi.body, |a| Some((a.ap.clone(), a.var.clone())))
        .ok_or(PseudoError::NoLocalDeterminism)?;
    let declared_in: BTreeSet<Ap> = inputs.iter().cloned().collect();
    let declared_out: BTreeSet<Ap> = outputs.iter().cloned().collect();
    if m.inputs != declared_in {
        return Err(PseudoError::SchemaMismatch("the declared inputs".into()));
    }
    if m.outputs != declared_out {
        return Err(PseudoError::SchemaMismatch("the declared outputs".into()));
    }
    if let Some(a) = phi
        .base_aps()
        .into_iter()
        .find(|a| !declared_in.contains(a) && !declared_out.contains(a))
    {
        return Err(PseudoError::SchemaMismatch(format!("proposition `{a}`")));
    }
    check_inputs(inputs.len(), &opts)?;
    let space = Space {
        inputs: inputs.to_vec(),
        rows: input_rows(inputs),
        options: input_rows(outputs),
    };
    decide(phi, space, opts)
}

/// The HyperTSL counterpart: inputs are the predicate terms and outputs pick
/// exactly one update term per cell, from the ⌊·⌋ universe of the formula.
pub fn local_determinism_hypertsl(
    phi: &HyperTslFormula,
    approx: ApproxOptions,
    opts: LocalDeterminismOptions,
) -> Result<LocalDeterminismDecision, PseudoError> {
    if phi.flavor == Flavor::Rel {
        return Err(PseudoError::RelFlavor);
    }
    require_universal(&phi.prefix)?;
    let m = match_local_determinism(&phi.body, |a| {
        Some((a.atom.clone(), a.single_var()?.clone()))
    })
    .ok_or(PseudoError::NoLocalDeterminism)?;
    let terms = TermSets::of_hyper(phi);
    for p in &terms.predicates {
        if !m.inputs.contains(&TslAtom::Predicate(p.clone())) {
            return Err(PseudoError::SchemaMismatch(format!("predicate `{p}`")));
        }
    }
    for u in &terms.updates {
        if !m.outputs.contains(&TslAtom::Update(u.clone())) {
            return Err(PseudoError::SchemaMismatch(format!("update `{u}`")));
        }
    }
    check_inputs(terms.predicates.len(), &opts)?;
    let universe = approx.universe(&terms);
    let mut options = vec![Valuation::new()];
    for cell in &universe.cells {
        let choices = universe.updates_of(cell);
        let mut digits = vec![0usize; 1];
        let mut next = Vec::new();
        for base in &options {
            loop {
                let mut v = base.clone();
                v.insert(Ap::update(choices[digits[0]].clone()));
                next.push(v);
                if !advance(&mut digits, |_| choices.len()) {
                    break;
                }
            }
        }
        options = next;
    }
    let inputs: Vec<Ap> = terms
        .predicates
        .iter()
        .cloned()
        .map(Ap::predicate)
        .collect();
    let space = Space {
        rows: input_rows(&inputs),
        inputs,
        options,
    };
    decide(&translate_hyper(phi, approx)?, space, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_hyperltl, parse_property};

    const DET: &str = "G ((i@pi <-> i@pi') -> (o@pi <-> o@pi'))";

    fn ap(s: &str) -> Ap {
        s.parse().unwrap()
    }

    fn trio() -> HyperLtlFormula {
        parse_hyperltl(&format!(
            "forall pi. forall pi'. {DET} \
             && G ((i@pi <-> !i@pi') -> (o@pi <-> !o@pi')) \
             && G (i@pi && !i@pi' && o@pi' -> o@pi)"
        ))
        .unwrap()
    }

    #[test]
    fn schema_is_recognised() {
        let m =
            match_local_determinism(&trio().body, |a| Some((a.ap.clone(), a.var.clone()))).unwrap();
        assert_eq!(m.inputs, BTreeSet::from([ap("i")]));
        assert_eq!(m.outputs, BTreeSet::from([ap("o")]));
        let none = parse_hyperltl("forall pi. forall pi'. G (i@pi -> o@pi')").unwrap();
        assert!(
            match_local_determinism(&none.body, |a| Some((a.ap.clone(), a.var.clone()))).is_none()
        );
    }

    #[test]
    fn trio_forces_output_to_follow_input() {
        let opts = LocalDeterminismOptions {
            exhaustive: true,
            ..Default::default()
        };
        let d = local_determinism_hyperltl(&trio(), &[ap("i")], &[ap("o")], opts).unwrap();
        assert_eq!(d.total, 4);
        assert_eq!(d.survivors, vec![1]);
        let s = d.strategy.unwrap();
        for (i, o) in &s.table {
            assert_eq!(i.contains(&ap("i")), o.contains(&ap("o")));
        }
    }

    #[test]
    fn trivial_rest_takes_first_strategy() {
        let phi = parse_hyperltl(&format!("forall pi. forall pi'. {DET} && true")).unwrap();
        let d =
            local_determinism_hyperltl(&phi, &[ap("i")], &[ap("o")], Default::default()).unwrap();
        assert_eq!(d.survivors, vec![0]);
        assert_eq!(d.checked, 1);
    }

    #[test]
    fn false_rest_has_no_strategy() {
        let phi = parse_hyperltl(&format!("forall pi. forall pi'. {DET} && false")).unwrap();
        let d =
            local_determinism_hyperltl(&phi, &[ap("i")], &[ap("o")], Default::default()).unwrap();
        assert!(d.strategy.is_none());
        assert_eq!(d.checked, 4);
    }

    #[test]
    fn declared_sets_must_match() {
        assert!(matches!(
            local_determinism_hyperltl(&trio(), &[ap("j")], &[ap("o")], Default::default()),
            Err(PseudoError::SchemaMismatch(_))
        ));
        let no = parse_hyperltl("forall pi. forall pi'. G o@pi").unwrap();
        assert_eq!(
            local_determinism_hyperltl(&no, &[ap("i")], &[ap("o")], Default::default()),
            Err(PseudoError::NoLocalDeterminism)
        );
    }

    #[test]
    fn input_cap_is_enforced() {
        let opts = LocalDeterminismOptions {
            max_inputs: 0,
            ..Default::default()
        };
        assert!(matches!(
            local_determinism_hyperltl(&trio(), &[ap("i")], &[ap("o")], opts),
            Err(PseudoError::TooManyInputs { found: 1, cap: 0 })
        ));
    }

    #[test]
    fn hypertsl_variant_picks_one_update_per_cell() {
        let phi = parse_property(
            "forall pi. forall pi'. \
             G ((p(x)@pi <-> p(x)@pi') -> ([c <- f(c)]@pi <-> [c <- f(c)]@pi')) \
             && G (p(x)@pi <-> [c <- f(c)]@pi)",
        )
        .unwrap();
        let opts = LocalDeterminismOptions {
            exhaustive: true,
            ..Default::default()
        };
        let d = local_determinism_hypertsl(&phi, ApproxOptions::default(), opts).unwrap();
        assert_eq!(d.total, 4);
        assert_eq!(d.survivors.len(), 1);
        let s = d.strategy.unwrap();
        let upd = ap("[c <- f(c)]");
        let me = ap("[c <- c]");
        for (i, o) in &s.table {
            let p = i.contains(&ap("p(x)"));
            assert_eq!(o.contains(&upd), p);
            assert_eq!(o.contains(&me), !p);
        }
    }
}
