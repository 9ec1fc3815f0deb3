//! Seeded random instances for property tests and benchmarks.

use std::collections::BTreeMap;

use rand::{Rng, RngExt};

use crate::semantics::{
    Interpretation, LassoExecution, LassoTrace, Signature, Step, Valuation, Value,
};
use crate::syntax::{
    parse_predicate_term, parse_update_term, Ap, Flavor, Formula, HyperTslAtom, HyperTslFormula,
    PredicateTerm, QuantKind, Quantifier, TermSets, TraceVar, TslAtom, TslFormula, UpdateTerm,
};

/// A random formula with at most `size` nodes over the given leaves.
///
/// Every operator of the surface syntax is drawn with equal weight.
pub fn random_formula<A: Clone, R: Rng + ?Sized>(
    rng: &mut R,
    leaves: &[A],
    size: usize,
) -> Formula<A> {
    if size <= 1 || leaves.is_empty() {
        return match rng.random_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ if leaves.is_empty() => Formula::True,
            _ => Formula::atom(leaves[rng.random_range(0..leaves.len())].clone()),
        };
    }
    if size == 2 || rng.random_bool(0.35) {
        let a = random_formula(rng, leaves, size - 1);
        return match rng.random_range(0..4) {
            0 => Formula::not(a),
            1 => Formula::next(a),
            2 => Formula::eventually(a),
            _ => Formula::globally(a),
        };
    }
    let left = rng.random_range(1..size - 1);
    let a = random_formula(rng, leaves, left);
    let b = random_formula(rng, leaves, size - 1 - left);
    match rng.random_range(0..7) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        3 => Formula::iff(a, b),
        4 => Formula::until(a, b),
        5 => Formula::weak_until(a, b),
        _ => Formula::release(a, b),
    }
}

/// A random valuation over `aps`, each proposition present with probability ½.
pub fn random_valuation<R: Rng + ?Sized>(rng: &mut R, aps: &[Ap]) -> Valuation {
    aps.iter()
        .filter(|_| rng.random_bool(0.5))
        .cloned()
        .collect()
}

/// A random lasso with `stem + loop ≤ max_len` and a nonempty loop.
pub fn random_lasso<R: Rng + ?Sized>(rng: &mut R, aps: &[Ap], max_len: usize) -> LassoTrace {
    let max_len = max_len.max(1);
    let loop_len = rng.random_range(1..=max_len);
    let stem_len = rng.random_range(0..=max_len - loop_len);
    LassoTrace {
        stem: (0..stem_len).map(|_| random_valuation(rng, aps)).collect(),
        loop_: (0..loop_len).map(|_| random_valuation(rng, aps)).collect(),
    }
}

/// Propositions `a`, `b`, `c`, ... as signal predicates.
pub fn letters(n: usize) -> Vec<Ap> {
    (0..n)
        .map(|i| {
            Ap::predicate(PredicateTerm::signal(
                ((b'a' + i as u8) as char).to_string(),
            ))
        })
        .collect()
}

/// A fixed vocabulary of TSL terms over two inputs, two cells, three function
/// symbols (one of them a constant) and two predicate symbols.
#[derive(Debug, Clone)]
pub struct TermPool {
    pub predicates: Vec<PredicateTerm>,
    pub updates: Vec<UpdateTerm>,
}

impl TermPool {
    pub fn standard() -> TermPool {
        let predicates = ["p(c)", "p(x)", "q(c, d)", "p(f(d))", "q(x, y)", "s"]
            .iter()
            .map(|s| parse_predicate_term(s).expect("valid pool term"))
            .collect();
        let updates = [
            "[c <- c]",
            "[c <- f(c)]",
            "[c <- g(c, x)]",
            "[c <- K()]",
            "[d <- d]",
            "[d <- f(x)]",
            "[d <- g(d, c)]",
        ]
        .iter()
        .map(|s| parse_update_term(s).expect("valid pool term"))
        .collect();
        TermPool {
            predicates,
            updates,
        }
    }

    pub fn atoms(&self) -> Vec<TslAtom> {
        self.predicates
            .iter()
            .cloned()
            .map(TslAtom::Predicate)
            .chain(self.updates.iter().cloned().map(TslAtom::Update))
            .collect()
    }

    pub fn terms(&self) -> TermSets {
        let psi: TslFormula = Formula::conj(
            self.atoms()
                .into_iter()
                .map(Formula::atom)
                .collect::<Vec<_>>(),
        );
        TermSets::of_tsl(&psi)
    }

    pub fn signature(&self) -> Signature {
        Signature::of_terms(&self.terms())
    }

    /// The update terms of `cell`, in pool order.
    pub fn updates_of(&self, cell: &str) -> Vec<&UpdateTerm> {
        self.updates.iter().filter(|u| u.cell == cell).collect()
    }
}

pub fn random_tsl<R: Rng + ?Sized>(rng: &mut R, pool: &TermPool, size: usize) -> TslFormula {
    random_formula(rng, &pool.atoms(), size)
}

/// A random plain HyperTSL formula with one to `max_vars` quantifiers.
pub fn random_hypertsl<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &TermPool,
    max_vars: usize,
    size: usize,
) -> HyperTslFormula {
    let n = rng.random_range(1..=max_vars.max(1));
    let prefix: Vec<Quantifier> = (0..n)
        .map(|i| {
            let var = format!("p{}", i + 1);
            if rng.random_bool(0.5) {
                Quantifier::forall(var)
            } else {
                Quantifier::exists(var)
            }
        })
        .collect();
    let leaves: Vec<HyperTslAtom> = pool
        .atoms()
        .into_iter()
        .flat_map(|a| {
            prefix
                .iter()
                .map(move |q| HyperTslAtom::single(a.clone(), q.var.clone()))
        })
        .collect();
    HyperTslFormula {
        flavor: Flavor::Plain,
        prefix,
        body: random_formula(rng, &leaves, size),
    }
}

/// A random universal or existential prefix of the given variables.
pub fn random_prefix<R: Rng + ?Sized>(rng: &mut R, vars: &[&str]) -> Vec<Quantifier> {
    vars.iter()
        .map(|v| Quantifier {
            kind: if rng.random_bool(0.5) {
                QuantKind::Forall
            } else {
                QuantKind::Exists
            },
            var: TraceVar::new(*v),
        })
        .collect()
}

/// A random execution assigning pool updates to the cells of `interp` and
/// random domain values to every input of the pool.
pub fn random_execution<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &TermPool,
    interp: &Interpretation,
    max_len: usize,
) -> LassoExecution {
    let terms = pool.terms();
    let n = interp.domain().len();
    let step = |rng: &mut R| Step {
        inputs: terms
            .inputs
            .iter()
            .map(|i| (i.clone(), Value(rng.random_range(0..n))))
            .collect(),
        cells: interp
            .cells()
            .map(|(c, _)| {
                let ups = pool.updates_of(c);
                let u = ups[rng.random_range(0..ups.len())];
                (c.to_string(), u.source.clone())
            })
            .collect::<BTreeMap<_, _>>(),
    };
    let max_len = max_len.max(1);
    let loop_len = rng.random_range(1..=max_len);
    let stem_len = rng.random_range(0..=max_len - loop_len);
    let stem = (0..stem_len).map(|_| step(rng)).collect();
    let loop_ = (0..loop_len).map(|_| step(rng)).collect();
    LassoExecution { stem, loop_ }
}

/// A random interpretation for the standard pool over a domain of `size`.
pub fn random_interpretation<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &TermPool,
    size: usize,
) -> Interpretation {
    Interpretation::random(rng, size, &pool.signature())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, SeedableRng};

    #[test]
    fn formula_size_is_bounded() {
        let mut rng = StdRng::seed_from_u64(1);
        let aps = letters(3);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            assert!(random_formula(&mut rng, &aps, n).size() <= n);
        }
    }

    #[test]
    fn executions_are_total_over_cells() {
        let mut rng = StdRng::seed_from_u64(2);
        let pool = TermPool::standard();
        for _ in 0..20 {
            let interp = random_interpretation(&mut rng, &pool, 4);
            let e = random_execution(&mut rng, &pool, &interp, 5);
            e.validate(&interp).unwrap();
            assert!(!e.loop_.is_empty() && e.stem.len() + e.loop_.len() <= 5);
        }
    }

    #[test]
    fn pool_signature_has_constant() {
        let sig = TermPool::standard().signature();
        assert_eq!(sig.functions.get("K"), Some(&0));
        assert_eq!(sig.functions.get("g"), Some(&2));
        assert_eq!(sig.cells.len(), 2);
        assert!(sig.inputs.contains("s"));
    }
}
