//! The approximation is exact on executions whose assignments lie in the
//! update universe: a single execution satisfies ψ exactly when its image
//! satisfies ⌊ψ⌋, and a set of executions satisfies φ exactly when its image
//! set satisfies ⌊φ⌋.

use hypertsl_core::approx::{
    translate_execution, translate_executions, translate_hyper_over, translate_tsl_over,
    ApproxOptions,
};
use hypertsl_core::gen::{
    random_execution, random_hypertsl, random_interpretation, random_tsl, TermPool,
};
use hypertsl_core::{
    eval_hyperltl, eval_hypertsl, eval_ltl, eval_tsl, parse_property, Formula, HyperLtlFormula,
    QuantKind, Quantifier,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

#[test]
fn single_execution_agrees_with_its_image() {
    let mut rng = StdRng::seed_from_u64(0xb0_0001);
    let pool = TermPool::standard();
    let opts = ApproxOptions::default();
    let universe = opts.universe(&pool.terms());
    let mut samples = 0;
    let mut satisfied = 0;
    for case in 0..1200 {
        let domain = rng.random_range(2..=4);
        let interp = random_interpretation(&mut rng, &pool, domain);
        let e = random_execution(&mut rng, &pool, &interp, 5);
        let size = rng.random_range(1..=10);
        let psi = random_tsl(&mut rng, &pool, size);
        let i = rng.random_range(0..6);
        let expected = eval_tsl(&e, &interp, i, &psi).expect("closed execution");
        let image = translate_execution(&e, &interp, &universe).expect("finite interpretation");
        let lowered = translate_tsl_over(&psi, &pool.terms(), opts).expect("pool terms");
        assert_eq!(
            eval_ltl(&image, i, &lowered),
            expected,
            "case {case}: {psi} at {i}\nexecution {e:?}\nimage {image}"
        );
        samples += 1;
        satisfied += usize::from(expected);
    }
    assert!(samples >= 1000);
    assert!(
        satisfied > 100 && satisfied < samples - 100,
        "{satisfied}/{samples}"
    );
}

#[test]
fn execution_sets_agree_with_their_images() {
    let mut rng = StdRng::seed_from_u64(0xb0_0002);
    let pool = TermPool::standard();
    let opts = ApproxOptions::default();
    let universe = opts.universe(&pool.terms());
    let mut satisfied = 0;
    let samples = 320;
    for case in 0..samples {
        let domain = rng.random_range(2..=3);
        let interp = random_interpretation(&mut rng, &pool, domain);
        let n = rng.random_range(1..=3);
        let execs: Vec<_> = (0..n)
            .map(|_| random_execution(&mut rng, &pool, &interp, 4))
            .collect();
        let size = rng.random_range(1..=9);
        let phi = random_hypertsl(&mut rng, &pool, 2, size);
        let expected = eval_hypertsl(&execs, &interp, &phi).expect("closed executions");
        let images = translate_executions(&execs, &interp, &universe).expect("finite");
        let lowered = translate_hyper_over(&phi, &pool.terms(), opts).expect("plain formula");
        assert_eq!(
            eval_hyperltl(&images, &lowered),
            expected,
            "case {case}: {phi} on {} executions",
            execs.len()
        );
        satisfied += usize::from(expected);
    }
    assert!(
        satisfied > 30 && satisfied < samples - 30,
        "{satisfied}/{samples}"
    );
}

fn dual(phi: &HyperLtlFormula) -> HyperLtlFormula {
    HyperLtlFormula {
        prefix: phi
            .prefix
            .iter()
            .map(|q| Quantifier {
                kind: match q.kind {
                    QuantKind::Forall => QuantKind::Exists,
                    QuantKind::Exists => QuantKind::Forall,
                },
                var: q.var.clone(),
            })
            .collect(),
        body: Formula::not(phi.body.clone()),
    }
}

#[test]
fn dual_prefix_negates_the_verdict() {
    let mut rng = StdRng::seed_from_u64(0xb0_0003);
    let pool = TermPool::standard();
    let opts = ApproxOptions::default();
    let universe = opts.universe(&pool.terms());
    for _ in 0..200 {
        let interp = random_interpretation(&mut rng, &pool, 3);
        let n = rng.random_range(1..=3);
        let execs: Vec<_> = (0..n)
            .map(|_| random_execution(&mut rng, &pool, &interp, 4))
            .collect();
        let size = rng.random_range(1..=8);
        let phi = random_hypertsl(&mut rng, &pool, 3, size);
        let images = translate_executions(&execs, &interp, &universe).unwrap();
        let lowered = translate_hyper_over(&phi, &pool.terms(), opts).unwrap();
        assert_ne!(
            eval_hyperltl(&images, &lowered),
            eval_hyperltl(&images, &dual(&lowered)),
            "{lowered}"
        );
    }
}

#[test]
fn printed_hypertsl_parses_back() {
    let mut rng = StdRng::seed_from_u64(0xb0_0004);
    let pool = TermPool::standard();
    for _ in 0..300 {
        let size = rng.random_range(1..=12);
        let phi = random_hypertsl(&mut rng, &pool, 3, size);
        let text = phi.to_string();
        let back = parse_property(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(back, phi, "{text}");
    }
}
