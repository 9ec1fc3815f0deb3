//! Acceptance run: one PASS or FAIL line per criterion, then a non-zero exit
//! if any of them failed.

use std::time::{Duration, Instant};

use hypertsl_cli::fixtures::{
    EXISTS_CONTRADICTION, EXISTS_PAIR, EXISTS_SATISFIABLE, PSEUDO_CONJUNCTION, PSEUDO_FALSE,
    PSEUDO_NO_HARM, PSEUDO_SAME_SIGNAL, TIE_CONTEXT, TRIO, TRIO_TSL,
};
use hypertsl_cli::reproduce::{table_one, table_two, TableReport};
use hypertsl_core::approx::{
    translate_execution, translate_executions, translate_hyper_over, translate_tsl_over,
    ApproxOptions,
};
use hypertsl_core::automata::{ltl_sat, ltl_to_buchi, SatResult};
use hypertsl_core::gen::{
    letters, random_execution, random_formula, random_hypertsl, random_interpretation,
    random_lasso, random_tsl, TermPool,
};
use hypertsl_core::pseudo::{
    check_exists_unrealizable, exists_encoding, is_pseudo_hyperltl, is_pseudo_hypertsl,
    local_determinism_hyperltl, local_determinism_hypertsl, ExistsVerdict, LocalDeterminismOptions,
    PseudoVerdict,
};
use hypertsl_core::{
    eval_hyperltl, eval_hypertsl, eval_ltl, eval_tsl, parse_hyperltl, parse_tsl, Ap, Flavor,
    Formula, HyperLtlFormula, HyperTslFormula, LassoTrace, Quantifier, TraceVar,
};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

/// Runs `check`, folds a time limit into its verdict and prints the line.
fn criterion(id: &str, title: &str, limit: Duration, check: impl FnOnce() -> Verdict) -> bool {
    let started = Instant::now();
    let v = check();
    let elapsed = started.elapsed();
    let ok = v.ok && elapsed <= limit;
    let mut detail = v.detail;
    if elapsed > limit {
        detail.push_str(&format!("; over the {limit:?} limit"));
    }
    println!(
        "{} {id:<3} {title}: {detail} [{:.2} s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

fn table_verdict(r: anyhow::Result<TableReport>) -> Verdict {
    match r {
        Ok(t) => {
            let failed: Vec<String> = t
                .expectations
                .iter()
                .filter(|e| !e.ok)
                .map(|e| format!("{}: {}", e.name, e.detail))
                .collect();
            let summary: Vec<String> = t
                .expectations
                .iter()
                .map(|e| format!("{} = {}", e.name, e.detail))
                .collect();
            if failed.is_empty() {
                verdict(true, summary.join("; "))
            } else {
                verdict(false, failed.join("; "))
            }
        }
        Err(e) => verdict(false, format!("error: {e:#}")),
    }
}

/// Every witness satisfies the formula alone while the set violates it.
fn witnesses_reverify(phi: &HyperLtlFormula, ws: &[LassoTrace]) -> bool {
    !eval_hyperltl(ws, phi)
        && ws
            .iter()
            .all(|w| eval_hyperltl(std::slice::from_ref(w), phi))
}

fn pseudo_false() -> Verdict {
    let phi = parse_hyperltl(PSEUDO_FALSE.1).expect("fixture");
    match is_pseudo_hyperltl(&phi) {
        Ok(PseudoVerdict::Pseudo(c)) => verdict(true, format!("pseudo, collapsed to `{c}`")),
        other => verdict(false, format!("{other:?}")),
    }
}

fn pseudo_same_signal() -> Verdict {
    let phi = parse_hyperltl(PSEUDO_SAME_SIGNAL.1).expect("fixture");
    match is_pseudo_hyperltl(&phi) {
        Ok(PseudoVerdict::NotPseudo(ws)) => {
            let ok = ws.len() == 2 && witnesses_reverify(&phi, &ws);
            let shown: Vec<String> = ws.iter().map(ToString::to_string).collect();
            verdict(
                ok,
                format!(
                    "not pseudo, witnesses {} re-verify: {ok}",
                    shown.join(" and ")
                ),
            )
        }
        other => verdict(false, format!("{other:?}")),
    }
}

fn pseudo_tie_context() -> Verdict {
    let phi = PSEUDO_NO_HARM.formula().expect("fixture");
    let ctx = parse_tsl(TIE_CONTEXT.1).expect("fixture");
    match is_pseudo_hypertsl(&phi, Some(&ctx), ApproxOptions::default()) {
        Ok(r) => verdict(
            r.tsl.is_pseudo() && r.ltl.is_pseudo(),
            format!("hypertsl {}, hyperltl {}", r.tsl.name(), r.ltl.name()),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn pseudo_conjunction() -> Verdict {
    let phi = PSEUDO_CONJUNCTION.formula().expect("fixture");
    match is_pseudo_hypertsl(&phi, None, ApproxOptions::default()) {
        Ok(r) => {
            let witness = match &r.ltl {
                PseudoVerdict::NotPseudo(ws) => {
                    ws.len() == 2 && witnesses_reverify(&r.translated, ws)
                }
                _ => false,
            };
            verdict(
                r.tsl == PseudoVerdict::Unknown && witness,
                format!(
                    "hypertsl {}, hyperltl {}, witness pair re-verifies: {witness}",
                    r.tsl.name(),
                    r.ltl.name()
                ),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn single_execution_soundness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xacce_0401);
    let pool = TermPool::standard();
    let opts = ApproxOptions::default();
    let universe = opts.universe(&pool.terms());
    let samples = 1000;
    let mut agree = 0;
    for _ in 0..samples {
        let domain = rng.random_range(2..=4);
        let interp = random_interpretation(&mut rng, &pool, domain);
        let e = random_execution(&mut rng, &pool, &interp, 5);
        let size = rng.random_range(1..=10);
        let psi = random_tsl(&mut rng, &pool, size);
        let i = rng.random_range(0..6);
        let direct = eval_tsl(&e, &interp, i, &psi).expect("closed execution");
        let image = translate_execution(&e, &interp, &universe).expect("finite");
        let lowered = translate_tsl_over(&psi, &pool.terms(), opts).expect("pool terms");
        agree += usize::from(eval_ltl(&image, i, &lowered) == direct);
    }
    verdict(
        agree == samples,
        format!("{agree}/{samples} single executions agree"),
    )
}

fn execution_set_soundness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xacce_0402);
    let pool = TermPool::standard();
    let opts = ApproxOptions::default();
    let universe = opts.universe(&pool.terms());
    let samples = 300;
    let mut agree = 0;
    for _ in 0..samples {
        let domain = rng.random_range(2..=3);
        let interp = random_interpretation(&mut rng, &pool, domain);
        let n = rng.random_range(1..=3);
        let execs: Vec<_> = (0..n)
            .map(|_| random_execution(&mut rng, &pool, &interp, 4))
            .collect();
        let size = rng.random_range(1..=9);
        let phi = random_hypertsl(&mut rng, &pool, 2, size);
        let direct = eval_hypertsl(&execs, &interp, &phi).expect("closed executions");
        let images = translate_executions(&execs, &interp, &universe).expect("finite");
        let lowered = translate_hyper_over(&phi, &pool.terms(), opts).expect("plain formula");
        agree += usize::from(eval_hyperltl(&images, &lowered) == direct);
    }
    verdict(
        agree == samples,
        format!("{agree}/{samples} sets with |E| <= 3 agree"),
    )
}

fn engine() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xacce_0500);
    let mut membership = 0;
    for _ in 0..1000 {
        let aps = letters(rng.random_range(1..=3));
        let size = rng.random_range(1..=12);
        let psi = random_formula(&mut rng, &aps, size);
        let t = random_lasso(&mut rng, &aps, 6);
        let a = ltl_to_buchi(&psi, &aps).expect("atoms in universe");
        membership += usize::from(a.accepts(&t) == eval_ltl(&t, 0, &psi));
    }
    let (mut unsat, mut witnesses, mut reverified) = (0, 0, 0);
    for _ in 0..200 {
        let aps = letters(3);
        let size = rng.random_range(1..=12);
        let psi = random_formula(&mut rng, &aps, size);
        let both = Formula::and(psi.clone(), Formula::not(psi.clone()));
        unsat += usize::from(ltl_sat(&both) == SatResult::Unsat);
        if let SatResult::Sat(w) = ltl_sat(&psi) {
            witnesses += 1;
            reverified += usize::from(eval_ltl(&w, 0, &psi));
        }
    }
    verdict(
        membership == 1000 && unsat == 200 && reverified == witnesses,
        format!(
            "membership {membership}/1000, contradictions unsat {unsat}/200, \
             witnesses re-verified {reverified}/{witnesses}"
        ),
    )
}

fn weak_untils(f: &hypertsl_core::TslFormula) -> usize {
    f.conjuncts()
        .into_iter()
        .filter(|c| matches!(c, Formula::WeakUntil(..)))
        .count()
}

fn exists_checks() -> Verdict {
    let opts = ApproxOptions::default();
    let contradiction = check_exists_unrealizable(&EXISTS_CONTRADICTION.formula().unwrap(), opts);
    let satisfiable = check_exists_unrealizable(&EXISTS_SATISFIABLE.formula().unwrap(), opts);
    let pair = exists_encoding(&EXISTS_PAIR.formula().unwrap(), opts).map(|p| weak_untils(&p));
    let mut rng = StdRng::seed_from_u64(0xacce_0600);
    let pool = TermPool::standard();
    let mut random_unrealizable = 0;
    for _ in 0..40 {
        let size = rng.random_range(1..=6);
        let psi = random_tsl(&mut rng, &pool, size);
        let lifted = HyperTslFormula::lift(&psi, &TraceVar::new("pi"));
        let phi = HyperTslFormula {
            flavor: Flavor::Plain,
            prefix: vec![Quantifier::exists("pi")],
            body: Formula::and(lifted.clone(), Formula::not(lifted)),
        };
        random_unrealizable += usize::from(matches!(
            check_exists_unrealizable(&phi, opts),
            Ok(ExistsVerdict::Unrealizable)
        ));
    }
    let ok = contradiction == Ok(ExistsVerdict::Unrealizable)
        && matches!(satisfiable, Ok(ExistsVerdict::Unknown(_)))
        && pair == Ok(4)
        && random_unrealizable == 40;
    verdict(
        ok,
        format!(
            "contradiction {}, satisfiable {}, strategy constraints for n=2: {:?}, \
             random contradictions unrealizable {random_unrealizable}/40",
            exists_name(&contradiction),
            exists_name(&satisfiable),
            pair.ok()
        ),
    )
}

fn exists_name<E>(v: &Result<ExistsVerdict, E>) -> &'static str {
    match v {
        Ok(ExistsVerdict::Unrealizable) => "unrealizable",
        Ok(ExistsVerdict::Unknown(_)) => "unknown",
        Err(_) => "error",
    }
}

fn trio() -> Verdict {
    let exhaustive = LocalDeterminismOptions {
        exhaustive: true,
        ..Default::default()
    };
    let i: Ap = "i".parse().unwrap();
    let o: Ap = "o".parse().unwrap();
    let phi = parse_hyperltl(TRIO.1).expect("fixture");
    let ltl = local_determinism_hyperltl(
        &phi,
        std::slice::from_ref(&i),
        std::slice::from_ref(&o),
        exhaustive,
    );
    let ltl_ok = match &ltl {
        Ok(d) => {
            d.total == 4
                && d.survivors.len() == 1
                && d.strategy.as_ref().is_some_and(|s| {
                    s.table
                        .iter()
                        .all(|(inp, out)| inp.contains(&i) == out.contains(&o))
                })
        }
        Err(_) => false,
    };
    let p: Ap = "p(x)".parse().unwrap();
    let f: Ap = "[c <- f(c)]".parse().unwrap();
    let tsl = local_determinism_hypertsl(
        &TRIO_TSL.formula().unwrap(),
        ApproxOptions::default(),
        exhaustive,
    );
    let tsl_ok = match &tsl {
        Ok(d) => {
            d.total == 4
                && d.survivors.len() == 1
                && d.strategy.as_ref().is_some_and(|s| {
                    s.table
                        .iter()
                        .all(|(inp, out)| inp.contains(&p) == out.contains(&f))
                })
        }
        Err(_) => false,
    };
    let describe = |r: &Result<_, _>| match r {
        Ok(hypertsl_core::pseudo::LocalDeterminismDecision {
            survivors, total, ..
        }) => format!("survivors {survivors:?} of {total}"),
        Err(e) => format!("error {e}"),
    };
    verdict(
        ltl_ok && tsl_ok,
        format!(
            "signals: {}, output follows input: {ltl_ok}; updates: {}, output follows input: {tsl_ok}",
            describe(&ltl),
            describe(&tsl)
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        criterion("1", "voting repair table", secs(300), || {
            table_verdict(table_one(false, None))
        }),
        criterion("2", "auction repair table", secs(60), || {
            table_verdict(table_two(false, None))
        }),
        criterion("3a", "pseudo: forall forall false", secs(10), pseudo_false),
        criterion(
            "3a",
            "pseudo: agreement on p(a)",
            secs(10),
            pseudo_same_signal,
        ),
        criterion(
            "3b",
            "pseudo: tie context and no harm",
            secs(10),
            pseudo_tie_context,
        ),
        criterion(
            "3c",
            "pseudo: conjunction without context",
            secs(10),
            pseudo_conjunction,
        ),
        criterion(
            "4",
            "single executions",
            secs(600),
            single_execution_soundness,
        ),
        criterion("4", "execution sets", secs(600), execution_set_soundness),
        criterion("5", "Buchi engine against the evaluator", secs(120), engine),
        criterion("6", "existential unrealizability", secs(10), exists_checks),
        criterion("7", "local determinism on the trio", secs(10), trio),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "{} of {} checks passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
