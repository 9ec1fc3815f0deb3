//! Fixture integrity and end-to-end runs of the `hypertsl` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use hypertsl_cli::fixtures::{self, CONJUNCTION, VOTING};
use hypertsl_core::machine::{repair_tsl, RepairMode, RepairOptions, RepairOutcome};
use hypertsl_core::{approx::ApproxOptions, Ap};

fn fixture_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(fixtures::VERSION)
        .join(rel)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypertsl"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn scratch(name: &str, contents: &str) -> String {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p.display().to_string()
}

#[test]
fn explicit_machines_are_the_expansions_of_the_symbolic_ones() {
    for m in fixtures::machines() {
        let expanded = m.symbolic().unwrap().expand().unwrap();
        assert_eq!(expanded, m.machine().unwrap(), "{}", m.explicit_path);
        assert_eq!(
            m.machine().unwrap().free_choices().len(),
            m.expected_choices,
            "{}",
            m.label
        );
        assert!(m.machine().unwrap().unreachable_states().is_empty());
    }
}

#[test]
fn every_property_fixture_parses_as_plain_hypertsl() {
    let props = fixtures::properties();
    assert!(props.len() >= 20);
    for p in props {
        let phi = p.formula().unwrap_or_else(|e| panic!("{}: {e}", p.path));
        assert_eq!(phi.flavor, hypertsl_core::Flavor::Plain, "{}", p.path);
        assert!(!phi.prefix.is_empty(), "{}", p.path);
    }
}

/// In the unique repair of the conjunction, every tie is resolved in favour
/// of the candidate receiving the current vote.
#[test]
fn conjunction_repair_follows_the_current_vote() {
    let owner = &VOTING[2];
    let m = owner.machine().unwrap();
    let phi = owner
        .properties
        .iter()
        .find(|p| p.label == CONJUNCTION)
        .unwrap()
        .formula()
        .unwrap();
    let r = repair_tsl(
        &m,
        &phi,
        ApproxOptions::default(),
        RepairOptions {
            mode: RepairMode::All,
            ..RepairOptions::default()
        },
    )
    .unwrap();
    assert_eq!(r.candidates_total, 256);
    assert_eq!(r.passing().len(), 1);
    let RepairOutcome::Repaired { picks, .. } = &r.outcome else {
        panic!("{:?}", r.outcome);
    };
    let vote_a: Ap = "voteA".parse().unwrap();
    let to_a: Ap = "[winner <- A()]".parse().unwrap();
    let to_b: Ap = "[winner <- B()]".parse().unwrap();
    for (c, &p) in r.free_choices.iter().zip(picks) {
        let kept = &m.transitions[c.options[p]];
        let out = kept.output();
        let expected = if c.input.contains(&vote_a) {
            &to_a
        } else {
            &to_b
        };
        assert!(out.contains(expected), "{:?} -> {:?}", c.input, out);
    }
}

#[test]
fn exit_codes_follow_the_answer() {
    let tie = fixture_path("pseudo/tie_context.tsl");
    let (code, out, _) = run(&["sat", tie.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("sat"));

    let same = fixture_path("pseudo/same_signal.hltl");
    let (code, out, _) = run(&["pseudo", same.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("not_pseudo"));

    let m = fixture_path("voting/only_vote/machine.json");
    let p = fixture_path("voting/properties/local_determinism.htsl");
    let (code, _, _) = run(&[
        "models",
        "--machine",
        m.to_str().unwrap(),
        "--property",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&[
        "--format",
        "json",
        "repair",
        "--machine",
        m.to_str().unwrap(),
        "--property",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["machine"].is_object(), "{v}");

    let (code, _, err) = run(&["check", "no/such/file.htsl"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn check_reports_unbound_variables_and_rel_under_plain() {
    let unbound = scratch("unbound.htsl", "forall pi. G p(x)@rho\n");
    let (code, _, err) = run(&["check", &unbound]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("rho"), "{err}");

    let rel = scratch(
        "rel.htsl",
        "flavor: rel\nforall pi. forall pi2. G eq(x@pi, x@pi2)\n",
    );
    let (code, out, err) = run(&["check", &rel]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("OK"));
    let (code, _, err) = run(&["check", "--plain", &rel]);
    assert_eq!(code, 2);
    assert!(err.contains("flavor: rel"), "{err}");
}

#[test]
fn expand_reproduces_the_committed_machine() {
    let sym = fixture_path("auction/machine.sym.json");
    let (code, out, _) = run(&["expand", sym.to_str().unwrap()]);
    assert_eq!(code, 0);
    let committed = std::fs::read_to_string(fixture_path("auction/machine.json")).unwrap();
    let a = hypertsl_core::machine::MealyMachine::from_json(&out).unwrap();
    let b = hypertsl_core::machine::MealyMachine::from_json(&committed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn local_determinism_flag_decides_the_trio() {
    let trio = fixture_path("pseudo/trio.htsl");
    let (code, out, _) = run(&[
        "--format",
        "json",
        "pseudo",
        "--local-determinism",
        "--exhaustive",
        trio.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["total"], 4);
    assert_eq!(v["survivors"], serde_json::json!([1]));
}

#[test]
fn existential_files_go_through_the_unrealizability_check() {
    let c = fixture_path("pseudo/exists_contradiction.htsl");
    let (code, out, _) = run(&["pseudo", c.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "unrealizable"));
    let s = fixture_path("pseudo/exists_satisfiable.htsl");
    let (code, out, _) = run(&["pseudo", s.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("unknown"));
}
