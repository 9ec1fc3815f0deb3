//! Thin wrappers over the core operations.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use hypertsl_core::approx::{translate_hyper, translate_hyper_over, translate_tsl, ApproxOptions};
use hypertsl_core::automata::{ltl_sat, SatResult};
use hypertsl_core::machine::{
    self, canonical, MealyMachine, ModelsResult, RepairOptions, RepairOutcome, SymbolicMachine,
};
use hypertsl_core::pseudo::{
    check_exists_unrealizable, decide_exists_forall_sat, is_pseudo_hyperltl, is_pseudo_hypertsl,
    local_determinism_hypertsl, ExistsVerdict, HyperSat, LocalDeterminismOptions, PseudoVerdict,
};
use hypertsl_core::{
    eval_hypertsl, parse_hyperltl, parse_ltl, parse_property_file, parse_tsl, Flavor,
    HyperTslFormula, Interpretation, LassoExecution, LassoTrace, TslFormula,
};

use crate::{Outcome, Report};

/// What a file holds, judged by its extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Property,
    Tsl,
    Ltl,
    HyperLtl,
    Machine,
}

impl FileKind {
    pub fn of(path: &Path) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        Ok(match ext {
            "htsl" => FileKind::Property,
            "tsl" => FileKind::Tsl,
            "ltl" => FileKind::Ltl,
            "hltl" => FileKind::HyperLtl,
            "json" => FileKind::Machine,
            _ => bail!(
                "{}: unknown extension; expected .htsl, .tsl, .ltl, .hltl or .json",
                path.display()
            ),
        })
    }

    fn name(self) -> &'static str {
        match self {
            FileKind::Property => "property",
            FileKind::Tsl => "tsl",
            FileKind::Ltl => "ltl",
            FileKind::HyperLtl => "hyperltl",
            FileKind::Machine => "machine",
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn located<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T> {
    r.map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn load_property(path: &Path) -> Result<HyperTslFormula> {
    let text = read(path)?;
    located(path, parse_property_file(&text).and_then(|f| f.combined()))
}

pub fn load_tsl(path: &Path) -> Result<TslFormula> {
    located(path, parse_tsl(&read(path)?))
}

/// Loads an explicit machine, or expands a symbolic one.
pub fn load_machine(path: &Path) -> Result<MealyMachine> {
    let text = read(path)?;
    let symbolic = serde_json::from_str::<Value>(&text)
        .map(|v| v.get("edges").is_some())
        .unwrap_or(false);
    if symbolic {
        located(
            path,
            SymbolicMachine::from_json(&text).and_then(|s| s.expand()),
        )
    } else {
        located(path, MealyMachine::from_json(&text))
    }
}

fn traces_json(ts: &[LassoTrace]) -> Value {
    json!(ts)
}

fn traces_text(out: &mut String, ts: &[LassoTrace]) {
    for (j, t) in ts.iter().enumerate() {
        let _ = writeln!(out, "  trace {}: {t}", j + 1);
    }
}

pub fn check(files: &[impl AsRef<Path>], plain: bool) -> Result<Report> {
    let mut entries = Vec::new();
    let mut text = String::new();
    for f in files {
        let path = f.as_ref();
        let kind = FileKind::of(path)?;
        let src = read(path)?;
        let mut warnings = Vec::new();
        let detail = match kind {
            FileKind::Property => {
                let file = located(path, parse_property_file(&src))?;
                if plain && file.flavor == Flavor::Rel {
                    bail!("{}: uses `flavor: rel`", path.display());
                }
                located(path, file.combined())?.to_string()
            }
            FileKind::Tsl => located(path, parse_tsl(&src))?.to_string(),
            FileKind::Ltl => located(path, parse_ltl(&src))?.to_string(),
            FileKind::HyperLtl => located(path, parse_hyperltl(&src))?.to_string(),
            FileKind::Machine => {
                let m = load_machine(path)?;
                warnings = m
                    .unreachable_states()
                    .into_iter()
                    .map(|s| format!("state `{s}` is unreachable"))
                    .collect();
                format!(
                    "{} states, {} transitions, {} free choices",
                    m.states.len(),
                    m.transitions.len(),
                    m.free_choices().len()
                )
            }
        };
        let _ = writeln!(text, "{}: OK ({}) {detail}", path.display(), kind.name());
        for w in &warnings {
            let _ = writeln!(text, "  warning: {w}");
        }
        entries.push(json!({
            "file": path.display().to_string(),
            "kind": kind.name(),
            "detail": detail,
            "warnings": warnings,
        }));
    }
    Ok(Report {
        json: json!({ "ok": true, "files": entries }),
        text,
        outcome: Outcome::Positive,
    })
}

pub fn approx_cmd(file: &Path, machine: Option<&Path>, opts: ApproxOptions) -> Result<Report> {
    let (input, output) = match FileKind::of(file)? {
        FileKind::Property => {
            let phi = load_property(file)?;
            let out = match machine {
                Some(m) => translate_hyper_over(&phi, &load_machine(m)?.terms(), opts)?,
                None => translate_hyper(&phi, opts)?,
            };
            (phi.to_string(), out.to_string())
        }
        FileKind::Tsl => {
            let psi = load_tsl(file)?;
            (psi.to_string(), translate_tsl(&psi, opts)?.to_string())
        }
        _ => bail!("{}: approx expects a .htsl or .tsl file", file.display()),
    };
    Ok(Report {
        text: format!("{output}\n"),
        json: json!({ "input": input, "approximation": output }),
        outcome: Outcome::Positive,
    })
}

pub fn pseudo(
    file: &Path,
    context: Option<&Path>,
    local_determinism: bool,
    exhaustive: bool,
    opts: ApproxOptions,
) -> Result<Report> {
    if FileKind::of(file)? == FileKind::HyperLtl {
        let phi = located(file, parse_hyperltl(&read(file)?))?;
        let v = is_pseudo_hyperltl(&phi)?;
        let mut text = format!("hyperltl: {}\n", v.name());
        let detail = match &v {
            PseudoVerdict::Pseudo(f) => {
                let _ = writeln!(text, "  equivalent to {f}");
                json!({ "collapsed": f.to_string() })
            }
            PseudoVerdict::NotPseudo(ws) => {
                traces_text(&mut text, ws);
                json!({ "witnesses": traces_json(ws) })
            }
            PseudoVerdict::Unknown => Value::Null,
        };
        return Ok(Report {
            json: json!({ "hyperltl": { "verdict": v.name(), "detail": detail } }),
            text,
            outcome: Outcome::from_bool(v.is_pseudo()),
        });
    }
    let phi = load_property(file)?;
    if phi.is_existential() && !phi.prefix.is_empty() && !local_determinism {
        let v = check_exists_unrealizable(&phi, opts)?;
        let (name, text, detail) = match &v {
            ExistsVerdict::Unrealizable => {
                ("unrealizable", "unrealizable\n".to_string(), Value::Null)
            }
            ExistsVerdict::Unknown(w) => (
                "unknown",
                format!("unknown: the approximation has a model\n  {w}\n"),
                json!(w),
            ),
        };
        return Ok(Report {
            json: json!({ "verdict": name, "model": detail }),
            text,
            outcome: Outcome::from_bool(v == ExistsVerdict::Unrealizable),
        });
    }
    if local_determinism {
        let d = local_determinism_hypertsl(
            &phi,
            opts,
            LocalDeterminismOptions {
                exhaustive,
                ..Default::default()
            },
        )?;
        let mut text = format!(
            "{} of {} positional strategies checked\n",
            d.checked, d.total
        );
        match &d.strategy {
            Some(s) => {
                let _ = writeln!(text, "realizable by the positional strategy:\n{s}");
                if exhaustive {
                    let _ = writeln!(text, "survivors: {:?}", d.survivors);
                }
            }
            None => text.push_str("no positional strategy: unrealizable\n"),
        }
        return Ok(Report {
            json: json!(d),
            text,
            outcome: Outcome::from_bool(d.strategy.is_some()),
        });
    }
    let ctx = context.map(load_tsl).transpose()?;
    let r = is_pseudo_hypertsl(&phi, ctx.as_ref(), opts)?;
    let mut text = format!("hypertsl: {}\nhyperltl: {}\n", r.tsl.name(), r.ltl.name());
    let tsl_detail = match &r.tsl {
        PseudoVerdict::Pseudo(f) => {
            let _ = writeln!(text, "  may be replaced by {f}");
            json!({ "collapsed": f.to_string() })
        }
        _ => Value::Null,
    };
    let ltl_detail = match &r.ltl {
        PseudoVerdict::NotPseudo(ws) => {
            text.push_str("  witness set for the approximation:\n");
            traces_text(&mut text, ws);
            json!({ "witnesses": traces_json(ws) })
        }
        PseudoVerdict::Pseudo(f) => json!({ "collapsed": f.to_string() }),
        PseudoVerdict::Unknown => Value::Null,
    };
    Ok(Report {
        json: json!({
            "checked": r.checked.to_string(),
            "translated": r.translated.to_string(),
            "hypertsl": { "verdict": r.tsl.name(), "detail": tsl_detail },
            "hyperltl": { "verdict": r.ltl.name(), "detail": ltl_detail },
        }),
        text,
        outcome: Outcome::from_bool(r.tsl.is_pseudo()),
    })
}

fn sat_report(result: SatResult) -> Report {
    match result {
        SatResult::Sat(w) => Report {
            text: format!("sat\n  {w}\n"),
            json: json!({ "result": "sat", "witness": w }),
            outcome: Outcome::Positive,
        },
        SatResult::Unsat => Report {
            text: "unsat\n".into(),
            json: json!({ "result": "unsat" }),
            outcome: Outcome::Negative,
        },
    }
}

pub fn sat(file: &Path, opts: ApproxOptions) -> Result<Report> {
    let src = read(file)?;
    Ok(match FileKind::of(file)? {
        FileKind::Ltl => sat_report(ltl_sat(&located(file, parse_ltl(&src))?)),
        FileKind::Tsl => {
            let psi = located(file, parse_tsl(&src))?;
            sat_report(ltl_sat(&translate_tsl(&psi, opts)?))
        }
        FileKind::HyperLtl => {
            match decide_exists_forall_sat(&located(file, parse_hyperltl(&src))?)? {
                HyperSat::Sat(ws) => {
                    let mut text = "sat\n".to_string();
                    traces_text(&mut text, &ws);
                    Report {
                        text,
                        json: json!({ "result": "sat", "witnesses": ws }),
                        outcome: Outcome::Positive,
                    }
                }
                HyperSat::Unsat => Report {
                    text: "unsat\n".into(),
                    json: json!({ "result": "unsat" }),
                    outcome: Outcome::Negative,
                },
            }
        }
        _ => bail!("{}: sat expects a .ltl, .hltl or .tsl file", file.display()),
    })
}

pub fn models(machine_file: &Path, property: &Path, opts: ApproxOptions) -> Result<Report> {
    let m = load_machine(machine_file)?;
    let phi = load_property(property)?;
    let r = machine::check_models_tsl(&m, &phi, opts)?;
    let mut text = String::new();
    match &r {
        ModelsResult::Holds => text.push_str("holds\n"),
        ModelsResult::Violated(ts) => {
            text.push_str("violated\n");
            traces_text(&mut text, ts);
        }
    }
    Ok(Report {
        json: json!(r),
        text,
        outcome: Outcome::from_bool(r.holds()),
    })
}

pub fn repair_cmd(
    machine_file: &Path,
    property: &Path,
    opts: RepairOptions,
    approx: ApproxOptions,
) -> Result<Report> {
    let m = load_machine(machine_file)?;
    let phi = load_property(property)?;
    let started = std::time::Instant::now();
    let r = machine::repair_tsl(&m, &phi, approx, opts)?;
    let millis = started.elapsed().as_millis();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "free choices: {}, candidates: {}, tried: {}, model-checker calls: {}, {millis} ms",
        r.free_choices.len(),
        r.candidates_total,
        r.candidates_tried,
        r.mc_calls
    );
    let repaired = match &r.outcome {
        RepairOutcome::AlreadyHolds => {
            text.push_str("the machine already satisfies the property\n");
            None
        }
        RepairOutcome::NoRepair => {
            text.push_str("no refinement satisfies the property\n");
            None
        }
        RepairOutcome::Repaired {
            index,
            picks,
            machine,
        } => {
            let _ = writeln!(text, "repaired by refinement #{index}:");
            for (c, &p) in r.free_choices.iter().zip(picks) {
                let t = &machine_transition(&m, c.options[p]);
                let _ = writeln!(
                    text,
                    "  in {} on {}: {}",
                    m.states[c.state],
                    canonical(&c.input),
                    t
                );
            }
            Some(machine)
        }
    };
    if !r.verdicts.is_empty() {
        let _ = writeln!(text, "passing refinements: {:?}", r.passing());
    }
    let mut stats = json!(r);
    stats["millis"] = json!(millis);
    stats["passing"] = json!(r.passing());
    let machine_json: Value = repaired
        .map(|m| serde_json::from_str(&m.to_json()).expect("machine JSON"))
        .unwrap_or(Value::Null);
    Ok(Report {
        json: json!({ "stats": stats, "machine": machine_json }),
        text,
        outcome: Outcome::from_bool(!matches!(r.outcome, RepairOutcome::NoRepair)),
    })
}

fn machine_transition(m: &MealyMachine, i: usize) -> String {
    let t = &m.transitions[i];
    format!("{} -> {}", canonical(&t.output()), m.states[t.to])
}

pub fn eval(property: &Path, interp: &Path, executions: &[impl AsRef<Path>]) -> Result<Report> {
    let phi = load_property(property)?;
    let i = located(interp, Interpretation::from_json(&read(interp)?))?;
    let execs = executions
        .iter()
        .map(|p| {
            let p = p.as_ref();
            located(p, LassoExecution::from_json(&read(p)?, &i))
        })
        .collect::<Result<Vec<_>>>()?;
    let b = eval_hypertsl(&execs, &i, &phi)?;
    Ok(Report {
        text: format!("{b}\n"),
        json: json!({ "value": b }),
        outcome: Outcome::from_bool(b),
    })
}

pub fn expand(file: &Path) -> Result<Report> {
    let m = load_machine(file)?;
    let text = m.to_json() + "\n";
    Ok(Report {
        json: serde_json::from_str(&text)?,
        text,
        outcome: Outcome::Positive,
    })
}
