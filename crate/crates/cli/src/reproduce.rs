//! Reruns the repair tables on the bundled fixtures and compares the
//! structural figures with the expected ones.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use hypertsl_core::approx::ApproxOptions;
use hypertsl_core::machine::{repair_tsl, RepairMode, RepairOptions, RepairOutcome};

use crate::fixtures::{MachineFixture, AUCTION, AUCTION_CHOICE_STATES, CONJUNCTION, VOTING};
use crate::{Outcome, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    /// The voting variants against seven properties.
    Voting,
    /// The blind auction.
    Auction,
    All,
}

/// One (machine, property) cell.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub machine: String,
    pub property: String,
    pub outcome: String,
    pub repaired: bool,
    pub free_choices: usize,
    pub candidates_total: usize,
    pub candidates_tried: usize,
    pub mc_calls: usize,
    /// Passing refinements; present when every refinement was checked.
    pub passing: Option<Vec<usize>>,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expectation {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub table: &'static str,
    pub cells: Vec<Cell>,
    pub expectations: Vec<Expectation>,
    pub millis: u128,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.expectations.iter().all(|e| e.ok)
    }

    pub fn cell(&self, machine: &str, property: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.machine == machine && c.property == property)
    }

    pub fn render(&self) -> String {
        let mut s = format!("{} table\n", self.table);
        let _ = writeln!(
            s,
            "{:<34} {:<14} {:>7} {:>6} {:>6} {:>6} {:>9}  outcome",
            "property", "machine", "choices", "total", "tried", "calls", "ms"
        );
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{:<34} {:<14} {:>7} {:>6} {:>6} {:>6} {:>9}  {}",
                c.property,
                c.machine,
                c.free_choices,
                c.candidates_total,
                c.candidates_tried,
                c.mc_calls,
                c.millis,
                c.outcome
            );
        }
        for e in &self.expectations {
            let _ = writeln!(
                s,
                "[{}] {}: {}",
                if e.ok { "ok" } else { "FAIL" },
                e.name,
                e.detail
            );
        }
        let _ = writeln!(s, "total {} ms", self.millis);
        s
    }
}

fn run_cell(
    fixture: &MachineFixture,
    property: &crate::fixtures::PropertyFixture,
    mode: RepairMode,
    jobs: Option<usize>,
) -> Result<Cell> {
    let m = fixture.machine()?;
    let phi = property.formula()?;
    let started = Instant::now();
    let r = repair_tsl(
        &m,
        &phi,
        ApproxOptions::default(),
        RepairOptions {
            mode,
            jobs,
            max_candidates: None,
        },
    )?;
    let outcome = match &r.outcome {
        RepairOutcome::AlreadyHolds => "already holds".to_string(),
        RepairOutcome::NoRepair => "no repair".to_string(),
        RepairOutcome::Repaired { index, .. } => format!("repaired by #{index}"),
    };
    Ok(Cell {
        machine: fixture.label.into(),
        property: property.label.into(),
        repaired: matches!(r.outcome, RepairOutcome::Repaired { .. }),
        outcome,
        free_choices: r.free_choices.len(),
        candidates_total: r.candidates_total,
        candidates_tried: r.candidates_tried,
        mc_calls: r.mc_calls,
        passing: (mode == RepairMode::All).then(|| r.passing()),
        millis: started.elapsed().as_millis(),
    })
}

fn expect(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Expectation {
    Expectation {
        name: name.into(),
        ok,
        detail: detail.into(),
    }
}

/// The voting table: every voting variant against every property. The conjunction on
/// "+ owner" is always run in exhaustive mode.
pub fn table_one(all: bool, jobs: Option<usize>) -> Result<TableReport> {
    let started = Instant::now();
    let mut cells = Vec::new();
    let mut expectations = Vec::new();
    for v in &VOTING {
        let choices = v.machine()?.free_choices().len();
        expectations.push(expect(
            format!("free choices of {}", v.label),
            choices == v.expected_choices,
            format!("{choices} (expected {})", v.expected_choices),
        ));
        for p in v.properties {
            let exhaustive = all || (v.label == "+ owner" && p.label == CONJUNCTION);
            let mode = if exhaustive {
                RepairMode::All
            } else {
                RepairMode::First
            };
            cells.push(run_cell(v, p, mode, jobs)?);
        }
    }
    let unrepaired: Vec<String> = cells
        .iter()
        .filter(|c| !c.repaired)
        .map(|c| format!("{} / {}: {}", c.property, c.machine, c.outcome))
        .collect();
    expectations.push(expect(
        "every cell is repaired",
        unrepaired.is_empty(),
        if unrepaired.is_empty() {
            format!("{} cells", cells.len())
        } else {
            unrepaired.join("; ")
        },
    ));
    let conj = cells
        .iter()
        .find(|c| c.machine == "+ owner" && c.property == CONJUNCTION)
        .expect("conjunction cell");
    expectations.push(expect(
        "candidates for the conjunction on + owner",
        conj.candidates_total == 256,
        format!("{} (expected 256)", conj.candidates_total),
    ));
    let passing = conj.passing.clone().unwrap_or_default();
    expectations.push(expect(
        "unique repair of the conjunction on + owner",
        passing.len() == 1,
        format!("passing refinements {passing:?}"),
    ));
    Ok(TableReport {
        table: "voting",
        cells,
        expectations,
        millis: started.elapsed().as_millis(),
    })
}

/// The auction table: the blind auction against both local properties.
pub fn table_two(all: bool, jobs: Option<usize>) -> Result<TableReport> {
    let started = Instant::now();
    let m = AUCTION.machine()?;
    let fc = m.free_choices();
    let nodes: BTreeSet<usize> = fc.iter().map(|c| c.state).collect();
    let mut expectations = vec![expect(
        "states with free choices",
        nodes.len() == AUCTION_CHOICE_STATES,
        format!(
            "{} states ({}), {} choices",
            nodes.len(),
            nodes
                .iter()
                .map(|&s| m.states[s].as_str())
                .collect::<Vec<_>>()
                .join(", "),
            fc.len()
        ),
    )];
    let mode = if all {
        RepairMode::All
    } else {
        RepairMode::First
    };
    let cells = AUCTION
        .properties
        .iter()
        .map(|p| run_cell(&AUCTION, p, mode, jobs))
        .collect::<Result<Vec<_>>>()?;
    for c in &cells {
        expectations.push(expect(
            format!("{} is repaired", c.property),
            c.repaired,
            c.outcome.clone(),
        ));
    }
    Ok(TableReport {
        table: "auction",
        cells,
        expectations,
        millis: started.elapsed().as_millis(),
    })
}

pub fn run(table: Table, all: bool, jobs: Option<usize>) -> Result<Report> {
    let mut reports = Vec::new();
    if matches!(table, Table::Voting | Table::All) {
        reports.push(table_one(all, jobs)?);
    }
    if matches!(table, Table::Auction | Table::All) {
        reports.push(table_two(all, jobs)?);
    }
    let ok = reports.iter().all(TableReport::ok);
    Ok(Report {
        text: reports
            .iter()
            .map(TableReport::render)
            .collect::<Vec<_>>()
            .join("\n"),
        json: json!({ "ok": ok, "tables": reports }),
        outcome: Outcome::from_bool(ok),
    })
}
