//! Command-line front end for the HyperTSL toolkit.
//!
//! Every command produces a [`Report`]: a JSON value for scripts, a text
//! rendering for people, and an [`Outcome`] that fixes the exit code.
//!
//! | exit | meaning |
//! |------|---------|
//! | 0 | positive answer: holds, pseudo, satisfiable, repaired, expectations met |
//! | 1 | negative answer: violated, not pseudo or unknown, unsatisfiable, no repair |
//! | 2 | error: unreadable input, parse or validation failure |

pub mod commands;
pub mod fixtures;
pub mod reproduce;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 1,
        }
    }
}

/// Exit code for errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub outcome: Outcome,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json value"),
            Format::Text => self.text.clone(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hypertsl",
    version,
    about = "HyperTSL approximation, pseudo checks and repair"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ApproxFlags {
    /// Do not add `[c <- c]` to the update terms of each cell.
    #[arg(long)]
    pub no_self_updates: bool,
}

impl ApproxFlags {
    pub fn options(&self) -> hypertsl_core::approx::ApproxOptions {
        hypertsl_core::approx::ApproxOptions {
            inject_self_updates: !self.no_self_updates,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate formula and machine files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Reject properties that use `flavor: rel`.
        #[arg(long)]
        plain: bool,
    },
    /// Print the LTL or HyperLTL approximation of a property.
    Approx {
        file: PathBuf,
        /// Machine whose terms join the update universe.
        #[arg(long)]
        machine: Option<PathBuf>,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Decide whether a property is a pseudo hyperproperty, or test an
    /// existential property for unrealizability.
    Pseudo {
        file: PathBuf,
        /// Trace specification conjoined for every trace variable.
        #[arg(long)]
        context: Option<PathBuf>,
        /// Decide realizability through positional strategies; the property
        /// must contain a local determinism conjunct.
        #[arg(long)]
        local_determinism: bool,
        /// Enumerate every positional strategy instead of stopping at the
        /// first one.
        #[arg(long, requires = "local_determinism")]
        exhaustive: bool,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Satisfiability of LTL, of ∃*∀* HyperLTL, or of the approximation of
    /// a TSL formula.
    Sat {
        file: PathBuf,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Check whether a machine satisfies a universal property.
    Models {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        property: PathBuf,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Resolve the free choices of a machine so that a universal property
    /// holds.
    Repair {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        property: PathBuf,
        /// Check every refinement and report each verdict.
        #[arg(long)]
        all: bool,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Refuse machines with more refinements than this.
        #[arg(long)]
        max_candidates: Option<usize>,
        #[command(flatten)]
        approx: ApproxFlags,
    },
    /// Evaluate a property on lasso executions under an interpretation.
    Eval {
        #[arg(long)]
        property: PathBuf,
        #[arg(long)]
        interp: PathBuf,
        /// One execution file per trace variable, in prefix order.
        #[arg(required = true)]
        executions: Vec<PathBuf>,
    },
    /// Expand a symbolic machine into explicit transitions.
    Expand { file: PathBuf },
    /// Rerun the repair tables on the bundled fixtures.
    Reproduce {
        #[arg(value_enum, default_value = "all")]
        table: reproduce::Table,
        /// Check every refinement of every cell.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Runs one command.
pub fn run(cli: &Cli) -> anyhow::Result<Report> {
    use commands::*;
    match &cli.command {
        Command::Check { files, plain } => check(files, *plain),
        Command::Approx {
            file,
            machine,
            approx,
        } => approx_cmd(file, machine.as_deref(), approx.options()),
        Command::Pseudo {
            file,
            context,
            local_determinism,
            exhaustive,
            approx,
        } => pseudo(
            file,
            context.as_deref(),
            *local_determinism,
            *exhaustive,
            approx.options(),
        ),
        Command::Sat { file, approx } => sat(file, approx.options()),
        Command::Models {
            machine,
            property,
            approx,
        } => models(machine, property, approx.options()),
        Command::Repair {
            machine,
            property,
            all,
            jobs,
            max_candidates,
            approx,
        } => repair_cmd(
            machine,
            property,
            hypertsl_core::machine::RepairOptions {
                mode: if *all {
                    hypertsl_core::machine::RepairMode::All
                } else {
                    hypertsl_core::machine::RepairMode::First
                },
                jobs: *jobs,
                max_candidates: *max_candidates,
            },
            approx.options(),
        ),
        Command::Eval {
            property,
            interp,
            executions,
        } => eval(property, interp, executions),
        Command::Expand { file } => expand(file),
        Command::Reproduce { table, all, jobs } => reproduce::run(*table, *all, *jobs),
    }
}
