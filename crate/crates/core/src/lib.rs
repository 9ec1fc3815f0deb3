//! Specification analysis for smart-contract control flows described in TSL
//! and HyperTSL.

pub mod approx;
pub mod automata;
pub mod gen;
pub mod machine;
pub mod pseudo;
pub mod semantics;
pub mod syntax;

pub use semantics::{
    eval_hyperltl, eval_hypertsl, eval_ltl, eval_term, eval_tsl, Interpretation, LassoExecution,
    LassoTrace, SemanticsError, Signature, Step, Unfolded, Valuation, Value,
};
pub use syntax::*;
