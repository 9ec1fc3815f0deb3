//! Exact evaluation of TSL, HyperTSL, LTL and HyperLTL over lasso-shaped
//! executions and traces with finite interpretations.
//!
//! This is the reference oracle for every other module: nothing here is
//! symbolic, and temporal operators are decided by fixpoints over position
//! classes rather than by bounded unrolling.

mod interp;
pub mod lasso;
mod trace;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use interp::{Interpretation, Signature, Value};
pub use lasso::{eval_classes, Shape};
pub use trace::{eval_hyperltl, eval_ltl, LassoTrace, Valuation};

use crate::syntax::{
    parse_function_term, AtomTags, Flavor, FunctionTerm, HyperTslFormula, PredicateTerm, TraceVar,
    TslAtom, TslFormula, UpdateTerm,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("no table for function `{0}`")]
    UnknownFunction(String),
    #[error("no table for predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{name}` has arity {expected} but is used with {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a value of the domain")]
    UnknownValue(String),
    #[error("value index {0} lies outside the domain")]
    ValueOutOfDomain(usize),
    #[error("table for `{0}` is not total")]
    PartialTable(String),
    #[error("step {step} assigns no term to cell `{cell}`")]
    MissingCell { step: usize, cell: String },
    #[error("the loop of a lasso must be nonempty")]
    EmptyLoop,
    #[error("trace variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("cell values did not repeat within {0} steps")]
    NotPeriodic(usize),
    #[error("invalid fixture: {0}")]
    Fixture(String),
}

/// One step of a computation: the input valuation and the term assigned to
/// every cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Step {
    pub inputs: BTreeMap<String, Value>,
    pub cells: BTreeMap<String, FunctionTerm>,
}

/// An execution `stem · loop^ω` of steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoExecution {
    pub stem: Vec<Step>,
    pub loop_: Vec<Step>,
}

impl LassoExecution {
    pub fn new(stem: Vec<Step>, loop_: Vec<Step>) -> Result<Self, SemanticsError> {
        if loop_.is_empty() {
            return Err(SemanticsError::EmptyLoop);
        }
        Ok(LassoExecution { stem, loop_ })
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.stem.len(), self.loop_.len())
    }

    /// The step at position class `k`.
    pub fn class(&self, k: usize) -> &Step {
        if k < self.stem.len() {
            &self.stem[k]
        } else {
            &self.loop_[k - self.stem.len()]
        }
    }

    pub fn step(&self, t: usize) -> &Step {
        self.class(self.shape().class(t))
    }

    /// Checks that every step assigns a term to every cell of `interp`.
    pub fn validate(&self, interp: &Interpretation) -> Result<(), SemanticsError> {
        for (k, step) in self.stem.iter().chain(&self.loop_).enumerate() {
            for (cell, _) in interp.cells() {
                if !step.cells.contains_key(cell) {
                    return Err(SemanticsError::MissingCell {
                        step: k,
                        cell: cell.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Reads the JSON fixture format: `stem`/`loop` arrays of steps with
    /// `inputs` (value names) and `cells` (term strings).
    pub fn from_json(text: &str, interp: &Interpretation) -> Result<Self, SemanticsError> {
        let raw: ExecutionJson =
            serde_json::from_str(text).map_err(|e| SemanticsError::Fixture(e.to_string()))?;
        let step = |s: &StepJson| -> Result<Step, SemanticsError> {
            let inputs = s
                .inputs
                .iter()
                .map(|(k, v)| Ok((k.clone(), interp.value(v)?)))
                .collect::<Result<_, SemanticsError>>()?;
            let cells = s
                .cells
                .iter()
                .map(|(k, t)| {
                    parse_function_term(t)
                        .map(|t| (k.clone(), t))
                        .map_err(|e| SemanticsError::Fixture(e.to_string()))
                })
                .collect::<Result<_, _>>()?;
            Ok(Step { inputs, cells })
        };
        let stem = raw.stem.iter().map(step).collect::<Result<_, _>>()?;
        let loop_ = raw.loop_.iter().map(step).collect::<Result<_, _>>()?;
        LassoExecution::new(stem, loop_)
    }

    pub fn to_json(&self, interp: &Interpretation) -> String {
        let step = |s: &Step| StepJson {
            inputs: s
                .inputs
                .iter()
                .map(|(k, v)| (k.clone(), interp.name(*v).to_string()))
                .collect(),
            cells: s
                .cells
                .iter()
                .map(|(k, t)| (k.clone(), t.to_string()))
                .collect(),
        };
        let raw = ExecutionJson {
            stem: self.stem.iter().map(step).collect(),
            loop_: self.loop_.iter().map(step).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("executions serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    #[serde(default)]
    inputs: BTreeMap<String, String>,
    #[serde(default)]
    cells: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ExecutionJson {
    #[serde(default)]
    stem: Vec<StepJson>,
    #[serde(rename = "loop")]
    loop_: Vec<StepJson>,
}

/// Upper bound on simulated positions when searching for a repeated
/// configuration.
pub const DEFAULT_UNFOLD_CAP: usize = 1 << 20;

/// An execution simulated until its configuration (position class, cell
/// values) repeats, which makes the cell values themselves a lasso.
#[derive(Debug, Clone)]
pub struct Unfolded<'a> {
    exec: &'a LassoExecution,
    interp: &'a Interpretation,
    shape: Shape,
    classes: Vec<usize>,
    cells: Vec<String>,
    values: Vec<Vec<Value>>,
}

impl<'a> Unfolded<'a> {
    pub fn new(
        exec: &'a LassoExecution,
        interp: &'a Interpretation,
    ) -> Result<Self, SemanticsError> {
        Self::with_cap(exec, interp, DEFAULT_UNFOLD_CAP)
    }

    pub fn with_cap(
        exec: &'a LassoExecution,
        interp: &'a Interpretation,
        cap: usize,
    ) -> Result<Self, SemanticsError> {
        let cells: Vec<String> = interp.cells().map(|(c, _)| c.to_string()).collect();
        let mut vals: Vec<Value> = interp.cells().map(|(_, v)| v).collect();
        let eshape = exec.shape();
        let mut seen: HashMap<(usize, Vec<Value>), usize> = HashMap::new();
        let mut classes = Vec::new();
        let mut values = Vec::new();
        let mut class = 0;
        loop {
            let t = classes.len();
            if let Some(&first) = seen.get(&(class, vals.clone())) {
                return Ok(Unfolded {
                    exec,
                    interp,
                    shape: Shape::new(first, t - first),
                    classes,
                    cells,
                    values,
                });
            }
            if t >= cap {
                return Err(SemanticsError::NotPeriodic(cap));
            }
            seen.insert((class, vals.clone()), t);
            let step = exec.class(class);
            let mut next = Vec::with_capacity(cells.len());
            for c in &cells {
                let term = step
                    .cells
                    .get(c)
                    .ok_or_else(|| SemanticsError::MissingCell {
                        step: class,
                        cell: c.clone(),
                    })?;
                next.push(eval_with(interp, step, &cells, &vals, term)?);
            }
            classes.push(class);
            values.push(std::mem::replace(&mut vals, next));
            class = eshape.succ(class);
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn interp(&self) -> &Interpretation {
        self.interp
    }

    /// The step taken at unfolded position class `k`.
    pub fn step(&self, k: usize) -> &Step {
        self.exec.class(self.classes[k])
    }

    pub fn cell_value(&self, k: usize, cell: &str) -> Option<Value> {
        let idx = self.cells.iter().position(|c| c == cell)?;
        Some(self.values[k][idx])
    }

    /// η at position class `k`.
    pub fn term_at(&self, k: usize, term: &FunctionTerm) -> Result<Value, SemanticsError> {
        eval_with(
            self.interp,
            self.step(k),
            &self.cells,
            &self.values[k],
            term,
        )
    }

    pub fn predicate_at(&self, k: usize, p: &PredicateTerm) -> Result<bool, SemanticsError> {
        match p {
            PredicateTerm::Signal(s) => {
                let v = self.term_at(k, &FunctionTerm::Symbol(s.clone()))?;
                Ok(self.interp.is_true(v))
            }
            PredicateTerm::Apply { name, args } => {
                let vals = args
                    .iter()
                    .map(|a| self.term_at(k, a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.interp.apply_predicate(name, &vals)
            }
        }
    }

    /// Syntactic comparison of the term assigned to the cell with the update.
    pub fn update_at(&self, k: usize, u: &UpdateTerm) -> bool {
        self.step(k).cells.get(&u.cell) == Some(&u.source)
    }

    pub fn atom_at(&self, k: usize, a: &TslAtom) -> Result<bool, SemanticsError> {
        match a {
            TslAtom::Predicate(p) => self.predicate_at(k, p),
            TslAtom::Update(u) => Ok(self.update_at(k, u)),
        }
    }
}

fn eval_with(
    interp: &Interpretation,
    step: &Step,
    cells: &[String],
    vals: &[Value],
    term: &FunctionTerm,
) -> Result<Value, SemanticsError> {
    interp::apply_term(interp, term, &mut |s| {
        if let Some(i) = cells.iter().position(|c| c == s) {
            Ok(vals[i])
        } else {
            step.inputs
                .get(s)
                .copied()
                .ok_or_else(|| SemanticsError::UnknownSymbol(s.to_string()))
        }
    })
}

/// η(ς, ι, i, τ): the value of `term` at time `i`.
pub fn eval_term(
    e: &LassoExecution,
    interp: &Interpretation,
    i: usize,
    term: &FunctionTerm,
) -> Result<Value, SemanticsError> {
    let u = Unfolded::new(e, interp)?;
    u.term_at(u.shape().class(i), term)
}

/// Whether execution `e` satisfies `psi` at time `i`.
pub fn eval_tsl(
    e: &LassoExecution,
    interp: &Interpretation,
    i: usize,
    psi: &TslFormula,
) -> Result<bool, SemanticsError> {
    let u = Unfolded::new(e, interp)?;
    eval_unfolded(&u, i, psi)
}

/// [`eval_tsl`] on an already unfolded execution.
pub fn eval_unfolded(u: &Unfolded<'_>, i: usize, psi: &TslFormula) -> Result<bool, SemanticsError> {
    let shape = u.shape();
    let mut err = None;
    let v = eval_classes(psi, shape, &mut |a, k| {
        u.atom_at(k, a).unwrap_or_else(|e| {
            err.get_or_insert(e);
            false
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v[shape.class(i)]),
    }
}

/// Whether the execution set `execs` satisfies `phi`.
///
/// Quantifiers range over `execs`; in the rel flavor a predicate applies to
/// arguments evaluated on the executions named by their tags.
pub fn eval_hypertsl(
    execs: &[LassoExecution],
    interp: &Interpretation,
    phi: &HyperTslFormula,
) -> Result<bool, SemanticsError> {
    let unfolded = execs
        .iter()
        .map(|e| Unfolded::new(e, interp))
        .collect::<Result<Vec<_>, _>>()?;
    let mut asg = BTreeMap::new();
    trace::quantify(&phi.prefix, unfolded.len(), &mut asg, &mut |asg| {
        eval_hyper_body(&unfolded, asg, phi)
    })
}

fn eval_hyper_body(
    us: &[Unfolded<'_>],
    asg: &BTreeMap<TraceVar, usize>,
    phi: &HyperTslFormula,
) -> Result<bool, SemanticsError> {
    let shape = Shape::zip(&asg.values().map(|&j| us[j].shape()).collect::<Vec<_>>());
    let lookup = |v: &TraceVar| -> Result<&Unfolded<'_>, SemanticsError> {
        asg.get(v)
            .map(|&j| &us[j])
            .ok_or_else(|| SemanticsError::UnboundVariable(v.to_string()))
    };
    let leaf = |a: &crate::syntax::HyperTslAtom, t: usize| -> Result<bool, SemanticsError> {
        match (&a.tags, &a.atom) {
            (AtomTags::Single(v), atom) => {
                let u = lookup(v)?;
                u.atom_at(u.shape().class(t), atom)
            }
            (
                AtomTags::PerArgument(vs),
                TslAtom::Predicate(PredicateTerm::Apply { name, args }),
            ) if phi.flavor == Flavor::Rel && vs.len() == args.len() => {
                let vals = args
                    .iter()
                    .zip(vs)
                    .map(|(arg, v)| {
                        let u = lookup(v)?;
                        u.term_at(u.shape().class(t), arg)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let interp = us.first().map(|u| u.interp()).expect("nonempty set");
                interp.apply_predicate(name, &vals)
            }
            (AtomTags::PerArgument(_), _) => Err(SemanticsError::Fixture(format!(
                "per-argument tags on `{}` outside the rel flavor",
                a.atom
            ))),
        }
    };
    let mut err = None;
    let v = eval_classes(&phi.body, shape, &mut |a, t| {
        leaf(a, t).unwrap_or_else(|e| {
            err.get_or_insert(e);
            false
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v[0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_property, parse_tsl};

    fn term(s: &str) -> FunctionTerm {
        parse_function_term(s).unwrap()
    }

    fn counter(n: usize) -> Interpretation {
        let mut i = Interpretation::new(Interpretation::standard_domain(n)).unwrap();
        i.set_function("f", 1, move |a| Value((a[0].0 + 1) % n));
        i.set_function("g", 1, move |a| Value((a[0].0 + 1) % n));
        i.set_predicate("p", 1, |a| a[0].0 == 0);
        i.set_cell("c", Value(0));
        i
    }

    fn assign(cell: &str, t: &str) -> Step {
        Step {
            inputs: BTreeMap::new(),
            cells: [(cell.to_string(), term(t))].into(),
        }
    }

    #[test]
    fn eta_follows_the_recursion() {
        let i = counter(4);
        let e = LassoExecution::new(vec![], vec![assign("c", "f(c)")]).unwrap();
        assert_eq!(eval_term(&e, &i, 0, &term("c")).unwrap(), Value(0));
        assert_eq!(eval_term(&e, &i, 3, &term("c")).unwrap(), Value(3));
        assert_eq!(eval_term(&e, &i, 6, &term("c")).unwrap(), Value(2));
        let u = Unfolded::new(&e, &i).unwrap();
        assert_eq!(u.shape(), Shape::new(0, 4));
    }

    #[test]
    fn inputs_are_read_verbatim() {
        let i = counter(4);
        let mut s = assign("c", "c");
        s.inputs.insert("x".into(), Value(2));
        let e = LassoExecution::new(vec![], vec![s]).unwrap();
        assert_eq!(eval_term(&e, &i, 5, &term("x")).unwrap(), Value(2));
        assert!(matches!(
            eval_term(&e, &i, 0, &term("y")),
            Err(SemanticsError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn updates_compare_syntactically() {
        let i = counter(4);
        let e = LassoExecution::new(vec![], vec![assign("c", "g(c)")]).unwrap();
        assert!(!eval_tsl(&e, &i, 0, &parse_tsl("G [c <- f(c)]").unwrap()).unwrap());
        assert!(eval_tsl(&e, &i, 0, &parse_tsl("G [c <- g(c)]").unwrap()).unwrap());
    }

    #[test]
    fn predicates_follow_cell_values() {
        let i = counter(3);
        let e = LassoExecution::new(vec![], vec![assign("c", "f(c)")]).unwrap();
        let psi = parse_tsl("G F p(c) && p(c) && X !p(c) && X X X p(c)").unwrap();
        assert!(eval_tsl(&e, &i, 0, &psi).unwrap());
        assert!(!eval_tsl(&e, &i, 1, &parse_tsl("p(c)").unwrap()).unwrap());
    }

    #[test]
    fn hyper_quantifiers_and_rel_predicates() {
        let i = counter(4);
        let fast = LassoExecution::new(vec![], vec![assign("c", "f(c)")]).unwrap();
        let stay = LassoExecution::new(vec![], vec![assign("c", "c")]).unwrap();
        let phi = parse_property("forall p. forall q. G ([c <- c]@p <-> [c <- c]@q)").unwrap();
        assert!(eval_hypertsl(std::slice::from_ref(&stay), &i, &phi).unwrap());
        assert!(!eval_hypertsl(&[stay.clone(), fast.clone()], &i, &phi).unwrap());
        assert!(eval_hypertsl(&[], &i, &phi).unwrap());

        let mut i = i;
        i.set_predicate("eq", 2, |a| a[0] == a[1]);
        let rel = parse_property("flavor: rel\nexists p. exists q. X !eq(c@p, c@q)").unwrap();
        assert!(eval_hypertsl(&[stay.clone(), fast.clone()], &i, &rel).unwrap());
        assert!(!eval_hypertsl(&[stay], &i, &rel).unwrap());
    }

    #[test]
    fn execution_json_round_trip() {
        let i = counter(4);
        let mut s = assign("c", "f(c)");
        s.inputs.insert("x".into(), Value(1));
        let e = LassoExecution::new(vec![assign("c", "c")], vec![s]).unwrap();
        let text = e.to_json(&i);
        assert_eq!(LassoExecution::from_json(&text, &i).unwrap(), e);
    }

    #[test]
    fn missing_cell_assignment_is_reported() {
        let i = counter(4);
        let e = LassoExecution::new(vec![], vec![Step::default()]).unwrap();
        assert!(matches!(
            e.validate(&i),
            Err(SemanticsError::MissingCell { .. })
        ));
        assert!(Unfolded::new(&e, &i).is_err());
    }
}
