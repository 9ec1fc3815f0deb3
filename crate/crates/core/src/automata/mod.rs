//! LTL to Büchi translation, emptiness, satisfiability and model checking.

mod buchi;
mod ndfs;
mod nnf;
mod tableau;

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

pub use buchi::{intersect, is_empty, ltl_to_buchi, BuchiAutomaton, Emptiness};

use crate::semantics::{LassoTrace, Valuation};
use crate::syntax::{Ap, LtlFormula};
use ndfs::{find_accepting_run, Graph};
use nnf::Arena;
use tableau::{DNode, GuardId, Tableau};

/// A lasso found by the engine; it always satisfies the formula it witnesses.
pub type LassoWitness = LassoTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("state `{0}` has no outgoing transition")]
    DeadEnd(String),
    #[error("proposition `{0}` is not in the universe")]
    OutsideUniverse(Ap),
}

/// Result of an LTL satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(LassoWitness),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

struct SatGraph<'a> {
    t: &'a mut Tableau,
}

impl Graph for SatGraph<'_> {
    type Node = DNode;
    type Edge = GuardId;

    fn initial(&mut self) -> Vec<DNode> {
        vec![self.t.initial()]
    }

    fn successors(&mut self, n: &DNode) -> Vec<(GuardId, DNode)> {
        let ts = self.t.transitions(n.0);
        ts.iter()
            .map(|tr| (tr.guard, (tr.next, self.t.step(n.1, tr))))
            .collect()
    }

    fn accepting(&self, n: &DNode) -> bool {
        self.t.accepting(*n)
    }
}

fn tableau_of(psi: &LtlFormula, negate: bool) -> Tableau {
    let mut arena = Arena::new();
    let root = arena.build(psi, !negate);
    Tableau::new(arena, root)
}

/// Decides satisfiability of `psi`; a witness assigns false to every
/// proposition its guards leave open.
pub fn ltl_sat(psi: &LtlFormula) -> SatResult {
    let mut t = tableau_of(psi, false);
    let run = find_accepting_run(&mut SatGraph { t: &mut t });
    match run {
        None => SatResult::Unsat,
        Some(run) => {
            let label = |g: GuardId| -> Valuation {
                let m = t
                    .arena
                    .model(t.guard(g))
                    .expect("guards on runs are satisfiable");
                t.arena
                    .aps()
                    .iter()
                    .zip(m)
                    .filter(|(_, v)| *v)
                    .map(|(a, _)| a.clone())
                    .collect()
            };
            SatResult::Sat(LassoTrace {
                stem: run.stem.iter().map(|(_, g)| label(*g)).collect(),
                loop_: run.cycle.iter().map(|(_, g)| label(*g)).collect(),
            })
        }
    }
}

/// A labelled transition system whose edges carry full valuations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lts {
    pub names: Vec<String>,
    pub initial: usize,
    pub labels: Vec<Valuation>,
    /// Per state, the outgoing edges as (label index, target).
    pub edges: Vec<Vec<(usize, usize)>>,
    label_index: HashMap<Valuation, usize>,
}

impl Lts {
    pub fn new() -> Self {
        Lts::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.edges.push(Vec::new());
        self.names.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, label: Valuation, to: usize) {
        let id = match self.label_index.get(&label) {
            Some(&i) => i,
            None => {
                self.labels.push(label.clone());
                self.label_index.insert(label, self.labels.len() - 1);
                self.labels.len() - 1
            }
        };
        if !self.edges[from].contains(&(id, to)) {
            self.edges[from].push((id, to));
        }
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// A system with exactly one path, labelled by the lasso `t`.
    pub fn from_lasso(t: &LassoTrace) -> Lts {
        let mut k = Lts::new();
        let n = t.stem.len() + t.loop_.len();
        for i in 0..n {
            k.add_state(format!("t{i}"));
        }
        for i in 0..n {
            let to = if i + 1 < n { i + 1 } else { t.stem.len() };
            k.add_edge(i, t.class(i).clone(), to);
        }
        k
    }

    /// A one-state system allowing every valuation over `aps`.
    pub fn universal(aps: &[Ap]) -> Lts {
        let mut k = Lts::new();
        k.add_state("all");
        for bits in 0..(1u64 << aps.len()) {
            let v = aps
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            k.add_edge(0, v, 0);
        }
        k
    }

    /// The `k`-fold synchronous product, restricted to reachable tuples.
    ///
    /// Each product edge is labelled by the union of the component labels,
    /// component `j` contributing its propositions accepted by `keep` with
    /// copy index `j + 1`.
    pub fn self_compose(&self, k: usize, keep: &dyn Fn(&Ap) -> bool) -> Lts {
        let copied: Vec<Vec<Valuation>> = (1..=k as u32)
            .map(|j| {
                self.labels
                    .iter()
                    .map(|l| {
                        l.iter()
                            .filter(|a| keep(a))
                            .map(|a| a.with_copy(j))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut out = Lts::new();
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let start = vec![self.initial; k];
        let name = |t: &[usize]| {
            let parts: Vec<&str> = t.iter().map(|&s| self.names[s].as_str()).collect();
            format!("({})", parts.join(","))
        };
        ids.insert(start.clone(), out.add_state(name(&start)));
        out.initial = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(tuple) = queue.pop_front() {
            let from = ids[&tuple];
            let mut choice = vec![0usize; k];
            if tuple.iter().any(|&s| self.edges[s].is_empty()) {
                continue;
            }
            loop {
                let mut label = Valuation::new();
                let mut next = Vec::with_capacity(k);
                for (j, &s) in tuple.iter().enumerate() {
                    let (l, t) = self.edges[s][choice[j]];
                    label.extend(copied[j][l].iter().cloned());
                    next.push(t);
                }
                let to = match ids.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = out.add_state(name(&next));
                        ids.insert(next.clone(), i);
                        queue.push_back(next);
                        i
                    }
                };
                out.add_edge(from, label, to);
                if !advance(&mut choice, |j| self.edges[tuple[j]].len()) {
                    break;
                }
            }
        }
        out
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut queue = VecDeque::new();
        if self.state_count() > 0 {
            seen[self.initial] = true;
            queue.push_back(self.initial);
        }
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.edges[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    fn check_dead_ends(&self) -> Result<(), AutomataError> {
        for (s, r) in self.reachable().into_iter().enumerate() {
            if r && self.edges[s].is_empty() {
                return Err(AutomataError::DeadEnd(self.names[s].clone()));
            }
        }
        Ok(())
    }
}

/// Steps a mixed-radix counter whose last digit varies fastest; false once it
/// wraps around.
pub(crate) fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for j in (0..digits.len()).rev() {
        digits[j] += 1;
        if digits[j] < radix(j) {
            return true;
        }
        digits[j] = 0;
    }
    false
}

/// A path of an [`Lts`] violating the checked formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trace: LassoTrace,
    pub stem_states: Vec<usize>,
    pub loop_states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McResult {
    Holds,
    Violated(Counterexample),
}

impl McResult {
    pub fn holds(&self) -> bool {
        matches!(self, McResult::Holds)
    }
}

/// The automaton of a negated formula, reusable across systems.
///
/// Tableau states and guard evaluations are cached; cloning a checker copies
/// the caches, which suits one checker per worker thread.
#[derive(Debug, Clone)]
pub struct ModelChecker {
    neg: Tableau,
}

struct ProductGraph<'a> {
    t: &'a mut Tableau,
    k: &'a Lts,
    label_bits: Vec<Option<Vec<bool>>>,
    guard_cache: HashMap<(GuardId, usize), bool>,
}

impl ProductGraph<'_> {
    fn guard_holds(&mut self, g: GuardId, label: usize) -> bool {
        if let Some(&b) = self.guard_cache.get(&(g, label)) {
            return b;
        }
        let bits = self.label_bits[label].get_or_insert_with(|| {
            let mut v = vec![false; self.t.arena.aps().len()];
            for a in &self.k.labels[label] {
                if let Some(i) = self.t.arena.ap_id(a) {
                    v[i as usize] = true;
                }
            }
            v
        });
        let b = self.t.guard(g).iter().all(|&n| self.t.arena.eval(n, bits));
        self.guard_cache.insert((g, label), b);
        b
    }
}

impl Graph for ProductGraph<'_> {
    type Node = (usize, DNode);
    type Edge = usize;

    fn initial(&mut self) -> Vec<Self::Node> {
        vec![(self.k.initial, self.t.initial())]
    }

    fn successors(&mut self, n: &Self::Node) -> Vec<(usize, Self::Node)> {
        let (s, (q, c)) = *n;
        let ts = self.t.transitions(q);
        let mut out = Vec::new();
        for &(label, to) in &self.k.edges[s] {
            for tr in ts.iter() {
                if self.guard_holds(tr.guard, label) {
                    out.push((label, (to, (tr.next, self.t.step(c, tr)))));
                }
            }
        }
        out
    }

    fn accepting(&self, n: &Self::Node) -> bool {
        self.t.accepting(n.1)
    }
}

impl ModelChecker {
    pub fn new(psi: &LtlFormula) -> Self {
        ModelChecker {
            neg: tableau_of(psi, true),
        }
    }

    /// Whether every infinite path of `k` satisfies the formula.
    pub fn check(&mut self, k: &Lts) -> Result<McResult, AutomataError> {
        k.check_dead_ends()?;
        let mut g = ProductGraph {
            t: &mut self.neg,
            k,
            label_bits: vec![None; k.labels.len()],
            guard_cache: HashMap::new(),
        };
        let Some(run) = find_accepting_run(&mut g) else {
            return Ok(McResult::Holds);
        };
        let trace = LassoTrace {
            stem: run.stem.iter().map(|(_, l)| k.labels[*l].clone()).collect(),
            loop_: run
                .cycle
                .iter()
                .map(|(_, l)| k.labels[*l].clone())
                .collect(),
        };
        Ok(McResult::Violated(Counterexample {
            trace,
            stem_states: run.stem.iter().map(|(n, _)| n.0).collect(),
            loop_states: run.cycle.iter().map(|(n, _)| n.0).collect(),
        }))
    }

    /// Number of tableau states explored so far.
    pub fn explored_states(&self) -> usize {
        self.neg.state_count()
    }
}

/// Whether every infinite path of `k` satisfies `psi`.
pub fn model_check(k: &Lts, psi: &LtlFormula) -> Result<McResult, AutomataError> {
    ModelChecker::new(psi).check(k)
}

/// Whether the lasso `t` satisfies `psi`, decided on the automaton side.
pub fn accepts(psi: &LtlFormula, t: &LassoTrace) -> bool {
    let mut pos = tableau_of(psi, false);
    let k = Lts::from_lasso(t);
    let mut g = ProductGraph {
        t: &mut pos,
        k: &k,
        label_bits: vec![None; k.labels.len()],
        guard_cache: HashMap::new(),
    };
    find_accepting_run(&mut g).is_some()
}

/// Propositions of `psi`, sorted.
pub fn formula_aps(psi: &LtlFormula) -> BTreeSet<Ap> {
    psi.atoms().into_iter().cloned().collect()
}
