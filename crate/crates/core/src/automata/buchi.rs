//! Explicit nondeterministic Büchi automata with propositional edge guards.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use super::ndfs::{find_accepting_run, Graph};
use super::tableau::DNode;
use super::{tableau_of, AutomataError, LassoWitness};
use crate::semantics::LassoTrace;
use crate::syntax::{Ap, Formula, LtlFormula};

/// A Büchi automaton over valuations of `universe`.
///
/// Guards are propositional formulas over universe indices; an edge fires on
/// every valuation satisfying its guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub universe: Vec<Ap>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub transitions: Vec<Vec<(Formula<usize>, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Nonempty(LassoWitness),
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    /// The automaton accepting exactly the word of `t`, read over `universe`.
    pub fn from_lasso(t: &LassoTrace, universe: &[Ap]) -> BuchiAutomaton {
        let n = t.stem.len() + t.loop_.len();
        let minterm = |k: usize| {
            let v = t.class(k);
            Formula::conj((0..universe.len()).map(|i| {
                if v.contains(&universe[i]) {
                    Formula::atom(i)
                } else {
                    Formula::not(Formula::atom(i))
                }
            }))
        };
        BuchiAutomaton {
            universe: universe.to_vec(),
            initial: vec![0],
            accepting: vec![true; n],
            transitions: (0..n)
                .map(|k| vec![(minterm(k), if k + 1 < n { k + 1 } else { t.stem.len() })])
                .collect(),
        }
    }

    /// Whether the automaton accepts the word of `t`.
    pub fn accepts(&self, t: &LassoTrace) -> bool {
        let word = BuchiAutomaton::from_lasso(t, &self.universe);
        !matches!(is_empty(&intersect(self, &word)), Emptiness::Empty)
    }

    /// The automaton in the HOA text format.
    pub fn to_hoa(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "HOA: v1");
        let _ = writeln!(out, "name: {:?}", name);
        let _ = writeln!(out, "States: {}", self.state_count());
        for i in &self.initial {
            let _ = writeln!(out, "Start: {i}");
        }
        let _ = write!(out, "AP: {}", self.universe.len());
        for a in &self.universe {
            let _ = write!(out, " {:?}", a.to_string());
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "acc-name: Buchi");
        let _ = writeln!(out, "Acceptance: 1 Inf(0)");
        let _ = writeln!(out, "--BODY--");
        for (s, edges) in self.transitions.iter().enumerate() {
            if self.accepting[s] {
                let _ = writeln!(out, "State: {s} {{0}}");
            } else {
                let _ = writeln!(out, "State: {s}");
            }
            for (g, t) in edges {
                let _ = writeln!(out, "[{}] {t}", hoa_guard(g));
            }
        }
        let _ = writeln!(out, "--END--");
        out
    }
}

fn hoa_guard(g: &Formula<usize>) -> String {
    match g {
        Formula::True => "t".into(),
        Formula::False => "f".into(),
        Formula::Atom(i) => i.to_string(),
        Formula::Not(a) => format!("!{}", hoa_guard(a)),
        Formula::And(a, b) => format!("({} & {})", hoa_guard(a), hoa_guard(b)),
        Formula::Or(a, b) => format!("({} | {})", hoa_guard(a), hoa_guard(b)),
        other => hoa_guard(&desugar_propositional(other)),
    }
}

fn desugar_propositional(f: &Formula<usize>) -> Formula<usize> {
    match f {
        Formula::Implies(a, b) => Formula::or(Formula::not((**a).clone()), (**b).clone()),
        Formula::Iff(a, b) => Formula::or(
            Formula::and((**a).clone(), (**b).clone()),
            Formula::and(Formula::not((**a).clone()), Formula::not((**b).clone())),
        ),
        _ => panic!("temporal operator in a guard"),
    }
}

fn eval3(f: &Formula<usize>, asg: &[Option<bool>]) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Atom(i) => asg[*i],
        Formula::Not(a) => eval3(a, asg).map(|v| !v),
        Formula::And(a, b) => match (eval3(a, asg), eval3(b, asg)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Formula::Or(a, b) => match (eval3(a, asg), eval3(b, asg)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        other => eval3(&desugar_propositional(other), asg),
    }
}

/// A valuation of `n` propositions satisfying `f`, open ones set to false.
pub(crate) fn guard_model(f: &Formula<usize>, n: usize) -> Option<Vec<bool>> {
    fn go(f: &Formula<usize>, vars: &[usize], asg: &mut Vec<Option<bool>>) -> bool {
        match eval3(f, asg) {
            Some(b) => b,
            None => {
                let Some((&v, rest)) = vars.split_first() else {
                    return false;
                };
                for b in [false, true] {
                    asg[v] = Some(b);
                    if go(f, rest, asg) {
                        return true;
                    }
                }
                asg[v] = None;
                false
            }
        }
    }
    let mut vars: Vec<usize> = f.atoms().into_iter().copied().collect();
    vars.sort_unstable();
    vars.dedup();
    let mut asg = vec![None; n];
    go(f, &vars, &mut asg).then(|| asg.into_iter().map(|v| v.unwrap_or(false)).collect())
}

/// Translates `psi` into a Büchi automaton over `universe`.
///
/// The tableau is explored completely from its initial state.
pub fn ltl_to_buchi(psi: &LtlFormula, universe: &[Ap]) -> Result<BuchiAutomaton, AutomataError> {
    for a in psi.atoms() {
        if !universe.contains(a) {
            return Err(AutomataError::OutsideUniverse(a.clone()));
        }
    }
    let mut t = tableau_of(psi, false);
    let remap: Vec<usize> = t
        .arena
        .aps()
        .iter()
        .map(|a| universe.iter().position(|u| u == a).expect("checked above"))
        .collect();
    let mut index: HashMap<DNode, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let init = t.initial();
    index.insert(init, 0);
    order.push(init);
    queue.push_back(init);
    let mut transitions = Vec::new();
    while let Some(n) = queue.pop_front() {
        let mut edges = Vec::new();
        for tr in t.transitions(n.0).iter() {
            let m = (tr.next, t.step(n.1, tr));
            let id = *index.entry(m).or_insert_with(|| {
                order.push(m);
                queue.push_back(m);
                order.len() - 1
            });
            let guard = Formula::conj(
                t.guard(tr.guard)
                    .iter()
                    .map(|&g| t.arena.to_formula(g).map_atoms(&mut |a| remap[*a as usize])),
            );
            edges.push((guard, id));
        }
        transitions.push(edges);
    }
    Ok(BuchiAutomaton {
        universe: universe.to_vec(),
        initial: vec![0],
        accepting: order.iter().map(|n| t.accepting(*n)).collect(),
        transitions,
    })
}

struct Explicit<'a>(&'a BuchiAutomaton);

impl Graph for Explicit<'_> {
    type Node = usize;
    type Edge = (usize, usize);

    fn initial(&mut self) -> Vec<usize> {
        self.0.initial.clone()
    }

    fn successors(&mut self, n: &usize) -> Vec<((usize, usize), usize)> {
        self.0.transitions[*n]
            .iter()
            .enumerate()
            .map(|(i, (_, t))| ((*n, i), *t))
            .collect()
    }

    fn accepting(&self, n: &usize) -> bool {
        self.0.accepting[*n]
    }
}

/// Emptiness of `a`, with an accepted lasso when nonempty.
///
/// Edges whose guard is unsatisfiable are ignored.
pub fn is_empty(a: &BuchiAutomaton) -> Emptiness {
    let pruned = BuchiAutomaton {
        transitions: a
            .transitions
            .iter()
            .map(|es| {
                es.iter()
                    .filter(|(g, _)| guard_model(g, a.universe.len()).is_some())
                    .cloned()
                    .collect()
            })
            .collect(),
        ..a.clone()
    };
    match find_accepting_run(&mut Explicit(&pruned)) {
        None => Emptiness::Empty,
        Some(run) => {
            let label = |(s, i): (usize, usize)| {
                let m = guard_model(&pruned.transitions[s][i].0, a.universe.len())
                    .expect("pruned guards are satisfiable");
                a.universe
                    .iter()
                    .zip(m)
                    .filter(|(_, b)| *b)
                    .map(|(x, _)| x.clone())
                    .collect()
            };
            Emptiness::Nonempty(LassoTrace {
                stem: run.stem.iter().map(|(_, e)| label(*e)).collect(),
                loop_: run.cycle.iter().map(|(_, e)| label(*e)).collect(),
            })
        }
    }
}

/// The product accepting the intersection of both languages.
///
/// The universe is the union of both universes; a flag records which
/// automaton's accepting states the product is waiting for.
pub fn intersect(a: &BuchiAutomaton, b: &BuchiAutomaton) -> BuchiAutomaton {
    let mut universe = a.universe.clone();
    for x in &b.universe {
        if !universe.contains(x) {
            universe.push(x.clone());
        }
    }
    let remap_b: Vec<usize> = b
        .universe
        .iter()
        .map(|x| universe.iter().position(|u| u == x).expect("merged"))
        .collect();
    let mut index: HashMap<(usize, usize, bool), usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &p in &a.initial {
        for &q in &b.initial {
            let n = (p, q, false);
            if let Entry::Vacant(e) = index.entry(n) {
                e.insert(order.len());
                order.push(n);
                queue.push_back(n);
            }
        }
    }
    let initial: Vec<usize> = (0..order.len()).collect();
    let mut transitions = Vec::new();
    while let Some((p, q, f)) = queue.pop_front() {
        let nf = if f { !b.accepting[q] } else { a.accepting[p] };
        let mut edges = Vec::new();
        for (ga, p2) in &a.transitions[p] {
            for (gb, q2) in &b.transitions[q] {
                let m = (*p2, *q2, nf);
                let id = *index.entry(m).or_insert_with(|| {
                    order.push(m);
                    queue.push_back(m);
                    order.len() - 1
                });
                let gb = gb.map_atoms(&mut |i| remap_b[*i]);
                edges.push((Formula::and(ga.clone(), gb), id));
            }
        }
        transitions.push(edges);
    }
    BuchiAutomaton {
        universe,
        initial,
        accepting: order
            .iter()
            .map(|&(p, _, f)| !f && a.accepting[p])
            .collect(),
        transitions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_ltl, Valuation};
    use crate::syntax::parse_ltl;

    fn ap(s: &str) -> Ap {
        s.parse().unwrap()
    }

    fn val(aps: &[&str]) -> Valuation {
        aps.iter().map(|a| ap(a)).collect()
    }

    #[test]
    fn true_is_one_accepting_state() {
        let a = ltl_to_buchi(&parse_ltl("true").unwrap(), &[ap("a")]).unwrap();
        assert_eq!(a.state_count(), 1);
        assert!(a.accepting[0]);
    }

    #[test]
    fn emptiness_examples() {
        let empty = BuchiAutomaton {
            universe: vec![],
            initial: vec![],
            accepting: vec![],
            transitions: vec![],
        };
        assert_eq!(is_empty(&empty), Emptiness::Empty);
        let lp = BuchiAutomaton {
            universe: vec![ap("a")],
            initial: vec![0],
            accepting: vec![true],
            transitions: vec![vec![(Formula::atom(0), 0)]],
        };
        match is_empty(&lp) {
            Emptiness::Nonempty(w) => assert_eq!(w.loop_.len(), 1),
            Emptiness::Empty => panic!("self-loop is accepting"),
        }
        let contra = ltl_to_buchi(&parse_ltl("a && !a").unwrap(), &[ap("a")]).unwrap();
        assert_eq!(is_empty(&contra), Emptiness::Empty);
    }

    #[test]
    fn universe_is_enforced() {
        assert_eq!(
            ltl_to_buchi(&parse_ltl("b").unwrap(), &[ap("a")]),
            Err(AutomataError::OutsideUniverse(ap("b")))
        );
    }

    #[test]
    fn membership_through_products() {
        let u = [ap("a"), ap("b")];
        let ga = ltl_to_buchi(&parse_ltl("G a").unwrap(), &u).unwrap();
        assert!(ga.accepts(&LassoTrace::constant(val(&["a"]))));
        assert!(!ga.accepts(&LassoTrace::new(vec![], vec![val(&["a"]), val(&[])]).unwrap()));
        let aub = ltl_to_buchi(&parse_ltl("a U b").unwrap(), &u).unwrap();
        assert!(aub.accepts(&LassoTrace::new(vec![val(&["a"])], vec![val(&["b"])]).unwrap()));
        assert!(!aub.accepts(&LassoTrace::constant(val(&["a"]))));
    }

    #[test]
    fn witness_of_nonempty_automaton_is_accepted() {
        let f = parse_ltl("G F a && F G b && (c U !b)").unwrap();
        let u = [ap("a"), ap("b"), ap("c")];
        let a = ltl_to_buchi(&f, &u).unwrap();
        let Emptiness::Nonempty(w) = is_empty(&a) else {
            panic!("satisfiable formula");
        };
        assert!(eval_ltl(&w, 0, &f));
    }

    #[test]
    fn complement_product_is_empty() {
        let u = [ap("a"), ap("b")];
        let f = parse_ltl("a U (b W !a)").unwrap();
        let p = ltl_to_buchi(&f, &u).unwrap();
        let n = ltl_to_buchi(&Formula::not(f), &u).unwrap();
        assert_eq!(is_empty(&intersect(&p, &n)), Emptiness::Empty);
    }

    #[test]
    fn hoa_export_lists_states_and_aps() {
        let a = ltl_to_buchi(&parse_ltl("G F a").unwrap(), &[ap("a")]).unwrap();
        let hoa = a.to_hoa("GFa");
        assert!(hoa.starts_with("HOA: v1"));
        assert!(hoa.contains("AP: 1 \"a\""));
        assert!(hoa.contains("Acceptance: 1 Inf(0)"));
        assert!(hoa.trim_end().ends_with("--END--"));
    }
}
