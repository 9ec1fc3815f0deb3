//! On-the-fly tableau automaton for an NNF formula.
//!
//! A tableau state is a set of obligations that must hold from the current
//! position on. Expanding it yields transitions labelled by a propositional
//! guard (a conjunction of propositional nodes), a successor obligation set,
//! and the set of until nodes whose fulfilment was postponed. Acceptance is
//! generalized Büchi on transitions (one set per until node, containing the
//! transitions that do not postpone it) and is degeneralized with a counter.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::nnf::{Arena, Node, NodeId, FALSE, TRUE};

pub(crate) type StateId = u32;
pub(crate) type GuardId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Trans {
    pub guard: GuardId,
    pub next: StateId,
    /// Sorted indices of the until nodes postponed by this transition.
    pub pending: Vec<u32>,
}

/// A degeneralized automaton node: tableau state plus acceptance counter.
pub(crate) type DNode = (StateId, u32);

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    pub arena: Arena,
    states: Vec<Vec<NodeId>>,
    state_index: HashMap<Vec<NodeId>, StateId>,
    trans: Vec<Option<Arc<[Trans]>>>,
    guards: Vec<Vec<NodeId>>,
    guard_index: HashMap<Vec<NodeId>, GuardId>,
    guard_sat: HashMap<Vec<NodeId>, bool>,
}

struct Branch {
    todo: Vec<NodeId>,
    seen: HashSet<NodeId>,
    guard: Vec<NodeId>,
    next: Vec<NodeId>,
    pending: Vec<u32>,
}

impl Tableau {
    /// The tableau of `root`; its initial state is state 0.
    pub fn new(arena: Arena, root: NodeId) -> Self {
        let mut t = Tableau {
            arena,
            states: Vec::new(),
            state_index: HashMap::new(),
            trans: Vec::new(),
            guards: Vec::new(),
            guard_index: HashMap::new(),
            guard_sat: HashMap::new(),
        };
        let init = if root == TRUE { vec![] } else { vec![root] };
        t.intern_state(init);
        t
    }

    pub fn initial(&self) -> DNode {
        (0, 0)
    }

    /// Number of acceptance conditions before degeneralization.
    pub fn k(&self) -> u32 {
        self.arena.until_count() as u32
    }

    pub fn accepting(&self, n: DNode) -> bool {
        n.1 == self.k()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn guard(&self, g: GuardId) -> &[NodeId] {
        &self.guards[g as usize]
    }

    fn intern_state(&mut self, obligations: Vec<NodeId>) -> StateId {
        if let Some(&s) = self.state_index.get(&obligations) {
            return s;
        }
        let s = self.states.len() as StateId;
        self.states.push(obligations.clone());
        self.state_index.insert(obligations, s);
        self.trans.push(None);
        s
    }

    fn intern_guard(&mut self, guard: Vec<NodeId>) -> GuardId {
        if let Some(&g) = self.guard_index.get(&guard) {
            return g;
        }
        let g = self.guards.len() as GuardId;
        self.guards.push(guard.clone());
        self.guard_index.insert(guard, g);
        g
    }

    fn guard_satisfiable(&mut self, guard: &[NodeId]) -> bool {
        if let Some(&b) = self.guard_sat.get(guard) {
            return b;
        }
        let b = self.arena.model(guard).is_some();
        self.guard_sat.insert(guard.to_vec(), b);
        b
    }

    /// The outgoing transitions of tableau state `s`.
    pub fn transitions(&mut self, s: StateId) -> Arc<[Trans]> {
        if let Some(t) = &self.trans[s as usize] {
            return t.clone();
        }
        let start = Branch {
            todo: self.states[s as usize].clone(),
            seen: HashSet::new(),
            guard: Vec::new(),
            next: Vec::new(),
            pending: Vec::new(),
        };
        let mut done = Vec::new();
        self.expand(start, &mut done);
        let mut out: Vec<Trans> = Vec::new();
        let mut seen = HashSet::new();
        for b in done {
            let mut guard = b.guard;
            guard.sort_unstable();
            guard.dedup();
            if !self.guard_satisfiable(&guard) {
                continue;
            }
            let mut next = b.next;
            next.sort_unstable();
            next.dedup();
            let mut pending = b.pending;
            pending.sort_unstable();
            pending.dedup();
            let t = Trans {
                guard: self.intern_guard(guard),
                next: self.intern_state(next),
                pending,
            };
            if seen.insert(t.clone()) {
                out.push(t);
            }
        }
        // Among transitions with equal guard and target, one postponing a
        // subset of another's untils is at least as good.
        let dominated: Vec<bool> = out
            .iter()
            .enumerate()
            .map(|(i, t)| {
                out.iter().enumerate().any(|(j, u)| {
                    i != j
                        && u.guard == t.guard
                        && u.next == t.next
                        && u.pending.len() < t.pending.len()
                        && u.pending.iter().all(|p| t.pending.contains(p))
                })
            })
            .collect();
        let out: Arc<[Trans]> = out
            .into_iter()
            .zip(dominated)
            .filter(|(_, d)| !d)
            .map(|(t, _)| t)
            .collect();
        self.trans[s as usize] = Some(out.clone());
        out
    }

    fn expand(&self, mut b: Branch, done: &mut Vec<Branch>) {
        while let Some(n) = b.todo.pop() {
            if !b.seen.insert(n) {
                continue;
            }
            if n == TRUE {
                continue;
            }
            if n == FALSE {
                return;
            }
            if !self.arena.is_temporal(n) {
                b.guard.push(n);
                continue;
            }
            match self.arena.node(n) {
                Node::And(cs) => b.todo.extend(cs.iter().copied()),
                Node::Or(cs) => {
                    for &c in cs {
                        let mut nb = clone_branch(&b);
                        nb.todo.push(c);
                        self.expand(nb, done);
                    }
                    return;
                }
                Node::Next(a) => b.next.push(*a),
                &Node::Until(x, y) => {
                    let mut now = clone_branch(&b);
                    now.todo.push(y);
                    self.expand(now, done);
                    b.todo.push(x);
                    b.next.push(n);
                    b.pending.push(self.arena.until_index(n) as u32);
                }
                &Node::Release(x, y) => {
                    let mut now = clone_branch(&b);
                    now.todo.push(x);
                    now.todo.push(y);
                    self.expand(now, done);
                    b.todo.push(y);
                    b.next.push(n);
                }
                Node::True | Node::False | Node::Lit(..) => unreachable!("propositional"),
            }
        }
        done.push(b);
    }

    /// Successor of degeneralized node `(s, c)` along transition `t`.
    pub fn step(&self, c: u32, t: &Trans) -> u32 {
        let k = self.k();
        let mut c0 = if c == k { 0 } else { c };
        while c0 < k && !t.pending.contains(&c0) {
            c0 += 1;
        }
        c0
    }
}

fn clone_branch(b: &Branch) -> Branch {
    Branch {
        todo: b.todo.clone(),
        seen: b.seen.clone(),
        guard: b.guard.clone(),
        next: b.next.clone(),
        pending: b.pending.clone(),
    }
}
