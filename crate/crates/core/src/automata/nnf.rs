//! Hash-consed negation normal form of LTL formulas.

use std::collections::HashMap;

use crate::syntax::{Ap, Formula, LtlFormula};

pub(crate) type NodeId = u32;

pub(crate) const TRUE: NodeId = 0;
pub(crate) const FALSE: NodeId = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    True,
    False,
    Lit(u32, bool),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Next(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

/// Interned NNF nodes over interned propositions.
///
/// Structurally equal subformulas share one id, conjunctions and disjunctions
/// are flattened and sorted, and constant operands are folded away.
#[derive(Debug, Clone)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
    temporal: Vec<bool>,
    index: HashMap<Node, NodeId>,
    aps: Vec<Ap>,
    ap_ids: HashMap<Ap, u32>,
    untils: HashMap<NodeId, usize>,
}

impl Arena {
    pub fn new() -> Self {
        let mut a = Arena {
            nodes: Vec::new(),
            temporal: Vec::new(),
            index: HashMap::new(),
            aps: Vec::new(),
            ap_ids: HashMap::new(),
            untils: HashMap::new(),
        };
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn is_temporal(&self, id: NodeId) -> bool {
        self.temporal[id as usize]
    }

    pub fn aps(&self) -> &[Ap] {
        &self.aps
    }

    pub fn ap_id(&self, ap: &Ap) -> Option<u32> {
        self.ap_ids.get(ap).copied()
    }

    /// Number of until nodes, i.e. of acceptance conditions.
    pub fn until_count(&self) -> usize {
        self.untils.len()
    }

    pub fn until_index(&self, id: NodeId) -> usize {
        self.untils[&id]
    }

    pub fn intern_ap(&mut self, ap: &Ap) -> u32 {
        if let Some(&i) = self.ap_ids.get(ap) {
            return i;
        }
        let i = self.aps.len() as u32;
        self.aps.push(ap.clone());
        self.ap_ids.insert(ap.clone(), i);
        i
    }

    fn intern(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        let temporal = match &n {
            Node::True | Node::False | Node::Lit(..) => false,
            Node::And(cs) | Node::Or(cs) => cs.iter().any(|&c| self.temporal[c as usize]),
            Node::Next(_) | Node::Until(..) | Node::Release(..) => true,
        };
        if let Node::Until(..) = n {
            let k = self.untils.len();
            self.untils.insert(id, k);
        }
        self.nodes.push(n.clone());
        self.temporal.push(temporal);
        self.index.insert(n, id);
        id
    }

    fn junction(&mut self, items: Vec<NodeId>, conj: bool) -> NodeId {
        let (unit, zero) = if conj { (TRUE, FALSE) } else { (FALSE, TRUE) };
        let mut flat = Vec::with_capacity(items.len());
        for i in items {
            if i == unit {
                continue;
            }
            if i == zero {
                return zero;
            }
            match (&self.nodes[i as usize], conj) {
                (Node::And(cs), true) | (Node::Or(cs), false) => flat.extend(cs.iter().copied()),
                _ => flat.push(i),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        for &i in &flat {
            if let Node::Lit(a, pol) = self.nodes[i as usize] {
                if flat
                    .iter()
                    .any(|&j| self.nodes[j as usize] == Node::Lit(a, !pol))
                {
                    return zero;
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ => self.intern(if conj {
                Node::And(flat)
            } else {
                Node::Or(flat)
            }),
        }
    }

    pub fn and(&mut self, items: Vec<NodeId>) -> NodeId {
        self.junction(items, true)
    }

    pub fn or(&mut self, items: Vec<NodeId>) -> NodeId {
        self.junction(items, false)
    }

    pub fn lit(&mut self, ap: &Ap, pol: bool) -> NodeId {
        let a = self.intern_ap(ap);
        self.intern(Node::Lit(a, pol))
    }

    fn next(&mut self, a: NodeId) -> NodeId {
        if a == TRUE || a == FALSE {
            return a;
        }
        self.intern(Node::Next(a))
    }

    fn until(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if b == TRUE || b == FALSE || a == FALSE || a == b {
            return b;
        }
        self.intern(Node::Until(a, b))
    }

    fn release(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if b == TRUE || b == FALSE || a == TRUE || a == b {
            return b;
        }
        self.intern(Node::Release(a, b))
    }

    /// The NNF of `f` when `pos`, of `¬f` otherwise.
    pub fn build(&mut self, f: &LtlFormula, pos: bool) -> NodeId {
        use Formula::*;
        match f {
            True => {
                if pos {
                    TRUE
                } else {
                    FALSE
                }
            }
            False => {
                if pos {
                    FALSE
                } else {
                    TRUE
                }
            }
            Atom(a) => self.lit(a, pos),
            Not(a) => self.build(a, !pos),
            And(a, b) | Or(a, b) => {
                let (x, y) = (self.build(a, pos), self.build(b, pos));
                if matches!(f, And(..)) == pos {
                    self.and(vec![x, y])
                } else {
                    self.or(vec![x, y])
                }
            }
            Implies(a, b) => {
                let (x, y) = (self.build(a, !pos), self.build(b, pos));
                if pos {
                    self.or(vec![x, y])
                } else {
                    self.and(vec![x, y])
                }
            }
            Iff(a, b) => {
                let (ap, an) = (self.build(a, true), self.build(a, false));
                let (bp, bn) = (self.build(b, true), self.build(b, false));
                let (l, r) = if pos {
                    (self.and(vec![ap, bp]), self.and(vec![an, bn]))
                } else {
                    (self.and(vec![ap, bn]), self.and(vec![an, bp]))
                };
                self.or(vec![l, r])
            }
            Next(a) => {
                let x = self.build(a, pos);
                self.next(x)
            }
            Until(a, b) => {
                let (x, y) = (self.build(a, pos), self.build(b, pos));
                if pos {
                    self.until(x, y)
                } else {
                    self.release(x, y)
                }
            }
            Release(a, b) => {
                let (x, y) = (self.build(a, pos), self.build(b, pos));
                if pos {
                    self.release(x, y)
                } else {
                    self.until(x, y)
                }
            }
            Eventually(a) => {
                let x = self.build(a, pos);
                if pos {
                    self.until(TRUE, x)
                } else {
                    self.release(FALSE, x)
                }
            }
            Globally(a) => {
                let x = self.build(a, pos);
                if pos {
                    self.release(FALSE, x)
                } else {
                    self.until(TRUE, x)
                }
            }
            WeakUntil(a, b) => {
                // a W b = b R (a ∨ b), and ¬(a W b) = ¬b U (¬a ∧ ¬b).
                let (x, y) = (self.build(a, pos), self.build(b, pos));
                if pos {
                    let ab = self.or(vec![x, y]);
                    self.release(y, ab)
                } else {
                    let ab = self.and(vec![x, y]);
                    self.until(y, ab)
                }
            }
        }
    }

    /// Three-valued evaluation of a propositional node under a partial
    /// assignment of proposition ids.
    pub fn eval3(&self, id: NodeId, asg: &[Option<bool>]) -> Option<bool> {
        match &self.nodes[id as usize] {
            Node::True => Some(true),
            Node::False => Some(false),
            Node::Lit(a, pol) => asg[*a as usize].map(|v| v == *pol),
            Node::And(cs) => {
                let mut unknown = false;
                for &c in cs {
                    match self.eval3(c, asg) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Node::Or(cs) => {
                let mut unknown = false;
                for &c in cs {
                    match self.eval3(c, asg) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            _ => panic!("temporal node in a propositional guard"),
        }
    }

    /// Evaluation of a propositional node under a total assignment.
    pub fn eval(&self, id: NodeId, val: &[bool]) -> bool {
        match &self.nodes[id as usize] {
            Node::True => true,
            Node::False => false,
            Node::Lit(a, pol) => val[*a as usize] == *pol,
            Node::And(cs) => cs.iter().all(|&c| self.eval(c, val)),
            Node::Or(cs) => cs.iter().any(|&c| self.eval(c, val)),
            _ => panic!("temporal node in a propositional guard"),
        }
    }

    fn first_unassigned(&self, id: NodeId, asg: &[Option<bool>]) -> Option<u32> {
        match &self.nodes[id as usize] {
            Node::Lit(a, _) if asg[*a as usize].is_none() => Some(*a),
            Node::And(cs) | Node::Or(cs) => cs
                .iter()
                .filter(|&&c| self.eval3(c, asg).is_none())
                .find_map(|&c| self.first_unassigned(c, asg)),
            _ => None,
        }
    }

    /// A total assignment satisfying the conjunction of `guard`, if any.
    ///
    /// Propositions the guard leaves open are set to false.
    pub fn model(&self, guard: &[NodeId]) -> Option<Vec<bool>> {
        let mut asg = vec![None; self.aps.len()];
        if self.dpll(guard, &mut asg) {
            Some(asg.into_iter().map(|v| v.unwrap_or(false)).collect())
        } else {
            None
        }
    }

    fn dpll(&self, guard: &[NodeId], asg: &mut Vec<Option<bool>>) -> bool {
        let mut open = None;
        for &g in guard {
            match self.eval3(g, asg) {
                Some(false) => return false,
                None if open.is_none() => open = Some(g),
                _ => {}
            }
        }
        let Some(g) = open else {
            return true;
        };
        let var = self
            .first_unassigned(g, asg)
            .expect("an undetermined guard mentions an unassigned proposition");
        for v in [false, true] {
            asg[var as usize] = Some(v);
            if self.dpll(guard, asg) {
                return true;
            }
        }
        asg[var as usize] = None;
        false
    }

    /// A propositional node as a formula over proposition ids.
    pub fn to_formula(&self, id: NodeId) -> Formula<u32> {
        match &self.nodes[id as usize] {
            Node::True => Formula::True,
            Node::False => Formula::False,
            Node::Lit(a, true) => Formula::atom(*a),
            Node::Lit(a, false) => Formula::not(Formula::atom(*a)),
            Node::And(cs) => Formula::conj(cs.iter().map(|&c| self.to_formula(c))),
            Node::Or(cs) => Formula::disj(cs.iter().map(|&c| self.to_formula(c))),
            _ => panic!("temporal node in a propositional guard"),
        }
    }
}
