//! Nested depth-first search for accepting lassos in implicit Büchi graphs.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

/// A graph explored on the fly.
pub(crate) trait Graph {
    type Node: Clone + Eq + Hash;
    type Edge: Clone;

    fn initial(&mut self) -> Vec<Self::Node>;
    fn successors(&mut self, n: &Self::Node) -> Vec<(Self::Edge, Self::Node)>;
    fn accepting(&self, n: &Self::Node) -> bool;
}

/// A run `stem · cycle^ω`; every entry is a node with the edge leaving it.
/// The last stem entry leads to the first cycle node, and the last cycle
/// entry leads back to it.
#[derive(Debug, Clone)]
pub(crate) struct Run<N, E> {
    pub stem: Vec<(N, E)>,
    pub cycle: Vec<(N, E)>,
}

struct Frame<N, E> {
    node: N,
    in_edge: Option<E>,
    succ: Vec<(E, N)>,
    next: usize,
}

/// Searches for a reachable cycle through an accepting node.
///
/// Blue search in post-order launches a red search from each accepting node;
/// the red search succeeds when it touches a node on the blue stack.
pub(crate) fn find_accepting_run<G: Graph>(g: &mut G) -> Option<Run<G::Node, G::Edge>> {
    let mut blue: HashSet<G::Node> = HashSet::new();
    let mut red: HashSet<G::Node> = HashSet::new();
    let mut cyan: HashMap<G::Node, usize> = HashMap::new();
    for init in g.initial() {
        if blue.contains(&init) {
            continue;
        }
        let succ = g.successors(&init);
        let mut stack = vec![Frame {
            node: init.clone(),
            in_edge: None,
            succ,
            next: 0,
        }];
        cyan.insert(init, 0);
        while let Some(top) = stack.last_mut() {
            if top.next < top.succ.len() {
                let (e, m) = top.succ[top.next].clone();
                top.next += 1;
                if let Some(&pos) = cyan.get(&m) {
                    let top_node = &stack.last().expect("nonempty").node;
                    if g.accepting(top_node) || g.accepting(&m) {
                        return Some(close_cycle(&stack, pos, Vec::new(), e));
                    }
                    continue;
                }
                if blue.contains(&m) {
                    continue;
                }
                let succ = g.successors(&m);
                cyan.insert(m.clone(), stack.len());
                stack.push(Frame {
                    node: m,
                    in_edge: Some(e),
                    succ,
                    next: 0,
                });
                continue;
            }
            let node = top.node.clone();
            if g.accepting(&node) {
                if let Some((path, last, pos)) = red_search(g, &node, &cyan, &mut red) {
                    return Some(close_cycle(&stack, pos, path, last));
                }
            }
            stack.pop();
            cyan.remove(&node);
            blue.insert(node);
        }
    }
    None
}

/// Red search from `seed`. On success returns the path after the seed (nodes
/// with their leaving edges), the edge leaving the seed, and the blue stack
/// position of the cyan node it reaches.
#[allow(clippy::type_complexity)]
fn red_search<G: Graph>(
    g: &mut G,
    seed: &G::Node,
    cyan: &HashMap<G::Node, usize>,
    red: &mut HashSet<G::Node>,
) -> Option<(Vec<(G::Node, G::Edge)>, G::Edge, usize)> {
    let succ = g.successors(seed);
    let mut stack = vec![Frame {
        node: seed.clone(),
        in_edge: None,
        succ,
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next >= top.succ.len() {
            stack.pop();
            continue;
        }
        let (e, m) = top.succ[top.next].clone();
        top.next += 1;
        if let Some(&pos) = cyan.get(&m) {
            let mut entries: Vec<(G::Node, G::Edge)> = (0..stack.len())
                .map(|i| {
                    let edge = match stack.get(i + 1) {
                        Some(f) => f.in_edge.clone().expect("inner edge"),
                        None => e.clone(),
                    };
                    (stack[i].node.clone(), edge)
                })
                .collect();
            let (_, seed_edge) = entries.remove(0);
            return Some((entries, seed_edge, pos));
        }
        if red.insert(m.clone()) {
            let succ = g.successors(&m);
            stack.push(Frame {
                node: m,
                in_edge: Some(e),
                succ,
                next: 0,
            });
        }
    }
    None
}

fn close_cycle<N: Clone, E: Clone>(
    stack: &[Frame<N, E>],
    pos: usize,
    after_seed: Vec<(N, E)>,
    seed_edge: E,
) -> Run<N, E> {
    let leaving = |i: usize| stack[i + 1].in_edge.clone().expect("stack edge");
    let stem = (0..pos)
        .map(|i| (stack[i].node.clone(), leaving(i)))
        .collect();
    let top = stack.len() - 1;
    let mut cycle: Vec<(N, E)> = (pos..top)
        .map(|i| (stack[i].node.clone(), leaving(i)))
        .collect();
    cycle.push((stack[top].node.clone(), seed_edge));
    cycle.extend(after_seed);
    Run { stem, cycle }
}
