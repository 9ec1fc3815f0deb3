//! Exact evaluation of temporal formulas on ultimately periodic words.
//!
//! A lasso with stem length `s` and period `p` has `s + p` position classes;
//! position `s + p - 1` is followed by position `s`. Every operator is
//! evaluated on these classes, with `U` and `F` as least fixpoints and `G`,
//! `W` and `R` as greatest fixpoints.

use crate::syntax::Formula;

/// Stem length and period of a lasso.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub stem: usize,
    pub period: usize,
}

impl Shape {
    pub fn new(stem: usize, period: usize) -> Self {
        assert!(period > 0, "a lasso needs a nonempty loop");
        Shape { stem, period }
    }

    /// Number of position classes.
    pub fn len(&self) -> usize {
        self.stem + self.period
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Successor class of class `i`.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.stem
        }
    }

    /// Class of absolute time `t`.
    pub fn class(&self, t: usize) -> usize {
        if t < self.stem {
            t
        } else {
            self.stem + (t - self.stem) % self.period
        }
    }

    /// The shape of several lassos read in lockstep.
    pub fn zip(shapes: &[Shape]) -> Shape {
        let stem = shapes.iter().map(|s| s.stem).max().unwrap_or(0);
        let period = shapes.iter().fold(1, |acc, s| lcm(acc, s.period));
        Shape { stem, period }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Truth value of `f` at every position class of `shape`.
///
/// `leaf(atom, class)` gives the value of an atom at a class.
pub fn eval_classes<A>(
    f: &Formula<A>,
    shape: Shape,
    leaf: &mut dyn FnMut(&A, usize) -> bool,
) -> Vec<bool> {
    use Formula::*;
    let n = shape.len();
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(a) => (0..n).map(|i| leaf(a, i)).collect(),
        Not(a) => eval_classes(a, shape, leaf)
            .into_iter()
            .map(|v| !v)
            .collect(),
        And(a, b) => zip_with(
            eval_classes(a, shape, leaf),
            eval_classes(b, shape, leaf),
            |x, y| x && y,
        ),
        Or(a, b) => zip_with(
            eval_classes(a, shape, leaf),
            eval_classes(b, shape, leaf),
            |x, y| x || y,
        ),
        Implies(a, b) => zip_with(
            eval_classes(a, shape, leaf),
            eval_classes(b, shape, leaf),
            |x, y| !x || y,
        ),
        Iff(a, b) => zip_with(
            eval_classes(a, shape, leaf),
            eval_classes(b, shape, leaf),
            |x, y| x == y,
        ),
        Next(a) => {
            let v = eval_classes(a, shape, leaf);
            (0..n).map(|i| v[shape.succ(i)]).collect()
        }
        Until(a, b) => {
            let (va, vb) = (eval_classes(a, shape, leaf), eval_classes(b, shape, leaf));
            fixpoint(shape, false, |i, next| vb[i] || (va[i] && next))
        }
        Eventually(a) => {
            let v = eval_classes(a, shape, leaf);
            fixpoint(shape, false, |i, next| v[i] || next)
        }
        Globally(a) => {
            let v = eval_classes(a, shape, leaf);
            fixpoint(shape, true, |i, next| v[i] && next)
        }
        WeakUntil(a, b) => {
            let (va, vb) = (eval_classes(a, shape, leaf), eval_classes(b, shape, leaf));
            fixpoint(shape, true, |i, next| vb[i] || (va[i] && next))
        }
        Release(a, b) => {
            let (va, vb) = (eval_classes(a, shape, leaf), eval_classes(b, shape, leaf));
            fixpoint(shape, true, |i, next| vb[i] && (va[i] || next))
        }
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ(i)])` from the constant `init` until stable.
///
/// `step` is monotone, so starting from `false` gives the least fixpoint and
/// from `true` the greatest.
fn fixpoint(shape: Shape, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = shape.len();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let nv = step(i, v[shape.succ(i)]);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
