//! Lasso traces over atomic propositions and the LTL/HyperLTL evaluators.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::lasso::{eval_classes, Shape};
use super::SemanticsError;
use crate::syntax::{Ap, Formula, HyperLtlFormula, LtlFormula, QuantKind, TraceVar};

/// The set of propositions holding at one position.
pub type Valuation = BTreeSet<Ap>;

/// An ultimately periodic trace `stem · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTrace")]
pub struct LassoTrace {
    pub stem: Vec<Valuation>,
    #[serde(rename = "loop")]
    pub loop_: Vec<Valuation>,
}

#[derive(Deserialize)]
struct RawTrace {
    #[serde(default)]
    stem: Vec<Valuation>,
    #[serde(rename = "loop")]
    loop_: Vec<Valuation>,
}

impl TryFrom<RawTrace> for LassoTrace {
    type Error = SemanticsError;

    fn try_from(raw: RawTrace) -> Result<Self, Self::Error> {
        LassoTrace::new(raw.stem, raw.loop_)
    }
}

impl LassoTrace {
    pub fn new(stem: Vec<Valuation>, loop_: Vec<Valuation>) -> Result<Self, SemanticsError> {
        if loop_.is_empty() {
            return Err(SemanticsError::EmptyLoop);
        }
        Ok(LassoTrace { stem, loop_ })
    }

    /// The trace `v^ω`.
    pub fn constant(v: Valuation) -> Self {
        LassoTrace {
            stem: vec![],
            loop_: vec![v],
        }
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.stem.len(), self.loop_.len())
    }

    /// Valuation at position class `k` of [`Self::shape`].
    pub fn class(&self, k: usize) -> &Valuation {
        if k < self.stem.len() {
            &self.stem[k]
        } else {
            &self.loop_[k - self.stem.len()]
        }
    }

    /// Valuation at absolute time `t`.
    pub fn at(&self, t: usize) -> &Valuation {
        self.class(self.shape().class(t))
    }

    /// Every proposition occurring somewhere in the trace.
    pub fn aps(&self) -> BTreeSet<Ap> {
        self.stem
            .iter()
            .chain(&self.loop_)
            .flatten()
            .cloned()
            .collect()
    }

    /// Keeps only the propositions satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Ap) -> bool) -> LassoTrace {
        let f = |v: &Valuation| v.iter().filter(|a| keep(a)).cloned().collect();
        LassoTrace {
            stem: self.stem.iter().map(f).collect(),
            loop_: self.loop_.iter().map(f).collect(),
        }
    }

    /// Applies `f` to every proposition, dropping those mapped to `None`.
    pub fn map_aps(&self, f: impl Fn(&Ap) -> Option<Ap>) -> LassoTrace {
        let g = |v: &Valuation| v.iter().filter_map(&f).collect();
        LassoTrace {
            stem: self.stem.iter().map(g).collect(),
            loop_: self.loop_.iter().map(g).collect(),
        }
    }

    /// The copy-`j` component of a zipped trace, with copy indices removed.
    pub fn project_copy(&self, j: u32) -> LassoTrace {
        self.map_aps(|a| (a.copy == Some(j)).then(|| a.base()))
    }

    /// Several traces read in lockstep, copy `j + 1` holding trace `j`.
    pub fn zip(traces: &[LassoTrace]) -> LassoTrace {
        let shape = Shape::zip(&traces.iter().map(|t| t.shape()).collect::<Vec<_>>());
        let at = |k: usize| -> Valuation {
            traces
                .iter()
                .enumerate()
                .flat_map(|(j, t)| t.at(k).iter().map(move |a| a.with_copy(j as u32 + 1)))
                .collect()
        };
        LassoTrace {
            stem: (0..shape.stem).map(at).collect(),
            loop_: (shape.stem..shape.len()).map(at).collect(),
        }
    }

    /// The same infinite word with the shortest loop and then the shortest stem.
    pub fn normalize(&self) -> LassoTrace {
        let l = self.loop_.len();
        let period = (1..=l)
            .find(|p| {
                l.is_multiple_of(*p) && (0..l).all(|i| self.loop_[i] == self.loop_[(i + p) % l])
            })
            .unwrap_or(l);
        let mut stem = self.stem.clone();
        let mut lp: Vec<Valuation> = self.loop_[..period].to_vec();
        while let Some(last) = stem.last() {
            if *last != lp[period - 1] {
                break;
            }
            let v = stem.pop().expect("nonempty stem");
            lp.rotate_right(1);
            lp[0] = v;
        }
        LassoTrace { stem, loop_: lp }
    }

    /// Whether both traces denote the same infinite word.
    pub fn same_word(&self, other: &LassoTrace) -> bool {
        self.normalize() == other.normalize()
    }
}

impl std::fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |f: &mut std::fmt::Formatter<'_>, v: &Valuation| -> std::fmt::Result {
            write!(f, "{{")?;
            for (i, a) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "}}")
        };
        for v in &self.stem {
            show(f, v)?;
            write!(f, " ")?;
        }
        write!(f, "(")?;
        for (i, v) in self.loop_.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            show(f, v)?;
        }
        write!(f, ")^w")
    }
}

/// Whether `t` satisfies `psi` at time `i`.
pub fn eval_ltl(t: &LassoTrace, i: usize, psi: &LtlFormula) -> bool {
    let shape = t.shape();
    let v = eval_classes(psi, shape, &mut |a, k| t.class(k).contains(a));
    v[shape.class(i)]
}

/// Whether the trace set `traces` satisfies `phi`.
///
/// Quantifiers range over `traces`, and several variables may pick the same
/// trace. An empty set satisfies every universal formula.
///
/// # Panics
///
/// If the body mentions a trace variable that the prefix does not bind.
pub fn eval_hyperltl(traces: &[LassoTrace], phi: &HyperLtlFormula) -> bool {
    let mut assignment = BTreeMap::new();
    quantify(&phi.prefix, traces.len(), &mut assignment, &mut |asg| {
        eval_body(traces, asg, &phi.body)
    })
    .unwrap_or_else(|e| panic!("{e}"))
}

fn eval_body(
    traces: &[LassoTrace],
    asg: &BTreeMap<TraceVar, usize>,
    body: &Formula<crate::syntax::IndexedAp>,
) -> Result<bool, SemanticsError> {
    let chosen: Vec<usize> = asg.values().copied().collect();
    let shape = Shape::zip(
        &chosen
            .iter()
            .map(|&j| traces[j].shape())
            .collect::<Vec<_>>(),
    );
    let mut err = None;
    let v = eval_classes(body, shape, &mut |a, k| match asg.get(&a.var) {
        Some(&j) => traces[j].at(k).contains(&a.ap),
        None => {
            err.get_or_insert(SemanticsError::UnboundVariable(a.var.to_string()));
            false
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v[0]),
    }
}

/// Evaluates a quantifier-free body under an assignment of trace variables.
pub(crate) type Body<'a> =
    dyn FnMut(&BTreeMap<TraceVar, usize>) -> Result<bool, SemanticsError> + 'a;

/// Enumerates assignments of the prefix variables to indices `0..n`.
pub(crate) fn quantify(
    prefix: &[crate::syntax::Quantifier],
    n: usize,
    asg: &mut BTreeMap<TraceVar, usize>,
    body: &mut Body<'_>,
) -> Result<bool, SemanticsError> {
    let Some((q, rest)) = prefix.split_first() else {
        return body(asg);
    };
    let want = q.kind == QuantKind::Exists;
    for j in 0..n {
        let prev = asg.insert(q.var.clone(), j);
        let r = quantify(rest, n, asg, body);
        match prev {
            Some(p) => asg.insert(q.var.clone(), p),
            None => asg.remove(&q.var),
        };
        if r? == want {
            return Ok(want);
        }
    }
    Ok(!want)
}
