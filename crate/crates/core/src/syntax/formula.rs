//! Generic temporal operator tree shared by TSL, HyperTSL, LTL and HyperLTL.

use std::fmt;

/// Temporal formula over atoms of type `A`.
///
/// The core connectives are `Not`, `And`, `Next`, `Until` and `True`; every
/// other variant is sugar that [`Formula::desugar`] removes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Box<Formula<A>>, Box<Formula<A>>),
    Or(Box<Formula<A>>, Box<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
    Next(Box<Formula<A>>),
    Until(Box<Formula<A>>, Box<Formula<A>>),
    Eventually(Box<Formula<A>>),
    Globally(Box<Formula<A>>),
    WeakUntil(Box<Formula<A>>, Box<Formula<A>>),
    Release(Box<Formula<A>>, Box<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Self, r: Self) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Self, r: Self) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Self, r: Self) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Self, r: Self) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    /// Exclusive or, written as a negated equivalence.
    pub fn xor(l: Self, r: Self) -> Self {
        Formula::not(Formula::iff(l, r))
    }

    pub fn next(f: Self) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Self, r: Self) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn eventually(f: Self) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn globally(f: Self) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn weak_until(l: Self, r: Self) -> Self {
        Formula::WeakUntil(Box::new(l), Box::new(r))
    }

    pub fn release(l: Self, r: Self) -> Self {
        Formula::Release(Box::new(l), Box::new(r))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Direct children in left-to-right order.
    pub fn children(&self) -> Vec<&Formula<A>> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Eventually(a) | Globally(a) => vec![a],
            And(a, b)
            | Or(a, b)
            | Implies(a, b)
            | Iff(a, b)
            | Until(a, b)
            | WeakUntil(a, b)
            | Release(a, b) => vec![a, b],
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::depth)
            .max()
            .unwrap_or(0)
    }

    /// Visits every atom, left to right.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        if let Formula::Atom(a) = self {
            f(a);
        }
        for c in self.children() {
            c.for_each_atom(f);
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| out.push(a));
        out
    }

    /// True when the formula has no temporal operator.
    pub fn is_propositional(&self) -> bool {
        use Formula::*;
        match self {
            Next(_) | Until(..) | Eventually(_) | Globally(_) | WeakUntil(..) | Release(..) => {
                false
            }
            _ => self.children().into_iter().all(Formula::is_propositional),
        }
    }

    /// True when only `true`, atoms, `!`, `&&`, `X` and `U` occur.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | Atom(_) => true,
            Not(a) | Next(a) => a.is_core(),
            And(a, b) | Until(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    /// Rebuilds the tree with every atom replaced by `f(atom)`.
    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        self.try_map_atoms::<B, std::convert::Infallible>(&mut |a| Ok(f(a)))
            .unwrap_or_else(|e| match e {})
    }

    /// Like [`Formula::map_atoms`], but an atom may be replaced by a whole formula.
    pub fn substitute<B>(&self, f: &mut impl FnMut(&A) -> Formula<B>) -> Formula<B> {
        use Formula::*;
        let b = |x: &Formula<A>, f: &mut dyn FnMut(&A) -> Formula<B>| -> Box<Formula<B>> {
            Box::new(x.substitute(&mut |a: &A| f(a)))
        };
        match self {
            True => True,
            False => False,
            Atom(a) => f(a),
            Not(x) => Not(b(x, f)),
            Next(x) => Next(b(x, f)),
            Eventually(x) => Eventually(b(x, f)),
            Globally(x) => Globally(b(x, f)),
            And(x, y) => And(b(x, f), b(y, f)),
            Or(x, y) => Or(b(x, f), b(y, f)),
            Implies(x, y) => Implies(b(x, f), b(y, f)),
            Iff(x, y) => Iff(b(x, f), b(y, f)),
            Until(x, y) => Until(b(x, f), b(y, f)),
            WeakUntil(x, y) => WeakUntil(b(x, f), b(y, f)),
            Release(x, y) => Release(b(x, f), b(y, f)),
        }
    }

    pub fn try_map_atoms<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<B, E>,
    ) -> Result<Formula<B>, E> {
        use Formula::*;
        Ok(match self {
            True => True,
            False => False,
            Atom(a) => Atom(f(a)?),
            Not(x) => Not(Box::new(x.try_map_atoms(f)?)),
            Next(x) => Next(Box::new(x.try_map_atoms(f)?)),
            Eventually(x) => Eventually(Box::new(x.try_map_atoms(f)?)),
            Globally(x) => Globally(Box::new(x.try_map_atoms(f)?)),
            And(x, y) => And(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
            Or(x, y) => Or(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
            Implies(x, y) => Implies(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
            Iff(x, y) => Iff(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
            Until(x, y) => Until(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
            WeakUntil(x, y) => {
                WeakUntil(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?))
            }
            Release(x, y) => Release(Box::new(x.try_map_atoms(f)?), Box::new(y.try_map_atoms(f)?)),
        })
    }

    /// Flattens nested conjunctions into their operands.
    pub fn conjuncts(&self) -> Vec<&Formula<A>> {
        match self {
            Formula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }
}

impl<A: Clone> Formula<A> {
    /// Rewrites into the core operators `{!, &&, X, U, true}`.
    ///
    /// `F a = true U a`, `G a = !(true U !a)`, `a W b = (a U b) || G a`,
    /// `a R b = !(!a U !b)`; boolean sugar goes through `!` and `&&`.
    pub fn desugar(&self) -> Formula<A> {
        use Formula::*;
        let d = |x: &Formula<A>| x.desugar();
        match self {
            True => True,
            False => Formula::not(True),
            Atom(a) => Atom(a.clone()),
            Not(a) => Formula::not(d(a)),
            And(a, b) => Formula::and(d(a), d(b)),
            Or(a, b) => Formula::not(Formula::and(Formula::not(d(a)), Formula::not(d(b)))),
            Implies(a, b) => Formula::not(Formula::and(d(a), Formula::not(d(b)))),
            Iff(a, b) => {
                let (a, b) = (d(a), d(b));
                Formula::and(
                    Formula::not(Formula::and(a.clone(), Formula::not(b.clone()))),
                    Formula::not(Formula::and(b, Formula::not(a))),
                )
            }
            Next(a) => Formula::next(d(a)),
            Until(a, b) => Formula::until(d(a), d(b)),
            Eventually(a) => Formula::until(True, d(a)),
            Globally(a) => Formula::not(Formula::until(True, Formula::not(d(a)))),
            WeakUntil(a, b) => Formula::or(
                Formula::until(*a.clone(), *b.clone()),
                Formula::globally(*a.clone()),
            )
            .desugar(),
            Release(a, b) => Formula::not(Formula::until(Formula::not(d(a)), Formula::not(d(b)))),
        }
    }
}

/// Binding strength used by the printer; larger binds tighter.
fn precedence<A>(f: &Formula<A>) -> u8 {
    use Formula::*;
    match f {
        Iff(..) => 1,
        Implies(..) => 2,
        Or(..) => 3,
        And(..) => 4,
        Until(..) | WeakUntil(..) | Release(..) => 5,
        Not(_) | Next(_) | Eventually(_) | Globally(_) => 6,
        True | False | Atom(_) => 7,
    }
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        // Binary operands are parenthesised unless they are unary or atomic, so
        // the output re-parses to the same tree regardless of associativity.
        let operand = |x: &Formula<A>, f: &mut fmt::Formatter<'_>| {
            if precedence(x) >= 6 {
                write!(f, "{x}")
            } else {
                write!(f, "({x})")
            }
        };
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(a) => write!(f, "{a}"),
            Not(a) => {
                write!(f, "!")?;
                operand(a, f)
            }
            Next(a) | Eventually(a) | Globally(a) => {
                let op = match self {
                    Next(_) => "X",
                    Eventually(_) => "F",
                    _ => "G",
                };
                write!(f, "{op} ")?;
                operand(a, f)
            }
            And(a, b)
            | Or(a, b)
            | Implies(a, b)
            | Iff(a, b)
            | Until(a, b)
            | WeakUntil(a, b)
            | Release(a, b) => {
                let op = match self {
                    And(..) => "&&",
                    Or(..) => "||",
                    Implies(..) => "->",
                    Iff(..) => "<->",
                    Until(..) => "U",
                    WeakUntil(..) => "W",
                    _ => "R",
                };
                operand(a, f)?;
                write!(f, " {op} ")?;
                operand(b, f)
            }
        }
    }
}
