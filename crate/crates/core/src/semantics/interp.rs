//! Finite interpretations of function and predicate symbols.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use super::SemanticsError;
use crate::syntax::{FunctionTerm, PredicateTerm, TermSets};

/// Index of a value in the domain of an [`Interpretation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
struct Table<T> {
    arity: usize,
    values: Vec<T>,
}

impl<T: Copy> Table<T> {
    fn index(&self, name: &str, args: &[Value], domain: usize) -> Result<usize, SemanticsError> {
        if args.len() != self.arity {
            return Err(SemanticsError::Arity {
                name: name.to_string(),
                expected: self.arity,
                found: args.len(),
            });
        }
        let mut idx = 0;
        for a in args {
            if a.0 >= domain {
                return Err(SemanticsError::ValueOutOfDomain(a.0));
            }
            idx = idx * domain + a.0;
        }
        Ok(idx)
    }
}

/// Symbols and arities that an interpretation has to cover.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, usize>,
    pub cells: BTreeSet<String>,
    pub inputs: BTreeSet<String>,
}

impl Signature {
    pub fn of_terms(terms: &TermSets) -> Signature {
        let mut sig = Signature {
            cells: terms.cells.clone(),
            inputs: terms.inputs.clone(),
            ..Signature::default()
        };
        let mut fs = Vec::new();
        for p in &terms.predicates {
            if let PredicateTerm::Apply { name, args } = p {
                sig.predicates.insert(name.clone(), args.len());
                args.iter().for_each(|a| a.functions(&mut fs));
            }
        }
        for u in &terms.updates {
            u.source.functions(&mut fs);
        }
        sig.functions.extend(fs);
        sig
    }

    pub fn extend(&mut self, other: &Signature) {
        self.functions.extend(other.functions.clone());
        self.predicates.extend(other.predicates.clone());
        self.cells.extend(other.cells.iter().cloned());
        self.inputs.extend(other.inputs.iter().cloned());
    }
}

/// A finite domain with total tables for every function and predicate symbol,
/// plus the initial value of every cell.
///
/// Boolean inputs read as signal predicates are true exactly when they carry
/// the domain value named `true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    domain: Vec<String>,
    functions: BTreeMap<String, Table<Value>>,
    predicates: BTreeMap<String, Table<bool>>,
    cells: BTreeMap<String, Value>,
}

impl Interpretation {
    pub fn new(domain: Vec<String>) -> Result<Self, SemanticsError> {
        let distinct: BTreeSet<_> = domain.iter().collect();
        if domain.is_empty() || distinct.len() != domain.len() {
            return Err(SemanticsError::Fixture(
                "the domain must be a nonempty list of distinct values".into(),
            ));
        }
        Ok(Interpretation {
            domain,
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
            cells: BTreeMap::new(),
        })
    }

    /// The domain `false, true, v2, v3, ...` of the given size (at least 2).
    pub fn standard_domain(size: usize) -> Vec<String> {
        let mut d = vec!["false".to_string(), "true".to_string()];
        d.extend((2..size.max(2)).map(|i| format!("v{i}")));
        d
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn value(&self, name: &str) -> Result<Value, SemanticsError> {
        self.domain
            .iter()
            .position(|d| d == name)
            .map(Value)
            .ok_or_else(|| SemanticsError::UnknownValue(name.to_string()))
    }

    pub fn name(&self, v: Value) -> &str {
        &self.domain[v.0]
    }

    pub fn is_true(&self, v: Value) -> bool {
        self.domain[v.0] == "true"
    }

    pub fn set_function(&mut self, name: &str, arity: usize, f: impl Fn(&[Value]) -> Value) {
        let values = all_tuples(self.domain.len(), arity)
            .map(|args| f(&args))
            .collect();
        self.functions
            .insert(name.to_string(), Table { arity, values });
    }

    pub fn set_predicate(&mut self, name: &str, arity: usize, f: impl Fn(&[Value]) -> bool) {
        let values = all_tuples(self.domain.len(), arity)
            .map(|args| f(&args))
            .collect();
        self.predicates
            .insert(name.to_string(), Table { arity, values });
    }

    pub fn set_cell(&mut self, cell: &str, init: Value) {
        self.cells.insert(cell.to_string(), init);
    }

    pub fn cells(&self) -> impl Iterator<Item = (&str, Value)> {
        self.cells.iter().map(|(c, v)| (c.as_str(), *v))
    }

    pub fn is_cell(&self, name: &str) -> bool {
        self.cells.contains_key(name)
    }

    pub fn cell_init(&self, cell: &str) -> Result<Value, SemanticsError> {
        self.cells
            .get(cell)
            .copied()
            .ok_or_else(|| SemanticsError::UnknownSymbol(cell.to_string()))
    }

    pub fn apply_function(&self, name: &str, args: &[Value]) -> Result<Value, SemanticsError> {
        let t = self
            .functions
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownFunction(name.to_string()))?;
        let out = t.values[t.index(name, args, self.domain.len())?];
        if out.0 >= self.domain.len() {
            return Err(SemanticsError::ValueOutOfDomain(out.0));
        }
        Ok(out)
    }

    pub fn apply_predicate(&self, name: &str, args: &[Value]) -> Result<bool, SemanticsError> {
        let t = self
            .predicates
            .get(name)
            .ok_or_else(|| SemanticsError::UnknownPredicate(name.to_string()))?;
        Ok(t.values[t.index(name, args, self.domain.len())?])
    }

    /// Uniformly random tables over the standard domain of size `domain_size`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, domain_size: usize, sig: &Signature) -> Self {
        let domain = Self::standard_domain(domain_size);
        let n = domain.len();
        let mut interp = Interpretation::new(domain).expect("standard domain is valid");
        for (f, &arity) in &sig.functions {
            let values = (0..n.pow(arity as u32))
                .map(|_| Value(rng.random_range(0..n)))
                .collect();
            interp.functions.insert(f.clone(), Table { arity, values });
        }
        for (p, &arity) in &sig.predicates {
            let values = (0..n.pow(arity as u32))
                .map(|_| rng.random_bool(0.5))
                .collect();
            interp.predicates.insert(p.clone(), Table { arity, values });
        }
        for c in &sig.cells {
            interp
                .cells
                .insert(c.clone(), Value(rng.random_range(0..n)));
        }
        interp
    }

    /// Whether every function, predicate and cell of `sig` has a table of the
    /// right arity.
    pub fn covers(&self, sig: &Signature) -> Result<(), SemanticsError> {
        for (f, &arity) in &sig.functions {
            match self.functions.get(f) {
                None => return Err(SemanticsError::UnknownFunction(f.clone())),
                Some(t) if t.arity != arity => {
                    return Err(SemanticsError::Arity {
                        name: f.clone(),
                        expected: t.arity,
                        found: arity,
                    })
                }
                _ => {}
            }
        }
        for (p, &arity) in &sig.predicates {
            match self.predicates.get(p) {
                None => return Err(SemanticsError::UnknownPredicate(p.clone())),
                Some(t) if t.arity != arity => {
                    return Err(SemanticsError::Arity {
                        name: p.clone(),
                        expected: t.arity,
                        found: arity,
                    })
                }
                _ => {}
            }
        }
        for c in &sig.cells {
            self.cell_init(c)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SemanticsError> {
        let raw: InterpretationJson =
            serde_json::from_str(text).map_err(|e| SemanticsError::Fixture(e.to_string()))?;
        raw.build()
    }

    pub fn to_json(&self) -> String {
        let table = |arity: usize, out: &dyn Fn(usize) -> String| TableJson {
            arity,
            table: all_tuples(self.domain.len(), arity)
                .enumerate()
                .map(|(i, args)| {
                    let mut row: Vec<String> =
                        args.iter().map(|a| self.domain[a.0].clone()).collect();
                    row.push(out(i));
                    row
                })
                .collect(),
            default: None,
        };
        let raw = InterpretationJson {
            domain: self.domain.clone(),
            functions: self
                .functions
                .iter()
                .map(|(f, t)| {
                    (
                        f.clone(),
                        table(t.arity, &|i| self.domain[t.values[i].0].clone()),
                    )
                })
                .collect(),
            predicates: self
                .predicates
                .iter()
                .map(|(p, t)| (p.clone(), table(t.arity, &|i| t.values[i].to_string())))
                .collect(),
            cells: self
                .cells
                .iter()
                .map(|(c, v)| (c.clone(), self.domain[v.0].clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("interpretations serialize")
    }
}

/// Every tuple of `arity` values over a domain of size `n`, in mixed-radix order
/// with the first argument most significant.
fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<Value>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut idx| {
        let mut args = vec![Value(0); arity];
        for slot in args.iter_mut().rev() {
            *slot = Value(idx % n);
            idx /= n;
        }
        args
    })
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    arity: usize,
    #[serde(default)]
    table: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct InterpretationJson {
    domain: Vec<String>,
    #[serde(default)]
    functions: BTreeMap<String, TableJson>,
    #[serde(default)]
    predicates: BTreeMap<String, TableJson>,
    #[serde(default)]
    cells: BTreeMap<String, String>,
}

impl InterpretationJson {
    fn build(self) -> Result<Interpretation, SemanticsError> {
        let mut interp = Interpretation::new(self.domain)?;
        let n = interp.domain.len();
        let rows = |name: &str,
                    t: &TableJson,
                    interp: &Interpretation|
         -> Result<Vec<Option<String>>, SemanticsError> {
            let mut out = vec![t.default.clone(); n.pow(t.arity as u32)];
            for row in &t.table {
                if row.len() != t.arity + 1 {
                    return Err(SemanticsError::Arity {
                        name: name.to_string(),
                        expected: t.arity,
                        found: row.len().saturating_sub(1),
                    });
                }
                let mut idx = 0;
                for a in &row[..t.arity] {
                    idx = idx * n + interp.value(a)?.0;
                }
                out[idx] = Some(row[t.arity].clone());
            }
            Ok(out)
        };
        for (f, t) in &self.functions {
            let values = rows(f, t, &interp)?
                .into_iter()
                .map(|v| {
                    let v = v.ok_or_else(|| SemanticsError::PartialTable(f.clone()))?;
                    interp.value(&v)
                })
                .collect::<Result<_, _>>()?;
            interp.functions.insert(
                f.clone(),
                Table {
                    arity: t.arity,
                    values,
                },
            );
        }
        for (p, t) in &self.predicates {
            let values = rows(p, t, &interp)?
                .into_iter()
                .map(|v| match v.as_deref() {
                    Some("true") => Ok(true),
                    Some("false") => Ok(false),
                    Some(other) => Err(SemanticsError::UnknownValue(other.to_string())),
                    None => Err(SemanticsError::PartialTable(p.clone())),
                })
                .collect::<Result<_, _>>()?;
            interp.predicates.insert(
                p.clone(),
                Table {
                    arity: t.arity,
                    values,
                },
            );
        }
        for (c, v) in &self.cells {
            let v = interp.value(v)?;
            interp.cells.insert(c.clone(), v);
        }
        Ok(interp)
    }
}

/// Evaluates a function term given values for its symbols.
pub(crate) fn apply_term(
    interp: &Interpretation,
    term: &FunctionTerm,
    symbol: &mut dyn FnMut(&str) -> Result<Value, SemanticsError>,
) -> Result<Value, SemanticsError> {
    match term {
        FunctionTerm::Symbol(s) => symbol(s),
        FunctionTerm::Apply { name, args } => {
            let vals = args
                .iter()
                .map(|a| apply_term(interp, a, symbol))
                .collect::<Result<Vec<_>, _>>()?;
            interp.apply_function(name, &vals)
        }
    }
}
