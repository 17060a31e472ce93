//! Structured values and finite sets.
//!
//! Carriers of chain levels and functor evaluations are finite sets of
//! [`Value`]s: atoms, tuples, tagged values and finite subsets, closed under
//! the functor grammar's actions. Equality is canonical-form equality: sets
//! are kept sorted and duplicate-free all the way down, so set-of-sets
//! equality is decidable and stable.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValueError {
    #[error("element {0} is not in the domain")]
    NotInDomain(String),
    #[error("image {0} is not in the codomain")]
    NotInCodomain(String),
    #[error("domain mismatch: expected {expected} elements, got {got}")]
    DomainMismatch { expected: usize, got: usize },
}

/// A structured value: the elements that chain carriers and functor
/// evaluations are made of.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    /// The unique element of the terminal object 1.
    Unit,
    /// An integer atom (elements of `C<n>` constants are `Int(0..n)`).
    Int(i64),
    /// A named atom.
    Str(String),
    /// An element of a product.
    Tuple(Vec<Value>),
    /// An element of a coproduct: summand index plus payload.
    Tagged(usize, Box<Value>),
    /// A finite subset; kept sorted and deduplicated.
    Set(Vec<Value>),
}

impl Value {
    /// Builds a set value in canonical form (sorted, duplicates removed).
    pub fn set(elems: impl IntoIterator<Item = Value>) -> Value {
        let mut v: Vec<Value> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        Value::Set(v)
    }

    pub fn tagged(tag: usize, payload: Value) -> Value {
        Value::Tagged(tag, Box::new(payload))
    }

    /// True if the value is canonical: every `Set` inside is sorted and
    /// duplicate-free.
    pub fn is_canonical(&self) -> bool {
        match self {
            Value::Unit | Value::Int(_) | Value::Str(_) => true,
            Value::Tuple(vs) => vs.iter().all(Value::is_canonical),
            Value::Tagged(_, v) => v.is_canonical(),
            Value::Set(vs) => {
                vs.windows(2).all(|w| w[0] < w[1]) && vs.iter().all(Value::is_canonical)
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "*"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => write!(f, "{s}"),
            Value::Tuple(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
            Value::Tagged(tag, v) => write!(f, "in{tag}({v})"),
            Value::Set(vs) => {
                write!(f, "{{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// A finite set of values with no duplicates under structural equality.
///
/// Elements are stored sorted, so iteration order is deterministic and
/// membership is a binary search.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteSet {
    elems: Vec<Value>,
}

impl FiniteSet {
    pub fn new(elems: impl IntoIterator<Item = Value>) -> FiniteSet {
        let mut elems: Vec<Value> = elems.into_iter().collect();
        elems.sort();
        elems.dedup();
        FiniteSet { elems }
    }

    pub fn empty() -> FiniteSet {
        FiniteSet::default()
    }

    /// The one-element set carrying the terminal object 1.
    pub fn singleton_unit() -> FiniteSet {
        FiniteSet::new([Value::Unit])
    }

    /// `{Int(0), ..., Int(n-1)}`.
    pub fn range(n: usize) -> FiniteSet {
        FiniteSet::new((0..n).map(|i| Value::Int(i as i64)))
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.elems.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.elems.binary_search(v).ok()
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.elems[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.elems
    }

    /// The powerset, each subset as a canonical `Value::Set`.
    pub fn subsets(&self) -> Vec<Value> {
        let n = self.elems.len();
        let mut out = Vec::with_capacity(1usize << n);
        for mask in 0u64..(1u64 << n) {
            let members = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.elems[i].clone());
            out.push(Value::set(members));
        }
        out
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Value> for FiniteSet {
    fn from_iter<T: IntoIterator<Item = Value>>(iter: T) -> Self {
        FiniteSet::new(iter)
    }
}

/// A total function between finite sets, materialized as an index table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    domain: FiniteSet,
    codomain: FiniteSet,
    /// `graph[i]` is the codomain index of the image of `domain.get(i)`.
    graph: Vec<usize>,
}

impl SetFunction {
    /// Tabulates `f` on `domain`; every image must land in `codomain`.
    pub fn new(
        domain: FiniteSet,
        codomain: FiniteSet,
        f: impl Fn(&Value) -> Value,
    ) -> Result<SetFunction, ValueError> {
        let index: std::collections::HashMap<&Value, usize> =
            codomain.iter().enumerate().map(|(j, v)| (v, j)).collect();
        let mut graph = Vec::with_capacity(domain.len());
        for v in domain.iter() {
            let img = f(v);
            let j = *index
                .get(&img)
                .ok_or_else(|| ValueError::NotInCodomain(img.to_string()))?;
            graph.push(j);
        }
        drop(index);
        Ok(SetFunction {
            domain,
            codomain,
            graph,
        })
    }

    pub fn identity(set: FiniteSet) -> SetFunction {
        let graph = (0..set.len()).collect();
        SetFunction {
            domain: set.clone(),
            codomain: set,
            graph,
        }
    }

    /// The unique map into a singleton codomain.
    pub fn constant(
        domain: FiniteSet,
        codomain: FiniteSet,
        value: &Value,
    ) -> Result<SetFunction, ValueError> {
        let j = codomain
            .index_of(value)
            .ok_or_else(|| ValueError::NotInCodomain(value.to_string()))?;
        let graph = vec![j; domain.len()];
        Ok(SetFunction {
            domain,
            codomain,
            graph,
        })
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn apply(&self, v: &Value) -> Result<&Value, ValueError> {
        let i = self
            .domain
            .index_of(v)
            .ok_or_else(|| ValueError::NotInDomain(v.to_string()))?;
        Ok(self.codomain.get(self.graph[i]))
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.graph[i]
    }

    /// `self` after `other` (`self ∘ other`); `other`'s codomain must equal
    /// `self`'s domain.
    pub fn compose(&self, other: &SetFunction) -> Result<SetFunction, ValueError> {
        if other.codomain != self.domain {
            return Err(ValueError::DomainMismatch {
                expected: self.domain.len(),
                got: other.codomain.len(),
            });
        }
        let graph = other.graph.iter().map(|&i| self.graph[i]).collect();
        Ok(SetFunction {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            graph,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.graph.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Direct image of a set value under this function.
    pub fn direct_image(&self, members: &[Value]) -> Result<Value, ValueError> {
        let mut imgs = Vec::with_capacity(members.len());
        for m in members {
            imgs.push(self.apply(m)?.clone());
        }
        Ok(Value::set(imgs))
    }
}
