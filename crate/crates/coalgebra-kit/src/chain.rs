//! Terminal-coalgebra chain iteration: the levels `1 ← F1 ← FF1 ← …`
//! materialized as finite carriers with explicit connecting tables, for both
//! set-valued and metric-valued functor expressions.
//!
//! Level 0 is the singleton carrier; level n+1 applies the functor to level
//! n, and the connecting map at level n+1 is the functor's action on the
//! previous connecting map (the map at level 1 being the unique map to the
//! singleton). A compatible sequence picks one element per level, matched by
//! the connecting maps; for the plain power-set chain such sequences are in
//! bijection with canonical trees, which is what [`sequence_to_tree`] and
//! [`trees_as_level`] realize.

use thiserror::Error;

use crate::functor::{eval_metric, eval_set, value_action, FunctorError, FunctorExpr};
use crate::metrics::{is_nonexpanding, FinMetricSpace, MetricError};
use crate::trees::CanonicalTree;
use crate::value::{FiniteSet, SetFunction, Value};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("budget exceeded at level {level}: {source}")]
    BudgetExceeded {
        level: usize,
        #[source]
        source: FunctorError,
    },
    #[error("level {level}: {source}")]
    Eval {
        level: usize,
        #[source]
        source: FunctorError,
    },
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("incompatible sequence: {0}")]
    Incompatible(String),
    #[error("not an element of a power-set chain level: {0}")]
    NotPfValue(String),
    #[error("tree level {requested} exceeds the budgeted bound {bound}")]
    TreeLevelBudget { requested: usize, bound: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn at_level(level: usize) -> impl Fn(FunctorError) -> ChainError {
    move |source| match source {
        FunctorError::BudgetExceeded { .. } => ChainError::BudgetExceeded { level, source },
        other => ChainError::Eval {
            level,
            source: other,
        },
    }
}

/// Carrier of one chain level.
#[derive(Debug, Clone, PartialEq)]
pub enum Carrier {
    Set(FiniteSet),
    Metric(FinMetricSpace),
}

impl Carrier {
    pub fn underlying(&self) -> &FiniteSet {
        match self {
            Carrier::Set(s) => s,
            Carrier::Metric(m) => m.points(),
        }
    }

    pub fn len(&self) -> usize {
        self.underlying().len()
    }

    pub fn is_empty(&self) -> bool {
        self.underlying().is_empty()
    }

    pub fn metric(&self) -> Option<&FinMetricSpace> {
        match self {
            Carrier::Set(_) => None,
            Carrier::Metric(m) => Some(m),
        }
    }
}

/// One stage of a terminal-coalgebra chain: the carrier at index n and the
/// connecting map down to index n-1 (absent at n = 0).
#[derive(Debug, Clone)]
pub struct ChainLevel {
    pub index: usize,
    pub carrier: Carrier,
    pub connect: Option<SetFunction>,
}

/// A finite prefix of the terminal-coalgebra chain for one functor
/// expression.
#[derive(Debug, Clone)]
pub struct Chain {
    expr: FunctorExpr,
    levels: Vec<ChainLevel>,
}

impl Chain {
    pub fn expr(&self) -> &FunctorExpr {
        &self.expr
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &ChainLevel {
        &self.levels[n]
    }

    pub fn carrier_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.carrier.len()).collect()
    }

    /// JSON form: an array of levels with element tables, connecting tables
    /// (codomain indices, aligned with the element table), and a distance
    /// matrix in exact rational strings on metric levels.
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .map(|l| {
                let mut obj = serde_json::Map::new();
                obj.insert("index".into(), l.index.into());
                let elements: Vec<serde_json::Value> = l
                    .carrier
                    .underlying()
                    .iter()
                    .map(|v| v.to_string().into())
                    .collect();
                obj.insert("elements".into(), elements.into());
                if let Some(c) = &l.connect {
                    let connect: Vec<serde_json::Value> = (0..c.domain().len())
                        .map(|i| c.apply_index(i).into())
                        .collect();
                    obj.insert("connect".into(), connect.into());
                }
                if let Some(m) = l.carrier.metric() {
                    let rows: Vec<serde_json::Value> = (0..m.len())
                        .map(|i| {
                            let row: Vec<serde_json::Value> = (0..m.len())
                                .map(|j| m.dist_by_index(i, j).to_string().into())
                                .collect();
                            row.into()
                        })
                        .collect();
                    obj.insert("dist".into(), rows.into());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "functor": self.expr.to_string(),
            "levels": levels,
        })
    }
}

/// Iterates a set-valued expression on the unique map to the singleton:
/// level n+1 is `F` applied to level n, the connecting map at level n+1 is
/// `F` applied to the previous connecting map.
pub fn kripke_chain(expr: &FunctorExpr, depth: usize, budget: usize) -> Result<Chain, ChainError> {
    let mut levels = vec![ChainLevel {
        index: 0,
        carrier: Carrier::Set(FiniteSet::singleton_unit()),
        connect: None,
    }];
    for k in 1..=depth {
        let prev = &levels[k - 1];
        let prev_set = prev.carrier.underlying().clone();
        let carrier = eval_set(expr, &prev_set, budget).map_err(at_level(k))?;
        let connect = match &prev.connect {
            None => SetFunction::constant(carrier.clone(), prev_set, &Value::Unit)
                .expect("the singleton carrier contains the unit"),
            Some(prev_connect) => {
                tabulate_connect(expr, prev_connect, &carrier, &prev_set).map_err(at_level(k))?
            }
        };
        levels.push(ChainLevel {
            index: k,
            carrier: Carrier::Set(carrier),
            connect: Some(connect),
        });
    }
    Ok(Chain {
        expr: expr.clone(),
        levels,
    })
}

/// `F` applied to the previous connecting map, tabulated directly on the
/// already-built carriers (equal to `eval_map(F, prev)` but without
/// re-deriving its domain and codomain).
fn tabulate_connect(
    expr: &FunctorExpr,
    prev: &SetFunction,
    domain: &FiniteSet,
    codomain: &FiniteSet,
) -> Result<SetFunction, FunctorError> {
    let base = std::rc::Rc::new(|v: &Value| {
        prev.apply(v)
            .expect("chain elements are built over the previous carrier")
            .clone()
    });
    let act = value_action(expr, base)?;
    Ok(SetFunction::new(domain.clone(), codomain.clone(), |v| {
        act(v)
    })?)
}

/// The metric chain: carriers via metric evaluation, connecting maps shared
/// with the set-valued chain of the `Pf`-analogue (the Hausdorff functor
/// acts on maps by direct image). Connecting maps are checked nonexpanding.
pub fn hausdorff_chain(
    expr: &FunctorExpr,
    depth: usize,
    budget: usize,
) -> Result<Chain, ChainError> {
    let set_expr = expr.pf_analogue();
    let mut levels = vec![ChainLevel {
        index: 0,
        carrier: Carrier::Metric(FinMetricSpace::singleton_unit()),
        connect: None,
    }];
    for k in 1..=depth {
        let prev = &levels[k - 1];
        let prev_metric = prev.carrier.metric().unwrap().clone();
        let carrier = eval_metric(expr, &prev_metric, budget).map_err(at_level(k))?;
        let connect = match &prev.connect {
            None => SetFunction::constant(
                carrier.points().clone(),
                prev_metric.points().clone(),
                &Value::Unit,
            )
            .expect("the singleton carrier contains the unit"),
            Some(prev_connect) => tabulate_connect(
                &set_expr,
                prev_connect,
                carrier.points(),
                prev_metric.points(),
            )
            .map_err(at_level(k))?,
        };
        if !is_nonexpanding(&connect, &carrier, &prev_metric)? {
            return Err(ChainError::Eval {
                level: k,
                source: FunctorError::KindMismatch("connecting map is not nonexpanding".into()),
            });
        }
        levels.push(ChainLevel {
            index: k,
            carrier: Carrier::Metric(carrier),
            connect: Some(connect),
        });
    }
    Ok(Chain {
        expr: expr.clone(),
        levels,
    })
}

/// Largest level the tree enumeration will materialize: level 4 already
/// holds 65536 trees and level 5 would hold 2^65536.
pub const TREE_LEVEL_BOUND: usize = 4;

/// All canonical trees of height at most n: the tree view of level n of the
/// power-set chain. Bijective with `kripke_chain(Pf, n)` level n via
/// [`tree_to_level_value`], commuting with the connecting maps (truncation
/// on trees).
pub fn trees_as_level(n: usize) -> Result<Vec<CanonicalTree>, ChainError> {
    if n > TREE_LEVEL_BOUND {
        return Err(ChainError::TreeLevelBudget {
            requested: n,
            bound: TREE_LEVEL_BOUND,
        });
    }
    let mut level = vec![CanonicalTree::leaf()];
    for _ in 0..n {
        let prev = level;
        let mut next = Vec::with_capacity(1usize << prev.len());
        for mask in 0u64..(1u64 << prev.len()) {
            let kids = prev
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &t)| t);
            next.push(CanonicalTree::node(kids));
        }
        next.sort();
        next.dedup();
        level = next;
    }
    Ok(level)
}

/// Encodes a canonical tree of height <= n as the corresponding element of
/// power-set chain level n (`None` if the tree is too tall). The leaf at
/// level 0 is the unit; at higher levels a tree is the set of its child
/// encodings.
pub fn tree_to_level_value(t: &CanonicalTree, n: usize) -> Option<Value> {
    if t.height() > n {
        return None;
    }
    if n == 0 {
        return Some(Value::Unit);
    }
    Some(Value::set(t.children().iter().map(|c| {
        tree_to_level_value(c, n - 1).expect("children are strictly lower")
    })))
}

/// Decodes an element of a power-set chain level back into the canonical
/// tree it represents.
pub fn value_to_tree(v: &Value) -> Result<CanonicalTree, ChainError> {
    match v {
        Value::Unit => Ok(CanonicalTree::leaf()),
        Value::Set(vs) => {
            let kids = vs
                .iter()
                .map(value_to_tree)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CanonicalTree::node(kids))
        }
        other => Err(ChainError::NotPfValue(other.to_string())),
    }
}

/// A choice of one element per chain level, `x_0 … x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleSequence {
    pub entries: Vec<Value>,
}

impl CompatibleSequence {
    pub fn new(entries: Vec<Value>) -> CompatibleSequence {
        CompatibleSequence { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Checks the connecting equations `connect(x_{n+1}) = x_n` against a
/// materialized chain. Entries must be typed against the chain: sequence no
/// longer than the chain, every entry an element of its level's carrier.
pub fn check_compatible(chain: &Chain, seq: &CompatibleSequence) -> Result<bool, ChainError> {
    if seq.entries.len() > chain.levels.len() {
        return Err(ChainError::LevelMismatch(format!(
            "sequence has {} entries but the chain has {} levels",
            seq.entries.len(),
            chain.levels.len()
        )));
    }
    for (n, x) in seq.entries.iter().enumerate() {
        if !chain.levels[n].carrier.underlying().contains(x) {
            return Err(ChainError::LevelMismatch(format!(
                "entry {x} is not an element of level {n}"
            )));
        }
    }
    for n in 1..seq.entries.len() {
        let connect = chain.levels[n].connect.as_ref().expect("level > 0");
        let image = connect
            .apply(&seq.entries[n])
            .expect("entry checked against the carrier");
        if image != &seq.entries[n - 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truncation of a power-set level value down to level n (the connecting
/// maps of the power-set chain, applied value-wise).
fn truncate_value(v: &Value, n: usize) -> Result<Value, ChainError> {
    if n == 0 {
        return Ok(Value::Unit);
    }
    match v {
        Value::Set(vs) => Ok(Value::set(
            vs.iter()
                .map(|m| truncate_value(m, n - 1))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        other => Err(ChainError::NotPfValue(other.to_string())),
    }
}

/// Rebuilds the canonical tree behind a compatible sequence over the
/// power-set chain: the unique canonical tree t with `∂_n(t) = x_n` for
/// every n up to the sequence length.
///
/// Compatibility is checked value-wise (the power-set connecting maps are
/// truncations), so no materialized chain is needed and the sequence may be
/// longer than any buildable chain prefix.
pub fn sequence_to_tree(seq: &CompatibleSequence) -> Result<CanonicalTree, ChainError> {
    let last = match seq.entries.last() {
        Some(last) => last,
        None => {
            return Err(ChainError::LevelMismatch(
                "empty sequence has no tree".into(),
            ))
        }
    };
    for (n, x) in seq.entries.iter().enumerate() {
        // validates the nesting depth as a side effect
        let t = value_to_tree(x)?;
        if t.height() > n {
            return Err(ChainError::LevelMismatch(format!(
                "entry {x} nests deeper than its level {n}"
            )));
        }
        let truncated = truncate_value(last, n)?;
        if &truncated != x {
            return Err(ChainError::Incompatible(format!(
                "connecting equation fails at level {n}: expected {truncated}, found {x}"
            )));
        }
    }
    value_to_tree(last)
}
