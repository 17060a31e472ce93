//! Finite extended metric spaces with exact arithmetic, the Hausdorff
//! lifting, and behavioral distances on finite graph generators.
//!
//! Distances are nonnegative rationals or `inf`; there is no floating point
//! anywhere, so every comparison in the test suites is exact. Empty-set
//! conventions follow the sup/inf formula: `sup ∅ = 0` and `inf ∅ = inf`,
//! which makes the distance from the empty subset to any nonempty subset
//! infinite and `d(∅,∅) = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::systems::{PointedGraph, SystemsError};
use crate::value::{FiniteSet, SetFunction, Value};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("invalid distance value: {0}")]
    BadDistance(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("point {0} is not in the space")]
    UnknownPoint(String),
    #[error("map is not total on the space: {0}")]
    PartialMap(String),
    #[error("size budget exceeded: lifting a {points}-point space needs {needed} subsets (budget {budget})")]
    BudgetExceeded {
        points: usize,
        needed: u128,
        budget: usize,
    },
    #[error("labelled input: {0}")]
    LabelledInput(String),
    #[error("unsupported alphabet: {0}")]
    BadAlphabet(String),
    #[error(transparent)]
    Systems(#[from] SystemsError),
}

/// A nonnegative extended rational: exact rational arithmetic plus `inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRat {
    Finite(BigRational),
    Infinite,
}

impl ExtRat {
    pub fn zero() -> ExtRat {
        ExtRat::Finite(BigRational::zero())
    }

    pub fn one() -> ExtRat {
        ExtRat::Finite(BigRational::one())
    }

    pub fn infinity() -> ExtRat {
        ExtRat::Infinite
    }

    pub fn ratio(num: i64, den: i64) -> ExtRat {
        ExtRat::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: u64) -> ExtRat {
        ExtRat::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// `2^{-n}`.
    pub fn pow2_neg(n: usize) -> ExtRat {
        ExtRat::Finite(BigRational::new(BigInt::one(), BigInt::one() << n))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRat::Finite(q) if q.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinite)
    }

    /// Supremum of finitely many distances; the empty supremum is 0.
    pub fn sup(values: impl IntoIterator<Item = ExtRat>) -> ExtRat {
        values
            .into_iter()
            .fold(ExtRat::zero(), |a, b| if a >= b { a } else { b })
    }

    /// Infimum of finitely many distances; the empty infimum is `inf`.
    pub fn inf(values: impl IntoIterator<Item = ExtRat>) -> ExtRat {
        values
            .into_iter()
            .fold(ExtRat::Infinite, |a, b| if a <= b { a } else { b })
    }

    pub fn max(self, other: ExtRat) -> ExtRat {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Infinite, ExtRat::Infinite) => Ordering::Equal,
            (ExtRat::Infinite, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Finite(_), ExtRat::Infinite) => Ordering::Less,
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;

    fn add(self, other: ExtRat) -> ExtRat {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinite,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Infinite => write!(f, "inf"),
            ExtRat::Finite(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl FromStr for ExtRat {
    type Err = MetricError;

    /// Accepts `"p"`, `"p/q"` and `"inf"`.
    fn from_str(s: &str) -> Result<ExtRat, MetricError> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(ExtRat::Infinite);
        }
        let bad = || MetricError::BadDistance(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        let q = BigRational::new(num, den);
        if q.is_negative() {
            return Err(bad());
        }
        Ok(ExtRat::Finite(q))
    }
}

/// A finite extended metric space: a finite point set with a symmetric exact
/// distance table satisfying the metric laws (with the usual `inf`
/// conventions in the triangle inequality).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinMetricSpace {
    points: FiniteSet,
    /// Row-major `|points| × |points|` table, aligned with the sorted order
    /// of `points`.
    dist: Vec<ExtRat>,
}

impl FinMetricSpace {
    /// Builds a space from points in any order and a distance function; the
    /// metric laws are checked, not assumed.
    pub fn new(
        points: impl IntoIterator<Item = Value>,
        d: impl Fn(&Value, &Value) -> ExtRat,
    ) -> Result<FinMetricSpace, MetricError> {
        let points = FiniteSet::new(points);
        let n = points.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(d(points.get(i), points.get(j)));
            }
        }
        let space = FinMetricSpace { points, dist };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let n = self.points.len();
        for i in 0..n {
            if !self.at(i, i).is_zero() {
                return Err(MetricError::InvalidMetric(format!(
                    "d(x,x) != 0 at {}",
                    self.points.get(i)
                )));
            }
            for j in 0..i {
                if self.at(i, j) != self.at(j, i) {
                    return Err(MetricError::InvalidMetric("asymmetric table".into()));
                }
                if self.at(i, j).is_zero() {
                    return Err(MetricError::InvalidMetric(format!(
                        "d = 0 for distinct points {} and {}",
                        self.points.get(i),
                        self.points.get(j)
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = self.at(i, j).clone() + self.at(j, k).clone();
                    if self.at(i, k) > &via {
                        return Err(MetricError::InvalidMetric(format!(
                            "triangle inequality fails on {}, {}, {}",
                            self.points.get(i),
                            self.points.get(j),
                            self.points.get(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The one-point space on `Value::Unit`.
    pub fn singleton_unit() -> FinMetricSpace {
        FinMetricSpace {
            points: FiniteSet::singleton_unit(),
            dist: vec![ExtRat::zero()],
        }
    }

    /// The discrete space (all distances 1) on `{Int(0), ..., Int(n-1)}`.
    pub fn discrete(n: usize) -> FinMetricSpace {
        Self::discrete_on(FiniteSet::range(n))
    }

    /// The discrete space (all distances 1) on the given points.
    pub fn discrete_on(points: FiniteSet) -> FinMetricSpace {
        let n = points.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(if i == j {
                    ExtRat::zero()
                } else {
                    ExtRat::one()
                });
            }
        }
        FinMetricSpace { points, dist }
    }

    pub fn points(&self) -> &FiniteSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn at(&self, i: usize, j: usize) -> &ExtRat {
        &self.dist[i * self.points.len() + j]
    }

    pub fn dist_by_index(&self, i: usize, j: usize) -> &ExtRat {
        self.at(i, j)
    }

    pub fn dist(&self, x: &Value, y: &Value) -> Result<ExtRat, MetricError> {
        let i = self
            .points
            .index_of(x)
            .ok_or_else(|| MetricError::UnknownPoint(x.to_string()))?;
        let j = self
            .points
            .index_of(y)
            .ok_or_else(|| MetricError::UnknownPoint(y.to_string()))?;
        Ok(self.at(i, j).clone())
    }

    /// Parses the metric space JSON format
    /// `{"points":[...], "dist":[[...]]}` with distance entries as rational
    /// strings (`"1/2"`, `"3"`, `"inf"`) or plain nonnegative integers.
    /// The table rows follow the order of the `points` array.
    pub fn from_json(text: &str) -> Result<FinMetricSpace, MetricError> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| MetricError::InvalidMetric(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<FinMetricSpace, MetricError> {
        let obj = v
            .as_object()
            .ok_or_else(|| MetricError::InvalidMetric("expected a JSON object".into()))?;
        let raw_points = obj
            .get("points")
            .and_then(|p| p.as_array())
            .ok_or_else(|| MetricError::InvalidMetric("missing \"points\" array".into()))?;
        let points: Vec<Value> = raw_points
            .iter()
            .map(json_point)
            .collect::<Result<_, _>>()?;
        {
            let mut seen = std::collections::HashSet::new();
            for p in &points {
                if !seen.insert(p) {
                    return Err(MetricError::InvalidMetric(format!("duplicate point {p}")));
                }
            }
        }
        let rows = obj
            .get("dist")
            .and_then(|d| d.as_array())
            .ok_or_else(|| MetricError::InvalidMetric("missing \"dist\" table".into()))?;
        if rows.len() != points.len() {
            return Err(MetricError::InvalidMetric(
                "distance table size does not match points".into(),
            ));
        }
        let mut table: std::collections::HashMap<(Value, Value), ExtRat> =
            std::collections::HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| MetricError::InvalidMetric("bad distance row".into()))?;
            if row.len() != points.len() {
                return Err(MetricError::InvalidMetric("ragged distance table".into()));
            }
            for (j, cell) in row.iter().enumerate() {
                table.insert((points[i].clone(), points[j].clone()), json_dist(cell)?);
            }
        }
        FinMetricSpace::new(points, |x, y| table[&(x.clone(), y.clone())].clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .map(|p| match p {
                Value::Int(n) => serde_json::json!(n),
                other => serde_json::json!(other.to_string()),
            })
            .collect();
        let rows: Vec<serde_json::Value> = (0..self.len())
            .map(|i| {
                let row: Vec<serde_json::Value> = (0..self.len())
                    .map(|j| self.at(i, j).to_string().into())
                    .collect();
                row.into()
            })
            .collect();
        serde_json::json!({ "points": points, "dist": rows })
    }
}

/// Points in JSON are integers or strings.
pub(crate) fn json_point(v: &serde_json::Value) -> Result<Value, MetricError> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() => Ok(Value::Int(n.as_i64().unwrap())),
        serde_json::Value::String(s) => Ok(Value::Str(s.clone())),
        other => Err(MetricError::InvalidMetric(format!("bad point {other}"))),
    }
}

fn json_dist(cell: &serde_json::Value) -> Result<ExtRat, MetricError> {
    match cell {
        serde_json::Value::String(s) => s.parse(),
        serde_json::Value::Number(n) if n.is_u64() => Ok(ExtRat::from_int(n.as_u64().unwrap())),
        other => Err(MetricError::BadDistance(other.to_string())),
    }
}

/// Point-to-set distance `d(x,S) = inf_{y∈S} d(x,y)`; infinite when `S` is
/// empty.
fn point_to_set(space: &FinMetricSpace, x: usize, s: &[usize]) -> ExtRat {
    ExtRat::inf(s.iter().map(|&y| space.at(x, y).clone()))
}

fn indices_of(space: &FinMetricSpace, s: &FiniteSet) -> Result<Vec<usize>, MetricError> {
    s.iter()
        .map(|v| {
            space
                .points()
                .index_of(v)
                .ok_or_else(|| MetricError::UnknownPoint(v.to_string()))
        })
        .collect()
}

/// The Hausdorff distance between two subsets of a finite space:
/// `max(sup_{x∈S} d(x,T), sup_{y∈T} d(y,S))`.
pub fn hausdorff_distance(
    s: &FiniteSet,
    t: &FiniteSet,
    space: &FinMetricSpace,
) -> Result<ExtRat, MetricError> {
    let si = indices_of(space, s)?;
    let ti = indices_of(space, t)?;
    let forward = ExtRat::sup(si.iter().map(|&x| point_to_set(space, x, &ti)));
    let backward = ExtRat::sup(ti.iter().map(|&y| point_to_set(space, y, &si)));
    Ok(forward.max(backward))
}

/// The Hausdorff functor on objects: all subsets of `X` (every subset of a
/// finite space is compact) with the Hausdorff distance.
pub fn hausdorff_lift(
    space: &FinMetricSpace,
    budget: usize,
) -> Result<FinMetricSpace, MetricError> {
    let n = space.len();
    let needed = if n >= 127 { u128::MAX } else { 1u128 << n };
    // The lift materializes a full distance table, so the budget bounds the
    // table as well as the point count.
    if needed > budget as u128 || needed.saturating_mul(needed) > budget as u128 {
        return Err(MetricError::BudgetExceeded {
            points: n,
            needed,
            budget,
        });
    }
    let count = 1usize << n;
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(count);
    let mut points: Vec<Value> = Vec::with_capacity(count);
    for mask in 0..count {
        let idxs: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        points.push(Value::set(
            idxs.iter().map(|&i| space.points().get(i).clone()),
        ));
        members.push(idxs);
    }
    // Align member lists with the sorted point order.
    let point_set = FiniteSet::new(points.clone());
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (p, m) in points.into_iter().zip(members) {
        let i = point_set.index_of(&p).expect("subset value present");
        by_point[i] = m;
    }
    let mut dist = Vec::with_capacity(count * count);
    for i in 0..count {
        for j in 0..count {
            if i == j {
                dist.push(ExtRat::zero());
                continue;
            }
            let forward = ExtRat::sup(
                by_point[i]
                    .iter()
                    .map(|&x| point_to_set(space, x, &by_point[j])),
            );
            let backward = ExtRat::sup(
                by_point[j]
                    .iter()
                    .map(|&y| point_to_set(space, y, &by_point[i])),
            );
            dist.push(forward.max(backward));
        }
    }
    let lifted = FinMetricSpace {
        points: point_set,
        dist,
    };
    lifted.validate()?;
    Ok(lifted)
}

/// True when the strong triangle inequality
/// `d(x,z) <= max(d(x,y), d(y,z))` holds for all triples.
pub fn is_ultrametric(space: &FinMetricSpace) -> bool {
    let n = space.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let bound = space.at(i, j).clone().max(space.at(j, k).clone());
                if space.at(i, k) > &bound {
                    return false;
                }
            }
        }
    }
    true
}

/// True when `d(f(x), f(x')) <= d(x, x')` for all pairs. The map must be
/// total from the points of `x_space` into the points of `y_space`.
pub fn is_nonexpanding(
    f: &SetFunction,
    x_space: &FinMetricSpace,
    y_space: &FinMetricSpace,
) -> Result<bool, MetricError> {
    for p in x_space.points().iter() {
        let img = f
            .apply(p)
            .map_err(|_| MetricError::PartialMap(p.to_string()))?;
        if !y_space.points().contains(img) {
            return Err(MetricError::PartialMap(format!(
                "image {img} outside the codomain space"
            )));
        }
    }
    let pts = x_space.points();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let fi = f.apply(pts.get(i)).unwrap();
            let fj = f.apply(pts.get(j)).unwrap();
            if y_space.dist(fi, fj)? > x_space.dist(pts.get(i), pts.get(j))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The behavioral pseudo-metric on unlabelled finite pointed graphs:
/// `inf { 2^{-n} : the depth-n approximants of the unfoldings agree }`.
///
/// Agreement depths are downward closed and depth 0 always agrees, so this
/// is 0 for bisimilar generators and `2^{-k}` otherwise, where `k` is the
/// greatest depth of agreement.
pub fn behavioral_distance(g1: &PointedGraph, g2: &PointedGraph) -> Result<ExtRat, MetricError> {
    if g1.is_labelled() || g2.is_labelled() {
        return Err(MetricError::LabelledInput(
            "behavioral distance is defined on unlabelled graphs".into(),
        ));
    }
    match crate::systems::separation_depth(g1, g2)? {
        None => Ok(ExtRat::zero()),
        Some(sep) => {
            debug_assert!(sep >= 1, "depth-0 approximants always agree");
            Ok(ExtRat::pow2_neg(sep - 1))
        }
    }
}

/// The distance on labelled generators over a two-letter alphabet with
/// `d(0,1) = delta`, `0 < delta < 1`: 0 for labelled-bisimilar graphs,
/// `delta` when only the unlabelled shapes are bisimilar, `inf` otherwise.
pub fn labelled_behavioral_distance(
    g1: &PointedGraph,
    g2: &PointedGraph,
    delta: &ExtRat,
) -> Result<ExtRat, MetricError> {
    if !g1.is_labelled() || !g2.is_labelled() {
        return Err(MetricError::BadAlphabet(
            "labelled behavioral distance needs labelled graphs".into(),
        ));
    }
    let a1 = g1.alphabet().unwrap();
    let a2 = g2.alphabet().unwrap();
    if a1.symbols() != a2.symbols() {
        return Err(MetricError::BadAlphabet("alphabet mismatch".into()));
    }
    if a1.symbols().len() != 2 {
        return Err(MetricError::BadAlphabet(format!(
            "expected a two-letter alphabet, got {} letters",
            a1.symbols().len()
        )));
    }
    if delta >= &ExtRat::one() || delta.is_zero() || delta.is_infinite() {
        return Err(MetricError::BadDistance(format!(
            "label distance must satisfy 0 < delta < 1, got {delta}"
        )));
    }
    if crate::systems::bisimilar(g1, g2)?.is_some() {
        return Ok(ExtRat::zero());
    }
    let u1 = g1.strip_labels();
    let u2 = g2.strip_labels();
    if crate::systems::bisimilar(&u1, &u2)?.is_some() {
        Ok(delta.clone())
    } else {
        Ok(ExtRat::Infinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_points(d01: ExtRat, d02: ExtRat, d12: ExtRat) -> FinMetricSpace {
        FinMetricSpace::new((0..3).map(Value::Int), |x, y| {
            let (a, b) = match (x, y) {
                (Value::Int(a), Value::Int(b)) => (*a.min(b), *a.max(b)),
                _ => unreachable!(),
            };
            match (a, b) {
                (0, 0) | (1, 1) | (2, 2) => ExtRat::zero(),
                (0, 1) => d01.clone(),
                (0, 2) => d02.clone(),
                (1, 2) => d12.clone(),
                _ => unreachable!(),
            }
        })
        .unwrap()
    }

    #[test]
    fn ext_rat_conventions() {
        assert_eq!(ExtRat::ratio(1, 2) + ExtRat::Infinite, ExtRat::Infinite);
        assert_eq!(ExtRat::ratio(1, 2).max(ExtRat::Infinite), ExtRat::Infinite);
        assert_eq!(ExtRat::sup(std::iter::empty()), ExtRat::zero());
        assert_eq!(ExtRat::inf(std::iter::empty()), ExtRat::Infinite);
        assert_eq!(ExtRat::pow2_neg(3), ExtRat::ratio(1, 8));
        assert!(ExtRat::ratio(1, 3) < ExtRat::ratio(1, 2));
    }

    #[test]
    fn ext_rat_parse_display() {
        for s in ["0", "3", "1/2", "inf"] {
            let v: ExtRat = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("2/4".parse::<ExtRat>().unwrap(), ExtRat::ratio(1, 2));
        assert!("-1".parse::<ExtRat>().is_err());
        assert!("1/0".parse::<ExtRat>().is_err());
        assert!("0.5".parse::<ExtRat>().is_err());
    }

    #[test]
    fn metric_validation() {
        // 1, 1, 3 breaks the ordinary triangle inequality
        assert!(FinMetricSpace::new((0..3).map(Value::Int), |x, y| {
            match (x, y) {
                (Value::Int(a), Value::Int(b)) if a == b => ExtRat::zero(),
                (Value::Int(a), Value::Int(b)) if a.min(b) == &0 => ExtRat::one(),
                _ => ExtRat::from_int(3),
            }
        })
        .is_err());
        // infinity is fine on both sides of the inequality
        let ok = three_points(ExtRat::Infinite, ExtRat::Infinite, ExtRat::one());
        assert!(is_ultrametric(&ok));
    }

    #[test]
    fn hausdorff_distance_examples() {
        let space = three_points(
            ExtRat::from_int(3),
            ExtRat::from_int(3),
            ExtRat::from_int(3),
        );
        let empty = FiniteSet::empty();
        let a = FiniteSet::new([Value::Int(0)]);
        let b = FiniteSet::new([Value::Int(1)]);
        let all = FiniteSet::new([Value::Int(0), Value::Int(1), Value::Int(2)]);

        assert_eq!(
            hausdorff_distance(&empty, &a, &space).unwrap(),
            ExtRat::Infinite
        );
        assert_eq!(
            hausdorff_distance(&empty, &empty, &space).unwrap(),
            ExtRat::zero()
        );
        assert_eq!(
            hausdorff_distance(&all, &all, &space).unwrap(),
            ExtRat::zero()
        );
        assert_eq!(
            hausdorff_distance(&a, &b, &space).unwrap(),
            ExtRat::from_int(3)
        );
        let outside = FiniteSet::new([Value::Int(9)]);
        assert!(hausdorff_distance(&a, &outside, &space).is_err());
    }

    #[test]
    fn hausdorff_lift_small_spaces() {
        // empty space lifts to the single point ∅
        let empty = FinMetricSpace::new(std::iter::empty(), |_, _| ExtRat::zero()).unwrap();
        let lifted = hausdorff_lift(&empty, 1000).unwrap();
        assert_eq!(lifted.len(), 1);

        // one-point space: {∅, {*}} at distance inf
        let one = FinMetricSpace::singleton_unit();
        let lifted = hausdorff_lift(&one, 1000).unwrap();
        assert_eq!(lifted.len(), 2);
        assert_eq!(
            lifted
                .dist(&Value::set([]), &Value::set([Value::Unit]))
                .unwrap(),
            ExtRat::Infinite
        );

        // discrete two-point space: nonzero distances are 1 or inf
        let two = FinMetricSpace::discrete(2);
        let lifted = hausdorff_lift(&two, 1000).unwrap();
        assert_eq!(lifted.len(), 4);
        for x in lifted.points().iter() {
            for y in lifted.points().iter() {
                let d = lifted.dist(x, y).unwrap();
                if x != y {
                    assert!(d == ExtRat::one() || d == ExtRat::Infinite, "{x} {y} {d}");
                } else {
                    assert!(d.is_zero());
                }
            }
        }
        assert_eq!(
            lifted
                .dist(&Value::set([Value::Int(0)]), &Value::set([Value::Int(1)]))
                .unwrap(),
            ExtRat::one()
        );

        assert!(matches!(
            hausdorff_lift(&FinMetricSpace::discrete(20), 1000),
            Err(MetricError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ultrametric_examples() {
        assert!(is_ultrametric(&FinMetricSpace::singleton_unit()));
        assert!(is_ultrametric(&FinMetricSpace::discrete(3)));
        // 1, 1, 2 is a metric but not an ultrametric
        let space = three_points(ExtRat::one(), ExtRat::one(), ExtRat::from_int(2));
        assert!(!is_ultrametric(&space));
    }

    #[test]
    fn nonexpanding_examples() {
        let x = FinMetricSpace::discrete(2);
        let id = SetFunction::identity(x.points().clone());
        assert!(is_nonexpanding(&id, &x, &x).unwrap());

        let unit = FinMetricSpace::singleton_unit();
        let c =
            SetFunction::constant(x.points().clone(), unit.points().clone(), &Value::Unit).unwrap();
        assert!(is_nonexpanding(&c, &x, &unit).unwrap());

        // stretching a pair from 1 to 2 is caught
        let y = three_points(ExtRat::from_int(2), ExtRat::one(), ExtRat::one());
        let stretch =
            SetFunction::new(x.points().clone(), y.points().clone(), |v| v.clone()).unwrap();
        assert!(!is_nonexpanding(&stretch, &x, &y).unwrap());

        let partial = SetFunction::identity(FiniteSet::range(1));
        assert!(is_nonexpanding(&partial, &x, &x).is_err());
    }

    #[test]
    fn behavioral_distance_examples() {
        use crate::systems::PointedGraph;
        let leaf = PointedGraph::single_node();
        let step = PointedGraph::path(1);
        let lp = PointedGraph::self_loop();
        let path3 = PointedGraph::path(3);

        assert_eq!(behavioral_distance(&lp, &lp).unwrap(), ExtRat::zero());
        // agree only at depth 0
        assert_eq!(behavioral_distance(&leaf, &step).unwrap(), ExtRat::one());
        // agree at depths 0..3, differ at 4
        assert_eq!(
            behavioral_distance(&lp, &path3).unwrap(),
            ExtRat::pow2_neg(3)
        );
        // symmetry
        assert_eq!(
            behavioral_distance(&path3, &lp).unwrap(),
            behavioral_distance(&lp, &path3).unwrap()
        );

        let labelled = PointedGraph::labelled(
            1,
            [],
            0,
            crate::systems::Alphabet::new(["a".into(), "b".into()]),
        )
        .unwrap();
        assert!(matches!(
            behavioral_distance(&labelled, &leaf),
            Err(MetricError::LabelledInput(_))
        ));
    }

    #[test]
    fn labelled_behavioral_distance_examples() {
        use crate::systems::{Alphabet, PointedGraph};
        let ab = Alphabet::new(["0".into(), "1".into()]);
        let delta = ExtRat::ratio(1, 2);
        let step0 = PointedGraph::labelled(2, [(0, 0, 1)], 0, ab.clone()).unwrap();
        let step1 = PointedGraph::labelled(2, [(0, 1, 1)], 0, ab.clone()).unwrap();
        let stop = PointedGraph::labelled(1, [], 0, ab.clone()).unwrap();

        assert_eq!(
            labelled_behavioral_distance(&step0, &step0, &delta).unwrap(),
            ExtRat::zero()
        );
        // labels differ, shapes bisimilar
        assert_eq!(
            labelled_behavioral_distance(&step0, &step1, &delta).unwrap(),
            delta
        );
        // shapes differ
        assert_eq!(
            labelled_behavioral_distance(&stop, &step0, &delta).unwrap(),
            ExtRat::infinity()
        );

        // only the two-letter case is defined, and delta must be in (0, 1)
        let three = Alphabet::new(["0".into(), "1".into(), "2".into()]);
        let g3 = PointedGraph::labelled(1, [], 0, three).unwrap();
        assert!(matches!(
            labelled_behavioral_distance(&g3, &g3, &delta),
            Err(MetricError::BadAlphabet(_))
        ));
        assert!(labelled_behavioral_distance(&step0, &step1, &ExtRat::one()).is_err());
        assert!(labelled_behavioral_distance(&step0, &step1, &ExtRat::zero()).is_err());
    }

    #[test]
    fn behavioral_distance_is_a_metric_on_minimized_graphs() {
        use crate::systems::{bisimilar, minimize, PointedGraph};
        // raw graphs form only a pseudo-metric: distinct bisimilar
        // presentations sit at distance 0
        let lp = PointedGraph::self_loop();
        let cycle = PointedGraph::unlabelled(2, [(0, 1), (1, 0)], 0).unwrap();
        assert_ne!(lp, cycle);
        assert_eq!(behavioral_distance(&lp, &cycle).unwrap(), ExtRat::zero());

        // after minimization, distance 0 forces isomorphism: the stable
        // partition pairs the node sets bijectively
        let samples = [
            lp.clone(),
            cycle,
            PointedGraph::path(2),
            PointedGraph::unlabelled(3, [(0, 1), (1, 2), (2, 0)], 0).unwrap(),
            PointedGraph::unlabelled(3, [(0, 1), (0, 2), (1, 1), (2, 2)], 0).unwrap(),
        ];
        for g in &samples {
            for h in &samples {
                let (mg, mh) = (minimize(g), minimize(h));
                if behavioral_distance(&mg, &mh).unwrap().is_zero() {
                    assert_eq!(mg.node_count(), mh.node_count());
                    let witness = bisimilar(&mg, &mh).unwrap().expect("distance 0");
                    let mut left: Vec<usize> = witness.pairs.iter().map(|&(x, _)| x).collect();
                    let mut right: Vec<usize> = witness.pairs.iter().map(|&(_, y)| y).collect();
                    left.sort();
                    right.sort();
                    let all: Vec<usize> = (0..mg.node_count()).collect();
                    assert_eq!(left, all, "block pairing is a bijection");
                    assert_eq!(right, all, "block pairing is a bijection");
                }
            }
        }
    }

    #[test]
    fn hausdorff_distance_matches_naive_oracle() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        // independent recomputation of the sup/inf formula
        fn oracle(s: &FiniteSet, t: &FiniteSet, space: &FinMetricSpace) -> ExtRat {
            let dir = |from: &FiniteSet, to: &FiniteSet| {
                let mut worst = ExtRat::zero();
                for x in from.iter() {
                    let mut best = ExtRat::infinity();
                    for y in to.iter() {
                        let d = space.dist(x, y).unwrap();
                        if d < best {
                            best = d;
                        }
                    }
                    if best > worst {
                        worst = best;
                    }
                }
                worst
            };
            let a = dir(s, t);
            let b = dir(t, s);
            if a > b {
                a
            } else {
                b
            }
        }

        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5usize);
            // random symmetric table, repaired to a metric by capping with
            // the two-hop minimum (Floyd-Warshall closure)
            let mut d = vec![vec![ExtRat::zero(); n]; n];
            for i in 0..n {
                for j in 0..i {
                    let v = if rng.gen_bool(0.2) {
                        ExtRat::infinity()
                    } else {
                        ExtRat::ratio(rng.gen_range(1..=12), rng.gen_range(1..=4))
                    };
                    d[i][j] = v.clone();
                    d[j][i] = v;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = d[i][k].clone() + d[k][j].clone();
                        if d[i][j] > via {
                            d[i][j] = via;
                        }
                    }
                }
            }
            let space = FinMetricSpace::new((0..n as i64).map(Value::Int), |x, y| match (x, y) {
                (Value::Int(i), Value::Int(j)) => d[*i as usize][*j as usize].clone(),
                _ => unreachable!(),
            })
            .unwrap();
            for _ in 0..8 {
                let s = FiniteSet::new((0..n as i64).filter(|_| rng.gen_bool(0.5)).map(Value::Int));
                let t = FiniteSet::new((0..n as i64).filter(|_| rng.gen_bool(0.5)).map(Value::Int));
                assert_eq!(
                    hausdorff_distance(&s, &t, &space).unwrap(),
                    oracle(&s, &t, &space),
                    "{s} vs {t}"
                );
            }
        }
    }

    #[test]
    fn lift_of_nonexpanding_map_is_nonexpanding() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(1..=4usize);
            let x = FinMetricSpace::discrete(n);
            let m = rng.gen_range(1..=3usize);
            let y_scale = ExtRat::ratio(1, rng.gen_range(1..=3));
            let y = FinMetricSpace::new((0..m as i64).map(Value::Int), |a, b| {
                if a == b {
                    ExtRat::zero()
                } else {
                    y_scale.clone()
                }
            })
            .unwrap();
            let target: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m as i64)).collect();
            let f = SetFunction::new(x.points().clone(), y.points().clone(), |v| match v {
                Value::Int(i) => Value::Int(target[*i as usize]),
                _ => unreachable!(),
            })
            .unwrap();
            assert!(is_nonexpanding(&f, &x, &y).unwrap());

            let lx = hausdorff_lift(&x, 10_000).unwrap();
            let ly = hausdorff_lift(&y, 10_000).unwrap();
            let lifted = SetFunction::new(lx.points().clone(), ly.points().clone(), |v| match v {
                Value::Set(members) => f.direct_image(members).unwrap(),
                _ => unreachable!(),
            })
            .unwrap();
            assert!(is_nonexpanding(&lifted, &lx, &ly).unwrap());
        }
    }
}
