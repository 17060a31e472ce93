//! Polynomial functor expressions: parsing, cardinality classification, and
//! evaluation on finite sets and finite extended metric spaces.
//!
//! The grammar has two readings sharing one syntax tree: with `Pf` (finite
//! power set) expressions act on finite sets, with `Hd` (Hausdorff functor)
//! they act on finite extended metric spaces. Constants `C<n>` are dual-use:
//! a plain n-element set, or the n-point discrete space when evaluated
//! metrically. Products and coproducts may carry an `infinite` index hint
//! (`Prod_inf`/`Coprod_inf`), meaning the listed factors each repeat
//! infinitely often; such expressions can be classified but never evaluated.
//!
//! Concrete syntax: atoms `Pf`, `Hd`, `Id`, `C<n>`; `*` for binary product
//! (binds tighter than `+`), `+` for binary coproduct, `F(G)` for
//! composition, `Prod(...)`/`Coprod(...)` for n-ary (possibly empty) forms,
//! `Prod_inf(F)`/`Coprod_inf(F)` for the infinite-index hints. Whitespace is
//! ignored.

use std::fmt;

use thiserror::Error;

use crate::metrics::{ExtRat, FinMetricSpace, MetricError};
use crate::value::{FiniteSet, SetFunction, Value, ValueError};

#[derive(Debug, Error)]
pub enum FunctorError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not evaluable: {0}")]
    NotEvaluable(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("classification-gap: {0}")]
    ClassificationGap(String),
    #[error("size budget exceeded: level would need {needed} elements (budget {budget})")]
    BudgetExceeded { needed: u128, budget: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Index hint on products and coproducts. `Infinite` marks the classifier's
/// "infinitely many i" case: each listed factor repeats infinitely often.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexHint {
    Finite,
    Infinite,
}

/// Carrier of a constant functor.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstCarrier {
    /// `C<n>`: an n-element set, or the n-point discrete space when used
    /// metrically.
    Size(usize),
    /// An explicit finite set (set-valued evaluation only).
    Set(FiniteSet),
    /// An explicit finite metric space (metric evaluation; its underlying
    /// point set serves in set-valued evaluation).
    Metric(FinMetricSpace),
}

impl ConstCarrier {
    pub fn cardinality(&self) -> usize {
        match self {
            ConstCarrier::Size(n) => *n,
            ConstCarrier::Set(s) => s.len(),
            ConstCarrier::Metric(m) => m.len(),
        }
    }

    fn as_finite_set(&self) -> FiniteSet {
        match self {
            ConstCarrier::Size(n) => FiniteSet::range(*n),
            ConstCarrier::Set(s) => s.clone(),
            ConstCarrier::Metric(m) => m.points().clone(),
        }
    }

    fn as_metric_space(&self) -> Result<FinMetricSpace, FunctorError> {
        match self {
            ConstCarrier::Size(n) => Ok(FinMetricSpace::discrete(*n)),
            ConstCarrier::Metric(m) => Ok(m.clone()),
            ConstCarrier::Set(_) => Err(FunctorError::KindMismatch(
                "set-valued constant used in a metric evaluation".into(),
            )),
        }
    }
}

/// Syntax tree of a Kripke/Hausdorff polynomial functor expression.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctorExpr {
    /// Finite power-set functor (set-valued).
    Pf,
    /// Hausdorff functor (metric-valued).
    Hd,
    Id,
    Const(ConstCarrier),
    Prod(Vec<FunctorExpr>, IndexHint),
    Coprod(Vec<FunctorExpr>, IndexHint),
    Comp(Box<FunctorExpr>, Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn comp(outer: FunctorExpr, inner: FunctorExpr) -> FunctorExpr {
        FunctorExpr::Comp(Box::new(outer), Box::new(inner))
    }

    pub fn constant(n: usize) -> FunctorExpr {
        FunctorExpr::Const(ConstCarrier::Size(n))
    }

    /// True when no `Infinite` index hint occurs anywhere.
    pub fn is_fully_finite(&self) -> bool {
        match self {
            FunctorExpr::Pf | FunctorExpr::Hd | FunctorExpr::Id | FunctorExpr::Const(_) => true,
            FunctorExpr::Prod(fs, hint) | FunctorExpr::Coprod(fs, hint) => {
                *hint == IndexHint::Finite && fs.iter().all(FunctorExpr::is_fully_finite)
            }
            FunctorExpr::Comp(f, g) => f.is_fully_finite() && g.is_fully_finite(),
        }
    }

    /// The set-valued analogue: `Hd` becomes `Pf` and metric constants keep
    /// only their underlying point sets.
    pub fn pf_analogue(&self) -> FunctorExpr {
        match self {
            FunctorExpr::Hd => FunctorExpr::Pf,
            FunctorExpr::Pf | FunctorExpr::Id => self.clone(),
            FunctorExpr::Const(ConstCarrier::Metric(m)) => {
                FunctorExpr::Const(ConstCarrier::Set(m.points().clone()))
            }
            FunctorExpr::Const(c) => FunctorExpr::Const(c.clone()),
            FunctorExpr::Prod(fs, hint) => {
                FunctorExpr::Prod(fs.iter().map(FunctorExpr::pf_analogue).collect(), *hint)
            }
            FunctorExpr::Coprod(fs, hint) => {
                FunctorExpr::Coprod(fs.iter().map(FunctorExpr::pf_analogue).collect(), *hint)
            }
            FunctorExpr::Comp(f, g) => FunctorExpr::comp(f.pf_analogue(), g.pf_analogue()),
        }
    }

    /// The metric analogue: `Pf` becomes `Hd` and explicit set constants
    /// become discrete spaces.
    pub fn hd_analogue(&self) -> FunctorExpr {
        match self {
            FunctorExpr::Pf => FunctorExpr::Hd,
            FunctorExpr::Hd | FunctorExpr::Id => self.clone(),
            FunctorExpr::Const(ConstCarrier::Set(s)) => {
                FunctorExpr::Const(ConstCarrier::Metric(FinMetricSpace::discrete_on(s.clone())))
            }
            FunctorExpr::Const(c) => FunctorExpr::Const(c.clone()),
            FunctorExpr::Prod(fs, hint) => {
                FunctorExpr::Prod(fs.iter().map(FunctorExpr::hd_analogue).collect(), *hint)
            }
            FunctorExpr::Coprod(fs, hint) => {
                FunctorExpr::Coprod(fs.iter().map(FunctorExpr::hd_analogue).collect(), *hint)
            }
            FunctorExpr::Comp(f, g) => FunctorExpr::comp(f.hd_analogue(), g.hd_analogue()),
        }
    }

    fn pretty_prec(&self, out: &mut String, in_operator: bool) {
        match self {
            FunctorExpr::Pf => out.push_str("Pf"),
            FunctorExpr::Hd => out.push_str("Hd"),
            FunctorExpr::Id => out.push_str("Id"),
            FunctorExpr::Const(c) => {
                out.push('C');
                out.push_str(&c.cardinality().to_string());
            }
            FunctorExpr::Prod(fs, IndexHint::Finite) if fs.len() >= 2 => {
                if in_operator {
                    out.push('(');
                }
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" * ");
                    }
                    f.pretty_prec(out, true);
                }
                if in_operator {
                    out.push(')');
                }
            }
            FunctorExpr::Coprod(fs, IndexHint::Finite) if fs.len() >= 2 => {
                if in_operator {
                    out.push('(');
                }
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    f.pretty_prec(out, true);
                }
                if in_operator {
                    out.push(')');
                }
            }
            FunctorExpr::Prod(fs, hint) | FunctorExpr::Coprod(fs, hint) => {
                let base = match (self, hint) {
                    (FunctorExpr::Prod(..), IndexHint::Finite) => "Prod",
                    (FunctorExpr::Prod(..), IndexHint::Infinite) => "Prod_inf",
                    (FunctorExpr::Coprod(..), IndexHint::Finite) => "Coprod",
                    _ => "Coprod_inf",
                };
                out.push_str(base);
                out.push('(');
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    f.pretty_prec(out, false);
                }
                out.push(')');
            }
            FunctorExpr::Comp(f, g) => {
                f.pretty_prec(out, true);
                out.push('(');
                g.pretty_prec(out, false);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.pretty_prec(&mut s, false);
        f.write_str(&s)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Star,
    Plus,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, FunctorError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            b'+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Token::Comma, i));
                i += 1;
            }
            _ if b.is_ascii_alphanumeric() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(FunctorError::Parse {
                    pos: i,
                    msg: format!("unexpected character {:?}", b as char),
                })
            }
        }
    }
    Ok(out)
}

const MAX_PARSE_DEPTH: usize = 1024;

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), FunctorError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(FunctorError::Parse {
                pos: self.here(),
                msg: format!("expected {what}"),
            })
        }
    }

    // expr := term ('+' term)*
    fn expr(&mut self) -> Result<FunctorExpr, FunctorError> {
        self.depth += 1;
        if self.depth > MAX_PARSE_DEPTH {
            return Err(FunctorError::Parse {
                pos: self.here(),
                msg: format!("nesting deeper than {MAX_PARSE_DEPTH}"),
            });
        }
        let result = self.expr_inner();
        self.depth -= 1;
        result
    }

    fn expr_inner(&mut self) -> Result<FunctorExpr, FunctorError> {
        let first = self.term()?;
        let mut summands = vec![first];
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            summands.push(self.term()?);
        }
        if summands.len() == 1 {
            Ok(summands.pop().unwrap())
        } else {
            Ok(FunctorExpr::Coprod(summands, IndexHint::Finite))
        }
    }

    // term := app ('*' app)*
    fn term(&mut self) -> Result<FunctorExpr, FunctorError> {
        let first = self.app()?;
        let mut factors = vec![first];
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            factors.push(self.app()?);
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(FunctorExpr::Prod(factors, IndexHint::Finite))
        }
    }

    // app := primary ('(' expr ')')*      (composition)
    fn app(&mut self) -> Result<FunctorExpr, FunctorError> {
        let mut f = self.primary()?;
        while self.peek() == Some(&Token::LParen) {
            self.pos += 1;
            let g = self.expr()?;
            self.expect(Token::RParen, "')' closing a composition")?;
            f = FunctorExpr::comp(f, g);
        }
        Ok(f)
    }

    fn arg_list(&mut self) -> Result<Vec<FunctorExpr>, FunctorError> {
        self.expect(Token::LParen, "'('")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            match self.bump() {
                Some(Token::Comma) => continue,
                Some(Token::RParen) => return Ok(args),
                _ => {
                    return Err(FunctorError::Parse {
                        pos: self.here(),
                        msg: "expected ',' or ')'".into(),
                    })
                }
            }
        }
    }

    fn primary(&mut self) -> Result<FunctorExpr, FunctorError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(e)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "Pf" => Ok(FunctorExpr::Pf),
                "Hd" => Ok(FunctorExpr::Hd),
                "Id" => Ok(FunctorExpr::Id),
                "Prod" => Ok(FunctorExpr::Prod(self.arg_list()?, IndexHint::Finite)),
                "Coprod" => Ok(FunctorExpr::Coprod(self.arg_list()?, IndexHint::Finite)),
                "Prod_inf" | "Coprod_inf" => {
                    let args = self.arg_list()?;
                    if args.is_empty() {
                        return Err(FunctorError::Parse {
                            pos,
                            msg: format!("{name} needs at least one factor"),
                        });
                    }
                    Ok(if name == "Prod_inf" {
                        FunctorExpr::Prod(args, IndexHint::Infinite)
                    } else {
                        FunctorExpr::Coprod(args, IndexHint::Infinite)
                    })
                }
                _ => {
                    if let Some(digits) = name.strip_prefix('C') {
                        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                            let n: usize = digits.parse().map_err(|_| FunctorError::Parse {
                                pos,
                                msg: format!("constant size out of range in {name}"),
                            })?;
                            return Ok(FunctorExpr::constant(n));
                        }
                    }
                    Err(FunctorError::Parse {
                        pos,
                        msg: format!("unknown symbol {name}"),
                    })
                }
            },
            _ => Err(FunctorError::Parse {
                pos,
                msg: "expected a functor expression".into(),
            }),
        }
    }
}

/// Parses the concrete syntax into a [`FunctorExpr`]. The result round-trips
/// through the pretty-printer.
pub fn parse_functor(text: &str) -> Result<FunctorExpr, FunctorError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(FunctorError::Parse {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Cardinality classification
// ---------------------------------------------------------------------------

/// The cardinality class n(F) of a functor expression.
///
/// - 0: evaluates to the empty set everywhere;
/// - 1: evaluates to a singleton everywhere;
/// - 2: finite on finite sets, with more than one element once the argument
///   has at least two;
/// - 3: infinite on nonempty arguments (only infinite-index expressions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardClass(u8);

impl CardClass {
    pub fn value(&self) -> u8 {
        self.0
    }
}

impl fmt::Display for CardClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Classifies an expression by the inductive case table.
///
/// Constants are classified through their grammar encoding (the empty
/// product for a singleton, a coproduct of singletons in general): 0, 1 or 2
/// by cardinality. Composition with a class-1 inner functor tests the
/// cardinality of the outer functor on a singleton, which requires the outer
/// functor to be evaluable.
///
/// The table is partial. The omitted cases report a classification gap
/// rather than a guessed value:
/// - composition with inner class 0 and outer class 2 or 3 (the composite
///   collapses to a constant whose size depends on the outer functor, e.g.
///   `Pf(C0)` is a constant singleton while `Id(C0)` is empty);
/// - a coproduct whose nonzero summands are exactly one class-1 summand.
pub fn classify(expr: &FunctorExpr) -> Result<CardClass, FunctorError> {
    classify_inner(expr).map(CardClass)
}

fn classify_inner(expr: &FunctorExpr) -> Result<u8, FunctorError> {
    match expr {
        FunctorExpr::Pf | FunctorExpr::Hd | FunctorExpr::Id => Ok(2),
        FunctorExpr::Const(c) => Ok(match c.cardinality() {
            0 => 0,
            1 => 1,
            _ => 2,
        }),
        FunctorExpr::Prod(fs, hint) => {
            let ns = fs
                .iter()
                .map(classify_inner)
                .collect::<Result<Vec<_>, _>>()?;
            if ns.contains(&0) {
                return Ok(0);
            }
            if ns.iter().all(|&n| n == 1) {
                return Ok(1);
            }
            match hint {
                // some factor is 2 or 3 and would repeat infinitely often
                IndexHint::Infinite => Ok(3),
                IndexHint::Finite => {
                    if ns.iter().all(|&n| n <= 2) {
                        Ok(2)
                    } else {
                        Ok(3)
                    }
                }
            }
        }
        FunctorExpr::Coprod(fs, hint) => {
            let ns = fs
                .iter()
                .map(classify_inner)
                .collect::<Result<Vec<_>, _>>()?;
            if ns.iter().all(|&n| n == 0) {
                return Ok(0);
            }
            match hint {
                // some nonzero summand repeats infinitely often
                IndexHint::Infinite => Ok(3),
                IndexHint::Finite => {
                    if ns.len() == 1 && ns[0] == 1 {
                        return Ok(1);
                    }
                    if ns.contains(&3) {
                        return Ok(3);
                    }
                    let ones = ns.iter().filter(|&&n| n == 1).count();
                    if ones >= 2 || ns.contains(&2) {
                        return Ok(2);
                    }
                    // exactly one singleton summand among empty ones: the
                    // case table has no row for this shape
                    Err(FunctorError::ClassificationGap(format!(
                        "coproduct with summand classes {ns:?} is not covered by the case table"
                    )))
                }
            }
        }
        FunctorExpr::Comp(outer, inner) => {
            let nf = classify_inner(outer)?;
            let ng = classify_inner(inner)?;
            match (nf, ng) {
                (0, _) => Ok(0),
                (1, _) => Ok(1),
                (2 | 3, 0) => Err(FunctorError::ClassificationGap(format!(
                    "composition with inner class 0 and outer class {nf} is not covered by the case table"
                ))),
                (3, _) => Ok(3),
                (2, 3) => Ok(3),
                (2, 2) => Ok(2),
                (2, 1) => {
                    // the composite is the constant functor with value
                    // outer(1); test that cardinality directly
                    let one = FiniteSet::singleton_unit();
                    let image = eval_set(outer, &one, crate::DEFAULT_SIZE_BUDGET).map_err(|e| {
                        match e {
                            FunctorError::NotEvaluable(_) => FunctorError::NotEvaluable(
                                "classification needs the outer functor of a composition to be evaluable".into(),
                            ),
                            other => other,
                        }
                    })?;
                    Ok(if image.len() == 1 { 1 } else { 2 })
                }
                _ => unreachable!("classes are 0..=3"),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Size prediction and evaluation
// ---------------------------------------------------------------------------

/// Cardinality of `F X` as a function of `|X|`, saturating at `u128::MAX`.
fn eval_size(expr: &FunctorExpr, n: u128) -> Result<u128, FunctorError> {
    match expr {
        FunctorExpr::Pf | FunctorExpr::Hd => {
            if n >= 127 {
                Ok(u128::MAX)
            } else {
                Ok(1u128 << n)
            }
        }
        FunctorExpr::Id => Ok(n),
        FunctorExpr::Const(c) => Ok(c.cardinality() as u128),
        FunctorExpr::Prod(fs, IndexHint::Finite) => {
            let mut total: u128 = 1;
            for f in fs {
                total = total.saturating_mul(eval_size(f, n)?);
            }
            Ok(total)
        }
        FunctorExpr::Coprod(fs, IndexHint::Finite) => {
            let mut total: u128 = 0;
            for f in fs {
                total = total.saturating_add(eval_size(f, n)?);
            }
            Ok(total)
        }
        FunctorExpr::Prod(_, IndexHint::Infinite) | FunctorExpr::Coprod(_, IndexHint::Infinite) => {
            Err(FunctorError::NotEvaluable(
                "infinite index sets are a classification hint, not a value".into(),
            ))
        }
        FunctorExpr::Comp(f, g) => eval_size(f, eval_size(g, n)?),
    }
}

fn check_budget(expr: &FunctorExpr, n: usize, budget: usize) -> Result<(), FunctorError> {
    let needed = eval_size(expr, n as u128)?;
    if needed > budget as u128 {
        return Err(FunctorError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Evaluates a set-valued expression on a finite set.
pub fn eval_set(
    expr: &FunctorExpr,
    x: &FiniteSet,
    budget: usize,
) -> Result<FiniteSet, FunctorError> {
    match expr {
        FunctorExpr::Hd => Err(FunctorError::KindMismatch(
            "Hd evaluates over metric spaces; use eval_metric (or Pf over sets)".into(),
        )),
        FunctorExpr::Pf => {
            check_budget(expr, x.len(), budget)?;
            Ok(FiniteSet::new(x.subsets()))
        }
        FunctorExpr::Id => Ok(x.clone()),
        FunctorExpr::Const(c) => Ok(c.as_finite_set()),
        FunctorExpr::Prod(fs, IndexHint::Finite) => {
            check_budget(expr, x.len(), budget)?;
            let factors = fs
                .iter()
                .map(|f| eval_set(f, x, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let mut tuples = vec![Vec::new()];
            for factor in &factors {
                let mut next = Vec::with_capacity(tuples.len() * factor.len().max(1));
                for prefix in &tuples {
                    for v in factor.iter() {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        next.push(t);
                    }
                }
                tuples = next;
            }
            Ok(FiniteSet::new(tuples.into_iter().map(Value::Tuple)))
        }
        FunctorExpr::Coprod(fs, IndexHint::Finite) => {
            check_budget(expr, x.len(), budget)?;
            let mut out = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                for v in eval_set(f, x, budget)?.iter() {
                    out.push(Value::tagged(i, v.clone()));
                }
            }
            Ok(FiniteSet::new(out))
        }
        FunctorExpr::Prod(_, IndexHint::Infinite) | FunctorExpr::Coprod(_, IndexHint::Infinite) => {
            Err(FunctorError::NotEvaluable(
                "infinite index sets are a classification hint, not a value".into(),
            ))
        }
        FunctorExpr::Comp(f, g) => {
            let inner = eval_set(g, x, budget)?;
            eval_set(f, &inner, budget)
        }
    }
}

/// Functor action on a map: produces the tabulated function
/// `F f : F(dom f) → F(cod f)`.
pub fn eval_map(
    expr: &FunctorExpr,
    f: &SetFunction,
    budget: usize,
) -> Result<SetFunction, FunctorError> {
    match expr {
        FunctorExpr::Hd => Err(FunctorError::KindMismatch(
            "Hd evaluates over metric spaces; use eval_metric (or Pf over sets)".into(),
        )),
        FunctorExpr::Pf => {
            let dom = eval_set(expr, f.domain(), budget)?;
            let cod = eval_set(expr, f.codomain(), budget)?;
            Ok(SetFunction::new(dom, cod, |v| {
                let members = match v {
                    Value::Set(ms) => ms,
                    _ => unreachable!("powerset elements are sets"),
                };
                f.direct_image(members).expect("image of a tabulated map")
            })?)
        }
        FunctorExpr::Id => Ok(f.clone()),
        FunctorExpr::Const(c) => Ok(SetFunction::identity(c.as_finite_set())),
        FunctorExpr::Prod(fs, IndexHint::Finite) => {
            let parts = fs
                .iter()
                .map(|sub| eval_map(sub, f, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let dom = eval_set(expr, f.domain(), budget)?;
            let cod = eval_set(expr, f.codomain(), budget)?;
            Ok(SetFunction::new(dom, cod, |v| {
                let comps = match v {
                    Value::Tuple(vs) => vs,
                    _ => unreachable!("product elements are tuples"),
                };
                Value::Tuple(
                    comps
                        .iter()
                        .zip(&parts)
                        .map(|(c, p)| p.apply(c).expect("componentwise image").clone())
                        .collect(),
                )
            })?)
        }
        FunctorExpr::Coprod(fs, IndexHint::Finite) => {
            let parts = fs
                .iter()
                .map(|sub| eval_map(sub, f, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let dom = eval_set(expr, f.domain(), budget)?;
            let cod = eval_set(expr, f.codomain(), budget)?;
            Ok(SetFunction::new(dom, cod, |v| {
                let (tag, payload) = match v {
                    Value::Tagged(tag, payload) => (*tag, payload),
                    _ => unreachable!("coproduct elements are tagged"),
                };
                Value::tagged(
                    tag,
                    parts[tag].apply(payload).expect("summand image").clone(),
                )
            })?)
        }
        FunctorExpr::Prod(_, IndexHint::Infinite) | FunctorExpr::Coprod(_, IndexHint::Infinite) => {
            Err(FunctorError::NotEvaluable(
                "infinite index sets are a classification hint, not a value".into(),
            ))
        }
        FunctorExpr::Comp(outer, inner) => {
            let gmap = eval_map(inner, f, budget)?;
            eval_map(outer, &gmap, budget)
        }
    }
}

/// The value-level action of a functor on a function: given how `f` moves
/// single values, returns how `F f` moves `F`-structured values. Used by the
/// chain builder to tabulate connecting maps against carriers it has already
/// computed, instead of re-deriving them through [`eval_map`].
pub(crate) type ValueFn<'a> = std::rc::Rc<dyn Fn(&Value) -> Value + 'a>;

pub(crate) fn value_action<'a>(
    expr: &'a FunctorExpr,
    base: ValueFn<'a>,
) -> Result<ValueFn<'a>, FunctorError> {
    use std::rc::Rc;
    match expr {
        FunctorExpr::Hd | FunctorExpr::Pf => Ok(Rc::new(move |v| match v {
            Value::Set(vs) => Value::set(vs.iter().map(|m| base(m))),
            _ => unreachable!("power-set elements are sets"),
        })),
        FunctorExpr::Id => Ok(base),
        FunctorExpr::Const(_) => Ok(Rc::new(|v| v.clone())),
        FunctorExpr::Prod(fs, IndexHint::Finite) => {
            let parts = fs
                .iter()
                .map(|f| value_action(f, base.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Rc::new(move |v| match v {
                Value::Tuple(vs) => {
                    Value::Tuple(vs.iter().zip(&parts).map(|(c, p)| p(c)).collect())
                }
                _ => unreachable!("product elements are tuples"),
            }))
        }
        FunctorExpr::Coprod(fs, IndexHint::Finite) => {
            let parts = fs
                .iter()
                .map(|f| value_action(f, base.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Rc::new(move |v| match v {
                Value::Tagged(tag, payload) => Value::tagged(*tag, parts[*tag](payload)),
                _ => unreachable!("coproduct elements are tagged"),
            }))
        }
        FunctorExpr::Prod(_, IndexHint::Infinite) | FunctorExpr::Coprod(_, IndexHint::Infinite) => {
            Err(FunctorError::NotEvaluable(
                "infinite index sets are a classification hint, not a value".into(),
            ))
        }
        FunctorExpr::Comp(f, g) => value_action(f, value_action(g, base)?),
    }
}

/// Evaluates a metric-valued expression on a finite extended metric space.
///
/// `Hd` is the Hausdorff lifting; products carry the sup metric (the
/// categorical product); coproducts are disjoint unions with distance `inf`
/// across summands (injections must be isometric embeddings and there is no
/// canonical finite cross-distance). The underlying point set always agrees
/// with `eval_set` of the `Pf`-analogue on the underlying points.
pub fn eval_metric(
    expr: &FunctorExpr,
    x: &FinMetricSpace,
    budget: usize,
) -> Result<FinMetricSpace, FunctorError> {
    match expr {
        FunctorExpr::Pf => Err(FunctorError::KindMismatch(
            "Pf evaluates over sets; use eval_set (or Hd over metric spaces)".into(),
        )),
        FunctorExpr::Hd => Ok(crate::metrics::hausdorff_lift(x, budget)?),
        FunctorExpr::Id => Ok(x.clone()),
        FunctorExpr::Const(c) => c.as_metric_space(),
        FunctorExpr::Prod(fs, IndexHint::Finite) => {
            check_budget(&expr.pf_analogue(), x.len(), budget)?;
            let factors = fs
                .iter()
                .map(|f| eval_metric(f, x, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let mut tuples: Vec<Vec<Value>> = vec![Vec::new()];
            for factor in &factors {
                let mut next = Vec::new();
                for prefix in &tuples {
                    for v in factor.points().iter() {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        next.push(t);
                    }
                }
                tuples = next;
            }
            let points: Vec<Value> = tuples.into_iter().map(Value::Tuple).collect();
            if points.len().saturating_mul(points.len()) > budget {
                return Err(FunctorError::BudgetExceeded {
                    needed: (points.len() as u128).saturating_mul(points.len() as u128),
                    budget,
                });
            }
            Ok(FinMetricSpace::new(points, |a, b| {
                let (av, bv) = match (a, b) {
                    (Value::Tuple(av), Value::Tuple(bv)) => (av, bv),
                    _ => unreachable!(),
                };
                ExtRat::sup(
                    av.iter()
                        .zip(bv)
                        .zip(&factors)
                        .map(|((p, q), fac)| fac.dist(p, q).expect("points of the factor")),
                )
            })?)
        }
        FunctorExpr::Coprod(fs, IndexHint::Finite) => {
            check_budget(&expr.pf_analogue(), x.len(), budget)?;
            let summands = fs
                .iter()
                .map(|f| eval_metric(f, x, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let mut points = Vec::new();
            for (i, s) in summands.iter().enumerate() {
                for v in s.points().iter() {
                    points.push(Value::tagged(i, v.clone()));
                }
            }
            if points.len().saturating_mul(points.len()) > budget {
                return Err(FunctorError::BudgetExceeded {
                    needed: (points.len() as u128).saturating_mul(points.len() as u128),
                    budget,
                });
            }
            Ok(FinMetricSpace::new(points, |a, b| {
                let ((ta, pa), (tb, pb)) = match (a, b) {
                    (Value::Tagged(ta, pa), Value::Tagged(tb, pb)) => ((ta, pa), (tb, pb)),
                    _ => unreachable!(),
                };
                if ta != tb {
                    ExtRat::infinity()
                } else {
                    summands[*ta].dist(pa, pb).expect("points of the summand")
                }
            })?)
        }
        FunctorExpr::Prod(_, IndexHint::Infinite) | FunctorExpr::Coprod(_, IndexHint::Infinite) => {
            Err(FunctorError::NotEvaluable(
                "infinite index sets are a classification hint, not a value".into(),
            ))
        }
        FunctorExpr::Comp(f, g) => {
            let inner = eval_metric(g, x, budget)?;
            eval_metric(f, &inner, budget)
        }
    }
}
