//! Command layer behind the `coalgebra-kit` binary: files-in/answers-out
//! verbs over the library, with deterministic text output and a stable JSON
//! schema.
//!
//! Every input argument is either an inline literal or a file: arguments
//! starting with `@` name a file, and arguments that are paths to existing
//! files are read from disk; anything else is taken verbatim.
//!
//! Exit codes: 0 on success, and for `bisim` 0 means bisimilar while 1 means
//! not bisimilar; ≥ 2 signals an error, reported as a one-line diagnostic
//! naming the offending input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::chain::{hausdorff_chain, kripke_chain, Chain};
use crate::functor::{classify, parse_functor, FunctorError, FunctorExpr};
use crate::metrics::{
    behavioral_distance, hausdorff_distance, labelled_behavioral_distance, ExtRat, FinMetricSpace,
};
use crate::systems::{bisimilar, minimize, separation_depth, PointedGraph};
use crate::trees::{canonize, RawTree};
use crate::value::{FiniteSet, Value};

/// Version tag carried by every `--json` report.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{input}: {message}")]
    Input { input: String, message: String },
    #[error("{0}")]
    Op(String),
}

/// A parsed command: one verb plus its inputs and verb-specific options.
#[derive(Debug, Clone)]
pub enum Command {
    Canonize {
        tree: String,
    },
    Bisim {
        left: String,
        right: String,
    },
    Distance {
        left: String,
        right: String,
        /// Label distance for the labelled case; defaults to the alphabet
        /// metric when present.
        delta: Option<String>,
    },
    Chain {
        functor: String,
        depth: usize,
        sizes_only: bool,
    },
    Classify {
        functor: String,
    },
    Unfold {
        graph: String,
        depth: usize,
    },
    Hausdorff {
        space: String,
        left: String,
        right: String,
    },
    Minimize {
        graph: String,
    },
}

/// Global options shared by all verbs.
#[derive(Debug, Clone)]
pub struct Options {
    pub budget: usize,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            budget: crate::DEFAULT_SIZE_BUDGET,
        }
    }
}

/// Result of running one command: exit status, human text, JSON document.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub human: String,
    pub json: serde_json::Value,
}

impl Outcome {
    fn ok(human: String, mut json: serde_json::Value) -> Outcome {
        if let Some(obj) = json.as_object_mut() {
            obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        }
        Outcome {
            exit_code: 0,
            human,
            json,
        }
    }
}

/// Renders an outcome as the final output text.
pub fn emit_report(outcome: &Outcome, json: bool) -> String {
    if json {
        outcome.json.to_string()
    } else {
        outcome.human.clone()
    }
}

/// Resolves an argument to its content: `@path` or an existing file path
/// reads the file, anything else is an inline literal. Returns the content
/// and a display name for diagnostics.
fn resolve_input(arg: &str) -> Result<(String, String), CliError> {
    if let Some(path) = arg.strip_prefix('@') {
        let content = std::fs::read_to_string(path).map_err(|e| CliError::Input {
            input: path.to_string(),
            message: e.to_string(),
        })?;
        return Ok((content, path.to_string()));
    }
    if std::path::Path::new(arg).is_file() {
        let content = std::fs::read_to_string(arg).map_err(|e| CliError::Input {
            input: arg.to_string(),
            message: e.to_string(),
        })?;
        return Ok((content, arg.to_string()));
    }
    Ok((arg.to_string(), "<inline>".to_string()))
}

fn input_err(name: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Input {
        input: name.to_string(),
        message: err.to_string(),
    }
}

fn load_tree(arg: &str) -> Result<RawTree, CliError> {
    let (text, name) = resolve_input(arg)?;
    RawTree::parse(text.trim()).map_err(|e| input_err(&name, e))
}

fn load_graph(arg: &str) -> Result<PointedGraph, CliError> {
    let (text, name) = resolve_input(arg)?;
    PointedGraph::from_json(&text).map_err(|e| input_err(&name, e))
}

fn load_functor(arg: &str) -> Result<FunctorExpr, CliError> {
    let (text, name) = resolve_input(arg)?;
    parse_functor(text.trim()).map_err(|e| input_err(&name, e))
}

fn load_space(arg: &str) -> Result<FinMetricSpace, CliError> {
    let (text, name) = resolve_input(arg)?;
    FinMetricSpace::from_json(&text).map_err(|e| input_err(&name, e))
}

fn load_subset(arg: &str, space: &FinMetricSpace) -> Result<FiniteSet, CliError> {
    let (text, name) = resolve_input(arg)?;
    let v: serde_json::Value =
        serde_json::from_str(text.trim()).map_err(|e| input_err(&name, e))?;
    let arr = v
        .as_array()
        .ok_or_else(|| input_err(&name, "expected a JSON array of points"))?;
    let mut points = Vec::new();
    for p in arr {
        let p = crate::metrics::json_point(p).map_err(|e| input_err(&name, e))?;
        if !space.points().contains(&p) {
            return Err(input_err(&name, format!("point {p} is not in the space")));
        }
        points.push(p);
    }
    Ok(FiniteSet::new(points))
}

fn expr_uses_metric(expr: &FunctorExpr) -> bool {
    match expr {
        FunctorExpr::Hd => true,
        FunctorExpr::Const(crate::functor::ConstCarrier::Metric(_)) => true,
        FunctorExpr::Pf | FunctorExpr::Id | FunctorExpr::Const(_) => false,
        FunctorExpr::Prod(fs, _) | FunctorExpr::Coprod(fs, _) => fs.iter().any(expr_uses_metric),
        FunctorExpr::Comp(f, g) => expr_uses_metric(f) || expr_uses_metric(g),
    }
}

/// Runs one command. Pure except for reading file inputs.
pub fn run(cmd: &Command, opts: &Options) -> Result<Outcome, CliError> {
    match cmd {
        Command::Canonize { tree } => {
            let t = load_tree(tree)?;
            let c = canonize(&t);
            let text = c.to_text();
            Ok(Outcome::ok(
                text.clone(),
                serde_json::json!({ "tree": text }),
            ))
        }

        Command::Bisim { left, right } => {
            let g1 = load_graph(left)?;
            let g2 = load_graph(right)?;
            match bisimilar(&g1, &g2).map_err(|e| CliError::Op(e.to_string()))? {
                Some(witness) => {
                    let mut human = String::from("bisimilar\n");
                    let blocks = witness.partition.blocks();
                    let mut json_blocks = Vec::new();
                    let n1 = g1.node_count();
                    for block in &blocks {
                        let lhs: Vec<&str> = block
                            .iter()
                            .filter(|&&s| s < n1)
                            .map(|&s| g1.node_names()[s].as_str())
                            .collect();
                        let rhs: Vec<&str> = block
                            .iter()
                            .filter(|&&s| s >= n1)
                            .map(|&s| g2.node_names()[s - n1].as_str())
                            .collect();
                        let _ =
                            writeln!(human, "block {{{}}} ~ {{{}}}", lhs.join(","), rhs.join(","));
                        json_blocks.push(serde_json::json!({ "left": lhs, "right": rhs }));
                    }
                    Ok(Outcome::ok(
                        human.trim_end().to_string(),
                        serde_json::json!({ "bisimilar": true, "blocks": json_blocks }),
                    ))
                }
                None => {
                    let depth = separation_depth(&g1, &g2)
                        .map_err(|e| CliError::Op(e.to_string()))?
                        .expect("non-bisimilar graphs have a separation depth");
                    let mut out = Outcome::ok(
                        format!("not bisimilar (separation depth {depth})"),
                        serde_json::json!({ "bisimilar": false, "separation_depth": depth }),
                    );
                    out.exit_code = 1;
                    Ok(out)
                }
            }
        }

        Command::Distance { left, right, delta } => {
            let g1 = load_graph(left)?;
            let g2 = load_graph(right)?;
            let d = if g1.is_labelled() || g2.is_labelled() {
                let delta = match delta {
                    Some(text) => text
                        .parse::<ExtRat>()
                        .map_err(|e| input_err("--delta", e))?,
                    None => {
                        let a = g1.alphabet().ok_or_else(|| {
                            CliError::Op("mixed labelled/unlabelled input".into())
                        })?;
                        let m = a.metric().ok_or_else(|| {
                            CliError::Op(
                                "labelled distance needs --delta or an alphabet metric".into(),
                            )
                        })?;
                        if a.symbols().len() != 2 {
                            return Err(CliError::Op(
                                "labelled distance is defined for two-letter alphabets".into(),
                            ));
                        }
                        m.dist(
                            &Value::Str(a.symbols()[0].clone()),
                            &Value::Str(a.symbols()[1].clone()),
                        )
                        .map_err(|e| CliError::Op(e.to_string()))?
                    }
                };
                labelled_behavioral_distance(&g1, &g2, &delta)
                    .map_err(|e| CliError::Op(e.to_string()))?
            } else {
                behavioral_distance(&g1, &g2).map_err(|e| CliError::Op(e.to_string()))?
            };
            Ok(Outcome::ok(
                d.to_string(),
                serde_json::json!({ "distance": d.to_string() }),
            ))
        }

        Command::Chain {
            functor,
            depth,
            sizes_only,
        } => {
            let expr = load_functor(functor)?;
            let chain: Chain = if expr_uses_metric(&expr) {
                hausdorff_chain(&expr, *depth, opts.budget)
                    .map_err(|e| CliError::Op(e.to_string()))?
            } else {
                kripke_chain(&expr, *depth, opts.budget).map_err(|e| CliError::Op(e.to_string()))?
            };
            let sizes = chain.carrier_sizes();
            if *sizes_only {
                let line = sizes
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                return Ok(Outcome::ok(
                    line,
                    serde_json::json!({ "functor": chain.expr().to_string(), "sizes": sizes }),
                ));
            }
            let mut human = String::new();
            for level in chain.levels() {
                let _ = writeln!(
                    human,
                    "level {}: {} elements",
                    level.index,
                    level.carrier.len()
                );
            }
            Ok(Outcome::ok(human.trim_end().to_string(), chain.to_json()))
        }

        Command::Classify { functor } => {
            let expr = load_functor(functor)?;
            match classify(&expr) {
                Ok(class) => Ok(Outcome::ok(
                    class.to_string(),
                    serde_json::json!({ "class": class.value() }),
                )),
                Err(FunctorError::ClassificationGap(detail)) => Ok(Outcome::ok(
                    "classification-gap".to_string(),
                    serde_json::json!({ "class": "classification-gap", "detail": detail }),
                )),
                Err(other) => Err(CliError::Op(other.to_string())),
            }
        }

        Command::Unfold { graph, depth } => {
            let g = load_graph(graph)?;
            let text = if g.is_labelled() {
                g.unfold_labelled(*depth).to_string()
            } else {
                g.unfold(*depth).to_string()
            };
            Ok(Outcome::ok(
                text.clone(),
                serde_json::json!({ "tree": text }),
            ))
        }

        Command::Hausdorff { space, left, right } => {
            let space = load_space(space)?;
            let s = load_subset(left, &space)?;
            let t = load_subset(right, &space)?;
            let d = hausdorff_distance(&s, &t, &space).map_err(|e| CliError::Op(e.to_string()))?;
            Ok(Outcome::ok(
                d.to_string(),
                serde_json::json!({ "distance": d.to_string() }),
            ))
        }

        Command::Minimize { graph } => {
            let g = load_graph(graph)?;
            let m = minimize(&g);
            let json = m.to_json();
            Ok(Outcome::ok(
                json.to_string(),
                serde_json::json!({ "graph": json }),
            ))
        }
    }
}
