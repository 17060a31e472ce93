//! A desk-scale toolkit for coalgebraic constructions on finite data:
//! canonical strongly extensional trees, bisimilarity and behavioral metrics
//! on finite transition systems, the Hausdorff metric lifting, and
//! terminal-coalgebra chain iteration for Kripke/Hausdorff polynomial
//! functor expressions.
//!
//! The crate is organized around five subsystems plus a command layer:
//!
//! - [`functor`]: parse, classify and evaluate polynomial functor
//!   expressions on finite sets and finite extended metric spaces.
//! - [`trees`]: finite unordered trees, canonical (hash-consed) strongly
//!   extensional forms, tree bisimulation, and depth-n approximants.
//! - [`systems`]: finite pointed graphs as generators of possibly infinite
//!   trees; unfolding, partition-refinement bisimilarity, separation depth.
//! - [`chain`]: the terminal-coalgebra chain `1 ← F1 ← FF1 ← …` iterated
//!   level by level, with compatible-sequence reconstruction.
//! - [`metrics`]: finite extended metric spaces with exact rational
//!   distances, the Hausdorff lifting, behavioral pseudo-metrics.
//! - [`cli`]: the command verbs behind the `coalgebra-kit` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`; start with
//! `cargo run --example powerset_tower`.

pub mod chain;
pub mod cli;
pub mod functor;
pub mod metrics;
pub mod systems;
pub mod trees;
pub mod value;

pub use chain::{
    check_compatible, hausdorff_chain, kripke_chain, sequence_to_tree, trees_as_level, Chain,
    ChainLevel, CompatibleSequence,
};
pub use functor::{
    classify, eval_map, eval_metric, eval_set, parse_functor, CardClass, FunctorExpr,
};
pub use metrics::{
    behavioral_distance, hausdorff_distance, hausdorff_lift, is_nonexpanding, is_ultrametric,
    labelled_behavioral_distance, ExtRat, FinMetricSpace,
};
pub use systems::{
    bisimilar, depth_approximant, leadsto, leadsto_definitional, minimize, separation_depth,
    Alphabet, PointedGraph,
};
pub use trees::{
    canonize, is_strongly_extensional, is_tree_bisimulation, partial_n, rho_n, tree_bisimilar,
    CanonicalTree, RawTree,
};
pub use value::{FiniteSet, SetFunction, Value};

/// Default cap on the number of elements materialized per chain level (and
/// on the pair table of a metric level). The finite power-set tower reaches
/// 2^16 at level 4 and 2^65536 at level 5, so oversized requests must fail
/// loudly rather than hang.
pub const DEFAULT_SIZE_BUDGET: usize = 100_000;
