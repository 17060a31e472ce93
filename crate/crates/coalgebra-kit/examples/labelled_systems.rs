//! Labelled transition systems over the two-letter alphabet {0,1} with
//! label distance delta: the three-valued behavioral distance (0 when
//! labelled-bisimilar, delta when only the shapes match, inf otherwise) and
//! its cross-check against the metric chain of Hd({0,1} x Id).
//!
//! ```bash
//! cargo run --example labelled_systems
//! ```

use coalgebra_kit::chain::hausdorff_chain;
use coalgebra_kit::functor::{ConstCarrier, FunctorExpr, IndexHint};
use coalgebra_kit::metrics::{labelled_behavioral_distance, ExtRat, FinMetricSpace};
use coalgebra_kit::systems::{Alphabet, PointedGraph};
use coalgebra_kit::value::Value;
use coalgebra_kit::DEFAULT_SIZE_BUDGET;

fn main() {
    let delta = ExtRat::ratio(1, 2);
    let alphabet = Alphabet::new(["0".to_string(), "1".to_string()]);

    // One step labelled 0 versus one step labelled 1: same shape,
    // different labels.
    let step0 = PointedGraph::labelled(2, [(0, 0, 1)], 0, alphabet.clone()).unwrap();
    let step1 = PointedGraph::labelled(2, [(0, 1, 1)], 0, alphabet.clone()).unwrap();
    let stop = PointedGraph::labelled(1, [], 0, alphabet.clone()).unwrap();

    println!(
        "d(0-step, 0-step) = {}",
        labelled_behavioral_distance(&step0, &step0, &delta).unwrap()
    );
    println!(
        "d(0-step, 1-step) = {}",
        labelled_behavioral_distance(&step0, &step1, &delta).unwrap()
    );
    println!(
        "d(stop, 0-step)   = {}",
        labelled_behavioral_distance(&stop, &step0, &delta).unwrap()
    );

    // The same distances appear in the terminal-coalgebra chain for
    // Hd(Sigma x Id) with d(0,1) = 1/2 on the alphabet.
    let sigma = FinMetricSpace::new([Value::Str("0".into()), Value::Str("1".into())], |a, b| {
        if a == b {
            ExtRat::zero()
        } else {
            delta.clone()
        }
    })
    .unwrap();
    let expr = FunctorExpr::comp(
        FunctorExpr::Hd,
        FunctorExpr::Prod(
            vec![
                FunctorExpr::Const(ConstCarrier::Metric(sigma)),
                FunctorExpr::Id,
            ],
            IndexHint::Finite,
        ),
    );
    let chain = hausdorff_chain(&expr, 2, DEFAULT_SIZE_BUDGET).unwrap();
    println!("Hd(Sigma x Id) chain sizes: {:?}", chain.carrier_sizes());

    // Level-1 elements are sets of (label, *) pairs: the four behaviors of
    // depth one. Their pairwise distances take only the values 0, 1/2, inf.
    let level = chain.level(1);
    let m = level.carrier.metric().unwrap();
    for x in level.carrier.underlying().iter() {
        for y in level.carrier.underlying().iter() {
            let d = m.dist(x, y).unwrap();
            assert!(d.is_zero() || d == delta || d.is_infinite());
            if x < y {
                println!("  d({x}, {y}) = {d}");
            }
        }
    }
}
