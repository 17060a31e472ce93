//! Metric-valued chain iteration: the Hausdorff functor's chain shares its
//! carriers with the power-set chain, while the distances record how hard
//! two approximants are to tell apart.
//!
//! ```bash
//! cargo run --example metric_chains
//! ```

use coalgebra_kit::chain::{hausdorff_chain, kripke_chain};
use coalgebra_kit::functor::{eval_metric, parse_functor, FunctorExpr};
use coalgebra_kit::metrics::{is_nonexpanding, ExtRat};
use coalgebra_kit::value::Value;
use coalgebra_kit::DEFAULT_SIZE_BUDGET;

fn main() {
    let hd = hausdorff_chain(&FunctorExpr::Hd, 3, DEFAULT_SIZE_BUDGET).unwrap();
    let pf = kripke_chain(&FunctorExpr::Pf, 3, DEFAULT_SIZE_BUDGET).unwrap();

    // Same carriers level by level; limits in the metric setting are
    // set-based.
    for (hl, pl) in hd.levels().iter().zip(pf.levels()) {
        assert_eq!(hl.carrier.underlying(), pl.carrier.underlying());
    }
    println!(
        "Hd and Pf chains share carriers: sizes {:?}",
        hd.carrier_sizes()
    );

    // Connecting maps are nonexpanding.
    for k in 1..hd.levels().len() {
        let ok = is_nonexpanding(
            hd.level(k).connect.as_ref().unwrap(),
            hd.level(k).carrier.metric().unwrap(),
            hd.level(k - 1).carrier.metric().unwrap(),
        )
        .unwrap();
        assert!(ok);
    }
    println!("all connecting maps are nonexpanding");

    // Level 2 distances over the one-point base: distinct elements sit at
    // distance inf (the empty set is infinitely far from anything
    // nonempty, and that propagates up).
    let m = hd.level(2).carrier.metric().unwrap();
    for x in hd.level(2).carrier.underlying().iter() {
        for y in hd.level(2).carrier.underlying().iter() {
            if x < y {
                println!("  d({x}, {y}) = {}", m.dist(x, y).unwrap());
            }
        }
    }

    // Expressions mix: metric evaluation of a compound expression on a
    // discrete base.
    let expr = parse_functor("Hd(Id + Id)").unwrap();
    let base = coalgebra_kit::metrics::FinMetricSpace::discrete(1);
    let space = eval_metric(&expr, &base, DEFAULT_SIZE_BUDGET).unwrap();
    println!(
        "Hd(Id + Id) over a point: {} subsets, d(in0, in1) = {}",
        space.len(),
        space
            .dist(
                &Value::set([Value::tagged(0, Value::Int(0))]),
                &Value::set([Value::tagged(1, Value::Int(0))]),
            )
            .unwrap()
    );
    assert_eq!(
        space
            .dist(
                &Value::set([Value::tagged(0, Value::Int(0))]),
                &Value::set([Value::tagged(1, Value::Int(0))]),
            )
            .unwrap(),
        ExtRat::infinity()
    );
}
