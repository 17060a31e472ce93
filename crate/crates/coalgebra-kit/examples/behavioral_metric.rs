//! The behavioral pseudo-metric on finite generators: distance 2^{-n} when
//! the depth-n approximants are the last to agree, 0 for bisimilar graphs.
//!
//! ```bash
//! cargo run --example behavioral_metric
//! ```

use coalgebra_kit::metrics::{behavioral_distance, ExtRat};
use coalgebra_kit::systems::PointedGraph;
use coalgebra_kit::trees::partial_n;

fn main() {
    let leaf = PointedGraph::single_node();
    let step = PointedGraph::path(1);
    let tight = PointedGraph::self_loop();
    let path3 = PointedGraph::path(3);

    println!(
        "d(leaf, one-step)    = {}",
        behavioral_distance(&leaf, &step).unwrap()
    );
    println!(
        "d(loop, 3-step path) = {}",
        behavioral_distance(&tight, &path3).unwrap()
    );
    println!(
        "d(loop, loop)        = {}",
        behavioral_distance(&tight, &tight).unwrap()
    );
    assert_eq!(
        behavioral_distance(&tight, &path3).unwrap(),
        ExtRat::pow2_neg(3)
    );

    // The strong triangle inequality: d(g,k) <= max(d(g,h), d(h,k)).
    let d_gk = behavioral_distance(&leaf, &path3).unwrap();
    let d_gh = behavioral_distance(&leaf, &tight).unwrap();
    let d_hk = behavioral_distance(&tight, &path3).unwrap();
    println!("strong triangle: {d_gk} <= max({d_gh}, {d_hk})");
    assert!(d_gk <= d_gh.max(d_hk));

    // Total boundedness at work: a graph is within 2^{-n} of the generator
    // of its own depth-n approximant.
    for n in 0..=5 {
        let truncated = PointedGraph::from_canonical_tree(&partial_n(&tight.unfold(n), n));
        let d = behavioral_distance(&tight, &truncated).unwrap();
        println!("d(loop, depth-{n} truncation) = {d}");
        assert!(d <= ExtRat::pow2_neg(n));
    }
}
