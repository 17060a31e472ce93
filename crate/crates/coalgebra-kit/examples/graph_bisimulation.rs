//! Finite pointed graphs as generators of infinite trees: unfolding,
//! partition-refinement bisimilarity, separation depth, and minimization.
//!
//! ```bash
//! cargo run --example graph_bisimulation
//! ```

use coalgebra_kit::systems::{bisimilar, leadsto, minimize, separation_depth, PointedGraph};

fn main() {
    // A self-loop and a two-node cycle generate the same infinite path.
    let tight = PointedGraph::self_loop();
    let cycle = PointedGraph::unlabelled(2, [(0, 1), (1, 0)], 0).unwrap();
    println!("self-loop unfolds to depth 4 as {}", tight.unfold(4));
    println!("cycle unfolds to depth 4 as     {}", cycle.unfold(4));

    let witness = bisimilar(&tight, &cycle).unwrap().expect("same behavior");
    println!(
        "bisimilar, {} blocks in the joint stable partition",
        witness.partition.block_count()
    );

    // A path that stops after three steps agrees with the loop up to depth
    // 3 and separates at depth 4.
    let path = PointedGraph::path(3);
    assert!(bisimilar(&tight, &path).unwrap().is_none());
    println!(
        "self-loop vs 3-step path: separation depth {:?}",
        separation_depth(&tight, &path).unwrap()
    );

    // Quotienting by the largest bisimulation collapses the cycle to the
    // loop (graphs are parsed from / printed to the JSON format).
    let minimized = minimize(&cycle);
    println!("minimized cycle: {}", minimized.to_json());
    assert_eq!(minimized.node_count(), 1);

    // leads-to: some child subtree of the left unfolding is bisimilar to
    // the right unfolding. The self-loop leads to itself.
    assert!(leadsto(&tight, &tight).unwrap());
    assert!(!leadsto(&PointedGraph::single_node(), &tight).unwrap());
    println!("leadsto(self-loop, self-loop) holds");

    let parsed = PointedGraph::from_json(
        r#"{"nodes": ["a", "b"], "root": "a",
            "edges": [{"from": "a", "to": "b"}, {"from": "b", "to": "b"}]}"#,
    )
    .unwrap();
    println!(
        "a graph from JSON, unfolded to depth 3: {}",
        parsed.unfold(3)
    );
}
