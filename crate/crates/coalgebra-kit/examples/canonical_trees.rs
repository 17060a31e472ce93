//! Canonical strongly extensional trees: parsing, collapsing, tree
//! bisimulation, and the depth-n approximants.
//!
//! ```bash
//! cargo run --example canonical_trees
//! ```

use coalgebra_kit::trees::{
    canonize, is_strongly_extensional, is_tree_bisimulation, partial_n, rho_n, tree_bisimilar,
    RawTree,
};

fn main() {
    // A raw tree may carry duplicate children; `[[],[]]` is a root with two
    // identical leaf children.
    let doubled = RawTree::parse("[[],[]]").unwrap();
    let canonical = canonize(&doubled);
    println!("canonize {doubled}  =>  {canonical}");
    assert_eq!(canonical.to_text(), "[[]]");

    // The collapse is justified: input and output are tree bisimilar, and
    // the witness relation passes the definitional check.
    let witness = tree_bisimilar(&doubled, &canonical.to_raw()).expect("bisimilar");
    assert!(is_tree_bisimulation(&doubled, &canonical.to_raw(), &witness).unwrap());
    println!("witness relation has {} node pairs", witness.len());

    // Strong extensionality means the only self-bisimulation is the
    // diagonal; canonize output always has the property.
    println!(
        "strongly extensional? input: {}, output: {}",
        is_strongly_extensional(&doubled),
        is_strongly_extensional(&canonical.to_raw()),
    );

    // Depth-n approximants truncate and re-canonize. Increasing n refines
    // the picture; the cone law says deeper approximants project onto
    // shallower ones.
    let tree = RawTree::parse("[[],[[]],[[],[[]]]]").unwrap();
    for n in 0..=3 {
        println!("depth-{n} approximant: {}", partial_n(&tree, n));
    }
    for n in 0..3 {
        assert_eq!(partial_n(&tree, n + 1).truncate(n), partial_n(&tree, n));
    }

    // The node-wise variant computes the approximant of any subtree; at the
    // root it coincides with the plain approximant.
    let root = tree.root();
    assert_eq!(rho_n(&tree, root, 2).unwrap(), partial_n(&tree, 2));
    let child = tree.children_of(root)[2];
    println!(
        "subtree at the third child: {}",
        tree.subtree(child).unwrap()
    );
}
