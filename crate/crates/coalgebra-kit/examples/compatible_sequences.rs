//! Compatible sequences along the power-set chain and their unique tree
//! representatives: checking the connecting equations and rebuilding the
//! canonical tree behind a sequence of approximants.
//!
//! ```bash
//! cargo run --example compatible_sequences
//! ```

use coalgebra_kit::chain::{
    check_compatible, kripke_chain, sequence_to_tree, tree_to_level_value, CompatibleSequence,
};
use coalgebra_kit::functor::FunctorExpr;
use coalgebra_kit::trees::{canonize, partial_n, RawTree};
use coalgebra_kit::value::Value;
use coalgebra_kit::DEFAULT_SIZE_BUDGET;

fn main() {
    let chain = kripke_chain(&FunctorExpr::Pf, 3, DEFAULT_SIZE_BUDGET).unwrap();

    // A compatible sequence picks one element per level, matched by the
    // connecting maps.
    let x1 = Value::set([Value::Unit]);
    let x2 = Value::set([Value::set([Value::Unit])]);
    let good = CompatibleSequence::new(vec![Value::Unit, x1, x2]);
    println!(
        "singleton tower compatible? {}",
        check_compatible(&chain, &good).unwrap()
    );

    let bad = CompatibleSequence::new(vec![
        Value::Unit,
        Value::set([]),
        Value::set([Value::set([Value::Unit])]),
    ]);
    println!(
        "broken sequence compatible? {}",
        check_compatible(&chain, &bad).unwrap()
    );

    // Any tree yields a compatible sequence of its approximants, and the
    // sequence determines the canonical tree uniquely.
    let tree = RawTree::parse("[[],[[],[[]]]]").unwrap();
    let canonical = canonize(&tree);
    let entries: Vec<Value> = (0..=canonical.height())
        .map(|n| tree_to_level_value(&partial_n(&tree, n), n).unwrap())
        .collect();
    for (n, e) in entries.iter().enumerate() {
        println!("  level {n}: {e}");
    }
    let rebuilt = sequence_to_tree(&CompatibleSequence::new(entries)).unwrap();
    println!("rebuilt tree: {rebuilt}");
    assert_eq!(rebuilt, canonical);

    // Incompatible sequences are rejected, not repaired.
    match sequence_to_tree(&bad) {
        Err(e) => println!("broken sequence rejected: {e}"),
        Ok(t) => panic!("unexpectedly rebuilt {t}"),
    }
}
