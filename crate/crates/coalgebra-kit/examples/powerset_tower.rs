//! Iterating the finite power-set functor on the singleton: the chain
//! 1 ← Pf(1) ← Pf²(1) ← … whose level n is, up to the built-in bijection,
//! the set of canonical trees of height at most n.
//!
//! ```bash
//! cargo run --example powerset_tower
//! ```

use coalgebra_kit::chain::{
    kripke_chain, tree_to_level_value, trees_as_level, value_to_tree, ChainError,
};
use coalgebra_kit::functor::FunctorExpr;
use coalgebra_kit::DEFAULT_SIZE_BUDGET;

fn main() {
    let chain = kripke_chain(&FunctorExpr::Pf, 4, DEFAULT_SIZE_BUDGET).unwrap();
    println!("carrier sizes: {:?}", chain.carrier_sizes());

    // Level 2 in full: four subsets-of-subsets, with the connecting map
    // down to level 1.
    let level = chain.level(2);
    let connect = level.connect.as_ref().unwrap();
    for v in level.carrier.underlying().iter() {
        println!("  {v}  |->  {}", connect.apply(v).unwrap());
    }

    // The same level, seen as trees of height <= 2.
    let trees = trees_as_level(2).unwrap();
    println!("trees of height <= 2:");
    for t in &trees {
        let encoded = tree_to_level_value(t, 2).unwrap();
        assert_eq!(&value_to_tree(&encoded).unwrap(), t);
        println!("  {t}  <->  {encoded}");
    }

    // Level 5 would hold 2^65536 elements; the budget refuses loudly.
    match kripke_chain(&FunctorExpr::Pf, 5, DEFAULT_SIZE_BUDGET) {
        Err(ChainError::BudgetExceeded { level, .. }) => {
            println!("level {level} exceeds the size budget, as it must");
        }
        other => panic!("expected a budget failure, got {other:?}"),
    }
}
