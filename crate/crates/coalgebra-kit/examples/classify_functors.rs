//! Parsing and classifying polynomial functor expressions.
//!
//! The classifier assigns each expression a cardinality class:
//! 0 (empty everywhere), 1 (singleton everywhere), 2 (finite, nontrivial),
//! 3 (infinite on nonempty arguments). Some corner cases of the inductive
//! case table are genuinely undetermined and report a classification gap
//! instead of guessing.
//!
//! ```bash
//! cargo run --example classify_functors
//! ```

use coalgebra_kit::functor::{classify, parse_functor, FunctorError};

fn main() {
    let samples = [
        "Pf", // finite power set
        "Id",
        "C0",           // empty constant
        "Prod()",       // empty product = constant 1
        "Coprod()",     // empty coproduct = constant 0
        "Pf(C2 * Id)",  // finitely branching LTS over two actions
        "Prod_inf(Pf)", // infinitely many power-set factors
        "Id(C1)",       // collapses to the constant singleton
        "Pf(C1)",       // the constant with value Pf(1), two elements
        "Pf(C0)",       // a case the table does not cover
        "C0 + C1",      // another uncovered case
    ];
    for src in samples {
        let expr = parse_functor(src).unwrap();
        let verdict = match classify(&expr) {
            Ok(class) => format!("n(F) = {class}"),
            Err(FunctorError::ClassificationGap(_)) => "classification-gap".to_string(),
            Err(other) => format!("error: {other}"),
        };
        println!(
            "{src:16} parsed as {expr:24}  {verdict}",
            expr = expr.to_string()
        );
    }

    // Parse errors carry byte positions.
    match parse_functor("Pf + ") {
        Err(FunctorError::Parse { pos, msg }) => println!("\"Pf + \" fails at byte {pos}: {msg}"),
        other => panic!("expected a parse error, got {other:?}"),
    }
}
