//! The Hausdorff lifting on finite extended metric spaces: subsets with the
//! sup/inf distance, the empty-set convention, and preservation of the
//! ultrametric inequality.
//!
//! ```bash
//! cargo run --example hausdorff_lifting
//! ```

use coalgebra_kit::metrics::{
    hausdorff_distance, hausdorff_lift, is_nonexpanding, is_ultrametric, ExtRat, FinMetricSpace,
};
use coalgebra_kit::value::{FiniteSet, SetFunction, Value};
use coalgebra_kit::DEFAULT_SIZE_BUDGET;

fn main() {
    // Three points on a line, distances 1, 2, 3 (not an ultrametric).
    let line = FinMetricSpace::new((0..3).map(Value::Int), |x, y| match (x, y) {
        (Value::Int(a), Value::Int(b)) => ExtRat::from_int(a.abs_diff(*b)),
        _ => unreachable!(),
    })
    .unwrap();

    let s = FiniteSet::new([Value::Int(0)]);
    let t = FiniteSet::new([Value::Int(1), Value::Int(2)]);
    let empty = FiniteSet::empty();
    println!(
        "d({{0}}, {{1,2}}) = {}",
        hausdorff_distance(&s, &t, &line).unwrap()
    );
    println!(
        "d(empty, {{0}})  = {}  (the empty set is infinitely far from everything nonempty)",
        hausdorff_distance(&empty, &s, &line).unwrap()
    );
    println!(
        "d(empty, empty) = {}",
        hausdorff_distance(&empty, &empty, &line).unwrap()
    );

    // Lift the whole space: 2^3 subsets as points.
    let lifted = hausdorff_lift(&line, DEFAULT_SIZE_BUDGET).unwrap();
    println!("lift of the line has {} points", lifted.len());
    println!(
        "lifted d({{0}}, {{0,1}}) = {}",
        lifted
            .dist(
                &Value::set([Value::Int(0)]),
                &Value::set([Value::Int(0), Value::Int(1)])
            )
            .unwrap()
    );

    // An ultrametric space lifts to an ultrametric space; the line does not
    // even start as one.
    println!("line ultrametric? {}", is_ultrametric(&line));
    let ultra = FinMetricSpace::new((0..4).map(Value::Int), |x, y| match (x, y) {
        (Value::Int(a), Value::Int(b)) if a == b => ExtRat::zero(),
        // two tight pairs {0,1} and {2,3} at inner distance 1/4, outer 1
        (Value::Int(a), Value::Int(b)) if a / 2 == b / 2 => ExtRat::ratio(1, 4),
        _ => ExtRat::one(),
    })
    .unwrap();
    let lifted_ultra = hausdorff_lift(&ultra, DEFAULT_SIZE_BUDGET).unwrap();
    println!(
        "ultrametric base lifts to ultrametric: {}",
        is_ultrametric(&lifted_ultra)
    );
    assert!(is_ultrametric(&ultra) && is_ultrametric(&lifted_ultra));

    // The lifting acts on nonexpanding maps by direct image, and stays
    // nonexpanding.
    let squash = SetFunction::new(ultra.points().clone(), FiniteSet::range(2), |v| match v {
        Value::Int(n) => Value::Int(n / 2),
        _ => unreachable!(),
    })
    .unwrap();
    let two = FinMetricSpace::discrete(2);
    assert!(is_nonexpanding(&squash, &ultra, &two).unwrap());
    let lifted_map = SetFunction::new(
        lifted_ultra.points().clone(),
        hausdorff_lift(&two, DEFAULT_SIZE_BUDGET)
            .unwrap()
            .points()
            .clone(),
        |v| match v {
            Value::Set(members) => squash.direct_image(members).unwrap(),
            _ => unreachable!(),
        },
    )
    .unwrap();
    println!(
        "direct image of a nonexpanding map is nonexpanding: {}",
        is_nonexpanding(
            &lifted_map,
            &lifted_ultra,
            &hausdorff_lift(&two, DEFAULT_SIZE_BUDGET).unwrap()
        )
        .unwrap()
    );
}
