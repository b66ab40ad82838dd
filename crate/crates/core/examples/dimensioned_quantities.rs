// Values carry SI dimensions; arithmetic checks them.

use tt_cosim::quantity::{Dimension, Quantity, QuantityError};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = Quantity::metres_per_second(25.0)?.grounded("speed of car");
    let s = Quantity::metres(100.0)?.grounded("distance of car from rock");

    let d = v.powi(2)?.checked_div(&s.scale(2.0)?)?;
    println!("v^2 / 2s = {d}");
    assert_eq!(d.dimension(), Dimension::METRE_PER_SECOND_SQUARED);
    assert_eq!(d.value(), 3.125);

    let t = v.checked_div(&d)?;
    println!("v / d = {t}");
    assert_eq!(t.dimension(), Dimension::SECOND);

    // Adding metres to seconds is refused rather than silently computed.
    match s.checked_add(&t) {
        Err(e @ QuantityError::DimensionMismatch { .. }) => println!("refused: {e}"),
        other => panic!("expected a mismatch, got {other:?}"),
    }
    Ok(())
}
