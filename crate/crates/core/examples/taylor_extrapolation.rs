// Derivative estimates from a sensor series and Taylor extrapolation.

use tt_cosim::extrapolation::TimeSeries;
use tt_cosim::quantity::{Dimension, Quantity};
use tt_cosim::time::{ClockSpec, Timestamp};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let clock = ClockSpec::seconds();
    let mut series = TimeSeries::new("distance of car from rock", Dimension::METRE, 8, &clock)?;
    // s(t) = 100 - 25 t + 1.5 t^2
    let s = |t: f64| 100.0 - 25.0 * t + 1.5 * t * t;
    for t in 0..3u64 {
        series.record_sample(Timestamp::new(t), Quantity::metres(s(t as f64))?)?;
    }

    for order in 0..=2 {
        let d = series.estimate_derivative(order)?;
        println!("derivative of order {order} at t=2: {}", d.value);
    }
    let target = Timestamp::new(4);
    for order in 0..=2 {
        let value = series.extrapolate_value(target, order)?;
        println!("order {order} at t=4: {value}");
    }
    // Order 2 is exact for a quadratic.
    let exact = series.extrapolate_value(target, 2)?.value();
    assert!((exact - s(4.0)).abs() < 1e-9, "{exact}");

    let item = series.extrapolate(target, 1)?;
    println!("{}", item.trace_line(&clock));
    Ok(())
}
