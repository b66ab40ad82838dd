// Extrapolation error when the output instant is known (time-triggered)
// versus guessed (event-triggered).

use tt_cosim::bundled;
use tt_cosim::cps::DISTANCE;
use tt_cosim::engine::{run, run_event_triggered, DurationSource};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tt = run(&bundled::load("tt_alternating")?)?;
    let et = run(&bundled::load("et_alternating")?)?;
    let tt_err = tt.mean_abs_error(DISTANCE).unwrap_or(0.0);
    let et_err = et.mean_abs_error(DISTANCE).unwrap_or(0.0);
    println!("time-triggered mean error:  {tt_err:.6} m");
    println!("event-triggered mean error: {et_err:.6} m");
    assert!(tt_err <= et_err);

    let scenario = bundled::load("tt_alternating")?;
    for (min, max) in [(10, 10), (9, 11), (5, 15), (2, 18)] {
        let source = DurationSource::Uniform { seed: 1, min, max };
        let trace = run_event_triggered(&scenario, &source)?;
        println!(
            "durations {min}..={max} granules: mean error {:.3} m",
            trace.mean_abs_error(DISTANCE).unwrap_or(0.0)
        );
    }
    Ok(())
}
