// Sensor latency, computation and actuator latency add up to the action
// interval.

use tt_cosim::latency::LatencySpec;
use tt_cosim::time::{FrameSchedule, Interval, Timestamp};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let horizon = Interval::new(Timestamp::new(0), Timestamp::new(10_000))?;
    let schedule = FrameSchedule::new(100, Timestamp::new(0), horizon)?;
    let spec = LatencySpec::new(3, 100, 2);

    let sof = Timestamp::new(1000);
    let a = spec.truth_instant_of_sample(sof, &schedule)?;
    let ai = spec.tt_action_interval(sof, &schedule)?;
    println!("read at {sof}, value true at {a}");
    println!(
        "setpoint true at {}, action interval {} granules",
        ai.output_instant, ai.total
    );
    assert_eq!(ai.total, 3 + 100 + 2);

    // Reading off the SOF grid is not allowed.
    assert!(spec
        .truth_instant_of_sample(Timestamp::new(1050), &schedule)
        .is_err());
    Ok(())
}
