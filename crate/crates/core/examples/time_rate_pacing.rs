// The model-time rate changes pacing only, never a computed value.

use num_rational::Ratio;
use tt_cosim::bundled;
use tt_cosim::engine::{run, wall_seconds};
use tt_cosim::report::trace_csv;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut scenario = bundled::load("braking_extrapolating")?;
    let mut csvs = Vec::new();
    for rate in [
        Ratio::new(1, 10),
        Ratio::from_integer(1),
        Ratio::from_integer(10),
    ] {
        scenario.run.time_rate = rate;
        let trace = run(&scenario)?;
        let last = trace.records.last().expect("records");
        println!(
            "rate {rate}: last granule paced at {:.1} s real time",
            wall_seconds(last)
        );
        csvs.push(trace_csv(&trace));
    }
    assert!(csvs.windows(2).all(|w| w[0] == w[1]));
    Ok(())
}
