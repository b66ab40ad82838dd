// The braking scenario run three ways: ideal, naive and extrapolating.

use tt_cosim::bundled;
use tt_cosim::engine::{run, Outcome};
use tt_cosim::report::trace_summary;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["braking_ideal", "braking_naive", "braking_extrapolating"] {
        let trace = run(&bundled::load(name)?)?;
        println!("--- {name}");
        print!("{}", trace_summary(&trace));
        let crashed = matches!(trace.outcome, Outcome::Impact { .. });
        assert_eq!(crashed, name == "braking_naive");
    }
    Ok(())
}
