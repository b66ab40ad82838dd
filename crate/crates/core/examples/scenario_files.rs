// Scenario files: parsing, located errors and canonical serialization.

use tt_cosim::bundled;
use tt_cosim::scenario::{parse_scenario, serialize_scenario};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let text = bundled::text("braking_naive").expect("bundled");
    let scenario = parse_scenario(text)?;
    println!(
        "{}: frame {} granules, v0 {} m/s, {} controller",
        scenario.name,
        scenario.schedule.frame_duration(),
        scenario.plant.initial_speed,
        scenario.controller.kind.as_str()
    );

    let canonical = serialize_scenario(&scenario);
    assert_eq!(parse_scenario(&canonical)?, scenario);

    let broken = text
        .replace("computation_granules = 1", "computation_granules = 5")
        .replace("initial_speed = 25.0", "initial_sped = 25.0");
    let errors = parse_scenario(&broken).expect_err("two mistakes");
    println!("errors:\n{errors}");
    assert_eq!(errors.0.len(), 2);
    Ok(())
}
