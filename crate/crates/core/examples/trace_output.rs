// Trace CSV and the speed-over-distance curves.

use tt_cosim::bundled;
use tt_cosim::engine::run;
use tt_cosim::report::{speed_distance_curve, trace_csv};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let trace = run(&bundled::load("braking_extrapolating")?)?;
    let csv = trace_csv(&trace);
    for line in csv.lines().take(12) {
        println!("{line}");
    }

    let curve = speed_distance_curve(&trace);
    let last = curve.last().expect("points");
    println!(
        "{} points, last at {} m with {} m/s",
        curve.len(),
        last.distance_traveled_m,
        last.speed_mps
    );
    assert_eq!(last.speed_mps, 0.0);
    Ok(())
}
