// Information items and the temporal-consistency check against ground truth.

use tt_cosim::cps::{braking_decision, CarPlant, CarState, DISTANCE, SPEED};
use tt_cosim::itom::{check_temporal_consistency_at, Itom, Term, DEFAULT_TOLERANCE};
use tt_cosim::quantity::Quantity;
use tt_cosim::time::{ClockSpec, Interval, Timestamp};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

fn observed(at: Timestamp, predicate: &str, value: Quantity) -> Itom {
    Itom::new(
        Interval::point(at),
        Term::name("the car"),
        Term::name(predicate),
        value.into(),
    )
    .with_provenance("sensor")
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let clock = ClockSpec::seconds().with_epoch("00:00:00");
    let t56 = Timestamp::new(10 * 3600 + 59 * 60 + 56);
    let t57 = t56 + 1;
    // Car cruising at 25 m/s, 100 m from the rock at t56.
    let plant = CarPlant::new(clock.clone(), t56, CarState::cruising(100.0, 25.0));

    let speed = observed(
        t56,
        "moves with",
        Quantity::metres_per_second(25.0)?.grounded(SPEED),
    );
    let distance = observed(
        t56,
        "is distant by",
        Quantity::metres(100.0)?.grounded(DISTANCE),
    );
    let decision = braking_decision(&speed, &distance, t56)?;
    println!("{}", decision.result.trace_line(&clock));

    for at in [t56, t57] {
        let report =
            check_temporal_consistency_at(&decision.result, at, &plant, DEFAULT_TOLERANCE)?;
        println!(
            "checked at {}: consistent = {}",
            clock.label(at),
            report.consistent()
        );
        for v in report.violations() {
            println!("  {}", v.describe(&clock));
        }
    }
    let late = check_temporal_consistency_at(&decision.result, t57, &plant, DEFAULT_TOLERANCE)?;
    assert!(late
        .violations()
        .iter()
        .any(|v| v.grounding() == Some(DISTANCE)));
    Ok(())
}
