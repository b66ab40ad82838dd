// The controller's braking formulas with their dimension derivations.

use tt_cosim::cps::{brake_force, braking_decision, impact_speed, time_to_stop, DISTANCE, SPEED};
use tt_cosim::itom::{Itom, Term};
use tt_cosim::quantity::Quantity;
use tt_cosim::report::KMH_PER_MPS;
use tt_cosim::time::{Interval, Timestamp};

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = Quantity::metres_per_second(25.0)?;
    let stale = Quantity::metres(100.0)?;
    let fresh = Quantity::metres(75.0)?;

    let d_stale = brake_force(&v, &stale)?;
    let d_fresh = brake_force(&v, &fresh)?;
    println!(
        "brake for 100 m: {d_stale}, stop after {}",
        time_to_stop(&v, &d_stale)?
    );
    println!(
        "brake for 75 m: {d_fresh}, stop after {}",
        time_to_stop(&v, &d_fresh)?
    );

    // Applying the brake computed for 100 m when only 75 m remain.
    let hit = impact_speed(&v, &d_stale, &fresh)?;
    println!("impact at {hit} = {:.1} km/h", hit.value() * KMH_PER_MPS);
    assert_eq!(hit.value(), 12.5);
    assert_eq!(impact_speed(&v, &d_fresh, &fresh)?.value(), 0.0);

    let at = Timestamp::new(0);
    let item = |q: Quantity| {
        Itom::new(
            Interval::point(at),
            Term::name("the car"),
            Term::name("has"),
            q.into(),
        )
    };
    let decision = braking_decision(
        &item(v.grounded(SPEED)),
        &item(fresh.grounded(DISTANCE)),
        at,
    )?;
    for c in &decision.calculations {
        println!(
            "{:<13} {:<12} {:<28} {} = {}",
            c.name, c.formula, c.dimension_check, c.operands, c.value
        );
    }
    Ok(())
}
