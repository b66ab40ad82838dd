// An anytime computation: a cheap root result refined until the deadline.

use tt_cosim::cps::{impact_speed, impact_speed_anytime, AnytimeBudget};
use tt_cosim::quantity::Quantity;
use tt_cosim::time::Timestamp;

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = Quantity::metres_per_second(25.0)?;
    let d = Quantity::metres_per_second_squared(2.0)?;
    let s = Quantity::metres(100.0)?;
    let exact = impact_speed(&v, &d, &s)?.value();

    for deadline in [1, 2, 3, 4, 6] {
        let budget = AnytimeBudget {
            now: Timestamp::new(0),
            deadline: Timestamp::new(deadline),
            root_cost: 1,
            step_cost: 1,
            max_iterations: None,
        };
        let r = impact_speed_anytime(&v, &d, &s, &budget)?;
        println!(
            "deadline {deadline}: {} iterations, {:.9} m/s, error {:.2e}",
            r.iterations_completed,
            r.value.value(),
            (r.value.value() - exact).abs()
        );
        assert!(r.deadline_met);
    }
    Ok(())
}
