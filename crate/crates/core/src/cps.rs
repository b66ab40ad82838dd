//! The car-and-rock plant, the braking computations of the controller, and
//! the anytime harness.
//!
//! The car moves in one dimension towards a rock. The plant is exact closed
//! form kinematics under piecewise-constant deceleration; it doubles as the
//! world oracle for consistency checks.
//!
//! Sign convention: the controller computes and transmits a positive
//! deceleration magnitude `d`. Items and trace output show the brake force
//! as the signed acceleration `-d`.

use thiserror::Error;

use crate::itom::{Itom, Term, WorldOracle};
use crate::quantity::{dimension_of_formula, sig6, Dimension, Quantity, QuantityError};
use crate::time::{ClockSpec, Interval, Timestamp};

pub const DISTANCE: &str = "distance of car from rock";
pub const SPEED: &str = "speed of car";
pub const BRAKE_FORCE: &str = "brake force that must be applied to stop the car before the rock";
pub const APPLIED_BRAKE: &str = "brake deceleration applied to the car";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error("{what} must have dimension [{expected}], got [{found}]")]
    WrongDimension {
        what: &'static str,
        expected: Dimension,
        found: Dimension,
    },
    #[error("{what} must not be negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("root segment finishing at {finish} misses the deadline {deadline}")]
    Deadline {
        finish: Timestamp,
        deadline: Timestamp,
    },
    #[error("brake command at {got} precedes the previous command at {previous}")]
    CommandOrder { previous: Timestamp, got: Timestamp },
}

fn expect_dimension(
    what: &'static str,
    q: &Quantity,
    expected: Dimension,
) -> Result<(), ModelError> {
    if q.dimension() != expected {
        return Err(ModelError::WrongDimension {
            what,
            expected,
            found: q.dimension(),
        });
    }
    Ok(())
}

fn expect_non_negative(what: &'static str, q: &Quantity) -> Result<(), ModelError> {
    if q.value() < 0.0 {
        return Err(ModelError::Negative {
            what,
            value: q.value(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarState {
    /// Distance remaining to the rock, metres.
    pub position: f64,
    /// Metres per second, never negative.
    pub speed: f64,
    /// Current brake magnitude, m/s².
    pub applied_decel: f64,
}

impl CarState {
    pub fn cruising(position: f64, speed: f64) -> Self {
        CarState {
            position,
            speed,
            applied_decel: 0.0,
        }
    }

    pub fn position(&self) -> Quantity {
        Quantity::metres(self.position)
            .expect("finite")
            .grounded(DISTANCE)
    }

    pub fn speed(&self) -> Quantity {
        Quantity::metres_per_second(self.speed)
            .expect("finite")
            .grounded(SPEED)
    }

    pub fn applied_decel(&self) -> Quantity {
        Quantity::metres_per_second_squared(self.applied_decel).expect("finite")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impact {
    /// Seconds into the step.
    pub after: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: CarState,
    pub impact: Option<Impact>,
    /// Seconds into the step at which the car came to rest.
    pub stopped_after: Option<f64>,
}

/// Exact advance of the car by `dt` seconds under its current deceleration.
///
/// The car never reverses. When the rock is reached with positive speed the
/// returned state sits at the rock and carries the contact speed.
pub fn plant_step(state: &CarState, dt: f64) -> StepOutcome {
    debug_assert!(dt >= 0.0);
    let CarState {
        position: s,
        speed: v,
        applied_decel: d,
    } = *state;
    let unchanged = StepOutcome {
        state: *state,
        impact: None,
        stopped_after: None,
    };
    if v == 0.0 || dt == 0.0 {
        return unchanged;
    }
    if d == 0.0 {
        let travel = v * dt;
        if travel >= s {
            return StepOutcome {
                state: CarState {
                    position: 0.0,
                    ..*state
                },
                impact: Some(Impact {
                    after: s / v,
                    speed: v,
                }),
                stopped_after: None,
            };
        }
        return StepOutcome {
            state: CarState {
                position: s - travel,
                ..*state
            },
            impact: None,
            stopped_after: None,
        };
    }

    let stop_time = v / d;
    let stops_within = stop_time <= dt;
    let covered = if stops_within {
        v * v / (2.0 * d)
    } else {
        v * dt - 0.5 * d * dt * dt
    };
    let reaches_rock = if stops_within {
        covered > s
    } else {
        covered >= s
    };
    if reaches_rock {
        let contact = (v * v - 2.0 * d * s).max(0.0).sqrt();
        return StepOutcome {
            state: CarState {
                position: 0.0,
                speed: contact,
                applied_decel: d,
            },
            impact: Some(Impact {
                after: (v - contact) / d,
                speed: contact,
            }),
            stopped_after: None,
        };
    }
    if stops_within {
        StepOutcome {
            state: CarState {
                position: s - covered,
                speed: 0.0,
                applied_decel: d,
            },
            impact: None,
            stopped_after: Some(stop_time),
        }
    } else {
        StepOutcome {
            state: CarState {
                position: s - covered,
                speed: v - d * dt,
                applied_decel: d,
            },
            impact: None,
            stopped_after: None,
        }
    }
}

/// A deceleration magnitude that takes effect at an instant and holds.
#[derive(Debug, Clone, PartialEq)]
pub struct BrakeCommand {
    pub decel: Quantity,
    pub effective_at: Timestamp,
}

impl BrakeCommand {
    pub fn new(decel: Quantity, effective_at: Timestamp) -> Result<Self, ModelError> {
        expect_dimension(
            "brake deceleration",
            &decel,
            Dimension::METRE_PER_SECOND_SQUARED,
        )?;
        expect_non_negative("brake deceleration", &decel)?;
        Ok(BrakeCommand {
            decel,
            effective_at,
        })
    }
}

/// When something happened: `offset` seconds after the granule `segment_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventTime {
    pub segment_start: Timestamp,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub state: CarState,
    pub impact: Option<(EventTime, f64)>,
    pub stop: Option<EventTime>,
}

/// The plant trajectory: an initial state at `origin` plus the brake commands
/// applied so far. Any instant at or after the origin can be queried.
#[derive(Debug, Clone, PartialEq)]
pub struct CarPlant {
    clock: ClockSpec,
    origin: Timestamp,
    initial: CarState,
    commands: Vec<BrakeCommand>,
}

impl CarPlant {
    pub fn new(clock: ClockSpec, origin: Timestamp, initial: CarState) -> Self {
        CarPlant {
            clock,
            origin,
            initial,
            commands: Vec::new(),
        }
    }

    pub fn origin(&self) -> Timestamp {
        self.origin
    }

    pub fn commands(&self) -> &[BrakeCommand] {
        &self.commands
    }

    pub fn apply(&mut self, command: BrakeCommand) -> Result<(), ModelError> {
        if let Some(last) = self.commands.last() {
            if command.effective_at < last.effective_at {
                return Err(ModelError::CommandOrder {
                    previous: last.effective_at,
                    got: command.effective_at,
                });
            }
        }
        self.commands.push(command);
        Ok(())
    }

    /// State at `t` together with the first impact and stop at or before `t`.
    /// After an impact the car stays at the rock.
    pub fn evolve(&self, t: Timestamp) -> Evolution {
        let mut evo = Evolution {
            state: self.initial,
            impact: None,
            stop: None,
        };
        let mut segment_start = self.origin;
        let breakpoints = self
            .commands
            .iter()
            .filter(|c| c.effective_at <= t && c.effective_at >= self.origin)
            .map(|c| (c.effective_at, Some(c.decel.value())))
            .chain(std::iter::once((t, None)));
        for (until, next_decel) in breakpoints {
            if until > segment_start {
                let dt = self.clock.span_secs(until - segment_start);
                let out = plant_step(&evo.state, dt);
                evo.state = out.state;
                if let Some(hit) = out.impact {
                    evo.impact = Some((
                        EventTime {
                            segment_start,
                            offset: hit.after,
                        },
                        hit.speed,
                    ));
                    return evo;
                }
                if let (Some(after), None) = (out.stopped_after, evo.stop) {
                    evo.stop = Some(EventTime {
                        segment_start,
                        offset: after,
                    });
                }
                segment_start = until;
            }
            if let Some(d) = next_decel {
                evo.state.applied_decel = d;
                if evo.state.speed > 0.0 {
                    evo.stop = None;
                }
            }
        }
        evo
    }

    pub fn state_at(&self, t: Timestamp) -> CarState {
        self.evolve(t).state
    }

    /// Seconds from `segment_start` to `t`, for comparing event times with
    /// granule boundaries.
    pub fn offset_of(&self, segment_start: Timestamp, t: Timestamp) -> f64 {
        self.clock.span_secs(t - segment_start)
    }
}

impl WorldOracle for CarPlant {
    fn true_value(&self, grounding: &str, at: Timestamp) -> Option<Quantity> {
        if at < self.origin {
            return None;
        }
        let state = self.state_at(at);
        match grounding {
            DISTANCE => Some(state.position()),
            SPEED => Some(state.speed()),
            BRAKE_FORCE => {
                if state.position <= 0.0 {
                    return None;
                }
                let d = state.speed * state.speed / (2.0 * state.position);
                Quantity::metres_per_second_squared(-d).ok()
            }
            APPLIED_BRAKE => Quantity::metres_per_second_squared(-state.applied_decel).ok(),
            _ => None,
        }
    }
}

/// Deceleration magnitude that stops a car at `speed` exactly after
/// `distance`: `v² / 2s`.
pub fn brake_force(speed: &Quantity, distance: &Quantity) -> Result<Quantity, ModelError> {
    expect_dimension("speed", speed, Dimension::METRE_PER_SECOND)?;
    expect_dimension("distance", distance, Dimension::METRE)?;
    if distance.value() <= 0.0 {
        return Err(QuantityError::Singularity(format!(
            "car is at or past the rock (distance {} m)",
            distance.value()
        ))
        .into());
    }
    let two_s = distance.scale(2.0)?;
    Ok(speed.powi(2)?.checked_div(&two_s)?)
}

/// `v / d`.
pub fn time_to_stop(speed: &Quantity, decel: &Quantity) -> Result<Quantity, ModelError> {
    expect_dimension("speed", speed, Dimension::METRE_PER_SECOND)?;
    expect_dimension("deceleration", decel, Dimension::METRE_PER_SECOND_SQUARED)?;
    if decel.value() <= 0.0 {
        return Err(QuantityError::Singularity(format!(
            "no stop without positive deceleration (got {})",
            decel.value()
        ))
        .into());
    }
    Ok(speed.checked_div(decel)?)
}

fn impact_radicand(
    speed: &Quantity,
    decel: &Quantity,
    distance: &Quantity,
) -> Result<Quantity, ModelError> {
    expect_dimension("speed", speed, Dimension::METRE_PER_SECOND)?;
    expect_dimension("deceleration", decel, Dimension::METRE_PER_SECOND_SQUARED)?;
    expect_dimension("distance", distance, Dimension::METRE)?;
    expect_non_negative("speed", speed)?;
    expect_non_negative("deceleration", decel)?;
    expect_non_negative("distance", distance)?;
    let braking = decel.checked_mul(distance)?.scale(2.0)?;
    let r = speed.powi(2)?.checked_sub(&braking)?;
    Ok(Quantity::new(r.value().max(0.0), r.dimension())?)
}

/// Speed at the rock, `sqrt(max(0, v² - 2 d s))`; zero when the car stops
/// at or before it.
pub fn impact_speed(
    speed: &Quantity,
    decel: &Quantity,
    distance: &Quantity,
) -> Result<Quantity, ModelError> {
    Ok(impact_radicand(speed, decel, distance)?.sqrt()?)
}

/// Simulated-time budget for an anytime computation, in granules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnytimeBudget {
    pub now: Timestamp,
    pub deadline: Timestamp,
    pub root_cost: u64,
    pub step_cost: u64,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnytimeResult {
    pub value: Quantity,
    pub iterations_completed: usize,
    pub deadline_met: bool,
    pub finished_at: Timestamp,
}

/// Runs `root`, then `improve` while another iteration completes by the
/// deadline (and the iteration cap allows). `improve` returns `None` once it
/// cannot improve further.
pub fn anytime_run<R, I>(
    root: R,
    mut improve: I,
    budget: &AnytimeBudget,
) -> Result<AnytimeResult, ModelError>
where
    R: FnOnce() -> Result<Quantity, ModelError>,
    I: FnMut(&Quantity) -> Result<Option<Quantity>, ModelError>,
{
    let mut clock = budget.now + budget.root_cost;
    if clock > budget.deadline {
        return Err(ModelError::Deadline {
            finish: clock,
            deadline: budget.deadline,
        });
    }
    let mut value = root()?;
    let mut iterations = 0;
    while budget.max_iterations.is_none_or(|cap| iterations < cap) {
        let finish = clock + budget.step_cost;
        if finish > budget.deadline {
            break;
        }
        match improve(&value)? {
            Some(better) => value = better,
            None => break,
        }
        iterations += 1;
        clock = finish;
    }
    Ok(AnytimeResult {
        value,
        iterations_completed: iterations,
        deadline_met: clock <= budget.deadline,
        finished_at: clock,
    })
}

/// One Newton step for `sqrt(radicand)`: `x' = (x + a / x) / 2`. Returns
/// `None` at the fixed point.
pub fn newton_sqrt_step(radicand: &Quantity, x: &Quantity) -> Result<Option<Quantity>, ModelError> {
    if x.value() == 0.0 {
        return Ok(None);
    }
    let next = x.checked_add(&radicand.checked_div(x)?)?.scale(0.5)?;
    let above_root = x.value() * x.value() >= radicand.value();
    let crosses_back = next.value() * next.value() < radicand.value();
    if next.value() == x.value() || (above_root && (next.value() >= x.value() || crosses_back)) {
        return Ok(None);
    }
    Ok(Some(next))
}

/// Impact speed computed as an anytime algorithm: the root segment seeds
/// `v / 2`, each iteration is a Newton step towards the exact square root.
pub fn impact_speed_anytime(
    speed: &Quantity,
    decel: &Quantity,
    distance: &Quantity,
    budget: &AnytimeBudget,
) -> Result<AnytimeResult, ModelError> {
    let radicand = impact_radicand(speed, decel, distance)?;
    anytime_run(
        || Ok(speed.scale(0.5)?.ungrounded()),
        |x| newton_sqrt_step(&radicand, x),
        budget,
    )
}

/// One logged controller calculation, with its dimension derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct Calculation {
    pub name: &'static str,
    pub formula: &'static str,
    /// e.g. `[m^2·s^-2]/[m] = [m·s^-2]`
    pub dimension_check: String,
    pub dimension: Dimension,
    /// Operands as shown in the value column, e.g. `-625/200`.
    pub operands: String,
    pub value: Quantity,
}

/// Output of one braking decision.
#[derive(Debug, Clone, PartialEq)]
pub struct BrakingDecision {
    /// Positive magnitude to command.
    pub decel: Quantity,
    /// Result item valid at `v_time`, nesting the two input items.
    pub result: Itom,
    pub calculations: Vec<Calculation>,
}

/// Computes the brake magnitude from a speed item and a distance item and
/// wraps the signed result as an item valid at `v_time`.
pub fn braking_decision(
    speed_item: &Itom,
    distance_item: &Itom,
    v_time: Timestamp,
) -> Result<BrakingDecision, ModelError> {
    let literal = |item: &Itom, what: &'static str| {
        item.value().cloned().ok_or(ModelError::WrongDimension {
            what,
            expected: Dimension::DIMENSIONLESS,
            found: Dimension::DIMENSIONLESS,
        })
    };
    let v = literal(speed_item, "speed")?;
    let s = literal(distance_item, "distance")?;
    let d = brake_force(&v, &s)?;
    let brake_dim = dimension_of_formula(&[(v.dimension(), 2), (s.dimension(), -1)]);
    debug_assert_eq!(brake_dim, d.dimension());
    let t_stop = time_to_stop(&v, &d)?;
    let stop_dim = dimension_of_formula(&[(v.dimension(), 1), (d.dimension(), -1)]);
    debug_assert_eq!(stop_dim, t_stop.dimension());

    let signed = (-d.clone()).grounded(BRAKE_FORCE);
    let calculations = vec![
        Calculation {
            name: "Brake force",
            formula: "v^2/2s = -d",
            dimension_check: format!(
                "[{}]/[{}] = [{}]",
                v.dimension().powi(2),
                s.dimension(),
                brake_dim
            ),
            dimension: d.dimension(),
            operands: format!(
                "{}/{}",
                sig6(-(v.value() * v.value())),
                sig6(2.0 * s.value())
            ),
            value: signed.clone(),
        },
        Calculation {
            name: "Time to stop",
            formula: "v/d = t",
            dimension_check: format!("[{}]/[{}] = [{}]", v.dimension(), d.dimension(), stop_dim),
            dimension: t_stop.dimension(),
            operands: format!("{}/{}", sig6(v.value()), sig6(d.value())),
            value: t_stop,
        },
    ];
    let result = Itom::new(
        Interval::point(v_time),
        Term::nested(speed_item.clone()),
        Term::nested(distance_item.clone()),
        signed.into(),
    )
    .with_provenance("computed:brake force");
    Ok(BrakingDecision {
        decel: d,
        result,
        calculations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mps(v: f64) -> Quantity {
        Quantity::metres_per_second(v).unwrap()
    }
    fn m(v: f64) -> Quantity {
        Quantity::metres(v).unwrap()
    }
    fn mps2(v: f64) -> Quantity {
        Quantity::metres_per_second_squared(v).unwrap()
    }

    #[test]
    fn cruising_step_covers_speed_times_dt() {
        let out = plant_step(&CarState::cruising(100.0, 25.0), 1.0);
        assert_eq!(out.state.position, 75.0);
        assert_eq!(out.state.speed, 25.0);
        assert!(out.impact.is_none());
    }

    #[test]
    fn resting_car_stays_put() {
        let rest = CarState {
            position: 10.0,
            speed: 0.0,
            applied_decel: 3.0,
        };
        assert_eq!(plant_step(&rest, 5.0).state, rest);
    }

    #[test]
    fn braking_to_a_stop_inside_one_step() {
        let d = 625.0 / 150.0;
        let car = CarState {
            position: 75.0,
            speed: 25.0,
            applied_decel: d,
        };
        let out = plant_step(&car, 10.0);
        assert!(out.impact.is_none());
        assert_eq!(out.state.speed, 0.0);
        // v²/2d = 75 and v/d = 6 s
        assert!(out.state.position.abs() <= 1e-9);
        assert!(out.state.position >= 0.0);
        assert!((out.stopped_after.unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn late_braking_hits_at_twelve_and_a_half() {
        let car = CarState {
            position: 75.0,
            speed: 25.0,
            applied_decel: 3.125,
        };
        let out = plant_step(&car, 10.0);
        let hit = out.impact.unwrap();
        assert_eq!(hit.speed, 12.5);
        assert_eq!(hit.after, 4.0);
        assert_eq!(out.state.position, 0.0);
    }

    #[test]
    fn brake_force_values() {
        let d = brake_force(&mps(25.0), &m(100.0)).unwrap();
        assert_eq!(d.value(), 3.125);
        assert_eq!(d.dimension(), Dimension::METRE_PER_SECOND_SQUARED);
        let d = brake_force(&mps(25.0), &m(75.0)).unwrap();
        assert!((d.value() - 4.167).abs() < 1e-3);
        assert_eq!(brake_force(&mps(0.0), &m(5.0)).unwrap().value(), 0.0);
    }

    #[test]
    fn brake_force_rejects_bad_inputs() {
        assert!(matches!(
            brake_force(&mps(25.0), &m(0.0)),
            Err(ModelError::Quantity(QuantityError::Singularity(_)))
        ));
        assert!(matches!(
            brake_force(&m(25.0), &m(10.0)),
            Err(ModelError::WrongDimension { what: "speed", .. })
        ));
    }

    #[test]
    fn time_to_stop_values() {
        assert_eq!(time_to_stop(&mps(25.0), &mps2(3.125)).unwrap().value(), 8.0);
        let t = time_to_stop(&mps(25.0), &mps2(4.167)).unwrap();
        assert!((t.value() - 6.0).abs() <= 2e-3);
        assert_eq!(t.dimension(), Dimension::SECOND);
        assert_eq!(time_to_stop(&mps(0.0), &mps2(2.0)).unwrap().value(), 0.0);
        assert!(time_to_stop(&mps(1.0), &mps2(0.0)).is_err());
    }

    #[test]
    fn impact_speed_values() {
        // 625 - 2 * 3.125 * 75 = 156.25
        assert_eq!(
            impact_speed(&mps(25.0), &mps2(3.125), &m(75.0))
                .unwrap()
                .value(),
            12.5
        );
        let d = brake_force(&mps(25.0), &m(75.0)).unwrap();
        assert_eq!(impact_speed(&mps(25.0), &d, &m(75.0)).unwrap().value(), 0.0);
        assert_eq!(
            impact_speed(&mps(25.0), &mps2(0.0), &m(75.0))
                .unwrap()
                .value(),
            25.0
        );
        assert_eq!(
            impact_speed(&mps(25.0), &mps2(0.0), &m(75.0))
                .unwrap()
                .dimension(),
            Dimension::METRE_PER_SECOND
        );
        assert!(impact_speed(&mps(-1.0), &mps2(0.0), &m(75.0)).is_err());
    }

    fn budget(now: u64, deadline: u64, cap: Option<usize>) -> AnytimeBudget {
        AnytimeBudget {
            now: Timestamp::new(now),
            deadline: Timestamp::new(deadline),
            root_cost: 1,
            step_cost: 1,
            max_iterations: cap,
        }
    }

    #[test]
    fn anytime_with_no_slack_returns_the_root() {
        let r =
            impact_speed_anytime(&mps(25.0), &mps2(2.0), &m(100.0), &budget(0, 1, None)).unwrap();
        assert_eq!(r.iterations_completed, 0);
        assert_eq!(r.value.value(), 12.5);
        assert!(r.deadline_met);
    }

    #[test]
    fn anytime_root_must_fit() {
        let b = AnytimeBudget {
            root_cost: 5,
            ..budget(0, 3, None)
        };
        assert!(matches!(
            impact_speed_anytime(&mps(25.0), &mps2(2.0), &m(100.0), &b),
            Err(ModelError::Deadline { .. })
        ));
    }

    #[test]
    fn newton_iterations_shrink_the_error() {
        // sqrt(625 - 2*2*100) = 15, seed 12.5
        let exact = 15.0;
        let mut last = f64::INFINITY;
        for cap in 0..=3 {
            let r = impact_speed_anytime(
                &mps(25.0),
                &mps2(2.0),
                &m(100.0),
                &budget(0, 100, Some(cap)),
            )
            .unwrap();
            assert_eq!(r.iterations_completed, cap);
            let err = (r.value.value() - exact).abs();
            assert!(err < last, "iteration {cap}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn unlimited_newton_converges() {
        let far = budget(0, 1_000_000, None);
        let r = impact_speed_anytime(&mps(25.0), &mps2(2.0), &m(100.0), &far).unwrap();
        assert!((r.value.value() - 15.0).abs() <= 1e-9);
        let r = impact_speed_anytime(&mps(25.0), &mps2(3.125), &m(100.0), &far).unwrap();
        assert!(r.value.value().abs() <= 1e-9);
    }

    #[test]
    fn plant_trajectory_with_a_late_brake() {
        let clock = ClockSpec::seconds();
        let mut plant = CarPlant::new(clock, Timestamp::new(0), CarState::cruising(125.0, 25.0));
        plant
            .apply(BrakeCommand::new(mps2(3.125), Timestamp::new(2)).unwrap())
            .unwrap();
        assert_eq!(plant.state_at(Timestamp::new(1)).position, 100.0);
        assert_eq!(plant.state_at(Timestamp::new(2)).position, 75.0);
        assert_eq!(plant.state_at(Timestamp::new(2)).applied_decel, 3.125);
        let evo = plant.evolve(Timestamp::new(10));
        let (when, speed) = evo.impact.unwrap();
        assert_eq!(speed, 12.5);
        assert_eq!(when.segment_start, Timestamp::new(2));
        assert_eq!(when.offset, 4.0);
    }

    #[test]
    fn oracle_answers_groundings() {
        let plant = CarPlant::new(
            ClockSpec::seconds(),
            Timestamp::new(0),
            CarState::cruising(100.0, 25.0),
        );
        let t = Timestamp::new(1);
        assert_eq!(plant.true_value(DISTANCE, t).unwrap().value(), 75.0);
        assert_eq!(plant.true_value(SPEED, t).unwrap().value(), 25.0);
        assert!((plant.true_value(BRAKE_FORCE, t).unwrap().value() + 625.0 / 150.0).abs() < 1e-12);
        assert_eq!(plant.true_value(APPLIED_BRAKE, t).unwrap().value(), 0.0);
        assert!(plant.true_value("colour of car", t).is_none());
    }

    #[test]
    fn decision_logs_dimension_checks() {
        let at = Timestamp::new(5);
        let speed = Itom::new(
            Interval::point(at),
            Term::name("car"),
            Term::name("moves"),
            mps(25.0).grounded(SPEED).into(),
        );
        let dist = Itom::new(
            Interval::point(at),
            Term::name("car"),
            Term::name("is distant"),
            m(100.0).grounded(DISTANCE).into(),
        );
        let out = braking_decision(&speed, &dist, at).unwrap();
        assert_eq!(out.decel.value(), 3.125);
        assert_eq!(out.result.value().unwrap().value(), -3.125);
        assert_eq!(
            out.calculations[0].dimension_check,
            "[m^2·s^-2]/[m] = [m·s^-2]"
        );
        assert_eq!(out.calculations[0].operands, "-625/200");
        assert_eq!(
            out.calculations[1].dimension_check,
            "[m·s^-1]/[m·s^-2] = [s]"
        );
        assert_eq!(out.calculations[1].value.value(), 8.0);
        assert_eq!(out.result.referenced_terms().len(), 9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn brake_force_stops_exactly_at_the_rock(v in 0.1f64..80.0, s in 0.5f64..500.0) {
                let d = brake_force(&mps(v), &m(s)).unwrap();
                // v² - 2ds cancels up to rounding of v²
                prop_assert!(impact_speed(&mps(v), &d, &m(s)).unwrap().value() <= 1e-7 * v);
            }

            #[test]
            fn two_half_steps_equal_one_step(
                s in 1.0f64..500.0, v in 0.0f64..60.0, d in 0.0f64..10.0, dt in 0.01f64..5.0,
            ) {
                let car = CarState { position: s, speed: v, applied_decel: d };
                let once = plant_step(&car, 2.0 * dt);
                let first = plant_step(&car, dt);
                prop_assume!(first.impact.is_none());
                let twice = plant_step(&first.state, dt);
                let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
                prop_assert!(close(once.state.position, twice.state.position));
                prop_assert!(close(once.state.speed, twice.state.speed));
                prop_assert_eq!(once.impact.is_some(), twice.impact.is_some());
            }

            #[test]
            fn newton_error_never_grows(v in 1.0f64..60.0, d in 0.0f64..10.0, s in 0.0f64..200.0) {
                let exact = impact_speed(&mps(v), &mps2(d), &m(s)).unwrap().value();
                let mut last = f64::INFINITY;
                for cap in 0..8 {
                    let b = budget(0, 1000, Some(cap));
                    let r = impact_speed_anytime(&mps(v), &mps2(d), &m(s), &b).unwrap();
                    let err = (r.value.value() - exact).abs();
                    prop_assert!(err <= last + 1e-12 * exact.max(1.0));
                    last = err;
                }
            }
        }
    }
}
