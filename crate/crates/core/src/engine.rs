//! The co-simulation executive.
//!
//! The plant advances on the granule grid. The controller interacts with it
//! only at read instants (C) and command instants (D): in time-triggered mode
//! both are SOFs and D is the SOF after C; in event-triggered mode D is C plus
//! a computation duration that is revealed only after the controller has
//! committed to its extrapolation target.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cps::{
    braking_decision, impact_speed_anytime, AnytimeBudget, BrakeCommand, Calculation, CarPlant,
    CarState, ModelError, APPLIED_BRAKE, DISTANCE, SPEED,
};
use crate::extrapolation::{SeriesError, TimeSeries, MAX_ORDER};
use crate::itom::{
    check_temporal_consistency_at, ConsistencyReport, Itom, ItomError, Term, WorldOracle,
};
use crate::latency::LatencySpec;
use crate::quantity::{Dimension, Quantity};
use crate::time::{ClockSpec, FrameSchedule, Interval, Seconds, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TimeTriggered,
    EventTriggered,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TimeTriggered => "time_triggered",
            Mode::EventTriggered => "event_triggered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// Uses the newest samples as they are.
    Naive,
    /// Extrapolates every sensor series to the output instant.
    Extrapolating,
    /// Reference with a zero action interval: the command acts at the
    /// sampling instant. Needs zero latencies.
    Ideal,
}

impl ControllerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::Naive => "naive",
            ControllerKind::Extrapolating => "extrapolating",
            ControllerKind::Ideal => "ideal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantConfig {
    pub initial_speed: f64,
    pub initial_distance: f64,
    /// Instant at which the car is at `initial_distance`. The car cruises
    /// before any brake command.
    pub state_instant: Timestamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub extrapolation_order: usize,
    /// Newton iterations allowed for the predicted-impact check; 0 disables it.
    pub anytime_budget: usize,
    /// Read instant of the braking decision. `None` means monitor only.
    pub activate_at: Option<Timestamp>,
    /// Compute a result item at every step, not only when braking.
    pub evaluate_every_frame: bool,
    pub history_capacity: usize,
}

/// Computation durations for event-triggered runs, in granules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DurationSource {
    /// Cycled in order.
    List(Vec<u64>),
    /// Uniform over `min..=max` from a seeded generator.
    Uniform { seed: u64, min: u64, max: u64 },
}

impl DurationSource {
    /// The duration the controller assumes when choosing its target: the
    /// mean, rounded to whole granules.
    pub fn expected(&self) -> u64 {
        match self {
            DurationSource::List(list) => {
                let sum: u64 = list.iter().sum();
                let n = list.len() as u64;
                (2 * sum + n) / (2 * n)
            }
            DurationSource::Uniform { min, max, .. } => (min + max).div_ceil(2),
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            DurationSource::List(list) => Box::new(list.iter().copied().cycle()),
            DurationSource::Uniform { seed, min, max } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (lo, hi) = (*min, *max);
                Box::new(std::iter::from_fn(move || Some(rng.random_range(lo..=hi))))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Model-time granules per unit of real time. Pacing only.
    pub time_rate: Seconds,
    pub consistency_tolerance: f64,
    pub durations: Option<DurationSource>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub clock: ClockSpec,
    pub schedule: FrameSchedule,
    pub latency: LatencySpec,
    pub plant: PlantConfig,
    pub controller: ControllerConfig,
    pub run: RunConfig,
}

/// A validation finding tied to a configuration key such as
/// `latency.computation_granules`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: &'static str,
    pub message: String,
}

impl ConfigIssue {
    fn new(key: &'static str, message: impl Into<String>) -> Self {
        ConfigIssue {
            key,
            message: message.into(),
        }
    }
}

impl Scenario {
    /// Every constraint violation, in a fixed order. Empty when runnable.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let horizon = self.schedule.horizon();
        let frame = self.schedule.frame_duration();
        let lat = &self.latency;
        let ctl = &self.controller;
        let tt = self.run.mode == Mode::TimeTriggered;

        if tt && lat.computation_duration > frame {
            issues.push(ConfigIssue::new(
                "latency.computation_granules",
                format!(
                    "computation of {} granules does not fit the {frame}-granule frame",
                    lat.computation_duration
                ),
            ));
        }
        if self.schedule.first_sof().ticks() < horizon.start().ticks() + lat.sensor_latency
            && !horizon.is_point()
        {
            issues.push(ConfigIssue::new(
                "latency.sensor_latency_granules",
                "the first sample would be true before the horizon starts",
            ));
        }
        let p = &self.plant;
        if p.initial_speed.is_nan() || p.initial_speed < 0.0 {
            issues.push(ConfigIssue::new(
                "plant.initial_speed",
                "speed must not be negative",
            ));
        }
        if p.initial_distance.is_nan() || p.initial_distance <= 0.0 {
            issues.push(ConfigIssue::new(
                "plant.initial_distance",
                "distance must be positive",
            ));
        } else if p.initial_speed >= 0.0 && self.initial_state().position <= 0.0 {
            issues.push(ConfigIssue::new(
                "plant.state_instant",
                "the car would already be at the rock when the horizon starts",
            ));
        }
        if ctl.extrapolation_order > MAX_ORDER {
            issues.push(ConfigIssue::new(
                "controller.extrapolation_order",
                format!(
                    "order {} exceeds the supported maximum {MAX_ORDER}",
                    ctl.extrapolation_order
                ),
            ));
        }
        if ctl.history_capacity < ctl.extrapolation_order + 1 {
            issues.push(ConfigIssue::new(
                "controller.history_capacity",
                format!(
                    "order {} needs at least {} samples",
                    ctl.extrapolation_order,
                    ctl.extrapolation_order + 1
                ),
            ));
        }
        if ctl.kind == ControllerKind::Ideal
            && (lat.sensor_latency != 0 || lat.actuator_latency != 0)
        {
            issues.push(ConfigIssue::new(
                "controller.kind",
                "the ideal controller needs zero sensor and actuator latency",
            ));
        }
        if let Some(at) = ctl.activate_at {
            if !horizon.contains(at) || at == horizon.end() {
                issues.push(ConfigIssue::new(
                    "controller.activate_at",
                    "activation lies outside the horizon",
                ));
            } else if tt && !self.schedule.is_sof(at) {
                issues.push(ConfigIssue::new(
                    "controller.activate_at",
                    format!("{at} is not an SOF"),
                ));
            } else if tt && ctl.kind != ControllerKind::Ideal {
                let effect = at + frame + lat.actuator_latency;
                if effect >= horizon.end() {
                    issues.push(ConfigIssue::new(
                        "controller.activate_at",
                        "the brake command would take effect after the horizon ends",
                    ));
                }
            }
        }
        if self.run.time_rate <= Seconds::zero() {
            issues.push(ConfigIssue::new(
                "run.time_rate",
                "time rate must be positive",
            ));
        }
        if self.run.consistency_tolerance.is_nan() || self.run.consistency_tolerance < 0.0 {
            issues.push(ConfigIssue::new(
                "run.consistency_tolerance",
                "tolerance must not be negative",
            ));
        }
        match (&self.run.durations, self.run.mode) {
            (None, Mode::EventTriggered) => issues.push(ConfigIssue::new(
                "run.computation_durations",
                "event-triggered mode needs computation durations",
            )),
            (Some(_), Mode::TimeTriggered) => issues.push(ConfigIssue::new(
                "run.computation_durations",
                "computation durations only apply to event-triggered mode",
            )),
            (Some(DurationSource::List(list)), _) if list.is_empty() || list.contains(&0) => issues
                .push(ConfigIssue::new(
                    "run.computation_durations",
                    "durations must be a non-empty list of positive granule counts",
                )),
            (Some(DurationSource::Uniform { min, max, .. }), _) if *min == 0 || min > max => issues
                .push(ConfigIssue::new(
                    "run.computation_durations",
                    "generator range must satisfy 0 < min <= max",
                )),
            _ => {}
        }
        issues
    }

    /// Car state at the start of the horizon, cruising back or forward from
    /// the configured state instant.
    pub fn initial_state(&self) -> CarState {
        let p = &self.plant;
        let origin = self.schedule.horizon().start();
        let dt = self.clock.span_secs(p.state_instant - origin);
        CarState::cruising(p.initial_distance + p.initial_speed * dt, p.initial_speed)
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid scenario: {}", .0.iter().map(|i| format!("{}: {}", i.key, i.message)).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ConfigIssue>),
    #[error("controller at {at}: {source}")]
    Series { at: Timestamp, source: SeriesError },
    #[error("controller at {at}: {source}")]
    Model { at: Timestamp, source: ModelError },
    #[error("consistency check at {at}: {source}")]
    Consistency { at: Timestamp, source: ItomError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ItomKind {
    Sensor,
    Extrapolated,
    Result,
    Setpoint,
}

impl ItomKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ItomKind::Sensor => "sensor",
            ItomKind::Extrapolated => "extrapolated",
            ItomKind::Result => "result",
            ItomKind::Setpoint => "setpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedItom {
    pub kind: ItomKind,
    pub item: Itom,
    pub report: Option<ConsistencyReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// `after` is seconds past the start of the granule.
    Impact {
        speed: f64,
        after: f64,
    },
    Stopped {
        margin: f64,
        after: f64,
    },
    CommandIssued {
        decel: f64,
    },
    SetpointApplied {
        decel: f64,
    },
    PredictedImpact {
        speed: f64,
        iterations: usize,
    },
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::Impact { .. } => "impact",
            Event::Stopped { .. } => "stopped",
            Event::CommandIssued { .. } => "command-issued",
            Event::SetpointApplied { .. } => "setpoint-applied",
            Event::PredictedImpact { .. } => "predicted-impact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub granule: Timestamp,
    /// Real time since the run started at the configured time rate.
    pub wall_offset: Seconds,
    pub state: CarState,
    pub itoms: Vec<EmittedItom>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionKind {
    Read,
    Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub at: Timestamp,
}

/// Difference between the value a controller used and the true value at
/// the instant its output actually took effect.
#[derive(Debug, Clone, PartialEq)]
pub struct StepError {
    pub read_at: Timestamp,
    pub assumed_effect: Timestamp,
    pub actual_effect: Timestamp,
    pub grounding: &'static str,
    pub used: f64,
    pub truth: f64,
}

impl StepError {
    pub fn abs_error(&self) -> f64 {
        (self.used - self.truth).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Impact {
        at: Timestamp,
        speed: f64,
    },
    Stopped {
        at: Timestamp,
        margin: f64,
    },
    /// Horizon ended with the car still moving.
    Moving {
        position: f64,
        speed: f64,
    },
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub scenario: String,
    pub mode: Mode,
    pub clock: ClockSpec,
    pub schedule: FrameSchedule,
    pub state_instant: Timestamp,
    pub records: Vec<TraceRecord>,
    pub interactions: Vec<Interaction>,
    pub calculations: Vec<(Timestamp, Calculation)>,
    pub step_errors: Vec<StepError>,
    pub outcome: Outcome,
}

impl Trace {
    pub fn itoms(&self, kind: ItomKind) -> impl Iterator<Item = (&TraceRecord, &EmittedItom)> {
        self.records
            .iter()
            .flat_map(|r| r.itoms.iter().map(move |i| (r, i)))
            .filter(move |(_, i)| i.kind == kind)
    }

    pub fn events(&self) -> impl Iterator<Item = (Timestamp, &Event)> {
        self.records
            .iter()
            .flat_map(|r| r.events.iter().map(move |e| (r.granule, e)))
    }

    pub fn inconsistent_results(&self) -> usize {
        self.itoms(ItomKind::Result)
            .filter(|(_, i)| i.report.as_ref().is_some_and(|r| !r.consistent()))
            .count()
    }

    pub fn result_count(&self) -> usize {
        self.itoms(ItomKind::Result).count()
    }

    /// Mean absolute step error for one grounding, `None` without samples.
    pub fn mean_abs_error(&self, grounding: &str) -> Option<f64> {
        let errs: Vec<f64> = self
            .step_errors
            .iter()
            .filter(|e| e.grounding == grounding)
            .map(StepError::abs_error)
            .collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    }

    pub fn max_abs_error(&self, grounding: &str) -> Option<f64> {
        self.step_errors
            .iter()
            .filter(|e| e.grounding == grounding)
            .map(StepError::abs_error)
            .reduce(f64::max)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("SOF discipline applies to time-triggered traces only")]
pub struct NotTimeTriggered;

/// True iff every read and command instant in the trace is an SOF.
pub fn verify_sof_discipline(trace: &Trace) -> Result<bool, NotTimeTriggered> {
    if trace.mode != Mode::TimeTriggered {
        return Err(NotTimeTriggered);
    }
    Ok(trace
        .interactions
        .iter()
        .all(|i| trace.schedule.is_sof(i.at)))
}

#[derive(Default)]
struct Pending {
    itoms: Vec<EmittedItom>,
    events: Vec<Event>,
}

struct Sensor {
    grounding: &'static str,
    subject: &'static str,
    predicate: &'static str,
    series: TimeSeries,
}

impl Sensor {
    fn new(
        grounding: &'static str,
        predicate: &'static str,
        dimension: Dimension,
        scenario: &Scenario,
    ) -> Result<Self, SeriesError> {
        Ok(Sensor {
            grounding,
            subject: "the car",
            predicate,
            series: TimeSeries::new(
                grounding,
                dimension,
                scenario.controller.history_capacity,
                &scenario.clock,
            )?,
        })
    }

    fn item(&self, at: Timestamp, value: Quantity, provenance: &str) -> Itom {
        Itom::new(
            Interval::point(at),
            Term::name(self.subject),
            Term::name(self.predicate),
            value.into(),
        )
        .with_provenance(provenance)
    }
}

struct Executive<'a> {
    scenario: &'a Scenario,
    plant: CarPlant,
    sensors: [Sensor; 2],
    pending: BTreeMap<Timestamp, Pending>,
    interactions: Vec<Interaction>,
    calculations: Vec<(Timestamp, Calculation)>,
    step_errors: Vec<StepError>,
    braked: bool,
}

impl Executive<'_> {
    fn pending(&mut self, t: Timestamp) -> &mut Pending {
        self.pending.entry(t).or_default()
    }

    /// One control step reading at `c`. `duration` is the computation time
    /// the step really takes and `expected` the one the controller assumes.
    fn step(&mut self, c: Timestamp, expected: u64, duration: u64) -> Result<(), EngineError> {
        let sc = self.scenario;
        let lat = sc.latency;
        let ctl = &sc.controller;
        let horizon_end = sc.schedule.horizon().end();
        let a = Timestamp::new(c.ticks() - lat.sensor_latency);
        self.interactions.push(Interaction {
            kind: InteractionKind::Read,
            at: c,
        });

        let mut sensor_items = Vec::with_capacity(2);
        for sensor in &mut self.sensors {
            let value = self
                .plant
                .true_value(sensor.grounding, a)
                .expect("plant knows its sensors");
            sensor
                .series
                .record_sample(a, value.clone())
                .map_err(|source| EngineError::Series { at: c, source })?;
            sensor_items.push(sensor.item(a, value, "sensor"));
        }
        for item in &sensor_items {
            self.pending(c).itoms.push(EmittedItom {
                kind: ItomKind::Sensor,
                item: item.clone(),
                report: None,
            });
        }

        let ideal = ctl.kind == ControllerKind::Ideal;
        let d = if ideal { c } else { c + duration };
        let assumed_d = if ideal { c } else { c + expected };
        let (assumed_e, actual_e) = if ideal {
            (a, a)
        } else {
            (assumed_d + lat.actuator_latency, d + lat.actuator_latency)
        };
        if actual_e >= horizon_end || assumed_e >= horizon_end {
            return Ok(());
        }

        let views = match ctl.kind {
            ControllerKind::Extrapolating => {
                let mut views = Vec::with_capacity(2);
                for sensor in &self.sensors {
                    match sensor
                        .series
                        .extrapolate_value(assumed_e, ctl.extrapolation_order)
                    {
                        Ok(value) => views.push(sensor.item(
                            assumed_e,
                            value,
                            &format!("extrapolated(order={})", ctl.extrapolation_order),
                        )),
                        Err(SeriesError::InsufficientHistory { .. }) if !self.activates(c) => {
                            return Ok(());
                        }
                        Err(source) => return Err(EngineError::Series { at: c, source }),
                    }
                }
                for item in &views {
                    self.pending(c).itoms.push(EmittedItom {
                        kind: ItomKind::Extrapolated,
                        item: item.clone(),
                        report: None,
                    });
                }
                views
            }
            ControllerKind::Naive | ControllerKind::Ideal => sensor_items,
        };

        for (sensor, view) in self.sensors.iter().zip(&views) {
            let truth = self
                .plant
                .true_value(sensor.grounding, actual_e)
                .expect("plant knows its sensors");
            self.step_errors.push(StepError {
                read_at: c,
                assumed_effect: assumed_e,
                actual_effect: actual_e,
                grounding: sensor.grounding,
                used: view.value().expect("sensor items carry literals").value(),
                truth: truth.value(),
            });
        }

        let activates = self.activates(c);
        if !activates && !ctl.evaluate_every_frame {
            return Ok(());
        }
        let (distance, speed) = (&views[0], &views[1]);
        if distance.value().is_some_and(|s| s.value() <= 0.0) {
            return Ok(());
        }
        let v_time = if ctl.kind == ControllerKind::Naive {
            a
        } else {
            assumed_e
        };
        let decision = braking_decision(speed, distance, v_time)
            .map_err(|source| EngineError::Model { at: c, source })?;
        let tol = sc.run.consistency_tolerance;
        let check = |item: &Itom, plant: &CarPlant| {
            check_temporal_consistency_at(item, actual_e, plant, tol)
                .map_err(|source| EngineError::Consistency { at: c, source })
        };

        if ctl.anytime_budget > 0 {
            let budget = AnytimeBudget {
                now: c,
                deadline: c + lat.computation_duration.max(1),
                root_cost: 1,
                step_cost: 1,
                max_iterations: Some(ctl.anytime_budget),
            };
            let s = distance.value().expect("literal");
            let v = speed.value().expect("literal");
            let predicted = impact_speed_anytime(v, &decision.decel, s, &budget)
                .map_err(|source| EngineError::Model { at: c, source })?;
            self.pending(d).events.push(Event::PredictedImpact {
                speed: predicted.value.value(),
                iterations: predicted.iterations_completed,
            });
        }
        if activates {
            self.braked = true;
            let command = BrakeCommand::new(decision.decel.clone(), actual_e)
                .map_err(|source| EngineError::Model { at: c, source })?;
            self.plant
                .apply(command)
                .map_err(|source| EngineError::Model { at: c, source })?;
            self.interactions.push(Interaction {
                kind: InteractionKind::Command,
                at: d,
            });
            for calc in &decision.calculations {
                self.calculations.push((v_time, calc.clone()));
            }
            let magnitude = decision.decel.value();
            self.pending(d)
                .events
                .push(Event::CommandIssued { decel: magnitude });

            let applied = Quantity::metres_per_second_squared(-magnitude)
                .expect("finite")
                .grounded(APPLIED_BRAKE);
            let setpoint = Itom::new(
                Interval::point(actual_e),
                Term::name("the brake actuator"),
                Term::name("applies deceleration"),
                applied.into(),
            )
            .with_provenance("actuator");
            let report = check(&setpoint, &self.plant)?;
            let at_e = self.pending(actual_e);
            at_e.itoms.push(EmittedItom {
                kind: ItomKind::Setpoint,
                item: setpoint,
                report: Some(report),
            });
            at_e.events
                .push(Event::SetpointApplied { decel: magnitude });
        }

        let report = check(&decision.result, &self.plant)?;
        self.pending(d).itoms.push(EmittedItom {
            kind: ItomKind::Result,
            item: decision.result,
            report: Some(report),
        });
        Ok(())
    }

    fn activates(&self, c: Timestamp) -> bool {
        !self.braked
            && self
                .scenario
                .controller
                .activate_at
                .is_some_and(|at| c >= at)
    }
}

/// Runs a validated scenario in the mode it names.
pub fn run(scenario: &Scenario) -> Result<Trace, EngineError> {
    let issues = scenario.validate();
    if !issues.is_empty() {
        return Err(EngineError::Invalid(issues));
    }
    match scenario.run.mode {
        Mode::TimeTriggered => simulate(scenario, None),
        Mode::EventTriggered => {
            let source = scenario.run.durations.as_ref().expect("validated");
            simulate(scenario, Some(source))
        }
    }
}

/// Event-triggered run with explicitly given computation durations.
pub fn run_event_triggered(
    scenario: &Scenario,
    durations: &DurationSource,
) -> Result<Trace, EngineError> {
    let mut et = scenario.clone();
    et.run.mode = Mode::EventTriggered;
    et.run.durations = Some(durations.clone());
    let issues = et.validate();
    if !issues.is_empty() {
        return Err(EngineError::Invalid(issues));
    }
    simulate(&et, Some(durations))
}

fn simulate(sc: &Scenario, durations: Option<&DurationSource>) -> Result<Trace, EngineError> {
    let horizon = sc.schedule.horizon();
    let origin = horizon.start();
    let frame = sc.schedule.frame_duration();
    let series_err = |source| EngineError::Series { at: origin, source };
    let mut ex = Executive {
        scenario: sc,
        plant: CarPlant::new(sc.clock.clone(), origin, sc.initial_state()),
        sensors: [
            Sensor::new(
                DISTANCE,
                "is distant from the rock by",
                Dimension::METRE,
                sc,
            )
            .map_err(series_err)?,
            Sensor::new(
                SPEED,
                "moves towards the rock with",
                Dimension::METRE_PER_SECOND,
                sc,
            )
            .map_err(series_err)?,
        ],
        pending: BTreeMap::new(),
        interactions: Vec::new(),
        calculations: Vec::new(),
        step_errors: Vec::new(),
        braked: false,
    };
    let (expected, mut actual): (u64, Box<dyn Iterator<Item = u64>>) = match durations {
        Some(source) => (source.expected(), source.iter()),
        None => (frame, Box::new(std::iter::repeat(frame))),
    };

    let granule_secs = sc.clock.granule();
    let mut records = Vec::new();
    let mut next_read = Some(sc.schedule.first_sof());
    let mut stop_seen = false;
    let mut outcome = Outcome::Empty;
    let mut t = origin;
    while t < horizon.end() {
        if next_read == Some(t) {
            let duration = actual.next().expect("endless source");
            ex.step(t, expected, duration)?;
            let next = match durations {
                Some(_) => t + duration,
                None => t + frame,
            };
            next_read = (next < horizon.end()).then_some(next);
        }

        let mut pending = ex.pending.remove(&t).unwrap_or_default();
        pending.itoms.sort_by_key(|i| i.kind);
        let mut events = pending.events;
        let evo = ex.plant.evolve(t + 1);
        let boundary = |seg: Timestamp| ex.plant.offset_of(seg, t + 1);
        if let Some((when, speed)) = evo.impact {
            if when.offset < boundary(when.segment_start) {
                let after = when.offset - ex.plant.offset_of(when.segment_start, t);
                events.push(Event::Impact { speed, after });
                outcome = Outcome::Impact { at: t, speed };
            }
        }
        if let (Some(when), false) = (evo.stop, stop_seen) {
            if when.offset < boundary(when.segment_start) {
                stop_seen = true;
                events.push(Event::Stopped {
                    margin: evo.state.position,
                    after: when.offset - ex.plant.offset_of(when.segment_start, t),
                });
                outcome = Outcome::Stopped {
                    at: t,
                    margin: evo.state.position,
                };
            }
        }
        let state = ex.plant.state_at(t);
        let elapsed = granule_secs * Seconds::from_integer(t - origin);
        records.push(TraceRecord {
            granule: t,
            wall_offset: elapsed / sc.run.time_rate,
            state,
            itoms: pending.itoms,
            events,
        });
        if matches!(outcome, Outcome::Impact { .. }) {
            break;
        }
        t = t + 1;
    }
    if let (Outcome::Empty, Some(last)) = (outcome, records.last()) {
        outcome = Outcome::Moving {
            position: last.state.position,
            speed: last.state.speed,
        };
    }
    // Stopped then re-accelerated cannot happen; a stop is final.
    if let Outcome::Stopped { .. } = outcome {
        debug_assert!(records.last().is_some_and(|r| r.state.speed == 0.0));
    }

    Ok(Trace {
        scenario: sc.name.clone(),
        mode: sc.run.mode,
        clock: sc.clock.clone(),
        schedule: sc.schedule,
        state_instant: sc.plant.state_instant,
        records,
        interactions: ex.interactions,
        calculations: ex.calculations,
        step_errors: ex.step_errors,
        outcome,
    })
}

/// Real seconds after the start of the run for a record, as a float.
pub fn wall_seconds(record: &TraceRecord) -> f64 {
    record.wall_offset.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hms(h: u64, m: u64, s: u64) -> Timestamp {
        Timestamp::new(h * 3600 + m * 60 + s)
    }

    fn braking(kind: ControllerKind) -> Scenario {
        let clock = ClockSpec::seconds().with_epoch("00:00:00");
        let horizon = Interval::new(hms(10, 59, 55), hms(11, 0, 6)).unwrap();
        Scenario {
            name: kind.as_str().into(),
            clock,
            schedule: FrameSchedule::new(1, hms(10, 59, 55), horizon).unwrap(),
            latency: LatencySpec::default(),
            plant: PlantConfig {
                initial_speed: 25.0,
                initial_distance: 100.0,
                state_instant: hms(10, 59, 56),
            },
            controller: ControllerConfig {
                kind,
                extrapolation_order: 1,
                anytime_budget: 3,
                activate_at: Some(hms(10, 59, 56)),
                evaluate_every_frame: false,
                history_capacity: 8,
            },
            run: RunConfig {
                mode: Mode::TimeTriggered,
                time_rate: Seconds::from_integer(1),
                consistency_tolerance: 1e-9,
                durations: None,
            },
        }
    }

    #[test]
    fn naive_controller_hits_the_rock() {
        let trace = run(&braking(ControllerKind::Naive)).unwrap();
        assert_eq!(
            trace.outcome,
            Outcome::Impact {
                at: hms(11, 0, 1),
                speed: 12.5
            }
        );
        assert_eq!(trace.inconsistent_results(), 1);
        assert_eq!(trace.calculations[0].1.value.value(), -3.125);
    }

    #[test]
    fn extrapolating_controller_stops_at_the_rock() {
        let trace = run(&braking(ControllerKind::Extrapolating)).unwrap();
        match trace.outcome {
            Outcome::Stopped { at, margin } => {
                assert_eq!(at, hms(11, 0, 3));
                assert!((0.0..=1e-6).contains(&margin), "{margin}");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(trace.inconsistent_results(), 0);
        assert_eq!(trace.result_count(), 1);
    }

    #[test]
    fn ideal_controller_stops_after_eight_seconds() {
        let trace = run(&braking(ControllerKind::Ideal)).unwrap();
        assert!(matches!(trace.outcome, Outcome::Stopped { at, .. } if at == hms(11, 0, 4)));
        assert_eq!(trace.inconsistent_results(), 0);
    }

    #[test]
    fn empty_horizon_gives_an_empty_trace() {
        let mut sc = braking(ControllerKind::Naive);
        let t = hms(10, 59, 55);
        sc.schedule = FrameSchedule::new(1, t, Interval::point(t)).unwrap();
        sc.controller.activate_at = None;
        let trace = run(&sc).unwrap();
        assert!(trace.records.is_empty());
        assert_eq!(trace.outcome, Outcome::Empty);
    }

    #[test]
    fn oversized_computation_is_rejected() {
        let mut sc = braking(ControllerKind::Naive);
        sc.latency.computation_duration = 2;
        let issues = sc.validate();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].key, "latency.computation_granules");
    }

    #[test]
    fn sof_discipline_holds_for_tt_and_is_refused_for_et() {
        let trace = run(&braking(ControllerKind::Naive)).unwrap();
        assert_eq!(verify_sof_discipline(&trace), Ok(true));
        let mut forged = trace.clone();
        forged.schedule =
            FrameSchedule::new(2, hms(10, 59, 55), forged.schedule.horizon()).unwrap();
        assert_eq!(verify_sof_discipline(&forged), Ok(false));
        let et = run_event_triggered(
            &braking(ControllerKind::Naive),
            &DurationSource::List(vec![1]),
        )
        .unwrap();
        assert_eq!(verify_sof_discipline(&et), Err(NotTimeTriggered));
    }

    #[test]
    fn expected_duration_rounds_the_mean() {
        assert_eq!(DurationSource::List(vec![80, 120]).expected(), 100);
        assert_eq!(DurationSource::List(vec![1, 2]).expected(), 2);
        assert_eq!(
            DurationSource::Uniform {
                seed: 0,
                min: 3,
                max: 6
            }
            .expected(),
            5
        );
    }
}
