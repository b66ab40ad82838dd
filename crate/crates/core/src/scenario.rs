//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[clock]`, `[schedule]`,
//! `[latency]`, `[plant]`, `[controller]` and `[run]`. Unknown keys are
//! errors. Durations are integer granule counts or strings with an explicit
//! seconds suffix (`"0.5 s"`); one file must not mix the two styles.
//! Instants are integer ticks, `"hh:mm:ss"` strings or bare TOML local times.
//!
//! Parsing reports every problem it finds, each with its line number.

use std::fmt;

use num_traits::{Signed, Zero};
use toml::de::{DeTable, DeValue};
use toml::Spanned;

use crate::engine::{
    ConfigIssue, ControllerConfig, ControllerKind, DurationSource, Mode, PlantConfig, RunConfig,
    Scenario,
};
use crate::extrapolation::DEFAULT_CAPACITY;
use crate::itom::DEFAULT_TOLERANCE;
use crate::latency::LatencySpec;
use crate::time::{
    parse_clock_label, parse_decimal, ClockSpec, FrameSchedule, Interval, Seconds, Timestamp,
};

const SECTIONS: [&str; 6] = ["clock", "schedule", "latency", "plant", "controller", "run"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// All problems found in one scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioErrors(pub Vec<ScenarioError>);

impl fmt::Display for ScenarioErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ScenarioErrors {}

impl ScenarioErrors {
    pub fn messages(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DurationStyle {
    Granules,
    Seconds,
}

struct Ctx<'t> {
    text: &'t str,
    errors: Vec<ScenarioError>,
    style: Option<(DurationStyle, usize)>,
    /// `(section.key, line)` of every key seen, for locating validation issues.
    keys: Vec<(String, usize)>,
    sections: Vec<(String, usize)>,
}

impl Ctx<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn error(&mut self, offset: Option<usize>, message: impl Into<String>) {
        let line = offset.map(|o| self.line(o));
        self.errors.push(ScenarioError {
            line,
            message: message.into(),
        });
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        if let Some((_, line)) = self.keys.iter().find(|(k, _)| k == key) {
            return Some(*line);
        }
        let section = key.split('.').next()?;
        self.sections
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, line)| *line)
    }
}

type Entry<'a, 'i> = (
    &'a Spanned<std::borrow::Cow<'i, str>>,
    &'a Spanned<DeValue<'i>>,
);

/// One section: hands out values by key and reports the leftovers.
struct Section<'a, 'i> {
    name: &'static str,
    entries: Vec<Entry<'a, 'i>>,
    used: Vec<bool>,
}

impl<'a, 'i> Section<'a, 'i> {
    fn take(&mut self, ctx: &mut Ctx<'_>, key: &str) -> Option<&'a Spanned<DeValue<'i>>> {
        let i = self.entries.iter().position(|(k, _)| k.get_ref() == key)?;
        self.used[i] = true;
        let (k, v) = self.entries[i];
        let line = ctx.line(k.span().start);
        ctx.keys.push((format!("{}.{key}", self.name), line));
        Some(v)
    }

    fn finish(self, ctx: &mut Ctx<'_>) {
        for ((k, _), used) in self.entries.iter().zip(self.used) {
            if !used {
                ctx.error(
                    Some(k.span().start),
                    format!("unknown key `{}` in [{}]", k.get_ref(), self.name),
                );
            }
        }
    }

    fn required<T>(
        &mut self,
        ctx: &mut Ctx<'_>,
        key: &str,
        convert: impl FnOnce(&mut Ctx<'_>, &Spanned<DeValue<'i>>) -> Option<T>,
    ) -> Option<T> {
        match self.take(ctx, key) {
            Some(v) => convert(ctx, v),
            None => {
                ctx.errors.push(ScenarioError {
                    line: ctx.line_of(self.name),
                    message: format!("missing key `{key}` in [{}]", self.name),
                });
                None
            }
        }
    }

    fn optional<T>(
        &mut self,
        ctx: &mut Ctx<'_>,
        key: &str,
        convert: impl FnOnce(&mut Ctx<'_>, &Spanned<DeValue<'i>>) -> Option<T>,
    ) -> Result<Option<T>, ()> {
        match self.take(ctx, key) {
            Some(v) => convert(ctx, v).map(Some).ok_or(()),
            None => Ok(None),
        }
    }
}

fn type_error(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>, expected: &str) {
    ctx.error(
        Some(v.span().start),
        format!("expected {expected}, found {}", v.get_ref().type_str()),
    );
}

fn integer(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<u64> {
    match v.get_ref().as_integer() {
        Some(i) => match u64::from_str_radix(i.as_str(), i.radix()) {
            Ok(n) => Some(n),
            Err(_) => {
                ctx.error(
                    Some(v.span().start),
                    format!("expected a non-negative integer, found {}", i.as_str()),
                );
                None
            }
        },
        None => {
            type_error(ctx, v, "a non-negative integer");
            None
        }
    }
}

fn real(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<f64> {
    let parsed = match v.get_ref() {
        DeValue::Float(f) => f.as_str().replace('_', "").parse::<f64>().ok(),
        DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix())
            .ok()
            .map(|n| n as f64),
        _ => {
            type_error(ctx, v, "a number");
            return None;
        }
    };
    if parsed.is_none() {
        ctx.error(Some(v.span().start), "number out of range");
    }
    parsed
}

fn boolean(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<bool> {
    let b = v.get_ref().as_bool();
    if b.is_none() {
        type_error(ctx, v, "true or false");
    }
    b
}

fn string<'a>(ctx: &mut Ctx<'_>, v: &'a Spanned<DeValue<'_>>) -> Option<&'a str> {
    let s = v.get_ref().as_str();
    if s.is_none() {
        type_error(ctx, v, "a string");
    }
    s
}

/// `"<decimal or fraction> s"`.
fn seconds_string(text: &str) -> Option<Seconds> {
    parse_decimal(text.trim().strip_suffix('s')?.trim_end())
}

fn exact_number(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<Seconds> {
    let parsed = match v.get_ref() {
        DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix())
            .ok()
            .map(Seconds::from_integer),
        DeValue::String(s) => parse_decimal(s),
        _ => {
            type_error(ctx, v, "an integer or a decimal/fraction string");
            return None;
        }
    };
    if parsed.is_none() {
        ctx.error(
            Some(v.span().start),
            "expected a decimal or a fraction such as \"1/10\"",
        );
    }
    parsed
}

/// A granule duration, either integer seconds or `"<value> s"`.
fn granule(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<Seconds> {
    let parsed = match v.get_ref() {
        DeValue::Integer(i) => i64::from_str_radix(i.as_str(), i.radix())
            .ok()
            .map(Seconds::from_integer),
        DeValue::String(s) => seconds_string(s),
        _ => {
            type_error(ctx, v, "a duration such as \"0.01 s\"");
            return None;
        }
    };
    match parsed {
        Some(g) if g.is_positive() => Some(g),
        Some(_) => {
            ctx.error(Some(v.span().start), "granule must be positive");
            None
        }
        None => {
            ctx.error(
                Some(v.span().start),
                "expected a duration such as \"0.01 s\"",
            );
            None
        }
    }
}

struct Raw<T> {
    value: T,
    offset: usize,
}

#[derive(Clone, Copy)]
enum RawDuration {
    Granules(u64),
    Seconds(Seconds),
}

fn duration(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<Raw<RawDuration>> {
    let offset = v.span().start;
    let (style, value) = match v.get_ref() {
        DeValue::Integer(_) => (
            DurationStyle::Granules,
            RawDuration::Granules(integer(ctx, v)?),
        ),
        DeValue::String(s) => match seconds_string(s) {
            Some(secs) if !secs.is_negative() => {
                (DurationStyle::Seconds, RawDuration::Seconds(secs))
            }
            _ => {
                ctx.error(
                    Some(offset),
                    format!("expected a duration such as \"0.5 s\", found \"{s}\""),
                );
                return None;
            }
        },
        _ => {
            type_error(ctx, v, "a granule count or a duration string in seconds");
            return None;
        }
    };
    match ctx.style {
        None => ctx.style = Some((style, ctx.line(offset))),
        Some((first, line)) if first != style => {
            let (this, that) = match style {
                DurationStyle::Granules => ("granule counts", "seconds"),
                DurationStyle::Seconds => ("seconds", "granule counts"),
            };
            ctx.error(
                Some(offset),
                format!("durations mix {this} with {that} (first used at line {line})"),
            );
            return None;
        }
        Some(_) => {}
    }
    Some(Raw { value, offset })
}

fn durations(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<Vec<Raw<RawDuration>>> {
    let Some(array) = v.get_ref().as_array() else {
        type_error(ctx, v, "an array of durations");
        return None;
    };
    let mut out = Vec::new();
    let mut ok = true;
    for item in array.iter() {
        match duration(ctx, item) {
            Some(d) => out.push(d),
            None => ok = false,
        }
    }
    ok.then_some(out)
}

#[derive(Clone, Copy)]
enum RawInstant {
    Ticks(u64),
    Clock(Seconds),
}

fn instant(ctx: &mut Ctx<'_>, v: &Spanned<DeValue<'_>>) -> Option<Raw<RawInstant>> {
    let offset = v.span().start;
    let value = match v.get_ref() {
        DeValue::Integer(_) => RawInstant::Ticks(integer(ctx, v)?),
        DeValue::String(s) => match parse_clock_label(s) {
            Some(secs) => RawInstant::Clock(secs),
            None => {
                ctx.error(
                    Some(offset),
                    format!("expected an instant such as \"10:59:56\", found \"{s}\""),
                );
                return None;
            }
        },
        DeValue::Datetime(dt) => match (dt.date, dt.time, dt.offset) {
            (None, Some(t), None) => {
                let whole = i64::from(t.hour) * 3600
                    + i64::from(t.minute) * 60
                    + i64::from(t.second.unwrap_or(0));
                let nanos = i64::from(t.nanosecond.unwrap_or(0));
                RawInstant::Clock(Seconds::from_integer(whole) + Seconds::new(nanos, 1_000_000_000))
            }
            _ => {
                ctx.error(
                    Some(offset),
                    "only a local time of day such as 10:59:56 is accepted as an instant",
                );
                return None;
            }
        },
        _ => {
            type_error(ctx, v, "an instant (ticks or hh:mm:ss)");
            return None;
        }
    };
    Some(Raw { value, offset })
}

fn resolve_instant(
    ctx: &mut Ctx<'_>,
    clock: &ClockSpec,
    raw: Raw<RawInstant>,
) -> Option<Timestamp> {
    match raw.value {
        RawInstant::Ticks(t) => Some(Timestamp::new(t)),
        RawInstant::Clock(secs) => match clock.granules_in(secs) {
            Ok(g) => Some(Timestamp::new(g as u64)),
            Err(e) => {
                ctx.error(Some(raw.offset), e.to_string());
                None
            }
        },
    }
}

fn resolve_duration(ctx: &mut Ctx<'_>, clock: &ClockSpec, raw: Raw<RawDuration>) -> Option<u64> {
    match raw.value {
        RawDuration::Granules(g) => Some(g),
        RawDuration::Seconds(secs) => match clock.granules_in(secs) {
            Ok(g) => Some(g as u64),
            Err(e) => {
                ctx.error(Some(raw.offset), e.to_string());
                None
            }
        },
    }
}

fn choice<T: Copy>(
    ctx: &mut Ctx<'_>,
    v: &Spanned<DeValue<'_>>,
    options: &[(&str, T)],
) -> Option<T> {
    let s = string(ctx, v)?;
    match options.iter().find(|(name, _)| *name == s) {
        Some((_, value)) => Some(*value),
        None => {
            let names: Vec<_> = options.iter().map(|(n, _)| format!("\"{n}\"")).collect();
            ctx.error(
                Some(v.span().start),
                format!(
                    "unknown value \"{s}\", expected one of {}",
                    names.join(", ")
                ),
            );
            None
        }
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioErrors> {
    parse_scenario_named(text, "scenario")
}

/// As [`parse_scenario`], naming the scenario `fallback_name` unless the file
/// sets `[run] name`.
pub fn parse_scenario_named(text: &str, fallback_name: &str) -> Result<Scenario, ScenarioErrors> {
    let root = match DeTable::parse(text) {
        Ok(root) => root,
        Err(e) => {
            let mut ctx = Ctx {
                text,
                errors: Vec::new(),
                style: None,
                keys: Vec::new(),
                sections: Vec::new(),
            };
            let msg = e.message().trim().to_string();
            ctx.error(e.span().map(|s| s.start), format!("syntax error: {msg}"));
            return Err(ScenarioErrors(ctx.errors));
        }
    };
    let mut ctx = Ctx {
        text,
        errors: Vec::new(),
        style: None,
        keys: Vec::new(),
        sections: Vec::new(),
    };

    let mut tables = Vec::new();
    for (k, v) in root.get_ref().iter() {
        let name = k.get_ref().as_ref();
        if !SECTIONS.contains(&name) {
            ctx.error(Some(k.span().start), format!("unknown section [{name}]"));
            continue;
        }
        let line = ctx.line(k.span().start);
        ctx.sections.push((name.to_string(), line));
        match v.get_ref().as_table() {
            Some(t) => tables.push((name, t)),
            None => ctx.error(Some(k.span().start), format!("`{name}` must be a section")),
        }
    }
    let mut missing = false;
    let mut section =
        |ctx: &mut Ctx<'_>, name: &'static str| match tables.iter().find(|(n, _)| *n == name) {
            Some((_, t)) => Some(Section {
                name,
                entries: t.iter().collect(),
                used: vec![false; t.len()],
            }),
            None => {
                ctx.error(None, format!("missing section [{name}]"));
                missing = true;
                None
            }
        };
    let clock_s = section(&mut ctx, "clock");
    let schedule_s = section(&mut ctx, "schedule");
    let latency_s = section(&mut ctx, "latency");
    let plant_s = section(&mut ctx, "plant");
    let controller_s = section(&mut ctx, "controller");
    let run_s = section(&mut ctx, "run");
    if missing {
        return Err(ScenarioErrors(ctx.errors));
    }
    let (mut clock_s, mut schedule_s, mut latency_s, mut plant_s, mut controller_s, mut run_s) = (
        clock_s.unwrap(),
        schedule_s.unwrap(),
        latency_s.unwrap(),
        plant_s.unwrap(),
        controller_s.unwrap(),
        run_s.unwrap(),
    );

    // [clock]
    let granule_v = clock_s.required(&mut ctx, "granule", granule);
    let epoch = clock_s
        .optional(&mut ctx, "epoch", |c, v| string(c, v).map(str::to_string))
        .unwrap_or(None);
    clock_s.finish(&mut ctx);
    let clock = granule_v.map(|g| {
        let clock = ClockSpec::new(g, None).expect("granule checked positive");
        match epoch {
            Some(label) => clock.with_epoch(label),
            None => clock,
        }
    });

    // [schedule]
    let frame = schedule_s.required(&mut ctx, "frame_duration", duration);
    let first_sof = schedule_s.required(&mut ctx, "first_sof", instant);
    let horizon_start = schedule_s.required(&mut ctx, "horizon_start", instant);
    let horizon_end = schedule_s.required(&mut ctx, "horizon_end", instant);
    schedule_s.finish(&mut ctx);

    // [latency]
    let sensor = latency_s.optional(&mut ctx, "sensor_latency_granules", duration);
    let actuator = latency_s.optional(&mut ctx, "actuator_latency_granules", duration);
    let computation = latency_s.optional(&mut ctx, "computation_granules", duration);
    latency_s.finish(&mut ctx);

    // [plant]
    let speed = plant_s.required(&mut ctx, "initial_speed", real);
    let distance = plant_s.required(&mut ctx, "initial_distance", real);
    let state_instant = plant_s.required(&mut ctx, "state_instant", instant);
    plant_s.finish(&mut ctx);

    // [controller]
    let kind = controller_s.required(&mut ctx, "kind", |c, v| {
        choice(
            c,
            v,
            &[
                ("naive", ControllerKind::Naive),
                ("extrapolating", ControllerKind::Extrapolating),
                ("ideal", ControllerKind::Ideal),
            ],
        )
    });
    let order = controller_s.optional(&mut ctx, "extrapolation_order", integer);
    let anytime = controller_s.optional(&mut ctx, "anytime_budget", integer);
    let activate_at = controller_s.optional(&mut ctx, "activate_at", instant);
    let every_frame = controller_s.optional(&mut ctx, "evaluate_every_frame", boolean);
    let capacity = controller_s.optional(&mut ctx, "history_capacity", integer);
    controller_s.finish(&mut ctx);

    // [run]
    let name = run_s
        .optional(&mut ctx, "name", |c, v| string(c, v).map(str::to_string))
        .unwrap_or(None);
    let mode = run_s.optional(&mut ctx, "mode", |c, v| {
        choice(
            c,
            v,
            &[
                ("time_triggered", Mode::TimeTriggered),
                ("event_triggered", Mode::EventTriggered),
            ],
        )
    });
    let time_rate = run_s.optional(&mut ctx, "time_rate", exact_number);
    let tolerance = run_s.optional(&mut ctx, "consistency_tolerance", real);
    let list = run_s.optional(&mut ctx, "computation_durations", durations);
    let seed = run_s.optional(&mut ctx, "duration_seed", integer);
    let min = run_s.optional(&mut ctx, "duration_min", duration);
    let max = run_s.optional(&mut ctx, "duration_max", duration);
    run_s.finish(&mut ctx);

    let Some(clock) = clock else {
        return Err(ScenarioErrors(ctx.errors));
    };
    let frame = frame.and_then(|r| resolve_duration(&mut ctx, &clock, r));
    let first_sof = first_sof.and_then(|r| resolve_instant(&mut ctx, &clock, r));
    let hs_offset = horizon_start.as_ref().map(|r| r.offset);
    let horizon_start = horizon_start.and_then(|r| resolve_instant(&mut ctx, &clock, r));
    let horizon_end = horizon_end.and_then(|r| resolve_instant(&mut ctx, &clock, r));
    let opt_duration = |ctx: &mut Ctx<'_>, r: Result<Option<Raw<RawDuration>>, ()>| match r {
        Ok(Some(raw)) => resolve_duration(ctx, &clock, raw).map(Some).ok_or(()),
        Ok(None) => Ok(None),
        Err(()) => Err(()),
    };
    let sensor = opt_duration(&mut ctx, sensor);
    let actuator = opt_duration(&mut ctx, actuator);
    let computation = opt_duration(&mut ctx, computation);
    let min = opt_duration(&mut ctx, min);
    let max = opt_duration(&mut ctx, max);
    let state_instant = state_instant.and_then(|r| resolve_instant(&mut ctx, &clock, r));
    let activate_at = match activate_at {
        Ok(Some(raw)) => resolve_instant(&mut ctx, &clock, raw).map(Some).ok_or(()),
        other => other.map(|_| None),
    };
    let list = match list {
        Ok(Some(raws)) => {
            let mut out = Vec::new();
            let mut ok = true;
            for raw in raws {
                match resolve_duration(&mut ctx, &clock, raw) {
                    Some(g) => out.push(g),
                    None => ok = false,
                }
            }
            if ok {
                Ok(Some(out))
            } else {
                Err(())
            }
        }
        other => other.map(|_| None),
    };

    let horizon = match (horizon_start, horizon_end) {
        (Some(s), Some(e)) => match Interval::new(s, e) {
            Ok(h) => Some(h),
            Err(err) => {
                ctx.error(hs_offset, err.to_string());
                None
            }
        },
        _ => None,
    };
    let schedule = match (frame, first_sof, horizon) {
        (Some(frame), Some(first), Some(horizon)) => {
            match FrameSchedule::new(frame, first, horizon) {
                Ok(s) => Some(s),
                Err(err) => {
                    let key = if frame == 0 {
                        "schedule.frame_duration"
                    } else {
                        "schedule.first_sof"
                    };
                    let line = ctx.line_of(key);
                    ctx.errors.push(ScenarioError {
                        line,
                        message: err.to_string(),
                    });
                    None
                }
            }
        }
        _ => None,
    };

    let durations = match (list, seed, min, max) {
        (Ok(None), Ok(None), Ok(None), Ok(None)) => Some(None),
        (Ok(Some(list)), Ok(None), Ok(None), Ok(None)) => Some(Some(DurationSource::List(list))),
        (Ok(None), Ok(Some(seed)), Ok(Some(min)), Ok(Some(max))) => {
            Some(Some(DurationSource::Uniform { seed, min, max }))
        }
        (Ok(_), Ok(_), Ok(_), Ok(_)) => {
            let line = ctx
                .line_of("run.computation_durations")
                .or(ctx.line_of("run.duration_seed"));
            ctx.errors.push(ScenarioError {
                line,
                message: "give either computation_durations or all of duration_seed, duration_min and duration_max".into(),
            });
            None
        }
        _ => None,
    };

    let (Some(schedule), Ok(sensor), Ok(actuator), Ok(computation), Some(speed), Some(distance)) =
        (schedule, sensor, actuator, computation, speed, distance)
    else {
        return Err(ScenarioErrors(ctx.errors));
    };
    let (Some(state_instant), Some(kind), Ok(order), Ok(anytime), Ok(activate_at), Ok(every_frame)) = (
        state_instant,
        kind,
        order,
        anytime,
        activate_at,
        every_frame,
    ) else {
        return Err(ScenarioErrors(ctx.errors));
    };
    let (Ok(capacity), Ok(mode), Ok(time_rate), Ok(tolerance), Some(durations)) =
        (capacity, mode, time_rate, tolerance, durations)
    else {
        return Err(ScenarioErrors(ctx.errors));
    };
    if !ctx.errors.is_empty() {
        return Err(ScenarioErrors(ctx.errors));
    }

    let frame = schedule.frame_duration();
    let scenario = Scenario {
        name: name.unwrap_or_else(|| fallback_name.into()),
        clock,
        schedule,
        latency: LatencySpec::new(
            sensor.unwrap_or(0),
            computation.unwrap_or(frame),
            actuator.unwrap_or(0),
        ),
        plant: PlantConfig {
            initial_speed: speed,
            initial_distance: distance,
            state_instant,
        },
        controller: ControllerConfig {
            kind,
            extrapolation_order: order.map_or(1, |o| o as usize),
            anytime_budget: anytime.map_or(0, |a| a as usize),
            activate_at,
            evaluate_every_frame: every_frame.unwrap_or(false),
            history_capacity: capacity.map_or(DEFAULT_CAPACITY, |c| c as usize),
        },
        run: RunConfig {
            mode: mode.unwrap_or(Mode::TimeTriggered),
            time_rate: time_rate.unwrap_or(Seconds::from_integer(1)),
            consistency_tolerance: tolerance.unwrap_or(DEFAULT_TOLERANCE),
            durations,
        },
    };
    let issues = scenario.validate();
    if !issues.is_empty() {
        return Err(ScenarioErrors(
            issues.into_iter().map(|i| issue_error(&ctx, i)).collect(),
        ));
    }
    Ok(scenario)
}

fn issue_error(ctx: &Ctx<'_>, issue: ConfigIssue) -> ScenarioError {
    ScenarioError {
        line: ctx.line_of(issue.key),
        message: format!("{}: {}", issue.key, issue.message),
    }
}

fn ratio_text(r: Seconds) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn float_text(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:?}")
    }
}

fn quoted(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical scenario text: durations and instants in granules, floats in
/// shortest round-trip form. `parse_scenario` of the result gives back an
/// equal scenario.
pub fn serialize_scenario(sc: &Scenario) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line("[clock]".into());
    line(format!(
        "granule = \"{} s\"",
        ratio_text(sc.clock.granule())
    ));
    if let Some(epoch) = sc.clock.epoch_label() {
        line(format!("epoch = {}", quoted(epoch)));
    }
    line(String::new());
    line("[schedule]".into());
    line(format!("frame_duration = {}", sc.schedule.frame_duration()));
    line(format!("first_sof = {}", sc.schedule.first_sof().ticks()));
    line(format!(
        "horizon_start = {}",
        sc.schedule.horizon().start().ticks()
    ));
    line(format!(
        "horizon_end = {}",
        sc.schedule.horizon().end().ticks()
    ));
    line(String::new());
    line("[latency]".into());
    line(format!(
        "sensor_latency_granules = {}",
        sc.latency.sensor_latency
    ));
    line(format!(
        "actuator_latency_granules = {}",
        sc.latency.actuator_latency
    ));
    line(format!(
        "computation_granules = {}",
        sc.latency.computation_duration
    ));
    line(String::new());
    line("[plant]".into());
    line(format!(
        "initial_speed = {}",
        float_text(sc.plant.initial_speed)
    ));
    line(format!(
        "initial_distance = {}",
        float_text(sc.plant.initial_distance)
    ));
    line(format!(
        "state_instant = {}",
        sc.plant.state_instant.ticks()
    ));
    line(String::new());
    let c = &sc.controller;
    line("[controller]".into());
    line(format!("kind = \"{}\"", c.kind.as_str()));
    line(format!("extrapolation_order = {}", c.extrapolation_order));
    line(format!("anytime_budget = {}", c.anytime_budget));
    if let Some(at) = c.activate_at {
        line(format!("activate_at = {}", at.ticks()));
    }
    line(format!("evaluate_every_frame = {}", c.evaluate_every_frame));
    line(format!("history_capacity = {}", c.history_capacity));
    line(String::new());
    line("[run]".into());
    line(format!("name = {}", quoted(&sc.name)));
    line(format!("mode = \"{}\"", sc.run.mode.as_str()));
    line(format!("time_rate = \"{}\"", ratio_text(sc.run.time_rate)));
    line(format!(
        "consistency_tolerance = {}",
        float_text(sc.run.consistency_tolerance)
    ));
    match &sc.run.durations {
        Some(DurationSource::List(list)) => {
            let items: Vec<_> = list.iter().map(u64::to_string).collect();
            line(format!("computation_durations = [{}]", items.join(", ")));
        }
        Some(DurationSource::Uniform { seed, min, max }) => {
            line(format!("duration_seed = {seed}"));
            line(format!("duration_min = {min}"));
            line(format!("duration_max = {max}"));
        }
        None => {}
    }
    debug_assert!(!sc.run.time_rate.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAIVE: &str = r#"
[clock]
granule = "1 s"
epoch = "00:00:00"

[schedule]
frame_duration = 1
first_sof = 10:59:55
horizon_start = 10:59:55
horizon_end = 11:00:06

[latency]
computation_granules = 1

[plant]
initial_speed = 25.0
initial_distance = 100.0
state_instant = "10:59:56"

[controller]
kind = "naive"
activate_at = 10:59:56

[run]
mode = "time_triggered"
"#;

    fn errors(text: &str) -> Vec<String> {
        parse_scenario(text).unwrap_err().messages()
    }

    #[test]
    fn parses_the_braking_setup() {
        let sc = parse_scenario(NAIVE).unwrap();
        assert_eq!(sc.schedule.frame_duration(), 1);
        assert_eq!(sc.schedule.first_sof(), Timestamp::new(39_595));
        assert_eq!(sc.plant.state_instant, Timestamp::new(39_596));
        assert_eq!(sc.plant.initial_speed, 25.0);
        assert_eq!(sc.controller.kind, ControllerKind::Naive);
        assert_eq!(sc.controller.extrapolation_order, 1);
        assert_eq!(sc.run.consistency_tolerance, DEFAULT_TOLERANCE);
    }

    #[test]
    fn empty_file_misses_the_clock_first() {
        let errs = errors("");
        assert_eq!(errs[0], "missing section [clock]");
    }

    #[test]
    fn unknown_keys_are_located() {
        let text = NAIVE.replace("kind = \"naive\"", "kind = \"naive\"\nkidn = 3");
        let errs = errors(&text);
        assert_eq!(errs, vec!["line 22: unknown key `kidn` in [controller]"]);
    }

    #[test]
    fn unknown_sections_are_rejected() {
        let errs = errors(&format!("{NAIVE}\n[extra]\nx = 1\n"));
        assert!(errs[0].contains("unknown section [extra]"), "{errs:?}");
    }

    #[test]
    fn mixing_duration_styles_is_rejected() {
        let text = NAIVE.replace("computation_granules = 1", "computation_granules = \"1 s\"");
        let errs = errors(&text);
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert!(errs[0].starts_with(
            "line 13: durations mix seconds with granule counts (first used at line 7)"
        ));
    }

    #[test]
    fn seconds_everywhere_is_fine() {
        let text = NAIVE
            .replace("frame_duration = 1", "frame_duration = \"1 s\"")
            .replace(
                "computation_granules = 1",
                "computation_granules = \"1.0 s\"",
            );
        assert_eq!(parse_scenario(&text).unwrap().schedule.frame_duration(), 1);
    }

    #[test]
    fn oversized_computation_is_a_validation_error() {
        let text = NAIVE.replace("computation_granules = 1", "computation_granules = 2");
        let errs = errors(&text);
        assert_eq!(errs.len(), 1);
        assert!(
            errs[0].starts_with("line 13: latency.computation_granules"),
            "{errs:?}"
        );
    }

    #[test]
    fn several_errors_come_back_together() {
        let text = NAIVE
            .replace("initial_speed = 25.0", "initial_speed = \"fast\"")
            .replace("kind = \"naive\"", "kind = \"psychic\"");
        let errs = errors(&text);
        assert_eq!(errs.len(), 2, "{errs:?}");
        assert!(errs[0].contains("line 16"));
        assert!(errs[1].contains("psychic"));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let errs = errors("[clock]\ngranule = = 1\n");
        assert!(errs[0].starts_with("line 2: syntax error"), "{errs:?}");
    }

    #[test]
    fn off_grid_instants_are_rejected() {
        let text = NAIVE.replace(
            "state_instant = \"10:59:56\"",
            "state_instant = \"10:59:56.5\"",
        );
        let errs = errors(&text);
        assert!(
            errs[0].contains("does not fit the granule grid"),
            "{errs:?}"
        );
    }

    #[test]
    fn round_trip() {
        let sc = parse_scenario(NAIVE).unwrap();
        let again = parse_scenario(&serialize_scenario(&sc)).unwrap();
        assert_eq!(sc, again);
    }
}
