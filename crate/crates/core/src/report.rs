//! Trace output: fixed-header CSV, a verdict summary, and the
//! speed-over-distance curves of the braking scenarios.

use std::fmt::Write as _;

use crate::cps::DISTANCE;
use crate::engine::{EmittedItom, Event, Outcome, Trace};
use crate::itom::{render_v_time, ConsistencyReport};
pub use crate::quantity::sig6;
use crate::time::Timestamp;

pub const CSV_HEADER: &str = "granule,time_label,position_m,speed_mps,applied_decel_mps2,itom_kind,itom_vtime,itom_value,itom_dimension,consistency,event";

/// Kilometres per hour in one metre per second.
pub const KMH_PER_MPS: f64 = 3.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Summary,
}

fn consistency_cell(report: Option<&ConsistencyReport>) -> String {
    let Some(report) = report else {
        return String::new();
    };
    if report.consistent() {
        return "consistent".into();
    }
    let mut paths: Vec<String> = Vec::new();
    for v in report.violations() {
        let p = v.path().to_string();
        if !paths.contains(&p) {
            paths.push(p);
        }
    }
    format!("inconsistent[{}]", paths.join(";"))
}

pub fn event_text(event: &Event) -> String {
    match event {
        Event::Impact { speed, .. } => format!("impact {} m/s", sig6(*speed)),
        Event::Stopped { margin, .. } => format!("stopped {} m before rock", sig6(*margin)),
        Event::CommandIssued { decel } => format!("command-issued {} m·s^-2", sig6(*decel)),
        Event::SetpointApplied { decel } => format!("setpoint-applied {} m·s^-2", sig6(*decel)),
        Event::PredictedImpact { speed, iterations } => {
            format!(
                "predicted-impact {} m/s after {iterations} iterations",
                sig6(*speed)
            )
        }
    }
}

/// One row per item and per event of each granule, or a bare row for a
/// granule with neither.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        let prefix = format!(
            "{},{},{},{},{}",
            r.granule.ticks(),
            trace.clock.label(r.granule),
            sig6(r.state.position),
            sig6(r.state.speed),
            sig6(r.state.applied_decel)
        );
        let item_cells = |i: &EmittedItom| {
            let (value, dim) = match i.item.value() {
                Some(q) => (sig6(q.value()), q.dimension().to_string()),
                None => (String::new(), String::new()),
            };
            format!(
                "{},{},{},{},{}",
                i.kind.as_str(),
                render_v_time(i.item.v_time(), &trace.clock),
                value,
                dim,
                consistency_cell(i.report.as_ref())
            )
        };
        for i in &r.itoms {
            let _ = writeln!(out, "{prefix},{},", item_cells(i));
        }
        for e in &r.events {
            let _ = writeln!(out, "{prefix},,,,,,{}", event_text(e));
        }
        if r.itoms.is_empty() && r.events.is_empty() {
            let _ = writeln!(out, "{prefix},,,,,,");
        }
    }
    out
}

/// Verdict first, then the logged calculations, violations and step errors.
pub fn trace_summary(trace: &Trace) -> String {
    let inconsistent = trace.inconsistent_results();
    let mut out = String::new();
    let verdict = match trace.outcome {
        Outcome::Impact { speed, .. } => format!(
            "IMPACT at speed {speed:.3} m/s ({:.3} km/h)",
            speed * KMH_PER_MPS
        ),
        Outcome::Stopped { margin, .. } => format!("STOPPED {margin:.3} m before rock"),
        Outcome::Moving { position, speed } => {
            format!("MOVING at horizon end, {position:.3} m before rock at {speed:.3} m/s")
        }
        Outcome::Empty => "EMPTY horizon".to_string(),
    };
    let _ = writeln!(out, "{verdict}; result ITOMs inconsistent: {inconsistent}");
    let _ = writeln!(
        out,
        "scenario {} ({}), result ITOMs checked: {}",
        trace.scenario,
        trace.mode.as_str(),
        trace.result_count()
    );
    for (at, c) in &trace.calculations {
        let _ = writeln!(
            out,
            "{} {}: {} | {} | {} = {} [{}]",
            trace.clock.label(*at),
            c.name,
            c.formula,
            c.dimension_check,
            c.operands,
            sig6(c.value.value()),
            c.dimension
        );
    }
    for (r, i) in trace.itoms(crate::engine::ItomKind::Result) {
        if let Some(report) = i.report.as_ref().filter(|r| !r.consistent()) {
            for v in report.violations() {
                let _ = writeln!(
                    out,
                    "{} violation: {}",
                    trace.clock.label(r.granule),
                    v.describe(&trace.clock)
                );
            }
        }
    }
    if let (Some(mean), Some(max)) = (
        trace.mean_abs_error(DISTANCE),
        trace.max_abs_error(DISTANCE),
    ) {
        let steps = trace
            .step_errors
            .iter()
            .filter(|e| e.grounding == DISTANCE)
            .count();
        let _ = writeln!(
            out,
            "extrapolation error ({DISTANCE}): mean {mean:.3} m, max {max:.3} m over {steps} steps"
        );
    }
    out
}

pub fn emit_trace(trace: &Trace, format: Format) -> String {
    match format {
        Format::Csv => trace_csv(trace),
        Format::Summary => trace_summary(trace),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Seconds after the plant's state instant.
    pub time_s: f64,
    pub distance_traveled_m: f64,
    pub speed_mps: f64,
}

/// Speed over distance travelled since the state instant, one point per
/// granule up to the impact or stop, closed by the exact terminal point.
pub fn speed_distance_curve(trace: &Trace) -> Vec<CurvePoint> {
    let start = trace.state_instant;
    let Some(reference) = trace.records.iter().find(|r| r.granule == start) else {
        return Vec::new();
    };
    let s0 = reference.state.position;
    let secs = |t: Timestamp| trace.clock.span_secs(t - start);
    let mut points = Vec::new();
    for r in trace.records.iter().filter(|r| r.granule >= start) {
        points.push(CurvePoint {
            time_s: secs(r.granule),
            distance_traveled_m: s0 - r.state.position,
            speed_mps: r.state.speed,
        });
        let terminal = r.events.iter().find_map(|e| match *e {
            Event::Impact { speed, after } => Some((after, 0.0, speed)),
            Event::Stopped { margin, after } => Some((after, margin, 0.0)),
            _ => None,
        });
        if let Some((after, position, speed)) = terminal {
            if after > 0.0 {
                points.push(CurvePoint {
                    time_s: secs(r.granule) + after,
                    distance_traveled_m: s0 - position,
                    speed_mps: speed,
                });
            }
            break;
        }
    }
    points
}

pub const CURVE_HEADER: &str = "time_s,distance_traveled_m,speed_mps";

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.time_s, p.distance_traveled_m, p.speed_mps
        );
    }
    out
}

/// The three braking curves as `(name, csv)`: the ideal brake at the state
/// instant, the naive controller and the extrapolating controller.
pub fn emit_braking_curves(
    blue: &Trace,
    red: &Trace,
    green: &Trace,
) -> Vec<(&'static str, String)> {
    vec![
        ("blue", curve_csv(&speed_distance_curve(blue))),
        ("red", curve_csv(&speed_distance_curve(red))),
        ("green", curve_csv(&speed_distance_curve(green))),
    ]
}
