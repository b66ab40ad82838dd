//! Information items: `<v-time> <subject> <predicate> <object>` propositions,
//! and the temporal-consistency check.
//!
//! An [`Itom`] is immutable once built. Terms nest by value, so an item can
//! never contain itself.
//!
//! Temporal consistency of an item at an instant `t` is judged in two
//! separable parts:
//!
//! * every nested item must be valid at `t` (its v-time contains `t`);
//! * every grounded literal must agree, within a relative tolerance, with the
//!   value a [`WorldOracle`] reports for that grounding at `t`.
//!
//! Plain-text names are carried verbatim and never checked.

use std::fmt;

use thiserror::Error;

use crate::quantity::{Dimension, Quantity};
use crate::time::{ClockSpec, Interval, Timestamp};

/// Floor of the relative scale, so that a true value of zero still gets a
/// (tiny) absolute band.
pub const SCALE_FLOOR: f64 = 1e-12;

/// Default relative tolerance for analytic plants.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// A natural-language or grounded name, display only.
    Name(String),
    Literal(Quantity),
    Nested(Box<Itom>),
}

impl Term {
    pub fn name(text: impl Into<String>) -> Self {
        Term::Name(text.into())
    }

    pub fn nested(item: Itom) -> Self {
        Term::Nested(Box::new(item))
    }

    pub fn as_literal(&self) -> Option<&Quantity> {
        match self {
            Term::Literal(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_nested(&self) -> Option<&Itom> {
        match self {
            Term::Nested(i) => Some(i),
            _ => None,
        }
    }

    fn render(&self, clock: &ClockSpec) -> String {
        match self {
            Term::Name(text) => text.clone(),
            Term::Literal(q) => format!("{} [{}]", q.value(), q.dimension()),
            Term::Nested(item) => format!("({})", item.trace_line(clock)),
        }
    }
}

impl From<Quantity> for Term {
    fn from(q: Quantity) -> Self {
        Term::Literal(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Subject,
    Predicate,
    Object,
}

impl Slot {
    const ALL: [Slot; 3] = [Slot::Subject, Slot::Predicate, Slot::Object];

    fn as_str(self) -> &'static str {
        match self {
            Slot::Subject => "subject",
            Slot::Predicate => "predicate",
            Slot::Object => "object",
        }
    }
}

/// Location of a term inside a (possibly nested) item, e.g.
/// `predicate.object`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TermPath(Vec<Slot>);

impl TermPath {
    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    fn child(&self, slot: Slot) -> TermPath {
        let mut slots = self.0.clone();
        slots.push(slot);
        TermPath(slots)
    }
}

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|s| s.as_str()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Itom {
    v_time: Interval,
    subject: Term,
    predicate: Term,
    object: Term,
    provenance: Option<String>,
}

impl Itom {
    pub fn new(v_time: Interval, subject: Term, predicate: Term, object: Term) -> Self {
        Itom {
            v_time,
            subject,
            predicate,
            object,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, source: impl Into<String>) -> Self {
        self.provenance = Some(source.into());
        self
    }

    pub fn v_time(&self) -> Interval {
        self.v_time
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    fn term(&self, slot: Slot) -> &Term {
        match slot {
            Slot::Subject => &self.subject,
            Slot::Predicate => &self.predicate,
            Slot::Object => &self.object,
        }
    }

    /// The object literal, if the object is a literal.
    pub fn value(&self) -> Option<&Quantity> {
        self.object.as_literal()
    }

    pub fn is_valid_at(&self, t: Timestamp) -> bool {
        self.v_time.contains(t)
    }

    /// True when no term is itself an item.
    pub fn is_basic(&self) -> bool {
        Slot::ALL
            .iter()
            .all(|&s| self.term(s).as_nested().is_none())
    }

    /// Nesting depth; a basic item has depth 1.
    pub fn depth(&self) -> usize {
        1 + Slot::ALL
            .iter()
            .filter_map(|&s| self.term(s).as_nested())
            .map(Itom::depth)
            .max()
            .unwrap_or(0)
    }

    /// Depth-first list of every term reachable from this item, each nested
    /// item's own terms following the nested term itself.
    pub fn referenced_terms(&self) -> Vec<(TermPath, &Term)> {
        let mut out = Vec::new();
        self.collect_terms(&TermPath::default(), &mut out);
        out
    }

    fn collect_terms<'a>(&'a self, base: &TermPath, out: &mut Vec<(TermPath, &'a Term)>) {
        for slot in Slot::ALL {
            let path = base.child(slot);
            let term = self.term(slot);
            out.push((path.clone(), term));
            if let Term::Nested(inner) = term {
                inner.collect_terms(&path, out);
            }
        }
    }

    /// `v_time | subject | predicate | object-value | object-dimension | provenance`
    pub fn trace_line(&self, clock: &ClockSpec) -> String {
        let (value, dimension) = match &self.object {
            Term::Literal(q) => (q.value().to_string(), q.dimension().to_string()),
            other => (other.render(clock), String::new()),
        };
        format!(
            "{} | {} | {} | {} | {} | {}",
            render_v_time(self.v_time, clock),
            self.subject.render(clock),
            self.predicate.render(clock),
            value,
            dimension,
            self.provenance.as_deref().unwrap_or("")
        )
    }
}

pub fn render_v_time(v_time: Interval, clock: &ClockSpec) -> String {
    if v_time.is_point() {
        clock.label(v_time.start())
    } else {
        format!(
            "{}-{}",
            clock.label(v_time.start()),
            clock.label(v_time.end())
        )
    }
}

/// Ground truth about the physical system.
pub trait WorldOracle {
    /// The true value of the grounded concept at `at`, or `None` if the
    /// grounding is unknown to the oracle.
    fn true_value(&self, grounding: &str, at: Timestamp) -> Option<Quantity>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ItomError {
    #[error("oracle cannot resolve grounding {grounding:?} (term {path})")]
    UnresolvedGrounding { path: TermPath, grounding: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A nested item is not valid at the checked instant.
    NotValid {
        path: TermPath,
        v_time: Interval,
        at: Timestamp,
    },
    /// A grounded literal disagrees with the oracle beyond tolerance.
    Value {
        path: TermPath,
        grounding: String,
        reference: Quantity,
        found: Quantity,
    },
    Dimension {
        path: TermPath,
        grounding: String,
        reference: Dimension,
        found: Dimension,
    },
}

impl Violation {
    pub fn path(&self) -> &TermPath {
        match self {
            Violation::NotValid { path, .. }
            | Violation::Value { path, .. }
            | Violation::Dimension { path, .. } => path,
        }
    }

    pub fn grounding(&self) -> Option<&str> {
        match self {
            Violation::NotValid { .. } => None,
            Violation::Value { grounding, .. } | Violation::Dimension { grounding, .. } => {
                Some(grounding)
            }
        }
    }
}

impl Violation {
    /// Like `Display`, with instants rendered as clock labels.
    pub fn describe(&self, clock: &ClockSpec) -> String {
        match self {
            Violation::NotValid { path, v_time, at } => format!(
                "{path}: not valid at {} (v-time {})",
                clock.label(*at),
                render_v_time(*v_time, clock)
            ),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotValid { path, v_time, at } => {
                write!(f, "{path}: not valid at {at} (v-time {v_time})")
            }
            Violation::Value {
                path,
                grounding,
                reference,
                found,
            } => write!(
                f,
                "{path}: {grounding} is {} [{}], item says {}",
                reference.value(),
                reference.dimension(),
                found.value()
            ),
            Violation::Dimension {
                path,
                grounding,
                reference,
                found,
            } => write!(
                f,
                "{path}: {grounding} has dimension [{reference}], item says [{found}]"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    checked_at: Timestamp,
    violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn checked_at(&self) -> Timestamp {
        self.checked_at
    }

    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

/// Checks `item` at the start of its own v-time.
pub fn check_temporal_consistency(
    item: &Itom,
    oracle: &dyn WorldOracle,
    tolerance: f64,
) -> Result<ConsistencyReport, ItomError> {
    check_temporal_consistency_at(item, item.v_time().start(), oracle, tolerance)
}

/// Checks every term referenced by `item` against the oracle at `at`.
///
/// A tolerance of `f64::INFINITY` switches off value comparison and leaves
/// the v-time containment and dimension checks.
pub fn check_temporal_consistency_at(
    item: &Itom,
    at: Timestamp,
    oracle: &dyn WorldOracle,
    tolerance: f64,
) -> Result<ConsistencyReport, ItomError> {
    let mut violations = Vec::new();
    for (path, term) in item.referenced_terms() {
        match term {
            Term::Name(_) => {}
            Term::Nested(inner) => {
                if !inner.is_valid_at(at) {
                    violations.push(Violation::NotValid {
                        path,
                        v_time: inner.v_time(),
                        at,
                    });
                }
            }
            Term::Literal(found) => {
                let Some(grounding) = found.grounding() else {
                    continue;
                };
                let reference = oracle.true_value(grounding, at).ok_or_else(|| {
                    ItomError::UnresolvedGrounding {
                        path: path.clone(),
                        grounding: grounding.to_string(),
                    }
                })?;
                if reference.dimension() != found.dimension() {
                    violations.push(Violation::Dimension {
                        path,
                        grounding: grounding.to_string(),
                        reference: reference.dimension(),
                        found: found.dimension(),
                    });
                    continue;
                }
                if tolerance.is_infinite() {
                    continue;
                }
                let bound = tolerance * reference.value().abs().max(SCALE_FLOOR);
                let diff = (found.value() - reference.value()).abs();
                if diff.is_nan() || diff > bound {
                    violations.push(Violation::Value {
                        path,
                        grounding: grounding.to_string(),
                        reference,
                        found: found.clone(),
                    });
                }
            }
        }
    }
    Ok(ConsistencyReport {
        checked_at: at,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::parse_clock_label;

    const DISTANCE: &str = "distance of car from rock";
    const SPEED: &str = "speed of car";
    const BRAKE: &str = "brake force that must be applied to stop the car before the rock";

    fn at(label: &str) -> Timestamp {
        Timestamp::new(parse_clock_label(label).unwrap().to_integer() as u64)
    }

    /// Car cruising at 25 m/s, 100 m from the rock at 10:59:56.
    struct Cruise;

    impl WorldOracle for Cruise {
        fn true_value(&self, grounding: &str, t: Timestamp) -> Option<Quantity> {
            let dt = t - at("10:59:56");
            let s = 100.0 - 25.0 * dt as f64;
            match grounding {
                DISTANCE => Some(Quantity::metres(s).unwrap()),
                SPEED => Some(Quantity::metres_per_second(25.0).unwrap()),
                BRAKE => Some(Quantity::metres_per_second_squared(-625.0 / (2.0 * s)).unwrap()),
                _ => None,
            }
        }
    }

    fn speed_item() -> Itom {
        Itom::new(
            Interval::new(at("10:59:55"), at("10:59:57")).unwrap(),
            Term::name("the blue van from the garage"),
            Term::name("moves to a rock with a speed of"),
            Quantity::metres_per_second(25.0)
                .unwrap()
                .grounded(SPEED)
                .into(),
        )
    }

    fn distance_item(label: &str, metres: f64) -> Itom {
        Itom::new(
            Interval::point(at(label)),
            Term::name("the blue van from the garage"),
            Term::name("is distant from the rock"),
            Quantity::metres(metres).unwrap().grounded(DISTANCE).into(),
        )
    }

    fn result_item(label: &str, distance: Itom, brake: f64) -> Itom {
        Itom::new(
            Interval::point(at(label)),
            Term::nested(speed_item()),
            Term::nested(distance),
            Quantity::metres_per_second_squared(brake)
                .unwrap()
                .grounded(BRAKE)
                .into(),
        )
    }

    #[test]
    fn validity_is_inclusive() {
        assert!(speed_item().is_valid_at(at("10:59:57")));
        assert!(speed_item().is_valid_at(at("10:59:55")));
        assert!(!distance_item("10:59:56", 100.0).is_valid_at(at("10:59:57")));
        assert!(distance_item("10:59:56", 100.0).is_valid_at(at("10:59:56")));
    }

    #[test]
    fn referenced_terms_walk_nested_items() {
        assert_eq!(speed_item().referenced_terms().len(), 3);
        let result = result_item("10:59:56", distance_item("10:59:56", 100.0), -3.125);
        let terms = result.referenced_terms();
        assert_eq!(terms.len(), 9);
        let paths: Vec<String> = terms.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(paths[0], "subject");
        assert_eq!(paths[1], "subject.subject");
        assert_eq!(paths[7], "predicate.object");
        assert_eq!(paths[8], "object");
        assert!(!result.is_basic());
        assert!(speed_item().is_basic());
    }

    #[test]
    fn nesting_is_by_value() {
        let inner = speed_item();
        let outer = Itom::new(
            inner.v_time(),
            Term::nested(inner.clone()),
            Term::name("is"),
            Term::name("known"),
        );
        assert_ne!(outer, inner);
        assert_eq!(outer.depth(), inner.depth() + 1);
    }

    #[test]
    fn stale_result_is_inconsistent_at_actuation() {
        let result = result_item("10:59:56", distance_item("10:59:56", 100.0), -3.125);
        // consistent for its own v-time
        let own = check_temporal_consistency(&result, &Cruise, DEFAULT_TOLERANCE).unwrap();
        assert!(own.consistent());

        let report =
            check_temporal_consistency_at(&result, at("10:59:57"), &Cruise, DEFAULT_TOLERANCE)
                .unwrap();
        assert!(!report.consistent());
        let distance = report
            .violations()
            .iter()
            .find_map(|v| match v {
                Violation::Value {
                    grounding,
                    reference,
                    found,
                    ..
                } if grounding == DISTANCE => Some((reference.value(), found.value())),
                _ => None,
            })
            .unwrap();
        assert_eq!(distance, (75.0, 100.0));
        assert!(report.violations().iter().any(
            |v| matches!(v, Violation::NotValid { path, .. } if path.to_string() == "predicate")
        ));
        // the speed item spans 10:59:55-10:59:57 and its value is right
        assert!(report
            .violations()
            .iter()
            .all(|v| !v.path().to_string().starts_with("subject")));
    }

    #[test]
    fn extrapolated_result_is_consistent() {
        let result = result_item("10:59:57", distance_item("10:59:57", 75.0), -625.0 / 150.0);
        let report = check_temporal_consistency(&result, &Cruise, DEFAULT_TOLERANCE).unwrap();
        assert!(report.consistent(), "{:?}", report.violations());
    }

    #[test]
    fn exact_oracle_agreement_is_consistent() {
        let item = distance_item("10:59:58", 50.0);
        let report = check_temporal_consistency(&item, &Cruise, 0.0).unwrap();
        assert!(report.consistent());
        assert!(report.violations().is_empty());
    }

    #[test]
    fn unknown_grounding_is_an_error_not_a_verdict() {
        let item = Itom::new(
            Interval::point(at("10:59:56")),
            Term::name("the rock"),
            Term::name("weighs"),
            Quantity::new(900.0, Dimension::KILOGRAM)
                .unwrap()
                .grounded("mass of rock")
                .into(),
        );
        assert!(matches!(
            check_temporal_consistency(&item, &Cruise, DEFAULT_TOLERANCE),
            Err(ItomError::UnresolvedGrounding { .. })
        ));
    }

    #[test]
    fn infinite_tolerance_keeps_only_validity_checks() {
        let result = result_item("10:59:56", distance_item("10:59:56", 100.0), -3.125);
        let report =
            check_temporal_consistency_at(&result, at("10:59:57"), &Cruise, f64::INFINITY).unwrap();
        assert_eq!(report.violations().len(), 1);
        assert!(matches!(report.violations()[0], Violation::NotValid { .. }));
    }

    #[test]
    fn dimension_disagreement_is_reported() {
        let item = Itom::new(
            Interval::point(at("10:59:56")),
            Term::name("car"),
            Term::name("is distant"),
            Quantity::seconds(100.0).unwrap().grounded(DISTANCE).into(),
        );
        let report = check_temporal_consistency(&item, &Cruise, f64::INFINITY).unwrap();
        assert!(matches!(
            report.violations()[0],
            Violation::Dimension { .. }
        ));
    }

    #[test]
    fn trace_line_columns() {
        let clock = ClockSpec::seconds().with_epoch("1970-01-01T00:00:00Z");
        let line = distance_item("10:59:56", 100.0)
            .with_provenance("sensor:distance")
            .trace_line(&clock);
        assert_eq!(
            line,
            "10:59:56 | the blue van from the garage | is distant from the rock | 100 | m | sensor:distance"
        );
        let speed = speed_item().trace_line(&clock);
        assert!(speed.starts_with("10:59:55-10:59:57 | "));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn basic(start: u64, len: u64) -> Itom {
            Itom::new(
                Interval::new(Timestamp::new(start), Timestamp::new(start + len)).unwrap(),
                Term::name("x"),
                Term::name("is"),
                Term::name("y"),
            )
        }

        struct Nothing;
        impl WorldOracle for Nothing {
            fn true_value(&self, _: &str, _: Timestamp) -> Option<Quantity> {
                None
            }
        }

        proptest! {
            #[test]
            fn nested_item_outside_the_outer_v_time_breaks_consistency(
                outer_at in 0u64..1000,
                inner_start in 0u64..1000,
                inner_len in 0u64..50,
                slot in 0usize..3,
            ) {
                let inner = basic(inner_start, inner_len);
                prop_assume!(!inner.is_valid_at(Timestamp::new(outer_at)));
                let mut terms = [Term::name("a"), Term::name("b"), Term::name("c")];
                terms[slot] = Term::nested(inner);
                let [s, p, o] = terms;
                let outer = Itom::new(Interval::point(Timestamp::new(outer_at)), s, p, o);
                let report = check_temporal_consistency(&outer, &Nothing, DEFAULT_TOLERANCE).unwrap();
                prop_assert!(!report.consistent());
                let again = check_temporal_consistency(&outer, &Nothing, DEFAULT_TOLERANCE).unwrap();
                prop_assert_eq!(report, again);
            }
        }
    }
}
