//! Deterministic time-triggered co-simulation of a physical plant and a
//! controller that exchange temporally qualified, dimensioned information
//! items.
//!
//! The pieces, bottom up:
//!
//! - [`time`]: granules, timestamps, intervals and the frame schedule.
//! - [`quantity`]: values with SI dimensions and checked arithmetic.
//! - [`itom`]: information items and the temporal-consistency checker.
//! - [`extrapolation`]: sensor time series and Taylor extrapolation.
//! - [`latency`]: the sensor/computation/actuator chain.
//! - [`cps`]: the braking car, the controller calculations, anytime runs.
//! - [`engine`]: the executive in time- and event-triggered modes.
//! - [`scenario`] and [`report`]: scenario files, CSV and summaries.
//!
//! ```
//! use tt_cosim::{bundled, engine, engine::Outcome};
//!
//! let scenario = bundled::load("braking_extrapolating").unwrap();
//! let trace = engine::run(&scenario).unwrap();
//! assert!(matches!(trace.outcome, Outcome::Stopped { .. }));
//! assert_eq!(trace.inconsistent_results(), 0);
//! ```

pub mod cps;
pub mod engine;
pub mod extrapolation;
pub mod itom;
pub mod latency;
pub mod quantity;
pub mod report;
pub mod scenario;
pub mod time;

/// Scenario files shipped with the crate.
pub mod bundled {
    use crate::engine::Scenario;
    use crate::scenario::{parse_scenario, ScenarioErrors};

    pub const ALL: [(&str, &str); 7] = [
        (
            "braking_naive",
            include_str!("../scenarios/braking_naive.toml"),
        ),
        (
            "braking_extrapolating",
            include_str!("../scenarios/braking_extrapolating.toml"),
        ),
        (
            "braking_ideal",
            include_str!("../scenarios/braking_ideal.toml"),
        ),
        (
            "latency_chain",
            include_str!("../scenarios/latency_chain.toml"),
        ),
        (
            "tt_alternating",
            include_str!("../scenarios/tt_alternating.toml"),
        ),
        (
            "et_alternating",
            include_str!("../scenarios/et_alternating.toml"),
        ),
        ("et_random", include_str!("../scenarios/et_random.toml")),
    ];

    pub fn text(name: &str) -> Option<&'static str> {
        ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }

    /// Parses a bundled scenario. Panics on an unknown name.
    pub fn load(name: &str) -> Result<Scenario, ScenarioErrors> {
        let text = text(name).unwrap_or_else(|| panic!("no bundled scenario `{name}`"));
        parse_scenario(text)
    }
}
