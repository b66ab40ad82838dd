//! Sensor and actuator latencies and the action interval.
//!
//! Instants along one control step:
//!
//! ```text
//!   A ──sensor── C ──computation── D ──actuator── E
//!   value TRUE   read at SOF       command issued  setpoint TRUE
//! ```
//!
//! The action interval `E - A` is the sum of the three spans.

use crate::time::{FrameSchedule, TimeError, Timestamp};

/// Latencies in granules. They are fixed design parameters known before the
/// run starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LatencySpec {
    pub sensor_latency: u64,
    pub actuator_latency: u64,
    pub computation_duration: u64,
}

impl LatencySpec {
    pub fn new(sensor_latency: u64, computation_duration: u64, actuator_latency: u64) -> Self {
        LatencySpec {
            sensor_latency,
            actuator_latency,
            computation_duration,
        }
    }

    /// Instant at which a value read at `sof` was true in the plant (A/B).
    pub fn truth_instant_of_sample(
        &self,
        sof: Timestamp,
        schedule: &FrameSchedule,
    ) -> Result<Timestamp, TimeError> {
        if !schedule.is_sof(sof) {
            return Err(TimeError::NotSof(sof));
        }
        let horizon = schedule.horizon();
        match sof.checked_sub(self.sensor_latency) {
            Some(a) if a >= horizon.start() => Ok(a),
            _ => Err(TimeError::OutsideHorizon {
                t: sof.ticks() as i128 - self.sensor_latency as i128,
                horizon,
            }),
        }
    }

    /// Instant at which a command issued at `command_instant` takes effect
    /// in the plant (E).
    pub fn setpoint_effect_instant(
        &self,
        command_instant: Timestamp,
        schedule: &FrameSchedule,
    ) -> Result<Timestamp, TimeError> {
        let e = command_instant + self.actuator_latency;
        let horizon = schedule.horizon();
        if e > horizon.end() {
            return Err(TimeError::OutsideHorizon {
                t: e.ticks() as i128,
                horizon,
            });
        }
        Ok(e)
    }

    /// Action interval of a step that reads at `read` (C) and issues its
    /// command at `command` (D).
    pub fn action_interval(&self, read: Timestamp, command: Timestamp) -> ActionInterval {
        let input_instant = Timestamp::new(read.ticks().saturating_sub(self.sensor_latency));
        let output_instant = command + self.actuator_latency;
        ActionInterval {
            input_instant,
            output_instant,
            total: (output_instant - input_instant) as u64,
        }
    }

    /// Action interval of the time-triggered loop: read at `sof`, command at
    /// the following SOF.
    pub fn tt_action_interval(
        &self,
        sof: Timestamp,
        schedule: &FrameSchedule,
    ) -> Result<ActionInterval, TimeError> {
        let a = self.truth_instant_of_sample(sof, schedule)?;
        let d = schedule.next_sof(sof)?;
        let interval = self.action_interval(sof, d);
        debug_assert_eq!(interval.input_instant, a);
        Ok(interval)
    }
}

/// Span from the input interaction instant to the output interaction instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionInterval {
    pub input_instant: Timestamp,
    pub output_instant: Timestamp,
    /// Granules.
    pub total: u64,
}
