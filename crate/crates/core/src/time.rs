//! Discrete global time.
//!
//! Every instant the engine deals with is a [`Timestamp`]: an integer count of
//! clock granules since the epoch. Seconds only appear at the edges (event
//! times coming in, labels and plant kinematics going out) and are carried as
//! exact rationals so that a trace never depends on floating-point rounding of
//! the time axis.

use std::fmt;
use std::ops::{Add, Sub};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational seconds.
pub type Seconds = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("event time {0} s is before the epoch")]
    NegativeEventTime(Seconds),
    #[error("granule duration must be positive, got {0} s")]
    NonPositiveGranule(Seconds),
    #[error("frame duration must be at least one granule")]
    EmptyFrame,
    #[error("interval end {end} precedes its start {start}")]
    InvertedInterval { start: Timestamp, end: Timestamp },
    #[error("instant {t} lies outside the horizon {horizon}")]
    OutsideHorizon { t: i128, horizon: Interval },
    #[error("instant {0} is not a start-of-frame")]
    NotSof(Timestamp),
    #[error("time value {0} does not fit the granule grid")]
    OffGrid(Seconds),
}

/// A clock granule count since the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(u64);

impl Timestamp {
    pub const fn new(ticks: u64) -> Self {
        Timestamp(ticks)
    }

    pub const fn ticks(self) -> u64 {
        self.0
    }

    /// Signed number of granules from `earlier` to `self`.
    pub fn offset_from(self, earlier: Timestamp) -> i64 {
        self.0 as i64 - earlier.0 as i64
    }

    pub fn checked_sub(self, granules: u64) -> Option<Timestamp> {
        self.0.checked_sub(granules).map(Timestamp)
    }
}

impl Add<u64> for Timestamp {
    type Output = Timestamp;

    fn add(self, granules: u64) -> Timestamp {
        Timestamp(self.0 + granules)
    }
}

impl Sub for Timestamp {
    type Output = i64;

    fn sub(self, rhs: Timestamp) -> i64 {
        self.offset_from(rhs)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A closed section `[start, end]` of the timeline. A point instant has
/// `start == end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    start: Timestamp,
    end: Timestamp,
}

impl Interval {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self, TimeError> {
        if end < start {
            return Err(TimeError::InvertedInterval { start, end });
        }
        Ok(Interval { start, end })
    }

    pub fn point(t: Timestamp) -> Self {
        Interval { start: t, end: t }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn is_point(&self) -> bool {
        self.start == self.end
    }

    /// Inclusive at both ends.
    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.start) && self.contains(other.end)
    }

    /// Number of granules covered when read as the half-open span
    /// `[start, end)`; the simulation horizon is stepped this way.
    pub fn granules(&self) -> u64 {
        self.end.0 - self.start.0
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{{{}}}", self.start)
        } else {
            write!(f, "[{}, {}]", self.start, self.end)
        }
    }
}

/// Granularity of the global clock plus display metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockSpec {
    granule: Seconds,
    epoch_label: Option<String>,
}

impl ClockSpec {
    pub fn new(granule: Seconds, epoch_label: Option<String>) -> Result<Self, TimeError> {
        if granule <= Seconds::zero() {
            return Err(TimeError::NonPositiveGranule(granule));
        }
        Ok(ClockSpec {
            granule,
            epoch_label,
        })
    }

    /// A clock with a whole-second granule and no epoch metadata.
    pub fn seconds() -> Self {
        ClockSpec {
            granule: Seconds::from_integer(1),
            epoch_label: None,
        }
    }

    pub fn with_epoch(mut self, label: impl Into<String>) -> Self {
        self.epoch_label = Some(label.into());
        self
    }

    pub fn granule(&self) -> Seconds {
        self.granule
    }

    pub fn epoch_label(&self) -> Option<&str> {
        self.epoch_label.as_deref()
    }

    /// Timestamp of an event: the start tick of the granule containing it.
    /// An event exactly on a tick belongs to the granule that tick opens.
    pub fn timestamp_of(&self, event_time: Seconds) -> Result<Timestamp, TimeError> {
        if event_time < Seconds::zero() {
            return Err(TimeError::NegativeEventTime(event_time));
        }
        let ticks = (event_time / self.granule).floor().to_integer();
        Ok(Timestamp(ticks as u64))
    }

    /// Converts a span in seconds into whole granules; rejects spans that
    /// are not an integer multiple of the granule.
    pub fn granules_in(&self, span: Seconds) -> Result<i64, TimeError> {
        let g = span / self.granule;
        if g.is_integer() {
            Ok(g.to_integer())
        } else {
            Err(TimeError::OffGrid(span))
        }
    }

    pub fn seconds_of(&self, t: Timestamp) -> Seconds {
        self.granule * Seconds::from_integer(t.0 as i64)
    }

    /// Length of a signed granule span in seconds, as a float for the plant.
    pub fn span_secs(&self, granules: i64) -> f64 {
        (self.granule * Seconds::from_integer(granules))
            .to_f64()
            .expect("rational seconds fit in f64")
    }

    /// Renders `t` as `h:min:sec` (with a fractional part when the granule is
    /// finer than a second) if epoch metadata is present, otherwise as the raw
    /// granule count.
    pub fn label(&self, t: Timestamp) -> String {
        if self.epoch_label.is_none() {
            return t.to_string();
        }
        format_clock(self.seconds_of(t), self.fraction_digits())
    }

    fn fraction_digits(&self) -> usize {
        let mut scaled = self.granule;
        for digits in 0..=9 {
            if scaled.is_integer() {
                return digits;
            }
            scaled *= Seconds::from_integer(10);
        }
        6
    }
}

fn format_clock(secs: Seconds, digits: usize) -> String {
    let whole = secs.floor().to_integer();
    let (h, m, s) = (whole / 3600, (whole / 60) % 60, whole % 60);
    let mut out = format!("{h:02}:{m:02}:{s:02}");
    if digits > 0 {
        let frac = ((secs - secs.floor()) * Seconds::from_integer(10i64.pow(digits as u32)))
            .floor()
            .to_integer();
        out.push_str(&format!(".{frac:0digits$}"));
    }
    out
}

/// Parses an `h:min:sec[.frac]` clock reading into seconds since midnight.
pub fn parse_clock_label(text: &str) -> Option<Seconds> {
    let mut parts = text.trim().split(':');
    let h: i64 = parts.next()?.parse().ok()?;
    let m: i64 = parts.next()?.parse().ok()?;
    let sec = parse_decimal(parts.next()?)?;
    if parts.next().is_some() || h < 0 || !(0..60).contains(&m) {
        return None;
    }
    if sec < Seconds::zero() || sec >= Seconds::from_integer(60) {
        return None;
    }
    Some(Seconds::from_integer(h * 3600 + m * 60) + sec)
}

/// Parses a plain decimal (`12`, `0.01`, `-2.5`) or a fraction (`1/10`)
/// exactly.
pub fn parse_decimal(text: &str) -> Option<Seconds> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        return (d != 0).then(|| Seconds::new(n, d));
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 12 {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: i64 = digits.parse().ok()?;
    let value = Seconds::new(n, 10i64.pow(frac.len() as u32));
    Some(if neg { -value } else { value })
}

/// The static frame structure: SOFs at `first_sof + k * frame_duration`,
/// bounded by the horizon (the interval of discourse).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSchedule {
    frame_duration: u64,
    first_sof: Timestamp,
    horizon: Interval,
}

impl FrameSchedule {
    pub fn new(
        frame_duration: u64,
        first_sof: Timestamp,
        horizon: Interval,
    ) -> Result<Self, TimeError> {
        if frame_duration == 0 {
            return Err(TimeError::EmptyFrame);
        }
        if !horizon.contains(first_sof) {
            return Err(TimeError::OutsideHorizon {
                t: first_sof.ticks() as i128,
                horizon,
            });
        }
        Ok(FrameSchedule {
            frame_duration,
            first_sof,
            horizon,
        })
    }

    pub fn frame_duration(&self) -> u64 {
        self.frame_duration
    }

    pub fn first_sof(&self) -> Timestamp {
        self.first_sof
    }

    pub fn horizon(&self) -> Interval {
        self.horizon
    }

    /// Smallest SOF strictly after `t`.
    pub fn next_sof(&self, t: Timestamp) -> Result<Timestamp, TimeError> {
        if !self.horizon.contains(t) {
            return Err(TimeError::OutsideHorizon {
                t: t.ticks() as i128,
                horizon: self.horizon,
            });
        }
        if t < self.first_sof {
            return Ok(self.first_sof);
        }
        let k = (t - self.first_sof) as u64 / self.frame_duration + 1;
        Ok(self.first_sof + k * self.frame_duration)
    }

    pub fn is_sof(&self, t: Timestamp) -> bool {
        self.horizon.contains(t)
            && t >= self.first_sof
            && ((t - self.first_sof) as u64).is_multiple_of(self.frame_duration)
    }

    /// SOFs inside the half-open horizon `[start, end)`.
    pub fn sofs(&self) -> impl Iterator<Item = Timestamp> + '_ {
        let end = self.horizon.end();
        (0u64..)
            .map(move |k| self.first_sof + k * self.frame_duration)
            .take_while(move |&t| t < end)
    }
}
