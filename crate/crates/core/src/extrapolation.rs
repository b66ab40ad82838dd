//! Sensor time series and Taylor extrapolation to a future instant.
//!
//! Derivatives are taken from the backward interpolating polynomial through
//! the newest `k + 1` samples (Newton divided differences, so uneven spacing
//! is fine). For even spacing the top-order estimates reduce to the familiar
//! backward differences `(f_n - f_{n-1}) / Δt` and
//! `(f_n - 2 f_{n-1} + f_{n-2}) / Δt²`. Extrapolating with all derivatives of
//! the same interpolant makes the expansion exact for polynomials of degree
//! up to `k`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::itom::{Itom, Term};
use crate::quantity::{Dimension, Quantity, QuantityError};
use crate::time::{ClockSpec, Interval, Seconds, Timestamp};

pub const MAX_ORDER: usize = 2;
pub const DEFAULT_CAPACITY: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("sample dimension [{found}] does not match series dimension [{expected}]")]
    DimensionMismatch {
        expected: Dimension,
        found: Dimension,
    },
    #[error("sample at {got} is not after the newest sample at {newest}")]
    OutOfOrder { newest: Timestamp, got: Timestamp },
    #[error("derivative of order {order} needs {needed} samples, {available} recorded")]
    InsufficientHistory {
        order: usize,
        needed: usize,
        available: usize,
    },
    #[error("extrapolation order {0} is not supported (maximum {MAX_ORDER})")]
    UnsupportedOrder(usize),
    #[error("cannot extrapolate backwards from {newest} to {target}")]
    BackwardTarget {
        newest: Timestamp,
        target: Timestamp,
    },
    #[error("series capacity must be positive")]
    ZeroCapacity,
    #[error(transparent)]
    Quantity(#[from] QuantityError),
}

/// A bounded ring of `(timestamp, value)` samples of one grounded quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    grounding: String,
    dimension: Dimension,
    capacity: usize,
    granule: Seconds,
    samples: VecDeque<(Timestamp, Quantity)>,
}

impl TimeSeries {
    pub fn new(
        grounding: impl Into<String>,
        dimension: Dimension,
        capacity: usize,
        clock: &ClockSpec,
    ) -> Result<Self, SeriesError> {
        if capacity == 0 {
            return Err(SeriesError::ZeroCapacity);
        }
        Ok(TimeSeries {
            grounding: grounding.into(),
            dimension,
            capacity,
            granule: clock.granule(),
            samples: VecDeque::with_capacity(capacity),
        })
    }

    pub fn grounding(&self) -> &str {
        &self.grounding
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = &(Timestamp, Quantity)> {
        self.samples.iter()
    }

    pub fn newest(&self) -> Option<&(Timestamp, Quantity)> {
        self.samples.back()
    }

    /// Appends a sample, evicting the oldest one when full. The stored value
    /// takes the series grounding.
    pub fn record_sample(&mut self, t: Timestamp, q: Quantity) -> Result<(), SeriesError> {
        if q.dimension() != self.dimension {
            return Err(SeriesError::DimensionMismatch {
                expected: self.dimension,
                found: q.dimension(),
            });
        }
        if let Some(&(newest, _)) = self.samples.back() {
            if t <= newest {
                return Err(SeriesError::OutOfOrder { newest, got: t });
            }
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples
            .push_back((t, q.grounded(self.grounding.clone())));
        Ok(())
    }

    fn seconds_between(&self, from: Timestamp, to: Timestamp) -> f64 {
        use num_traits::ToPrimitive;
        (self.granule * Seconds::from_integer(to - from))
            .to_f64()
            .expect("span fits in f64")
    }

    fn interpolant(&self, order: usize) -> Result<BackwardInterpolant, SeriesError> {
        if order > MAX_ORDER {
            return Err(SeriesError::UnsupportedOrder(order));
        }
        let needed = order + 1;
        if self.samples.len() < needed {
            return Err(SeriesError::InsufficientHistory {
                order,
                needed,
                available: self.samples.len(),
            });
        }
        let &(newest, _) = self.samples.back().expect("non-empty");
        let points: Vec<(f64, f64)> = self
            .samples
            .iter()
            .rev()
            .take(needed)
            .map(|(t, q)| (self.seconds_between(newest, *t), q.value()))
            .collect();
        Ok(BackwardInterpolant::through(&points))
    }

    /// Estimate of the `order`-th time derivative at the newest sample.
    pub fn estimate_derivative(&self, order: usize) -> Result<DerivativeEstimate, SeriesError> {
        let interp = self.interpolant(order)?;
        let value = Quantity::new(
            interp.derivative(order),
            self.dimension / Dimension::SECOND.powi(order as i32),
        )?;
        Ok(DerivativeEstimate {
            order,
            value,
            stencil_width: order + 1,
        })
    }

    /// Taylor expansion of order `order` about the newest sample, evaluated at
    /// `target`.
    pub fn extrapolate_value(
        &self,
        target: Timestamp,
        order: usize,
    ) -> Result<Quantity, SeriesError> {
        let interp = self.interpolant(order)?;
        let &(newest, _) = self.samples.back().expect("non-empty");
        if target < newest {
            return Err(SeriesError::BackwardTarget { newest, target });
        }
        let h = Quantity::seconds(self.seconds_between(newest, target))?;
        let mut sum = Quantity::new(0.0, self.dimension)?;
        let mut factorial = 1.0;
        for j in 0..=order {
            if j > 0 {
                factorial *= j as f64;
            }
            let derivative = Quantity::new(
                interp.derivative(j),
                self.dimension / Dimension::SECOND.powi(j as i32),
            )?;
            // [base / s^j] * [s^j] must cancel back to [base]
            let term = derivative
                .checked_mul(&h.powi(j as i32)?)?
                .scale(1.0 / factorial)?;
            sum = sum.checked_add(&term)?;
        }
        Ok(sum.grounded(self.grounding.clone()))
    }

    /// Extrapolated value wrapped as a point item valid at `target`.
    pub fn extrapolate(&self, target: Timestamp, order: usize) -> Result<Itom, SeriesError> {
        let value = self.extrapolate_value(target, order)?;
        Ok(Itom::new(
            Interval::point(target),
            Term::name(self.grounding.clone()),
            Term::name("is"),
            value.into(),
        )
        .with_provenance(format!("extrapolated(order={order})")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    pub order: usize,
    pub value: Quantity,
    pub stencil_width: usize,
}

/// Newton-form polynomial through points given as `(u, f)` with `u` the
/// offset in seconds from the newest sample (`u_0 = 0`), expanded into
/// monomials in `u`.
struct BackwardInterpolant {
    monomials: Vec<f64>,
}

impl BackwardInterpolant {
    fn through(points: &[(f64, f64)]) -> Self {
        let n = points.len();
        let u: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut table: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut newton = vec![table[0]];
        for level in 1..n {
            for i in 0..n - level {
                table[i] = (table[i] - table[i + 1]) / (u[i] - u[i + level]);
            }
            newton.push(table[0]);
        }

        let mut monomials = vec![0.0; n];
        let mut basis = vec![1.0];
        for (j, c) in newton.iter().enumerate() {
            for (m, b) in monomials.iter_mut().zip(&basis) {
                *m += c * b;
            }
            if j + 1 < n {
                // basis *= (u - u_j)
                let mut next = vec![0.0; basis.len() + 1];
                for (k, b) in basis.iter().enumerate() {
                    next[k + 1] += b;
                    next[k] -= b * u[j];
                }
                basis = next;
            }
        }
        BackwardInterpolant { monomials }
    }

    /// `j`-th derivative at `u = 0`.
    fn derivative(&self, j: usize) -> f64 {
        let factorial: f64 = (1..=j).map(|i| i as f64).product();
        self.monomials.get(j).copied().unwrap_or(0.0) * factorial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: &[(u64, f64)], clock: &ClockSpec, capacity: usize) -> TimeSeries {
        let mut ts = TimeSeries::new(
            "distance of car from rock",
            Dimension::METRE,
            capacity,
            clock,
        )
        .unwrap();
        for &(t, v) in points {
            ts.record_sample(Timestamp::new(t), Quantity::metres(v).unwrap())
                .unwrap();
        }
        ts
    }

    #[test]
    fn record_keeps_the_newest_within_capacity() {
        let clock = ClockSpec::seconds();
        let one = series(&[(0, 100.0)], &clock, 2);
        assert_eq!(one.len(), 1);
        let ring = series(&[(0, 1.0), (1, 2.0), (2, 3.0)], &clock, 2);
        assert_eq!(ring.len(), 2);
        assert_eq!(ring.samples().next().unwrap().0, Timestamp::new(1));
    }

    #[test]
    fn record_rejects_out_of_order_and_foreign_dimension() {
        let clock = ClockSpec::seconds();
        let mut ts = series(&[(5, 1.0)], &clock, 4);
        assert!(matches!(
            ts.record_sample(Timestamp::new(5), Quantity::metres(2.0).unwrap()),
            Err(SeriesError::OutOfOrder { .. })
        ));
        assert!(matches!(
            ts.record_sample(Timestamp::new(6), Quantity::seconds(2.0).unwrap()),
            Err(SeriesError::DimensionMismatch { .. })
        ));
        assert_eq!(ts.len(), 1);
    }

    #[test]
    fn closing_distance_gives_negative_speed() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(39595, 125.0), (39596, 100.0)], &clock, 8);
        let d = ts.estimate_derivative(1).unwrap();
        assert_eq!(d.value.value(), -25.0);
        assert_eq!(d.value.dimension(), Dimension::METRE_PER_SECOND);
        assert_eq!(d.stencil_width, 2);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, 7.0), (1, 7.0), (2, 7.0)], &clock, 8);
        assert_eq!(ts.estimate_derivative(1).unwrap().value.value(), 0.0);
    }

    #[test]
    fn second_derivative_of_t_squared() {
        // f(t) = t² sampled at 0, 1, 2 s: divided difference f[2,1,0] = 1, so f'' = 2
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, 0.0), (1, 1.0), (2, 4.0)], &clock, 8);
        let d = ts.estimate_derivative(2).unwrap();
        assert_eq!(d.value.value(), 2.0);
        assert_eq!(d.value.dimension(), Dimension::METRE_PER_SECOND_SQUARED);
        assert_eq!(ts.estimate_derivative(0).unwrap().value.value(), 4.0);
    }

    #[test]
    fn insufficient_history_reports_counts() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, 1.0)], &clock, 8);
        assert_eq!(
            ts.estimate_derivative(2).unwrap_err(),
            SeriesError::InsufficientHistory {
                order: 2,
                needed: 3,
                available: 1
            }
        );
        assert_eq!(
            ts.estimate_derivative(3).unwrap_err(),
            SeriesError::UnsupportedOrder(3)
        );
    }

    #[test]
    fn first_order_distance_extrapolation() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(39595, 125.0), (39596, 100.0)], &clock, 8);
        let item = ts.extrapolate(Timestamp::new(39597), 1).unwrap();
        assert_eq!(item.v_time(), Interval::point(Timestamp::new(39597)));
        let q = item.value().unwrap();
        assert_eq!(q.value(), 75.0);
        assert_eq!(q.dimension(), Dimension::METRE);
        assert_eq!(q.grounding(), Some("distance of car from rock"));
        assert_eq!(item.provenance(), Some("extrapolated(order=1)"));
    }

    #[test]
    fn zero_width_expansion_returns_newest() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, 3.0), (1, 5.0), (2, 11.0)], &clock, 8);
        for k in 0..=2 {
            assert_eq!(
                ts.extrapolate_value(Timestamp::new(2), k).unwrap().value(),
                11.0
            );
        }
    }

    #[test]
    fn quadratic_is_reproduced_at_second_order() {
        // s(t) = 100 - 25 t + 1.5 t²: s(0) = 100, s(1) = 76.5, s(2) = 56, s(4) = 24
        let s = |t: f64| 100.0 - 25.0 * t + 1.5 * t * t;
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, s(0.0)), (1, s(1.0)), (2, s(2.0))], &clock, 8);
        let v = ts.extrapolate_value(Timestamp::new(4), 2).unwrap().value();
        assert!((v - 24.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn backward_target_is_rejected() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(3, 1.0), (4, 2.0)], &clock, 8);
        assert!(matches!(
            ts.extrapolate(Timestamp::new(3), 1),
            Err(SeriesError::BackwardTarget { .. })
        ));
    }

    #[test]
    fn order_zero_error_on_a_cruise_is_speed_times_lead() {
        let clock = ClockSpec::seconds();
        let ts = series(&[(0, 125.0), (1, 100.0)], &clock, 8);
        for lead in 1..5u64 {
            let truth = 100.0 - 25.0 * lead as f64;
            let zero = ts
                .extrapolate_value(Timestamp::new(1 + lead), 0)
                .unwrap()
                .value();
            let one = ts
                .extrapolate_value(Timestamp::new(1 + lead), 1)
                .unwrap()
                .value();
            assert_eq!((zero - truth).abs(), 25.0 * lead as f64);
            assert_eq!(one, truth);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly(c: &[f64], t: f64) -> f64 {
            c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn expansion_is_exact_for_low_degree_polynomials(
                degree in 0usize..=2,
                coeffs in proptest::collection::vec(-100.0f64..100.0, 3),
                gaps in proptest::collection::vec(1u64..20, 2),
                start in 0u64..1000,
                lead in 0u64..60,
                tenth in any::<bool>(),
            ) {
                let clock = if tenth {
                    ClockSpec::new(Seconds::new(1, 10), None).unwrap()
                } else {
                    ClockSpec::seconds()
                };
                let c = &coeffs[..=degree];
                let g = clock.span_secs(1);
                let mut times = vec![start];
                for gap in &gaps[..degree] {
                    times.push(times.last().unwrap() + gap);
                }
                let points: Vec<(u64, f64)> =
                    times.iter().map(|&t| (t, poly(c, t as f64 * g))).collect();
                let ts = series(&points, &clock, 8);
                let target = times.last().unwrap() + lead;
                let got = ts.extrapolate_value(Timestamp::new(target), degree).unwrap();
                let want = poly(c, target as f64 * g);
                let scale = c.iter().map(|a| a.abs()).sum::<f64>()
                    * (target as f64 * g).abs().max(1.0).powi(degree as i32);
                prop_assert!((got.value() - want).abs() <= 1e-9 * want.abs().max(scale),
                    "got {} want {}", got.value(), want);
                prop_assert_eq!(got.dimension(), Dimension::METRE);
            }
        }
    }
}
