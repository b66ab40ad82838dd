//! Dimensioned values.
//!
//! A [`Dimension`] is an integer exponent vector over the seven SI base units.
//! A [`Quantity`] pairs a finite `f64` with a dimension and an optional
//! grounding label naming the physical concept the value stands for. The
//! label is carried along for humans and for the consistency oracle; it never
//! takes part in arithmetic.

use std::fmt;
use std::ops::{Div, Mul, Neg};

use thiserror::Error;

const SYMBOLS: [&str; 7] = ["m", "kg", "s", "A", "K", "mol", "cd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension([i32; 7]);

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension([0; 7]);
    pub const METRE: Dimension = Dimension([1, 0, 0, 0, 0, 0, 0]);
    pub const KILOGRAM: Dimension = Dimension([0, 1, 0, 0, 0, 0, 0]);
    pub const SECOND: Dimension = Dimension([0, 0, 1, 0, 0, 0, 0]);
    pub const METRE_PER_SECOND: Dimension = Dimension([1, 0, -1, 0, 0, 0, 0]);
    pub const METRE_PER_SECOND_SQUARED: Dimension = Dimension([1, 0, -2, 0, 0, 0, 0]);

    pub const fn new(exponents: [i32; 7]) -> Self {
        Dimension(exponents)
    }

    pub fn exponents(&self) -> [i32; 7] {
        self.0
    }

    pub fn is_dimensionless(&self) -> bool {
        self.0 == [0; 7]
    }

    pub fn powi(self, power: i32) -> Dimension {
        Dimension(self.0.map(|e| e * power))
    }

    pub fn recip(self) -> Dimension {
        self.powi(-1)
    }

    /// Exponent of the second.
    pub fn time_exponent(&self) -> i32 {
        self.0[2]
    }
}

// Dimensions multiply by adding exponents.
impl Mul for Dimension {
    type Output = Dimension;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Dimension) -> Dimension {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Dimension(out)
    }
}

impl Div for Dimension {
    type Output = Dimension;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Dimension) -> Dimension {
        self * rhs.recip()
    }
}

/// `m^a·kg^b·s^c·…` with zero exponents elided and `^1` omitted; `1` for a
/// dimensionless value.
impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (sym, &exp) in SYMBOLS.iter().zip(self.0.iter()) {
            if exp == 0 {
                continue;
            }
            if !first {
                f.write_str("·")?;
            }
            first = false;
            if exp == 1 {
                f.write_str(sym)?;
            } else {
                write!(f, "{sym}^{exp}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Dimension of a product of powers, e.g. `[(m/s, 2), (m, -1)]` is `m/s²`.
pub fn dimension_of_formula(factors: &[(Dimension, i32)]) -> Dimension {
    factors
        .iter()
        .fold(Dimension::DIMENSIONLESS, |acc, &(d, p)| acc * d.powi(p))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantityError {
    #[error("dimension mismatch: [{left}] vs [{right}]")]
    DimensionMismatch { left: Dimension, right: Dimension },
    #[error("singular operation: {0}")]
    Singularity(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    value: f64,
    dimension: Dimension,
    grounding: Option<String>,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Result<Self, QuantityError> {
        if !value.is_finite() {
            return Err(QuantityError::NonFinite(value));
        }
        Ok(Quantity {
            value,
            dimension,
            grounding: None,
        })
    }

    pub fn dimensionless(value: f64) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    pub fn metres(value: f64) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::METRE)
    }

    pub fn metres_per_second(value: f64) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::METRE_PER_SECOND)
    }

    pub fn metres_per_second_squared(value: f64) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::METRE_PER_SECOND_SQUARED)
    }

    pub fn seconds(value: f64) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::SECOND)
    }

    pub fn grounded(mut self, label: impl Into<String>) -> Self {
        self.grounding = Some(label.into());
        self
    }

    pub fn ungrounded(mut self) -> Self {
        self.grounding = None;
        self
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn grounding(&self) -> Option<&str> {
        self.grounding.as_deref()
    }

    fn same_dimension(&self, other: &Quantity) -> Result<(), QuantityError> {
        if self.dimension != other.dimension {
            return Err(QuantityError::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.same_dimension(other)?;
        Quantity::new(self.value + other.value, self.dimension)
    }

    pub fn checked_sub(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        self.same_dimension(other)?;
        Quantity::new(self.value - other.value, self.dimension)
    }

    pub fn checked_mul(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        Quantity::new(self.value * other.value, self.dimension * other.dimension)
    }

    pub fn checked_div(&self, other: &Quantity) -> Result<Quantity, QuantityError> {
        if other.value == 0.0 {
            return Err(QuantityError::Singularity(format!(
                "division of [{}] by zero [{}]",
                self.dimension, other.dimension
            )));
        }
        Quantity::new(self.value / other.value, self.dimension / other.dimension)
    }

    pub fn powi(&self, power: i32) -> Result<Quantity, QuantityError> {
        if power < 0 && self.value == 0.0 {
            return Err(QuantityError::Singularity(format!(
                "zero [{}] raised to {power}",
                self.dimension
            )));
        }
        Quantity::new(self.value.powi(power), self.dimension.powi(power))
    }

    /// Square root; every exponent of the dimension must be even.
    pub fn sqrt(&self) -> Result<Quantity, QuantityError> {
        let exps = self.dimension.exponents();
        if exps.iter().any(|e| e % 2 != 0) {
            return Err(QuantityError::Singularity(format!(
                "square root of [{}] has no integer dimension",
                self.dimension
            )));
        }
        if self.value < 0.0 {
            return Err(QuantityError::Singularity(format!(
                "square root of negative value {}",
                self.value
            )));
        }
        Quantity::new(self.value.sqrt(), Dimension(exps.map(|e| e / 2)))
    }

    /// Multiplies by a pure number.
    pub fn scale(&self, factor: f64) -> Result<Quantity, QuantityError> {
        Quantity::new(self.value * factor, self.dimension)
    }
}

impl Neg for Quantity {
    type Output = Quantity;

    fn neg(mut self) -> Quantity {
        self.value = -self.value;
        self
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.value, self.dimension)
    }
}

/// `x` with six significant digits, formatted like C's `%g`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
