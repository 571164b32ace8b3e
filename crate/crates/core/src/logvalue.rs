//! Nonnegative reals stored by their natural logarithm.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

/// A nonnegative quantity `x` stored as `ln x`, with an explicit zero state.
///
/// Multiplication and division are exact shifts of the log magnitude;
/// addition goes through a two-term log-sum-exp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogValue {
    Zero,
    Finite(f64),
}

impl LogValue {
    pub const ONE: LogValue = LogValue::Finite(0.0);

    /// Wraps a log magnitude. `-inf` maps to [`LogValue::Zero`].
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            LogValue::Zero
        } else {
            debug_assert!(!ln.is_nan(), "NaN log magnitude");
            LogValue::Finite(ln)
        }
    }

    /// Panics on negative or NaN input.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0, "LogValue::from_linear on negative or NaN value {x}");
        if x == 0.0 {
            LogValue::Zero
        } else {
            LogValue::Finite(x.ln())
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, LogValue::Zero)
    }

    /// Log magnitude, `-inf` for zero.
    pub fn ln(self) -> f64 {
        match self {
            LogValue::Zero => f64::NEG_INFINITY,
            LogValue::Finite(l) => l,
        }
    }

    /// Linear-scale value; underflows to 0.0 for very negative logs.
    pub fn exp(self) -> f64 {
        match self {
            LogValue::Zero => 0.0,
            LogValue::Finite(l) => l.exp(),
        }
    }

    /// `self^p` for real `p > 0`.
    pub fn powf(self, p: f64) -> Self {
        match self {
            LogValue::Zero => LogValue::Zero,
            LogValue::Finite(l) => LogValue::Finite(l * p),
        }
    }

    /// Clamps a probability-like value to at most one, for display.
    pub fn clamp_to_one(self) -> Self {
        match self {
            LogValue::Finite(l) if l > 0.0 => LogValue::ONE,
            v => v,
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;

    /// Log-sum-exp of two values.
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (LogValue::Zero, v) | (v, LogValue::Zero) => v,
            (LogValue::Finite(a), LogValue::Finite(b)) => {
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                LogValue::Finite(hi + (lo - hi).exp().ln_1p())
            }
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (LogValue::Finite(a), LogValue::Finite(b)) => LogValue::Finite(a + b),
            _ => LogValue::Zero,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;

    /// Panics when dividing by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        match (self, rhs) {
            (_, LogValue::Zero) => panic!("LogValue division by zero"),
            (LogValue::Zero, _) => LogValue::Zero,
            (LogValue::Finite(a), LogValue::Finite(b)) => LogValue::Finite(a - b),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln().partial_cmp(&other.ln())
    }
}

impl fmt::Display for LogValue {
    /// Writes the log magnitude; zero prints as `-inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogValue::Zero => f.write_str("-inf"),
            LogValue::Finite(l) => write!(f, "{l}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_absorbing_for_mul_and_neutral_for_add() {
        let a = LogValue::from_linear(3.0);
        assert_eq!(a * LogValue::Zero, LogValue::Zero);
        assert_eq!(a + LogValue::Zero, a);
        assert_eq!(LogValue::Zero + LogValue::Zero, LogValue::Zero);
    }

    #[test]
    fn add_matches_linear_sum() {
        let s = LogValue::from_linear(2.0) + LogValue::from_linear(3.0);
        assert!((s.exp() - 5.0).abs() < 1e-14);
        // no overflow far outside double range
        let big = LogValue::Finite(2000.0) + LogValue::Finite(2000.0);
        assert!((big.ln() - (2000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ordering_puts_zero_first() {
        assert!(LogValue::Zero < LogValue::Finite(-1e300));
        assert!(LogValue::Finite(-1.0) < LogValue::ONE);
    }

    #[test]
    fn display_marks_zero() {
        assert_eq!(LogValue::Zero.to_string(), "-inf");
        assert_eq!(LogValue::ONE.to_string(), "0");
    }
}
