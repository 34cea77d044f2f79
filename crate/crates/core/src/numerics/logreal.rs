use std::cmp::Ordering;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Used wherever exact intersection numbers (which overflow `f64` long before
/// the curve index gets interesting) feed into real-valued formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal<F> {
    sign: i8,
    ln_abs: F,
}

impl<F: Float> LogReal<F> {
    pub fn zero() -> Self {
        LogReal {
            sign: 0,
            ln_abs: F::neg_infinity(),
        }
    }

    pub fn one() -> Self {
        Self::from_ln(F::zero())
    }

    /// Positive number `e^ln`.
    pub fn from_ln(ln: F) -> Self {
        LogReal { sign: 1, ln_abs: ln }
    }

    pub fn from_value(x: F) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            LogReal {
                sign: if x > F::zero() { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        match x.sign() {
            Sign::NoSign => Self::zero(),
            s => LogReal {
                sign: if s == Sign::Plus { 1 } else { -1 },
                ln_abs: ln_magnitude(x),
            },
        }
    }

    pub fn from_ratio(q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let num = Self::from_bigint(q.numer());
        let den = Self::from_bigint(q.denom());
        num / den
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln(&self) -> F {
        self.ln_abs
    }

    pub fn value(&self) -> F {
        match self.sign {
            0 => F::zero(),
            1 => self.ln_abs.exp(),
            _ => -self.ln_abs.exp(),
        }
    }

    pub fn powf(self, p: F) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: 1,
            ln_abs: self.ln_abs * p,
        }
    }

    pub fn sqrt(self) -> Self {
        self.powf(F::from(0.5).unwrap())
    }

    pub fn scale(self, c: F) -> Self {
        self * Self::from_value(c)
    }

    pub fn cmp_magnitude(&self, other: &Self) -> Ordering {
        self.ln_abs
            .partial_cmp(&other.ln_abs)
            .unwrap_or(Ordering::Equal)
    }
}

impl<F: Float> Mul for LogReal<F> {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }
}

/// Dividing by zero yields an infinite magnitude.
impl<F: Float> Div for LogReal<F> {
    type Output = Self;

    fn div(self, other: Self) -> Self {
        if self.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: if other.sign < 0 { -self.sign } else { self.sign },
            ln_abs: self.ln_abs - other.ln_abs,
        }
    }
}

/// Log of a sum of positive values, factoring out the largest term.
pub fn log_sum<F: Float>(values: &[LogReal<F>]) -> Result<LogReal<F>> {
    if values.is_empty() {
        return Err(Error::EmptySum);
    }
    if let Some(bad) = values.iter().position(|v| !v.is_positive()) {
        return Err(Error::NonPositiveSummand(bad));
    }
    let top = values
        .iter()
        .map(LogReal::ln)
        .fold(F::neg_infinity(), F::max);
    let rest = values
        .iter()
        .map(|v| (v.ln() - top).exp())
        .fold(F::zero(), |a, b| a + b);
    Ok(LogReal::from_ln(top + rest.ln()))
}

/// Sum of nonnegative values in the log domain; zeros are skipped.
pub fn log_sum_nonnegative<F: Float>(values: &[LogReal<F>]) -> LogReal<F> {
    let positive: Vec<_> = values.iter().copied().filter(|v| v.sign != 0).collect();
    if positive.is_empty() {
        return LogReal::zero();
    }
    log_sum(&positive).unwrap_or_else(|_| LogReal::zero())
}

fn ln_magnitude<F: Float>(x: &BigInt) -> F {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x.magnitude() >> shift).to_f64().unwrap_or(f64::INFINITY);
    F::from(top.ln() + shift as f64 * std::f64::consts::LN_2).unwrap()
}

/// `f64` approximation of a rational whose numerator and denominator may
/// each lie far outside `f64` range.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    LogReal::<f64>::from_ratio(q).value()
}

/// Natural log of a positive big integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    LogReal::<f64>::from_bigint(x).ln()
}
