//! Truncated power series with exact rational coefficients.
//!
//! All arithmetic (sum, product, composition with a zero-constant-term
//! inner series, division by a unit) is exact and truncates at the series
//! order. Used to expand tanh and its relatives so that coefficient
//! identities can be checked as exact integers, not floats.

use thiserror::Error;

use crate::rational::{ExactRational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("series composition requires the inner series to have zero constant term")]
    CompositionConstantTerm,
    #[error("series division requires a divisor with nonzero constant term")]
    DivisorNotUnit,
}

/// Coefficients indexed 0..=order of a truncated Maclaurin series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<ExactRational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![ExactRational::ZERO; order + 1],
        }
    }

    pub fn constant(value: ExactRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// Takes ownership of the coefficient list; order = len - 1.
    pub fn from_coefficients(coeffs: Vec<ExactRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, n: usize) -> ExactRational {
        self.coeffs[n]
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        let order = self.order().min(rhs.order());
        let mut coeffs = Vec::with_capacity(order + 1);
        for n in 0..=order {
            coeffs.push(self.coeffs[n].checked_add(&rhs.coeffs[n])?);
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn neg(&self) -> Result<PowerSeries, SeriesError> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.checked_neg()?);
        }
        Ok(PowerSeries { coeffs })
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, rhs: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![ExactRational::ZERO; order + 1];
        for (n, slot) in coeffs.iter_mut().enumerate() {
            let mut acc = ExactRational::ZERO;
            for i in 0..=n {
                let term = self.coeffs[i].checked_mul(&rhs.coeffs[n - i])?;
                acc = acc.checked_add(&term)?;
            }
            *slot = acc;
        }
        Ok(PowerSeries { coeffs })
    }

    /// Substitute z -> factor * z: the n-th coefficient picks up factor^n.
    pub fn scale_argument(&self, factor: ExactRational) -> Result<PowerSeries, SeriesError> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut power = ExactRational::ONE;
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                power = power.checked_mul(&factor)?;
            }
            coeffs.push(c.checked_mul(&power)?);
        }
        Ok(PowerSeries { coeffs })
    }

    /// Composition self(inner); inner must have zero constant term.
    pub fn compose(&self, inner: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        if !inner.coefficient(0).is_zero() {
            return Err(SeriesError::CompositionConstantTerm);
        }
        let order = self.order().min(inner.order());
        // Horner from the top coefficient down.
        let mut acc = PowerSeries::constant(self.coeffs[order], order);
        for n in (0..order).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] = acc.coeffs[0].checked_add(&self.coeffs[n])?;
        }
        Ok(acc)
    }

    /// Exact division; the divisor's constant term must be nonzero.
    pub fn div(&self, rhs: &PowerSeries) -> Result<PowerSeries, SeriesError> {
        let b0 = rhs.coefficient(0);
        if b0.is_zero() {
            return Err(SeriesError::DivisorNotUnit);
        }
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![ExactRational::ZERO; order + 1];
        for n in 0..=order {
            let mut acc = self.coeffs[n];
            for j in 1..=n {
                let term = rhs.coeffs[j].checked_mul(&coeffs[n - j])?;
                acc = acc.checked_sub(&term)?;
            }
            coeffs[n] = acc.checked_div(&b0)?;
        }
        Ok(PowerSeries { coeffs })
    }
}

/// Maclaurin series of sinh z to the given order.
pub fn sinh_series(order: usize) -> Result<PowerSeries, SeriesError> {
    let mut coeffs = vec![ExactRational::ZERO; order + 1];
    let mut inv_fact = ExactRational::ONE;
    for n in 1..=order {
        inv_fact = inv_fact.checked_div(&ExactRational::from_integer(n as i128))?;
        if n % 2 == 1 {
            coeffs[n] = inv_fact;
        }
    }
    Ok(PowerSeries::from_coefficients(coeffs))
}

/// Maclaurin series of cosh z to the given order.
pub fn cosh_series(order: usize) -> Result<PowerSeries, SeriesError> {
    let mut coeffs = vec![ExactRational::ZERO; order + 1];
    coeffs[0] = ExactRational::ONE;
    let mut inv_fact = ExactRational::ONE;
    for n in 1..=order {
        inv_fact = inv_fact.checked_div(&ExactRational::from_integer(n as i128))?;
        if n % 2 == 0 {
            coeffs[n] = inv_fact;
        }
    }
    Ok(PowerSeries::from_coefficients(coeffs))
}

/// Maclaurin series of tanh z to the given order, as the exact division
/// of the truncated sinh and cosh series.
///
/// ```
/// use isoflow_core::rational::ExactRational;
/// use isoflow_core::series::tanh_series;
///
/// let t = tanh_series(5).unwrap();
/// assert_eq!(t.coefficient(3), ExactRational::new(-1, 3).unwrap());
/// assert_eq!(t.coefficient(5), ExactRational::new(2, 15).unwrap());
/// ```
pub fn tanh_series(order: usize) -> Result<PowerSeries, SeriesError> {
    sinh_series(order)?.div(&cosh_series(order)?)
}
