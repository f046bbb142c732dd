//! Euler characteristics of the isospectral varieties, by three exact routes.
//!
//! For the zero-diagonal family (odd size 2l+1): a Bernoulli-number
//! closed form; l! times the z^l coefficient of -tanh^2(2z); and a
//! binomial convolution of alternating Eulerian sums. For the full
//! Jacobi family (size n): a Bernoulli closed form that must agree with
//! the alternating Eulerian sum psi(n).
//!
//! The l = 0 entry is convention-dependent: the generating function sets
//! chi(M_1) = 0 while the closed form evaluates to 1 (a single point).
//! Both values are exposed; table code annotates the gap.

use thiserror::Error;

use crate::combinatorics::{bernoulli, binomial, factorial, psi, CombinatoricsError};
use crate::rational::{ExactRational, RationalError};
use crate::series::{tanh_series, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChiError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("internal consistency failure: {what} = {value} is not an integer")]
    NonInteger { what: String, value: String },
}

fn expect_integer(value: ExactRational, what: impl Into<String>) -> Result<i128, ChiError> {
    value.as_integer().ok_or_else(|| ChiError::NonInteger {
        what: what.into(),
        value: value.to_string(),
    })
}

/// Closed form for the odd zero-diagonal family:
/// chi(M_{2l+1}) = 2^(2l+2) (2^(l+2) - 1) B_{l+2} / (l+2).
pub fn chi_m_closed(l: u32) -> Result<i128, ChiError> {
    let what = format!("chi_m_closed({l})");
    let pow_a = ExactRational::from_integer(2).checked_pow(2 * l + 2)?;
    let pow_b = ExactRational::from_integer(2)
        .checked_pow(l + 2)?
        .checked_sub(&ExactRational::ONE)?;
    let value = pow_a
        .checked_mul(&pow_b)?
        .checked_mul(&bernoulli(l + 2)?)?
        .checked_div(&ExactRational::from_integer(l as i128 + 2))?;
    expect_integer(value, what)
}

/// Closed form for the Jacobi family:
/// chi(J_n) = (-1)^(n+1) B_{n+1} 2^(n+1) (2^(n+1) - 1) / (n+1).
///
/// Must equal psi(n); the verification suites check that identity.
pub fn chi_j_closed(n: u32) -> Result<i128, ChiError> {
    assert!(n >= 1, "chi_j_closed requires n >= 1");
    let what = format!("chi_j_closed({n})");
    let sign = if n % 2 == 0 { -1 } else { 1 };
    let pow = ExactRational::from_integer(2).checked_pow(n + 1)?;
    let pow_minus = pow.checked_sub(&ExactRational::ONE)?;
    let value = ExactRational::from_integer(sign)
        .checked_mul(&bernoulli(n + 1)?)?
        .checked_mul(&pow)?
        .checked_mul(&pow_minus)?
        .checked_div(&ExactRational::from_integer(n as i128 + 1))?;
    expect_integer(value, what)
}

/// Binomial convolution route:
/// chi(M_{2l+1}) = -2^l sum_{j=1}^{l-1} C(l,j) psi(j) psi(l-j);
/// the empty sum (l <= 1) yields zero.
pub fn chi_m_combinatorial(l: u32) -> Result<i128, ChiError> {
    let what = || format!("chi_m_combinatorial({l})");
    let mut sum: i128 = 0;
    for j in 1..l {
        let psi_left = psi(j)?;
        let psi_right = psi(l - j)?;
        let term = binomial(l, j)?
            .checked_mul(psi_left)
            .and_then(|v| v.checked_mul(psi_right))
            .ok_or_else(|| CombinatoricsError::Overflow { what: what() })?;
        sum = sum
            .checked_add(term)
            .ok_or_else(|| CombinatoricsError::Overflow { what: what() })?;
    }
    let scale = 1i128
        .checked_shl(l)
        .filter(|_| l < 127)
        .ok_or_else(|| CombinatoricsError::Overflow { what: what() })?;
    sum.checked_mul(-scale)
        .ok_or_else(|| CombinatoricsError::Overflow { what: what() }.into())
}

/// Generating-function route: the sequence chi(M_1), chi(M_3), ...,
/// chi(M_{2*l_max+1}) where chi(M_{2l+1}) = l! [z^l] (-tanh^2(2z)).
///
/// Each l! c_l must reduce to an exact integer; anything else signals an
/// implementation bug and is reported as a consistency error.
pub fn chi_m_egf(l_max: u32) -> Result<Vec<i128>, ChiError> {
    let order = l_max as usize;
    let scaled = tanh_series(order)?.scale_argument(ExactRational::from_integer(2))?;
    let neg_square = scaled.mul(&scaled)?.neg()?;
    let mut values = Vec::with_capacity(order + 1);
    for l in 0..=l_max {
        let coeff = neg_square.coefficient(l as usize);
        let value = coeff.checked_mul(&ExactRational::from_integer(factorial(l)?))?;
        values.push(expect_integer(value, format!("chi_m_egf entry l={l}"))?);
    }
    Ok(values)
}
