//! Exact fractions over 128-bit integers with mandatory overflow detection.
//!
//! Every operation either returns the exact reduced result or fails with an
//! explicit error; nothing wraps or rounds. This is enough headroom for the
//! Bernoulli numbers, Eulerian sums, and truncated series this crate needs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("arithmetic overflow in exact rational {op}")]
    Overflow { op: &'static str },
    #[error("exact rational with zero denominator")]
    ZeroDenominator,
    #[error("division of exact rationals by zero")]
    DivisionByZero,
}

/// A fraction in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactRational {
    num: i128,
    den: i128,
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of absolute values; gcd(0, 0) = 1 so division by it is always safe.
fn gcd_i128(a: i128, b: i128) -> u128 {
    let g = gcd_u128(a.unsigned_abs(), b.unsigned_abs());
    if g == 0 {
        1
    } else {
        g
    }
}

impl ExactRational {
    pub const ZERO: ExactRational = ExactRational { num: 0, den: 1 };
    pub const ONE: ExactRational = ExactRational { num: 1, den: 1 };

    /// Build `num/den`, reduced, with the sign carried by the numerator.
    pub fn new(num: i128, den: i128) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = num
                .checked_neg()
                .ok_or(RationalError::Overflow { op: "normalize" })?;
            den = den
                .checked_neg()
                .ok_or(RationalError::Overflow { op: "normalize" })?;
        }
        let g = gcd_i128(num, den) as i128;
        Ok(ExactRational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_integer(n: i128) -> Self {
        ExactRational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The exact integer value, if the reduced denominator is 1.
    pub fn as_integer(&self) -> Option<i128> {
        if self.den == 1 {
            Some(self.num)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(&self, rhs: &ExactRational) -> Result<Self, RationalError> {
        // a/b + c/d over lcm(b, d); reducing by gcd(b, d) first keeps the
        // intermediates as small as possible.
        let op = RationalError::Overflow { op: "add" };
        let g = gcd_i128(self.den, rhs.den) as i128;
        let left = self.num.checked_mul(rhs.den / g).ok_or(op)?;
        let right = rhs.num.checked_mul(self.den / g).ok_or(op)?;
        let num = left.checked_add(right).ok_or(op)?;
        let den = self.den.checked_mul(rhs.den / g).ok_or(op)?;
        Self::new(num, den)
    }

    pub fn checked_sub(&self, rhs: &ExactRational) -> Result<Self, RationalError> {
        self.checked_add(&rhs.checked_neg()?)
    }

    pub fn checked_mul(&self, rhs: &ExactRational) -> Result<Self, RationalError> {
        // Cross-reduce before multiplying so a*d and c*b never grow past
        // what the reduced result needs.
        let op = RationalError::Overflow { op: "mul" };
        let g1 = gcd_i128(self.num, rhs.den) as i128;
        let g2 = gcd_i128(rhs.num, self.den) as i128;
        let num = (self.num / g1).checked_mul(rhs.num / g2).ok_or(op)?;
        let den = (self.den / g2).checked_mul(rhs.den / g1).ok_or(op)?;
        Self::new(num, den)
    }

    pub fn checked_div(&self, rhs: &ExactRational) -> Result<Self, RationalError> {
        if rhs.is_zero() {
            return Err(RationalError::DivisionByZero);
        }
        let op = RationalError::Overflow { op: "div" };
        let inv_num = if rhs.num < 0 {
            rhs.den.checked_neg().ok_or(op)?
        } else {
            rhs.den
        };
        let inv_den = if rhs.num < 0 {
            rhs.num.checked_neg().ok_or(op)?
        } else {
            rhs.num
        };
        self.checked_mul(&ExactRational {
            num: inv_num,
            den: inv_den,
        })
    }

    pub fn checked_neg(&self) -> Result<Self, RationalError> {
        Ok(ExactRational {
            num: self
                .num
                .checked_neg()
                .ok_or(RationalError::Overflow { op: "neg" })?,
            den: self.den,
        })
    }

    /// Exact non-negative integer power.
    pub fn checked_pow(&self, exp: u32) -> Result<Self, RationalError> {
        let mut acc = ExactRational::ONE;
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for ExactRational {
    /// Always renders as `num/den`, e.g. `-1/30` or `3/1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExactRational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: i128 = num_str
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator {num_str:?}: {e}"))?;
        let den: i128 = den_str
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator {den_str:?}: {e}"))?;
        ExactRational::new(num, den).map_err(|e| e.to_string())
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
