//! Exact integer combinatorics: factorials, binomials, Bernoulli numbers,
//! Eulerian numbers, and the alternating Eulerian sum.
//!
//! Everything is computed in checked 128-bit arithmetic; overflow is an
//! explicit error naming the quantity that failed, never a wrap.

use thiserror::Error;

use crate::rational::{ExactRational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("arithmetic overflow computing {what}")]
    Overflow { what: String },
}

fn overflow(what: impl Into<String>) -> CombinatoricsError {
    CombinatoricsError::Overflow { what: what.into() }
}

pub fn factorial(n: u32) -> Result<i128, CombinatoricsError> {
    let mut acc: i128 = 1;
    for i in 2..=n as i128 {
        acc = acc.checked_mul(i).ok_or_else(|| overflow(format!("{n}!")))?;
    }
    Ok(acc)
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: u32, k: u32) -> Result<i128, CombinatoricsError> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    // Multiply (n-k+i)/i stepwise; each division is exact because the
    // running product is C(n-k+i, i).
    for i in 1..=k as i128 {
        acc = acc
            .checked_mul(n as i128 - k as i128 + i)
            .ok_or_else(|| overflow(format!("C({n},{k})")))?
            / i;
    }
    Ok(acc)
}

/// The n-th Bernoulli number in the convention where B_1 = -1/2.
///
/// Computed from the defining recurrence sum_{k=0}^{n} C(n+1,k) B_k = 0
/// with B_0 = 1; overflow of the 128-bit rationals reports the failing n.
pub fn bernoulli(n: u32) -> Result<ExactRational, CombinatoricsError> {
    let ctx = |_e: RationalError| overflow(format!("bernoulli({n})"));
    let mut table: Vec<ExactRational> = Vec::with_capacity(n as usize + 1);
    table.push(ExactRational::ONE);
    for m in 1..=n {
        let mut sum = ExactRational::ZERO;
        for (k, b_k) in table.iter().enumerate() {
            let c = binomial(m + 1, k as u32)?;
            let term = ExactRational::from_integer(c)
                .checked_mul(b_k)
                .map_err(ctx)?;
            sum = sum.checked_add(&term).map_err(ctx)?;
        }
        let b_m = sum
            .checked_div(&ExactRational::from_integer(-(m as i128 + 1)))
            .map_err(ctx)?;
        table.push(b_m);
    }
    Ok(table[n as usize])
}

/// Eulerian number: permutations of n elements with exactly k ascents.
///
/// Recurrence E(n,k) = (k+1) E(n-1,k) + (n-k) E(n-1,k-1), E(0,0) = 1;
/// zero outside 0 <= k < max(n, 1).
pub fn eulerian(n: u32, k: i64) -> Result<i128, CombinatoricsError> {
    if k < 0 || k >= (n as i64).max(1) {
        return Ok(0);
    }
    Ok(eulerian_row(n)?[k as usize])
}

/// The full row (E(n,0), ..., E(n, max(n,1)-1)).
pub fn eulerian_row(n: u32) -> Result<Vec<i128>, CombinatoricsError> {
    let mut row: Vec<i128> = vec![1];
    for m in 2..=n as i128 {
        let mut next = vec![0i128; m as usize];
        for (k, &v) in row.iter().enumerate() {
            let k = k as i128;
            let what = || format!("eulerian({n},_)");
            next[k as usize] = next[k as usize]
                .checked_add(v.checked_mul(k + 1).ok_or_else(|| overflow(what()))?)
                .ok_or_else(|| overflow(what()))?;
            next[k as usize + 1] = next[k as usize + 1]
                .checked_add(v.checked_mul(m - 1 - k).ok_or_else(|| overflow(what()))?)
                .ok_or_else(|| overflow(what()))?;
        }
        row = next;
    }
    Ok(row)
}

/// Alternating Eulerian sum: sum_m (-1)^m E(n, m).
pub fn psi(n: u32) -> Result<i128, CombinatoricsError> {
    let mut acc: i128 = 0;
    for (m, v) in eulerian_row(n)?.into_iter().enumerate() {
        let signed = if m % 2 == 0 { v } else { -v };
        acc = acc
            .checked_add(signed)
            .ok_or_else(|| overflow(format!("psi({n})")))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: histogram of ascent counts over all of S_n,
    /// generated by explicit enumeration.
    fn ascent_histogram(n: usize) -> Vec<i128> {
        fn permutations(items: &mut Vec<usize>, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if items.is_empty() {
                out.push(chosen.clone());
                return;
            }
            for i in 0..items.len() {
                let v = items.remove(i);
                chosen.push(v);
                permutations(items, chosen, out);
                chosen.pop();
                items.insert(i, v);
            }
        }
        let mut perms = Vec::new();
        permutations(&mut (1..=n).collect(), &mut Vec::new(), &mut perms);
        let mut hist = vec![0i128; n.max(1)];
        for p in perms {
            let ascents = p.windows(2).filter(|w| w[0] < w[1]).count();
            hist[ascents] += 1;
        }
        hist
    }

    #[test]
    fn factorial_and_binomial_basics() {
        assert_eq!(factorial(0).unwrap(), 1);
        assert_eq!(factorial(5).unwrap(), 120);
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(4, 5).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
    }

    #[test]
    fn binomial_overflow_is_detected() {
        assert!(matches!(
            binomial(200, 100),
            Err(CombinatoricsError::Overflow { .. })
        ));
    }

    #[test]
    fn bernoulli_small_values() {
        let r = |n, d| ExactRational::new(n, d).unwrap();
        assert_eq!(bernoulli(0).unwrap(), r(1, 1));
        assert_eq!(bernoulli(1).unwrap(), r(-1, 2));
        assert_eq!(bernoulli(2).unwrap(), r(1, 6));
        assert_eq!(bernoulli(3).unwrap(), r(0, 1));
        assert_eq!(bernoulli(4).unwrap(), r(-1, 30));
        assert_eq!(bernoulli(6).unwrap(), r(1, 42));
        assert_eq!(bernoulli(12).unwrap(), r(-691, 2730));
    }

    #[test]
    fn bernoulli_overflow_names_the_argument() {
        match bernoulli(200) {
            Err(CombinatoricsError::Overflow { what }) => {
                assert!(what.contains("bernoulli(200)") || what.contains("C("), "{what}");
            }
            Ok(v) => panic!("expected overflow, got {v}"),
        }
    }

    #[test]
    fn eulerian_and_psi_overflow_loudly() {
        assert!(matches!(
            eulerian_row(40),
            Err(CombinatoricsError::Overflow { .. })
        ));
        assert!(matches!(psi(40), Err(CombinatoricsError::Overflow { .. })));
    }

    #[test]
    fn odd_bernoulli_numbers_vanish() {
        for n in (3..=29).step_by(2) {
            assert!(
                bernoulli(n).unwrap().is_zero(),
                "B_{n} should be zero"
            );
        }
    }

    #[test]
    fn eulerian_matches_brute_force_enumeration() {
        for n in 0..=6 {
            let expected = ascent_histogram(n);
            let got = eulerian_row(n as u32).unwrap();
            assert_eq!(got, expected, "Eulerian row n={n}");
        }
    }

    #[test]
    fn eulerian_spec_values() {
        assert_eq!(eulerian(3, 1).unwrap(), 4);
        assert_eq!(eulerian(4, 0).unwrap(), 1);
        assert_eq!(eulerian(4, 1).unwrap(), 11);
        assert_eq!(eulerian(0, 0).unwrap(), 1);
        assert_eq!(eulerian(3, -1).unwrap(), 0);
        assert_eq!(eulerian(3, 3).unwrap(), 0);
        assert_eq!(eulerian(0, 1).unwrap(), 0);
    }

    #[test]
    fn eulerian_rows_sum_to_factorials() {
        for n in 1..=10u32 {
            let sum: i128 = eulerian_row(n).unwrap().iter().sum();
            assert_eq!(sum, factorial(n).unwrap(), "row sum n={n}");
        }
    }

    #[test]
    fn psi_values() {
        // psi(3) = 1 - 4 + 1 from the row (1, 4, 1); psi(5) = 16 from
        // (1, 26, 66, 26, 1).
        assert_eq!(psi(0).unwrap(), 1);
        assert_eq!(psi(1).unwrap(), 1);
        assert_eq!(psi(2).unwrap(), 0);
        assert_eq!(psi(3).unwrap(), -2);
        assert_eq!(psi(4).unwrap(), 0);
        assert_eq!(psi(5).unwrap(), 16);
        assert_eq!(psi(7).unwrap(), -272);
    }
}
