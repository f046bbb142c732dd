//! Equilibria of the lattice flows, their Morse indices via linearization,
//! and the signed counts that reproduce the Euler characteristics.
//!
//! Odd zero-diagonal case (size k = 2l+1, states of length 2l): the
//! equilibria are exactly the states with l zero coordinates and no two
//! consecutive nonzero coordinates. They are classified by triples
//! [j, s, pi]: j locates the double zero (j = l means "trailing zero
//! layout", j = 0 "leading zero layout"), s gives the l signs, pi the
//! assignment of the positive half-spectrum to the nonzero slots.
//!
//! At such an equilibrium the linearized Volterra field is diagonal, with
//! rate (1/2)(c_{m+1}^2 - c_{m-1}^2) in each zero coordinate m; the Morse
//! index is the number of growing directions,
//!   index = #{ zero positions m : c_{m+1}^2 > c_{m-1}^2 },
//! independent of the signs s.
//!
//! Toda case (size n): equilibria are the diagonal matrices carrying the
//! spectrum in some order; the linearization grows in direction b_i
//! exactly when a_{i+1} > a_i, so the index is the ascent count of the
//! diagonal value sequence.

use serde::Serialize;
use thiserror::Error;

use crate::chi::{chi_j_closed, chi_m_closed, ChiError};
use crate::tridiag::JacobiMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorseError {
    #[error("spectrum parameters must be positive, finite, strictly decreasing: {0}")]
    InvalidSpectrum(String),
    #[error("toda spectrum must be finite and strictly increasing")]
    InvalidTodaSpectrum,
}

/// The positive half-spectrum lambda_1 > lambda_2 > ... > lambda_l > 0
/// that pins down the isospectral set of odd size 2l+1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumParams {
    values: Vec<f64>,
}

impl SpectrumParams {
    pub fn new(values: Vec<f64>) -> Result<Self, MorseError> {
        if values.is_empty() {
            return Err(MorseError::InvalidSpectrum("empty".into()));
        }
        for w in values.windows(2) {
            if !(w[0] > w[1]) {
                return Err(MorseError::InvalidSpectrum(format!(
                    "{} !> {}",
                    w[0], w[1]
                )));
            }
        }
        let last = *values.last().unwrap();
        if !(last > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(MorseError::InvalidSpectrum(format!(
                "smallest value {last} must be positive"
            )));
        }
        Ok(SpectrumParams { values })
    }

    /// Deterministic default for listings: lambda_m = l + 1 - m.
    pub fn default_for(l: usize) -> Self {
        SpectrumParams {
            values: (1..=l).map(|m| (l + 1 - m) as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// An equilibrium of the odd-size Volterra flow: the classifying triple
/// and its realized coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub j: usize,
    pub s: Vec<u8>,
    pub pi: Vec<usize>,
    pub coords: Vec<f64>,
}

/// Visit the permutations of 1..=n in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        f(&perm);
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Coordinates of the equilibrium with double-zero parameter j and the
/// given signed nonzero entries (in slot order).
fn realize_coords(j: usize, values: &[f64]) -> Vec<f64> {
    let l = values.len();
    let mut coords = Vec::with_capacity(2 * l);
    if j == 0 {
        for v in values {
            coords.push(0.0);
            coords.push(*v);
        }
    } else if j == l {
        for v in values {
            coords.push(*v);
            coords.push(0.0);
        }
    } else {
        for v in &values[..j] {
            coords.push(*v);
            coords.push(0.0);
        }
        coords.push(0.0);
        for (idx, v) in values[j..].iter().enumerate() {
            if idx > 0 {
                coords.push(0.0);
            }
            coords.push(*v);
        }
    }
    coords
}

/// All (l+1) * 2^l * l! equilibria, ordered by j ascending, then pi in
/// lexicographic order, then s as a binary counter (s_1 is the high bit).
pub fn enumerate_critical_points(params: &SpectrumParams) -> Vec<CriticalPoint> {
    let l = params.len();
    let mut out = Vec::new();
    for j in 0..=l {
        for_each_permutation(l, |pi| {
            for counter in 0..(1u64 << l) {
                let s: Vec<u8> = (1..=l)
                    .map(|m| ((counter >> (l - m)) & 1) as u8)
                    .collect();
                let values: Vec<f64> = (0..l)
                    .map(|m| {
                        let magnitude = params.values[pi[m] - 1];
                        if s[m] == 0 {
                            magnitude
                        } else {
                            -magnitude
                        }
                    })
                    .collect();
                out.push(CriticalPoint {
                    j,
                    s,
                    pi: pi.to_vec(),
                    coords: realize_coords(j, &values),
                });
            }
        });
    }
    out
}

/// Morse index of an equilibrium: the number of zero coordinates whose
/// right-neighbor square exceeds the left-neighbor square (boundary
/// entries count as zero). Ties cannot occur for a strictly ordered
/// spectrum, and are asserted against rather than broken.
pub fn morse_index(point: &CriticalPoint) -> usize {
    index_of_coords(&point.coords)
}

fn index_of_coords(coords: &[f64]) -> usize {
    let n = coords.len();
    let mut index = 0;
    for m in 0..n {
        if coords[m] != 0.0 {
            continue;
        }
        let left = if m > 0 { coords[m - 1] * coords[m - 1] } else { 0.0 };
        let right = if m + 1 < n {
            coords[m + 1] * coords[m + 1]
        } else {
            0.0
        };
        assert!(
            left != right,
            "tied linearization rates at zero position {}; spectrum not strictly ordered",
            m + 1
        );
        if right > left {
            index += 1;
        }
    }
    index
}

/// Signed equilibrium count sum (-1)^index over all equilibria of the
/// odd-size flow. The index does not depend on the signs s, so only the
/// (l+1) * l! sign-free points are enumerated and the result is scaled
/// by 2^l.
pub fn morse_chi_m(l: usize, params: &SpectrumParams) -> i128 {
    assert_eq!(params.len(), l, "spectrum length must equal l");
    let mut acc: i128 = 0;
    for j in 0..=l {
        for_each_permutation(l, |pi| {
            let values: Vec<f64> = (0..l).map(|m| params.values[pi[m] - 1]).collect();
            let coords = realize_coords(j, &values);
            if index_of_coords(&coords) % 2 == 0 {
                acc += 1;
            } else {
                acc -= 1;
            }
        });
    }
    acc << l
}

/// An equilibrium of the Toda flow: a permutation and the diagonal matrix
/// carrying the spectrum in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TodaCriticalPoint {
    pub sigma: Vec<usize>,
    pub matrix: JacobiMatrix,
}

/// The n! Toda equilibria diag(mu_{sigma(1)}, ..., mu_{sigma(n)}) for a
/// strictly increasing spectrum, in lexicographic sigma order.
pub fn enumerate_critical_points_toda(
    spectrum: &[f64],
) -> Result<Vec<TodaCriticalPoint>, MorseError> {
    validate_toda_spectrum(spectrum)?;
    let n = spectrum.len();
    let mut out = Vec::new();
    for_each_permutation(n, |sigma| {
        let a: Vec<f64> = sigma.iter().map(|&i| spectrum[i - 1]).collect();
        let matrix = JacobiMatrix::new(a, vec![0.0; n - 1]).expect("valid diagonal matrix");
        out.push(TodaCriticalPoint {
            sigma: sigma.to_vec(),
            matrix,
        });
    });
    Ok(out)
}

fn validate_toda_spectrum(spectrum: &[f64]) -> Result<(), MorseError> {
    if spectrum.is_empty()
        || spectrum.iter().any(|v| !v.is_finite())
        || spectrum.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(MorseError::InvalidTodaSpectrum);
    }
    Ok(())
}

/// Morse index of a Toda equilibrium: each off-diagonal direction grows
/// exactly when the diagonal ascends across it, so the index is the
/// ascent count of (mu_{sigma(1)}, ..., mu_{sigma(n)}).
pub fn morse_index_toda(sigma: &[usize], spectrum: &[f64]) -> usize {
    sigma
        .windows(2)
        .filter(|w| spectrum[w[1] - 1] > spectrum[w[0] - 1])
        .count()
}

/// Signed Toda equilibrium count sum_sigma (-1)^index; equals the ascent
/// polynomial of S_n evaluated at -1.
pub fn morse_chi_j(n: usize) -> i128 {
    let mut acc: i128 = 0;
    for_each_permutation(n, |sigma| {
        let ascents = sigma.windows(2).filter(|w| w[1] > w[0]).count();
        if ascents % 2 == 0 {
            acc += 1;
        } else {
            acc -= 1;
        }
    });
    acc
}

/// Betti numbers of the Jacobi isospectral variety: the Eulerian row
/// (E(n,0), ..., E(n,n-1)).
pub fn betti_j(n: u32) -> Result<Vec<i128>, ChiError> {
    assert!(n >= 1, "betti_j requires n >= 1");
    Ok(crate::combinatorics::eulerian_row(n)?)
}

/// Both readings of the relation between the two closed-form Euler
/// characteristics, with the exact integers involved.
///
/// corrected: chi(M_{2l+1}) = (-1)^l 2^l chi(J_{l+1})   (holds for all l)
/// printed:   chi(J_{l+1})  = (-1)^l 2^l chi(M_{2l+1})  (fails, e.g. l = 2)
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiRelationReport {
    pub l: u32,
    pub chi_m: i128,
    pub chi_j: i128,
    pub corrected_holds: bool,
    pub printed_holds: bool,
}

pub fn chi_relation_check(l: u32) -> Result<ChiRelationReport, ChiError> {
    let chi_m = chi_m_closed(l)?;
    let chi_j = chi_j_closed(l + 1)?;
    let sign: i128 = if l % 2 == 0 { 1 } else { -1 };
    let factor = sign * (1i128 << l);
    Ok(ChiRelationReport {
        l,
        chi_m,
        chi_j,
        corrected_holds: chi_m == factor * chi_j,
        printed_holds: chi_j == factor * chi_m,
    })
}

/// Equilibria of the even-size (k = 2l) Volterra flow: all states
/// (v_1, 0, v_2, 0, ..., v_l) of length 2l-1 with v_m = +/- lambda_{pi(m)},
/// ordered by pi lexicographic then signs as a binary counter.
pub fn enumerate_equilibria_even(params: &SpectrumParams) -> Vec<Vec<f64>> {
    let l = params.len();
    let mut out = Vec::new();
    for_each_permutation(l, |pi| {
        for counter in 0..(1u64 << l) {
            let mut coords = Vec::with_capacity(2 * l - 1);
            for m in 0..l {
                let sign = if (counter >> (l - 1 - m)) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                if m > 0 {
                    coords.push(0.0);
                }
                coords.push(sign * params.values[pi[m] - 1]);
            }
            out.push(coords);
        }
    });
    out
}

/// Index and Euclidean distance of the closest point in the list.
pub fn nearest_state<'a, I>(state: &[f64], candidates: I) -> Option<(usize, f64)>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut best: Option<(usize, f64)> = None;
    for (idx, cand) in candidates.into_iter().enumerate() {
        let dist = state
            .iter()
            .zip(cand.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((idx, dist));
        }
    }
    best
}

/// Convenience for trajectory summaries: nearest enumerated critical
/// point of the odd-size flow.
pub fn nearest_critical_point<'a>(
    state: &[f64],
    points: &'a [CriticalPoint],
) -> Option<(&'a CriticalPoint, f64)> {
    nearest_state(state, points.iter().map(|p| p.coords.as_slice()))
        .map(|(idx, dist)| (&points[idx], dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi::chi_m_combinatorial;
    use crate::combinatorics::psi;
    use crate::flows::volterra_rhs;

    fn params(values: &[f64]) -> SpectrumParams {
        SpectrumParams::new(values.to_vec()).unwrap()
    }

    #[test]
    fn spectrum_params_validation() {
        assert!(SpectrumParams::new(vec![2.0, 1.0]).is_ok());
        assert!(SpectrumParams::new(vec![1.0, 2.0]).is_err());
        assert!(SpectrumParams::new(vec![1.0, 1.0]).is_err());
        assert!(SpectrumParams::new(vec![1.0, -1.0]).is_err());
        assert_eq!(SpectrumParams::default_for(3).values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_critical_points(&params(&[1.0])).len(), 4);
        assert_eq!(enumerate_critical_points(&params(&[2.0, 1.0])).len(), 24);
        let l3 = enumerate_critical_points(&SpectrumParams::default_for(3));
        assert_eq!(l3.len(), 4 * 8 * 6);
    }

    #[test]
    fn l1_listing_matches_expected_order_and_indices() {
        // j ascending: (0, +1), (0, -1), (+1, 0), (-1, 0) with indices
        // 1, 1, 0, 0.
        let points = enumerate_critical_points(&params(&[1.0]));
        let coords: Vec<&[f64]> = points.iter().map(|p| p.coords.as_slice()).collect();
        assert_eq!(coords[0], &[0.0, 1.0]);
        assert_eq!(coords[1], &[0.0, -1.0]);
        assert_eq!(coords[2], &[1.0, 0.0]);
        assert_eq!(coords[3], &[-1.0, 0.0]);
        let indices: Vec<usize> = points.iter().map(morse_index).collect();
        assert_eq!(indices, vec![1, 1, 0, 0]);
    }

    #[test]
    fn every_point_annihilates_the_field_exactly() {
        for l in 1..=4 {
            for point in enumerate_critical_points(&SpectrumParams::default_for(l)) {
                assert!(
                    volterra_rhs(&point.coords).iter().all(|&v| v == 0.0),
                    "nonzero rhs at {:?}",
                    point.coords
                );
                let zeros = point.coords.iter().filter(|&&v| v == 0.0).count();
                assert_eq!(zeros, l, "exactly l zeros in {:?}", point.coords);
                assert!(
                    point.coords.windows(2).all(|w| w[0] == 0.0 || w[1] == 0.0),
                    "consecutive nonzeros in {:?}",
                    point.coords
                );
            }
        }
    }

    #[test]
    fn index_examples_for_l2() {
        let p = params(&[2.0, 1.0]);
        let find = |j: usize, pi: &[usize]| -> CriticalPoint {
            enumerate_critical_points(&p)
                .into_iter()
                .find(|cp| cp.j == j && cp.pi == pi && cp.s.iter().all(|&b| b == 0))
                .unwrap()
        };
        // (lambda_1, 0, lambda_2, 0): both zero slots decay.
        let top = find(2, &[1, 2]);
        assert_eq!(top.coords, vec![2.0, 0.0, 1.0, 0.0]);
        assert_eq!(morse_index(&top), 0);
        // (lambda_1, 0, 0, lambda_2) and the swapped assignment both have
        // exactly one growing zero slot.
        let mid = find(1, &[1, 2]);
        assert_eq!(mid.coords, vec![2.0, 0.0, 0.0, 1.0]);
        assert_eq!(morse_index(&mid), 1);
        let mid_swapped = find(1, &[2, 1]);
        assert_eq!(morse_index(&mid_swapped), 1);
        // (0, lambda_1, 0, lambda_2): the leading slot grows, the middle
        // one decays because lambda_2 < lambda_1.
        let low = find(0, &[1, 2]);
        assert_eq!(low.coords, vec![0.0, 2.0, 0.0, 1.0]);
        assert_eq!(morse_index(&low), 1);
    }

    #[test]
    fn index_is_independent_of_signs() {
        for l in 1..=4 {
            let points = enumerate_critical_points(&SpectrumParams::default_for(l));
            // Group by (j, pi): all 2^l sign choices must agree.
            let mut seen: std::collections::BTreeMap<(usize, Vec<usize>), usize> =
                std::collections::BTreeMap::new();
            for point in &points {
                let key = (point.j, point.pi.clone());
                let idx = morse_index(point);
                if let Some(&existing) = seen.get(&key) {
                    assert_eq!(existing, idx, "index varies with s at {key:?}");
                } else {
                    seen.insert(key, idx);
                }
            }
        }
    }

    #[test]
    fn signed_counts_reproduce_chi() {
        assert_eq!(morse_chi_m(1, &SpectrumParams::default_for(1)), 0);
        assert_eq!(morse_chi_m(2, &SpectrumParams::default_for(2)), -8);
        for l in 1..=6 {
            let counted = morse_chi_m(l, &SpectrumParams::default_for(l));
            assert_eq!(counted, chi_m_closed(l as u32).unwrap(), "l={l}");
            assert_eq!(counted, chi_m_combinatorial(l as u32).unwrap(), "l={l}");
        }
    }

    #[test]
    fn index_depends_only_on_relative_order() {
        // A generic strictly decreasing spectrum gives the same signed
        // count as the default integer one.
        let p = params(&[2.9, 1.3, 0.4]);
        assert_eq!(
            morse_chi_m(3, &p),
            morse_chi_m(3, &SpectrumParams::default_for(3))
        );
    }

    #[test]
    fn toda_equilibria_and_indices() {
        let spectrum = [1.0, 2.0, 3.0];
        let points = enumerate_critical_points_toda(&spectrum).unwrap();
        assert_eq!(points.len(), 6);
        for p in &points {
            let (da, db) = crate::flows::toda_rhs(p.matrix.diag(), p.matrix.offdiag());
            assert!(da.iter().chain(db.iter()).all(|&v| v == 0.0));
        }
        // Descending diagonal: no ascents; ascending: n-1 ascents.
        assert_eq!(morse_index_toda(&[3, 2, 1], &spectrum), 0);
        assert_eq!(morse_index_toda(&[1, 2, 3], &spectrum), 2);
        let signed: i128 = points
            .iter()
            .map(|p| {
                if morse_index_toda(&p.sigma, &spectrum) % 2 == 0 {
                    1i128
                } else {
                    -1i128
                }
            })
            .sum();
        assert_eq!(signed, -2);
        assert_eq!(morse_chi_j(3), -2);
    }

    #[test]
    fn toda_signed_counts_match_closed_form() {
        for n in 1..=6 {
            assert_eq!(morse_chi_j(n), chi_j_closed(n as u32).unwrap(), "n={n}");
            assert_eq!(morse_chi_j(n), psi(n as u32).unwrap(), "n={n}");
        }
    }

    #[test]
    fn toda_spectrum_must_increase() {
        assert!(enumerate_critical_points_toda(&[2.0, 1.0]).is_err());
        assert!(enumerate_critical_points_toda(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(betti_j(1).unwrap(), vec![1]);
        assert_eq!(betti_j(3).unwrap(), vec![1, 4, 1]);
        let alternating: i128 = betti_j(3)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b } else { -b })
            .sum();
        assert_eq!(alternating, chi_j_closed(3).unwrap());
    }

    #[test]
    fn relation_report_examples() {
        let l2 = chi_relation_check(2).unwrap();
        assert_eq!((l2.chi_m, l2.chi_j), (-8, -2));
        assert!(l2.corrected_holds);
        assert!(!l2.printed_holds);

        let l1 = chi_relation_check(1).unwrap();
        assert!(l1.corrected_holds && l1.printed_holds);

        let l4 = chi_relation_check(4).unwrap();
        assert_eq!((l4.chi_m, l4.chi_j), (256, 16));
        assert!(l4.corrected_holds);
    }

    #[test]
    fn even_equilibria_enumeration() {
        let eq = enumerate_equilibria_even(&params(&[2.0, 1.0]));
        assert_eq!(eq.len(), 8); // 2! * 2^2
        assert_eq!(eq[0], vec![2.0, 0.0, 1.0]);
        for state in &eq {
            assert!(volterra_rhs(state).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn nearest_point_lookup() {
        let root_two = 2.0f64.sqrt();
        let points = enumerate_critical_points(&params(&[root_two]));
        let (best, dist) = nearest_critical_point(&[root_two - 3e-7, 1e-7], &points).unwrap();
        assert_eq!(best.coords[1], 0.0);
        assert!(dist < 1e-6);
    }
}
