//! Symmetric tridiagonal matrix families, characteristic polynomials,
//! conserved quantities, and a Sturm-bisection eigensolver.
//!
//! Two families appear throughout:
//!   - zero-diagonal matrices with off-diagonal entries c_1..c_{k-1},
//!   - general Jacobi matrices with diagonal a and off-diagonal b.
//!
//! The characteristic polynomial of the zero-diagonal family is computed
//! two independent ways (a three-term recurrence, and assembly from the
//! conserved quantities I_m indexed by totally disconnected index sets);
//! the verification suites compare both against dense LU determinants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TridiagError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("invariant vector has length {got}, expected {expected} for size {k}")]
    LengthMismatch { k: usize, expected: usize, got: usize },
    #[error("off-diagonal length {got} does not match diagonal length {diag}")]
    BandMismatch { diag: usize, got: usize },
    #[error("tolerance must be positive and finite")]
    BadTolerance,
}

/// Zero-diagonal symmetric tridiagonal matrix of size k, stored as its
/// off-diagonal entries c_1..c_{k-1}. The boundary convention
/// c_0 = c_k = 0 is implicit in every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDiagMatrix {
    c: Vec<f64>,
}

impl ZeroDiagMatrix {
    pub fn new(c: Vec<f64>) -> Result<Self, TridiagError> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(TridiagError::NonFinite);
        }
        Ok(ZeroDiagMatrix { c })
    }

    /// Matrix size k (the off-diagonal holds k-1 entries).
    pub fn size(&self) -> usize {
        self.c.len() + 1
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.c
    }

    pub fn eigenvalues(&self, tol: f64) -> Result<Spectrum, TridiagError> {
        let diag = vec![0.0; self.size()];
        sturm_eigenvalues(&diag, &self.c, tol)
    }
}

/// General symmetric tridiagonal (Jacobi) matrix: diagonal a_1..a_n and
/// off-diagonal b_1..b_{n-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self, TridiagError> {
        if a.is_empty() || b.len() + 1 != a.len() {
            return Err(TridiagError::BandMismatch {
                diag: a.len(),
                got: b.len(),
            });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(TridiagError::NonFinite);
        }
        Ok(JacobiMatrix { a, b })
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.a
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.b
    }

    pub fn eigenvalues(&self, tol: f64) -> Result<Spectrum, TridiagError> {
        sturm_eigenvalues(&self.a, &self.b, tol)
    }
}

/// Either matrix family, as exchanged on the wire:
/// `{"kind": "zerodiag", "c": [...]}` or `{"kind": "jacobi", "a": [...], "b": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Matrix {
    #[serde(rename = "zerodiag")]
    ZeroDiag(ZeroDiagMatrix),
    Jacobi(JacobiMatrix),
}

impl Matrix {
    pub fn size(&self) -> usize {
        match self {
            Matrix::ZeroDiag(m) => m.size(),
            Matrix::Jacobi(m) => m.size(),
        }
    }
}

/// Sorted eigenvalue list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The strictly positive half of the spectrum, largest first; for the
    /// zero-diagonal family these are the lambda parameters.
    pub fn positive_descending(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .eigenvalues
            .iter()
            .copied()
            .filter(|&v| v > tol)
            .collect();
        out.sort_by(|x, y| y.partial_cmp(x).unwrap());
        out
    }
}

/// Conserved quantities I_0..I_l of a zero-diagonal matrix; I_0 = 1 and
/// I_m sums the products of c_i^2 over totally disconnected index sets of
/// size m (no two consecutive indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    values: Vec<f64>,
}

impl InvariantVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// All subsets of {1..n} of the given size with no two consecutive
/// members, in lexicographic order. The count is C(n - size + 1, size).
pub fn totally_disconnected_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn extend(n: usize, size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        // Leave room for the remaining (size - len - 1) members, each two apart.
        let remaining = size - current.len();
        if remaining == 0 || start > n {
            return;
        }
        let last_start = n.saturating_sub(2 * (remaining - 1));
        for i in start..=last_start {
            current.push(i);
            extend(n, size, i + 2, current, out);
            current.pop();
        }
    }
    extend(n, size, 1, &mut current, &mut out);
    out
}

/// Coefficients (index = power of lambda) of det(L - lambda I) for the
/// zero-diagonal matrix, via the three-term recurrence
/// P_N = -lambda P_{N-1} - c_{N-1}^2 P_{N-2}, P_0 = 1, P_1 = -lambda.
///
/// Only powers lambda^(k-2i) appear; the complementary slots stay exactly
/// zero.
pub fn char_poly(m: &ZeroDiagMatrix) -> Vec<f64> {
    let k = m.size();
    let mut prev: Vec<f64> = vec![1.0]; // P_0
    let mut curr: Vec<f64> = vec![0.0, -1.0]; // P_1 = -lambda
    if k == 1 {
        return curr;
    }
    for step in 2..=k {
        let c_sq = m.c[step - 2] * m.c[step - 2];
        let mut next = vec![0.0; step + 1];
        for (pow, &coef) in curr.iter().enumerate() {
            next[pow + 1] -= coef;
        }
        for (pow, &coef) in prev.iter().enumerate() {
            next[pow] -= c_sq * coef;
        }
        prev = curr;
        curr = next;
    }
    curr
}

/// The conserved quantities, straight from their definition as sums of
/// squared products over totally disconnected index sets.
pub fn invariants(m: &ZeroDiagMatrix) -> InvariantVector {
    let k = m.size();
    let l = k / 2;
    let n = k - 1;
    let mut values = Vec::with_capacity(l + 1);
    values.push(1.0);
    for size in 1..=l {
        let mut sum = 0.0;
        for subset in totally_disconnected_subsets(n, size) {
            let mut prod = 1.0;
            for i in subset {
                prod *= m.c[i - 1] * m.c[i - 1];
            }
            sum += prod;
        }
        values.push(sum);
    }
    InvariantVector { values }
}

/// Assemble the characteristic polynomial from the conserved quantities:
/// even k = 2l:  P = sum_i (-1)^i     lambda^(2l-2i)   I_i,
/// odd  k = 2l+1: P = sum_i (-1)^(i+1) lambda^(2l+1-2i) I_i.
pub fn char_poly_from_invariants(
    iv: &InvariantVector,
    k: usize,
) -> Result<Vec<f64>, TridiagError> {
    let l = k / 2;
    if iv.values.len() != l + 1 {
        return Err(TridiagError::LengthMismatch {
            k,
            expected: l + 1,
            got: iv.values.len(),
        });
    }
    let mut coeffs = vec![0.0; k + 1];
    for (i, &value) in iv.values.iter().enumerate() {
        let power = k - 2 * i;
        let sign = if k % 2 == 0 {
            if i % 2 == 0 { 1.0 } else { -1.0 }
        } else if i % 2 == 0 {
            -1.0
        } else {
            1.0
        };
        coeffs[power] = sign * value;
    }
    Ok(coeffs)
}

/// Evaluate a coefficient list at lambda (Horner).
pub fn eval_poly(coeffs: &[f64], lambda: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * lambda + c;
    }
    acc
}

/// det(L - lambda I) by dense LU with partial pivoting; an independent
/// cross-check route for the tridiagonal recurrences.
pub fn dense_char_poly_value(m: &ZeroDiagMatrix, lambda: f64) -> f64 {
    let k = m.size();
    let mut a = vec![vec![0.0; k]; k];
    for i in 0..k {
        a[i][i] = -lambda;
        if i + 1 < k {
            a[i][i + 1] = m.c[i];
            a[i + 1][i] = m.c[i];
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let (pivot_row, pivot) = (col..k)
            .map(|r| (r, a[r][col]))
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
            .unwrap();
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..k {
            let factor = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= factor * a[col][c];
            }
        }
    }
    det
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, offdiag)
/// strictly below x, from signs of the shifted LDL^T pivots. Exactly-zero
/// pivots are nudged to +/- (machine epsilon * matrix scale).
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let scale = diag
        .iter()
        .map(|v| v.abs())
        .chain(offdiag.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let guard = f64::EPSILON * scale;
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (diag[i] - x) - offdiag[i - 1] * offdiag[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues to absolute accuracy `tol`, ascending, by bisection on
/// the Sturm counts inside the Gershgorin interval.
pub fn sturm_eigenvalues(
    diag: &[f64],
    offdiag: &[f64],
    tol: f64,
) -> Result<Spectrum, TridiagError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(TridiagError::BadTolerance);
    }
    if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
        return Err(TridiagError::NonFinite);
    }
    let n = diag.len();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    lo -= 1.0;
    hi += 1.0;

    let mut eigenvalues = Vec::with_capacity(n);
    for index in 0..n {
        let mut a = lo;
        let mut b = hi;
        for _ in 0..200 {
            let width = b - a;
            if width <= tol || width <= 2.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
                break;
            }
            let mid = 0.5 * (a + b);
            if sturm_count(diag, offdiag, mid) <= index {
                a = mid;
            } else {
                b = mid;
            }
        }
        eigenvalues.push(0.5 * (a + b));
    }
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(Spectrum { eigenvalues })
}

/// Eigenvalues of either matrix family.
pub fn eigenvalues(matrix: &Matrix, tol: f64) -> Result<Spectrum, TridiagError> {
    match matrix {
        Matrix::ZeroDiag(m) => m.eigenvalues(tol),
        Matrix::Jacobi(m) => m.eigenvalues(tol),
    }
}

/// Outcome of checking that a spectrum is closed under negation and
/// contains zero exactly when the matrix size is odd.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub negation_symmetric: bool,
    pub zero_expected: bool,
    pub zero_found: bool,
    pub max_pairing_residual: f64,
    pub pass: bool,
}

pub fn spectrum_symmetry_check(spectrum: &Spectrum, k: usize, tol: f64) -> SymmetryReport {
    let evs = &spectrum.eigenvalues;
    let n = evs.len();
    let mut max_residual = 0.0f64;
    for i in 0..n {
        max_residual = max_residual.max((evs[i] + evs[n - 1 - i]).abs());
    }
    let negation_symmetric = max_residual <= tol;
    let zero_found = evs.iter().any(|v| v.abs() <= tol);
    let zero_expected = k % 2 == 1;
    SymmetryReport {
        negation_symmetric,
        zero_expected,
        zero_found,
        max_pairing_residual: max_residual,
        pass: negation_symmetric && zero_found == zero_expected,
    }
}
