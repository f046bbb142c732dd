//! Seeded splitmix64 generator.
//!
//! Every randomized run in this workspace is reproduced exactly by
//! (parameters, seed), so the generator is pinned here rather than taken
//! from a dependency. Stream definition, for reimplementation elsewhere:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: (output >> 11) * 2^-53.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Initial Volterra state: uniform on [-2, 2]^(k-1). For even k the draw
/// is rejected while any coordinate is within 1e-6 of zero, keeping the
/// sample off the degenerate strata where the component sign pattern is
/// undefined.
pub fn random_initial_state(rng: &mut SplitMix64, k: usize) -> Vec<f64> {
    assert!(k >= 2, "state needs at least one coordinate");
    loop {
        let state: Vec<f64> = (0..k - 1).map(|_| rng.uniform(-2.0, 2.0)).collect();
        if k % 2 == 0 && state.iter().any(|v| v.abs() < 1e-6) {
            continue;
        }
        return state;
    }
}

/// Like [`random_initial_state`], but additionally rejects draws whose
/// squared eigenvalue chain lambda_1^2 > ... > lambda_l^2 > 0 has a gap
/// (consecutive difference, or the smallest value itself) below
/// `min_sq_gap`.
///
/// The slowest linearization rate at any equilibrium of the flow is half
/// the smallest such gap, so a near-degenerate spectrum makes the
/// trajectory take arbitrarily long to settle. The convergence suites
/// check finite-horizon proximity to an equilibrium, which is only well
/// posed on draws with a rate floor; this is the quantitative form of the
/// distinct-eigenvalue hypothesis behind the equilibrium classification.
pub fn random_generic_initial_state(rng: &mut SplitMix64, k: usize, min_sq_gap: f64) -> Vec<f64> {
    use crate::tridiag::ZeroDiagMatrix;
    loop {
        let state = random_initial_state(rng, k);
        let m = ZeroDiagMatrix::new(state.clone()).expect("finite draw");
        let half = m
            .eigenvalues(1e-10)
            .expect("finite draw")
            .positive_descending(1e-9);
        let mut chain: Vec<f64> = half.iter().map(|l| l * l).collect();
        chain.push(0.0);
        let min_gap = chain
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        if min_gap >= min_sq_gap {
            return state;
        }
    }
}
