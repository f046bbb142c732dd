//! Isospectral flows on symmetric tridiagonal matrices.
//!
//! The crate simulates the open Volterra and Toda lattice flows on their
//! isospectral sets, exposes the conserved quantities and the Lyapunov
//! function of the Volterra flow, enumerates the equilibria with their
//! Morse indices, and evaluates the Euler characteristics of the
//! isospectral varieties by several mutually independent exact routes:
//!
//! - [`rational`] / [`series`]: exact 128-bit fractions and truncated
//!   power series with overflow detection.
//! - [`combinatorics`]: Bernoulli numbers, Eulerian numbers, and the
//!   alternating Eulerian sum.
//! - [`chi`]: Euler characteristics as Bernoulli closed forms, as
//!   coefficients of -tanh^2(2z), and as binomial convolutions.
//! - [`tridiag`]: matrix families, characteristic polynomials two ways,
//!   conserved quantities, Sturm-bisection eigenvalues.
//! - [`flows`]: the lattice vector fields, adaptive RK integration with
//!   conservation diagnostics, and the Volterra-to-Toda solution map.
//! - [`morse`]: equilibrium enumeration, linearization indices, signed
//!   counts, and the cross-family relation between the characteristics.
//! - [`verify`]: the seeded verification suites behind `isoflow verify`.
//!
//! The headline identity, three ways:
//!
//! ```
//! use isoflow_core::{chi_m_closed, chi_m_egf, morse_chi_m, SpectrumParams};
//!
//! // The size-5 zero-diagonal isospectral variety is a genus-5 surface.
//! assert_eq!(chi_m_closed(2).unwrap(), -8);
//! assert_eq!(chi_m_egf(2).unwrap()[2], -8);
//! assert_eq!(morse_chi_m(2, &SpectrumParams::default_for(2)), -8);
//! ```

pub mod chi;
pub mod combinatorics;
pub mod flows;
pub mod morse;
pub mod rational;
pub mod rng;
pub mod series;
pub mod tridiag;
pub mod verify;

pub use chi::{chi_j_closed, chi_m_closed, chi_m_combinatorial, chi_m_egf, ChiError};
pub use combinatorics::{bernoulli, binomial, eulerian, eulerian_row, factorial, psi};
pub use flows::{
    component_signature, integrate, integrate_volterra, lyapunov_f, lyapunov_rate, toda_rhs,
    volterra_rhs, volterra_to_toda, FlowError, IntegrationMethod, IntegratorConfig,
    TrajectoryRecord,
};
pub use morse::{
    betti_j, chi_relation_check, enumerate_critical_points, enumerate_critical_points_toda,
    morse_chi_j, morse_chi_m, morse_index, morse_index_toda, CriticalPoint, MorseError,
    SpectrumParams,
};
pub use rational::{ExactRational, RationalError};
pub use rng::SplitMix64;
pub use series::{tanh_series, PowerSeries, SeriesError};
pub use tridiag::{
    char_poly, char_poly_from_invariants, eigenvalues, invariants, spectrum_symmetry_check,
    totally_disconnected_subsets, JacobiMatrix, Matrix, Spectrum, SymmetryReport, TridiagError,
    ZeroDiagMatrix,
};
