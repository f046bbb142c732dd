//! The Volterra and Toda lattice vector fields, adaptive integration with
//! conservation diagnostics, the Lyapunov function of the Volterra flow,
//! and the solution map from the even-size Volterra system to the Toda
//! lattice.
//!
//! Conventions, with 1-based lattice indices and zero boundary entries
//! (c_0 = c_k = 0, b_0 = b_n = 0):
//!
//! ```text
//! Volterra:  dc_i/dt = (1/2) c_i (c_{i+1}^2 - c_{i-1}^2)
//! Toda:      da_i/dt = 2 (b_i^2 - b_{i-1}^2),  db_i/dt = b_i (a_{i+1} - a_i)
//! ```
//!
//! The Volterra flow descends f = (1/4) sum (2i+1) c_i^2 (the trace form
//! tr K L^2 with K = diag(1,2,...)/4) at the exact rate
//! df/dt = -(1/2) sum c_i^2 c_{i+1}^2.
//!
//! Solution map for even size k = 2l. The classical map uses
//! b_i = -(1/2) c_{2i} c_{2i-1} together with a_i = (1/2)(c_{2i-2}^2 +
//! c_{2i-1}^2); with these choices a mapped Volterra trajectory satisfies
//! the Toda equations identically (checked here by finite differences).
//! A frequently reprinted variant states a_i as the Volterra right-hand
//! side (1/2) c_i (c_{i+1}^2 - c_{i-1}^2); that expression fails the
//! solution-mapping property and is not used.

use serde::Serialize;
use thiserror::Error;

use crate::tridiag::{invariants, JacobiMatrix, TridiagError, ZeroDiagMatrix};

/// Accuracy used for the eigenvalue snapshots taken along trajectories.
pub const EIGEN_SNAPSHOT_TOL: f64 = 1e-12;

/// A state is declared an equilibrium when the right-hand side stays
/// below this max-norm for two consecutive samples.
pub const EQUILIBRIUM_RHS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("integrator step size underflowed at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("the Volterra-to-Toda map needs an even matrix size, got k = {k}")]
    MapRequiresEvenSize { k: usize },
    #[error("component signature needs an even matrix size, got k = {k}")]
    SignatureRequiresEvenSize { k: usize },
    #[error("degenerate point: odd-position coordinate {index} is zero")]
    DegeneratePoint { index: usize },
    #[error(transparent)]
    Tridiag(#[from] TridiagError),
}

/// Volterra right-hand side for the state (c_1, ..., c_{k-1}).
pub fn volterra_rhs(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let left = if i > 0 { c[i - 1] * c[i - 1] } else { 0.0 };
        let right = if i + 1 < n { c[i + 1] * c[i + 1] } else { 0.0 };
        out[i] = 0.5 * c[i] * (right - left);
    }
    out
}

/// Toda right-hand side for diagonal a (length n) and off-diagonal b
/// (length n-1).
pub fn toda_rhs(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut da = vec![0.0; n];
    for i in 0..n {
        let right = if i < n - 1 { b[i] * b[i] } else { 0.0 };
        let left = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
        da[i] = 2.0 * (right - left);
    }
    let mut db = vec![0.0; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        db[i] = b[i] * (a[i + 1] - a[i]);
    }
    (da, db)
}

/// Lyapunov function f = (1/4) sum_{i} (2i+1) c_i^2 of the Volterra flow.
pub fn lyapunov_f(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(idx, v)| (2 * (idx + 1) + 1) as f64 * v * v)
        .sum::<f64>()
        * 0.25
}

/// Exact rate of f along the flow: df/dt = -(1/2) sum c_i^2 c_{i+1}^2.
/// Zero exactly when no two consecutive coordinates are both nonzero,
/// which is the equilibrium condition.
pub fn lyapunov_rate(c: &[f64]) -> f64 {
    let mut acc = 0.0;
    for w in c.windows(2) {
        acc += w[0] * w[0] * w[1] * w[1];
    }
    -0.5 * acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegrationMethod {
    /// Embedded Dormand-Prince 5(4) pair with adaptive step control.
    Rk45Adaptive,
    /// Fixed-step classical RK4; cross-check mode.
    Rk4Fixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegratorConfig {
    pub initial_step: f64,
    /// Per-step local error bound (max norm).
    pub error_tol: f64,
    pub t_final: f64,
    pub sample_interval: f64,
    pub method: IntegrationMethod,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            initial_step: 1e-3,
            error_tol: 1e-10,
            t_final: 20.0,
            sample_interval: 0.1,
            method: IntegrationMethod::Rk45Adaptive,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let fields = [
            ("initial_step", self.initial_step),
            ("error_tol", self.error_tol),
            ("t_final", self.t_final),
            ("sample_interval", self.sample_interval),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FlowError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.sample_interval > self.t_final {
            return Err(FlowError::InvalidConfig(format!(
                "sample_interval {} exceeds t_final {}",
                self.sample_interval, self.t_final
            )));
        }
        Ok(())
    }

    /// Sample times 0, dt, 2dt, ..., with t_final always appended.
    fn sample_times(&self) -> Vec<f64> {
        let mut times = vec![0.0];
        let mut j = 1usize;
        loop {
            let t = j as f64 * self.sample_interval;
            if t >= self.t_final - 1e-12 * self.t_final {
                break;
            }
            times.push(t);
            j += 1;
        }
        times.push(self.t_final);
        times
    }
}

/// Times and states recorded at the configured sampling cadence.
#[derive(Debug, Clone)]
pub struct SampledPath {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

// Dormand-Prince 5(4) tableau.
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step<F: Fn(&[f64]) -> Vec<f64>>(rhs: &F, y: &[f64], h: f64) -> (Vec<f64>, f64) {
    let dim = y.len();
    let mut stages: Vec<Vec<f64>> = Vec::with_capacity(7);
    stages.push(rhs(y));
    for s in 0..6 {
        let mut arg = y.to_vec();
        for (j, stage) in stages.iter().enumerate() {
            let a = DP_A[s][j];
            if a != 0.0 {
                for d in 0..dim {
                    arg[d] += h * a * stage[d];
                }
            }
        }
        stages.push(rhs(&arg));
    }
    let mut next = y.to_vec();
    let mut err = 0.0f64;
    for d in 0..dim {
        let mut acc5 = 0.0;
        let mut acc4 = 0.0;
        for (j, stage) in stages.iter().enumerate() {
            acc5 += DP_B5[j] * stage[d];
            acc4 += DP_B4[j] * stage[d];
        }
        next[d] += h * acc5;
        err = err.max((h * (acc5 - acc4)).abs());
    }
    (next, err)
}

fn rk4_step<F: Fn(&[f64]) -> Vec<f64>>(rhs: &F, y: &[f64], h: f64) -> Vec<f64> {
    let dim = y.len();
    let k1 = rhs(y);
    let mut arg = y.to_vec();
    for d in 0..dim {
        arg[d] = y[d] + 0.5 * h * k1[d];
    }
    let k2 = rhs(&arg);
    for d in 0..dim {
        arg[d] = y[d] + 0.5 * h * k2[d];
    }
    let k3 = rhs(&arg);
    for d in 0..dim {
        arg[d] = y[d] + h * k3[d];
    }
    let k4 = rhs(&arg);
    let mut next = y.to_vec();
    for d in 0..dim {
        next[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    }
    next
}

/// Integrate dy/dt = rhs(y) from t = 0 to cfg.t_final, recording the state
/// at every sample time. Deterministic given its inputs.
pub fn integrate<F: Fn(&[f64]) -> Vec<f64>>(
    rhs: F,
    initial: &[f64],
    cfg: &IntegratorConfig,
) -> Result<SampledPath, FlowError> {
    cfg.validate()?;
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFiniteState { t: 0.0 });
    }
    let sample_times = cfg.sample_times();
    let mut states = Vec::with_capacity(sample_times.len());
    states.push(initial.to_vec());

    let mut y = initial.to_vec();
    let mut t = 0.0f64;
    let mut h = cfg.initial_step;

    for &target in &sample_times[1..] {
        match cfg.method {
            IntegrationMethod::Rk45Adaptive => {
                while t < target {
                    let h_min = 1e-14 * t.abs().max(1.0);
                    let step = h.min(target - t);
                    let (candidate, err) = dp_step(&rhs, &y, step);
                    if candidate.iter().any(|v| !v.is_finite()) {
                        // Treat a blow-up inside a step like a rejected
                        // step; the step-size floor turns persistent
                        // blow-ups into an explicit error.
                        if step <= h_min {
                            return Err(FlowError::NonFiniteState { t });
                        }
                        h = step * 0.2;
                        continue;
                    }
                    if err <= cfg.error_tol {
                        t += step;
                        y = candidate;
                        let grow = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * (cfg.error_tol / err).powf(0.2)).clamp(0.2, 5.0)
                        };
                        h = (step * grow).max(h_min);
                    } else {
                        let shrink = (0.9 * (cfg.error_tol / err).powf(0.2)).clamp(0.1, 1.0);
                        h = step * shrink;
                        if h <= h_min {
                            return Err(FlowError::StepSizeUnderflow { t });
                        }
                    }
                }
            }
            IntegrationMethod::Rk4Fixed => {
                let span = target - t;
                let steps = (span / cfg.initial_step).ceil().max(1.0) as usize;
                let step = span / steps as f64;
                for _ in 0..steps {
                    y = rk4_step(&rhs, &y, step);
                    t += step;
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(FlowError::NonFiniteState { t });
                    }
                }
                t = target;
            }
        }
        states.push(y.clone());
    }

    Ok(SampledPath {
        times: sample_times,
        states,
    })
}

/// A Volterra trajectory with its conservation and descent diagnostics:
/// the Lyapunov value, the worst eigenvalue drift, and the worst drift of
/// the conserved quantities, all relative to the initial sample.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub f_values: Vec<f64>,
    pub spectrum_drift: Vec<f64>,
    pub invariant_drift: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn max_spectrum_drift(&self) -> f64 {
        self.spectrum_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_invariant_drift(&self) -> f64 {
        self.invariant_drift.iter().copied().fold(0.0, f64::max)
    }

    /// First sample index at which the equilibrium rule fires: the
    /// right-hand side stayed below EQUILIBRIUM_RHS_TOL (max norm) here
    /// and at the previous sample.
    pub fn equilibrium_sample(&self) -> Option<usize> {
        let norm = |s: &[f64]| {
            volterra_rhs(s)
                .iter()
                .map(|v| v.abs())
                .fold(0.0f64, f64::max)
        };
        let mut prev_quiet = false;
        for (i, state) in self.states.iter().enumerate() {
            let quiet = norm(state) < EQUILIBRIUM_RHS_TOL;
            if quiet && prev_quiet {
                return Some(i);
            }
            prev_quiet = quiet;
        }
        None
    }

    /// Largest increase of f between consecutive samples (0 when f is
    /// non-increasing throughout).
    pub fn worst_f_increase(&self) -> f64 {
        self.f_values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max)
    }

    /// Trajectory CSV: `t,c_1..c_{k-1},f,spectrum_drift,invariant_drift`
    /// with floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, |s| s.len());
        let mut out = String::from("t");
        for i in 1..=dim {
            out.push_str(&format!(",c_{i}"));
        }
        out.push_str(",f,spectrum_drift,invariant_drift\n");
        for i in 0..self.len() {
            out.push_str(&fmt17(self.times[i]));
            for v in &self.states[i] {
                out.push(',');
                out.push_str(&fmt17(*v));
            }
            out.push(',');
            out.push_str(&fmt17(self.f_values[i]));
            out.push(',');
            out.push_str(&fmt17(self.spectrum_drift[i]));
            out.push(',');
            out.push_str(&fmt17(self.invariant_drift[i]));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip an f64 exactly.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Integrate the Volterra flow from the given state and attach the
/// conservation diagnostics.
pub fn integrate_volterra(
    initial: &[f64],
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord, FlowError> {
    let path = integrate(volterra_rhs, initial, cfg)?;
    let reference = ZeroDiagMatrix::new(initial.to_vec())?;
    let ref_spectrum = reference.eigenvalues(EIGEN_SNAPSHOT_TOL)?;
    let ref_invariants = invariants(&reference);

    let mut f_values = Vec::with_capacity(path.times.len());
    let mut spectrum_drift = Vec::with_capacity(path.times.len());
    let mut invariant_drift = Vec::with_capacity(path.times.len());
    for state in &path.states {
        f_values.push(lyapunov_f(state));
        let m = ZeroDiagMatrix::new(state.clone())?;
        let spectrum = m.eigenvalues(EIGEN_SNAPSHOT_TOL)?;
        let drift = spectrum
            .values()
            .iter()
            .zip(ref_spectrum.values())
            .map(|(now, then)| (now - then).abs())
            .fold(0.0f64, f64::max);
        spectrum_drift.push(drift);
        let inv = invariants(&m);
        let inv_drift = inv
            .values()
            .iter()
            .zip(ref_invariants.values())
            .map(|(now, then)| (now - then).abs())
            .fold(0.0f64, f64::max);
        invariant_drift.push(inv_drift);
    }

    Ok(TrajectoryRecord {
        times: path.times,
        states: path.states,
        f_values,
        spectrum_drift,
        invariant_drift,
    })
}

/// Map an even-size Volterra state (k = 2l, so 2l-1 coordinates) to the
/// Jacobi matrix (a, b) of size l:
///   a_i = (1/2)(c_{2i-2}^2 + c_{2i-1}^2),  b_i = -(1/2) c_{2i} c_{2i-1},
/// with c_0 = c_{2l} = 0. Mapped trajectories solve the Toda equations,
/// and the image spectrum is { lambda_i^2 / 2 }.
pub fn volterra_to_toda(c: &[f64]) -> Result<JacobiMatrix, FlowError> {
    if c.len() % 2 != 1 {
        return Err(FlowError::MapRequiresEvenSize { k: c.len() + 1 });
    }
    let l = (c.len() + 1) / 2;
    // 1-based accessor with the boundary convention.
    let at = |m: usize| -> f64 {
        if m == 0 || m > c.len() {
            0.0
        } else {
            c[m - 1]
        }
    };
    let a: Vec<f64> = (1..=l)
        .map(|i| 0.5 * (at(2 * i - 2).powi(2) + at(2 * i - 1).powi(2)))
        .collect();
    let b: Vec<f64> = (1..l).map(|i| -0.5 * at(2 * i) * at(2 * i - 1)).collect();
    Ok(JacobiMatrix::new(a, b)?)
}

/// Sign pattern (sgn c_1, sgn c_3, ..., sgn c_{2l-1}) of an even-size
/// state; constant along Volterra trajectories. Errors on the degenerate
/// stratum where some odd-position coordinate vanishes.
pub fn component_signature(c: &[f64]) -> Result<Vec<i8>, FlowError> {
    if c.len() % 2 != 1 {
        return Err(FlowError::SignatureRequiresEvenSize { k: c.len() + 1 });
    }
    let mut signs = Vec::with_capacity((c.len() + 1) / 2);
    for (idx, v) in c.iter().enumerate().step_by(2) {
        if *v == 0.0 {
            return Err(FlowError::DegeneratePoint { index: idx + 1 });
        }
        signs.push(if *v > 0.0 { 1 } else { -1 });
    }
    Ok(signs)
}
