//! Shared numerical configuration.
//!
//! Every tolerance used by an analysis is a field here and is threaded
//! explicitly through the call that uses it, so a report can record the
//! exact thresholds that produced its verdicts. There are no global
//! tunables anywhere in this crate.

use serde::{Deserialize, Serialize};

/// Tolerances, bounds, and seeds shared by the analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig {
    /// Relative threshold for rank decisions in Gram-Schmidt sweeps:
    /// a candidate is discarded when its orthogonal residual falls below
    /// `rank_tol` times the reference scale of the input set.
    pub rank_tol: f64,
    /// Relative deviation allowed when validating Hermitian or
    /// skew-Hermitian structure.
    pub hermiticity_tol: f64,
    /// Frobenius-norm bound on `U†U - I` for matrices that must be unitary.
    pub unitarity_tol: f64,
    /// Residual bound for closure checks (structure constants, commutant
    /// membership, operator-identity checks on truncated spaces).
    pub residual_tol: f64,
    /// Absolute tolerance for the continued-fraction rational-resonance
    /// test on spectral-gap ratios.
    pub resonance_tol: f64,
    /// Largest denominator probed by the rational-resonance test.
    pub denom_bound: u64,
    /// Number of random states sampled by the pure-state rank test.
    pub state_samples: usize,
    /// Seed for every randomized sampling path.
    pub seed: u64,
    /// Largest probability mass a coherent-state construction may lose
    /// to truncation before it refuses to build the state.
    pub tail_tol: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            rank_tol: 1e-8,
            hermiticity_tol: 1e-10,
            unitarity_tol: 1e-9,
            residual_tol: 1e-8,
            resonance_tol: 1e-9,
            denom_bound: 100,
            state_samples: 8,
            seed: 42,
            tail_tol: 1e-8,
        }
    }
}
