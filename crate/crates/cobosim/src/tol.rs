//! Numerical tolerances and iteration limits, collected in one place.

/// State vectors keep unit squared norm within this bound.
pub const NORM: f64 = 1e-12;

/// Hermiticity bound, relative to the Frobenius norm:
/// max|H[i][j] − conj(H[j][i])| ≤ HERMITICITY · ‖H‖_F.
pub const HERMITICITY: f64 = 1e-13;

/// Jacobi convergence: off-diagonal Frobenius mass ≤ JACOBI_OFF · ‖H‖_F.
pub const JACOBI_OFF: f64 = 1e-14;

/// Maximum cyclic Jacobi sweeps before reporting failure.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Stay probabilities at or below this threshold count as interference nulls.
pub const NULL_PROBABILITY: f64 = 1e-10;

/// Golden-section refinement stops once the time bracket is this narrow.
pub const NULL_TIME: f64 = 1e-12;

/// Uniform scan points used to bracket stay-probability minima.
pub const NULL_SCAN_POINTS: usize = 10_000;

/// Truncation order of the series in the propagator oracle.
pub const TAYLOR_ORDER: usize = 20;

/// Scaling target of the propagator oracle: ‖Ht‖_F is halved until ≤ this.
pub const TAYLOR_SCALE: f64 = 0.5;
