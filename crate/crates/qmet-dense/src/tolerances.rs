//! Numerical tolerances shared across the dense layer.

/// Maximum elementwise deviation from Hermiticity accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Hermiticity gate for the eigensolver input.
pub const EIG_HERMITIAN_TOL: f64 = 1e-8;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Lowest eigenvalue allowed in a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Jacobi stops when the off-diagonal Frobenius norm falls below this times the norm of H.
pub const JACOBI_OFFDIAG_REL: f64 = 1e-13;
/// Sweep budget for cyclic Jacobi.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues at or below this are outside the support in QFI sums.
pub const SUPPORT_CUT: f64 = 1e-12;
/// Purity above which a state is treated as pure.
pub const PURE_PURITY: f64 = 1.0 - 1e-10;
/// Relative disagreement between 2- and 5-point derivatives that triggers the 5-point value.
pub const FD_SWITCH_REL: f64 = 1e-6;
/// Base relative finite-difference step.
pub const FD_BASE_STEP: f64 = 1e-5;
/// Successive RK4 refinements must agree to this in max norm.
pub const RK4_TOL: f64 = 1e-9;
/// Upper bound on RK4 steps during refinement.
pub const RK4_MAX_STEPS: usize = 1 << 22;
