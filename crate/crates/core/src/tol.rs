//! Numerical tolerances shared by every module.

/// Absolute tolerance for equality assertions on probabilities and curve values.
pub const EQ: f64 = 1e-9;

/// Total-mass check applied when a distribution is constructed.
pub const MASS: f64 = 1e-12;

/// Slope tolerance used when merging collinear breakpoints.
pub const SLOPE: f64 = 1e-9;

/// Phase-1 optimum at or below this value is accepted as feasible.
pub const FEAS_ACCEPT: f64 = 1e-9;

/// Phase-1 optimum at or above this value certifies infeasibility.
pub const FEAS_REJECT: f64 = 1e-7;

/// Default cap on the number of enumerated deterministic adversaries.
pub const DEFAULT_GUARD: u64 = 1_000_000;
