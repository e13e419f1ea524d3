//! Tolerances used by the checks, in one place.
//!
//! The solver is first order in `dt`; at the default `dt = 1e-3` the
//! constants below are calibrated against that error, not against rounding.

/// Nominal solver error at `dt = 1e-3`.
pub const SOLVER: f64 = 2e-4;

/// Algebraic identities that hold to rounding (conjugation, scheme symmetry).
pub const EXACT_RELATIVE: f64 = 1e-10;

/// Scheme-exact odd symmetry, absolute sup-norm.
pub const ODD_SYMMETRY: f64 = 1e-10;

/// Cocycle property: composition of two runs against one run.
pub const COCYCLE_RELATIVE: f64 = 5.0 * SOLVER;

/// Monotone pullback ladder and other comparison-principle checks.
pub const MONOTONICITY: f64 = 10.0 * SOLVER;

/// Truncation tolerance for the quasi-solution integral and absorbing radii.
pub const QUADRATURE: f64 = 1e-6;

/// Successive ladder rungs for extremal limits.
pub const EXTREMAL: f64 = 1e-4;

/// Extremal tolerance near the bifurcation point.
pub const EXTREMAL_CRITICAL: f64 = 1e-5;

/// Ladder cap (time units) away from and near the bifurcation point.
pub const LADDER_CAP: f64 = 160.0;
pub const LADDER_CAP_CRITICAL: f64 = 640.0;

/// `|nu - 1|` below which a Chafee-Infante run counts as near-critical.
pub const CRITICAL_BAND: f64 = 0.1;

/// Initial pullback ladder.
pub const LADDER: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

/// Fitted decay rates must reach this fraction of the predicted rate.
pub const RATE_FRACTION: f64 = 0.9;

/// Slack for the Riccati upper bound on the first Fourier coefficient.
pub const RICCATI_SLACK: f64 = 1e-3;

/// "Amplitude is zero" threshold in the pitchfork diagnostics.
pub const TRIVIAL_AMPLITUDE: f64 = 1e-3;
