//! Pathwise integration of the conjugated random PDE and the cocycle of the
//! stochastic equation.

pub mod checks;
pub mod problem;
pub mod solver;

pub use checks::{
    comparison_check, conjugation_defect, cocycle_defect, fit_slope, positivity_check, smoothing_check,
    ComparisonReport, IdentityDefect, SmoothingReport,
};
pub use problem::{
    Forcing, GridSpaceTime, Nonlinearity, NonlinearityReport, ProblemSpec, SpaceTime, DEFAULT_DT, DEFAULT_GUARD,
    DEFAULT_MODES, LAMBDA1,
};
pub use solver::{cocycle_phi, pullback_state, solve_u, solve_v, step_v, RunStats, Solver, Trajectory, SCHEME};
