use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A time or length argument that is not an integer multiple of the
    /// relevant grid step.
    #[error("{what} = {value} is not aligned to the grid step {dt}")]
    NotAligned { what: &'static str, value: f64, dt: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Evaluation of a noise path outside its sampled domain.
    #[error("time {t} is outside the path domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    /// `exp(±alpha * omega)` left the representable range.
    #[error("conjugation factor overflow at t = {t}: alpha * omega = {exponent}")]
    PathRange { t: f64, exponent: f64 },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// The sup-norm guard tripped while integrating. Global existence holds
    /// for valid problem data, so this points at a bad step size or an
    /// inconsistent nonlinearity declaration.
    #[error("blow-up guard exceeded at t = {t}: sup-norm {sup_norm:e} > {guard:e}")]
    GuardExceeded { t: f64, sup_norm: f64, guard: f64 },

    #[error("truncation horizon S = {horizon} leaves tail bound {tail:e} above tolerance {tol:e}; need S >= {required}")]
    Truncation {
        horizon: f64,
        tail: f64,
        tol: f64,
        required: f64,
    },

    #[error("monotone pullback ladder violated at rung t = {rung}: {violation:e} > {tol:e}")]
    Monotonicity { rung: f64, violation: f64, tol: f64 },

    #[error("extremal limit did not converge (last rung delta {delta:e}, tol {tol:e}, ladder cap {cap})")]
    NotConverged { delta: f64, tol: f64, cap: f64 },

    /// A structural property of a computed object failed (for example a
    /// quasi-solution that should be nonnegative).
    #[error("{what} violated: {detail}")]
    Invariant { what: &'static str, detail: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
