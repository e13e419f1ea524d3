//! Model parameters shared by the Chafee-Infante commands.

use std::f64::consts::PI;

use clap::Args;
use randattr::chafee::{ChafeeSpec, Gamma};
use randattr::Field;
use serde::Serialize;

use crate::config::check_positive;
use crate::exit::Failure;

pub const NU: f64 = 1.5;
pub const GAMMA0: f64 = 1.0;
pub const ALPHA: f64 = 0.5;
pub const MODES: usize = 64;
pub const DT: f64 = 1e-3;
pub const PERIOD: f64 = 1.0;

/// Flags describing `du = (u_xx + nu u - gamma(t) u^3) dt + alpha u o dW`.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ModelFlags {
    /// Linear coefficient nu.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Level of the cubic coefficient gamma.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    /// Relative amplitude a of gamma(t) = gamma0 (1 + a sin(2 pi t / T)); 0 is constant.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_amp: Option<f64>,
    /// Period T of gamma(t).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_period: Option<f64>,
    /// Noise intensity alpha.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Number of sine modes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Time step (also the noise sampling step).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

pub fn gamma(level: f64, amp: f64, period: f64) -> Gamma {
    if amp == 0.0 {
        Gamma::Constant { level }
    } else {
        Gamma::Periodic { level, amp, period }
    }
}

/// Builds and validates a Chafee-Infante configuration.
pub fn chafee(nu: f64, gamma: Gamma, alpha: f64, modes: usize, dt: f64) -> Result<ChafeeSpec, Failure> {
    discretization(alpha, modes, dt)?;
    let c = ChafeeSpec::new(nu, gamma.lower())
        .with_gamma(gamma)
        .with_alpha(alpha)
        .with_modes(modes)
        .with_dt(dt);
    c.validate()?;
    Ok(c)
}

pub fn discretization(alpha: f64, modes: usize, dt: f64) -> Result<(), Failure> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Failure::config(format!("`alpha` must be finite and >= 0, got {alpha}")));
    }
    if modes == 0 {
        return Err(Failure::config("`modes` must be positive"));
    }
    check_positive("dt", dt)
}

/// Initial data by name, scaled by `amp`: `zero`, `sin`, `modeK`, `tent`,
/// `parabola`.
pub fn initial_field(name: &str, amp: f64, modes: usize) -> Result<Field, Failure> {
    let f = match name {
        "zero" => Field::zeros(modes),
        "sin" => Field::mode(modes, 1, amp),
        "tent" => Field::from_fn(modes, |x| amp * (1.0 - (2.0 * x / PI - 1.0).abs())),
        "parabola" => Field::from_fn(modes, |x| amp * 4.0 * x * (PI - x) / (PI * PI)),
        other => match other.strip_prefix("mode").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if (1..=modes).contains(&k) => Field::mode(modes, k, amp),
            _ => {
                return Err(Failure::config(format!(
                    "`init` = `{other}`: expected zero, sin, tent, parabola or modeK with 1 <= K <= {modes}"
                )))
            }
        },
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_initial_data() {
        assert!(initial_field("zero", 1.0, 8).unwrap().is_zero());
        assert_eq!(initial_field("mode3", 2.0, 8).unwrap().coeffs()[2], 2.0);
        assert!((initial_field("tent", 1.0, 64).unwrap().eval(PI / 2.0) - 1.0).abs() < 0.02);
        assert_eq!(initial_field("mode9", 1.0, 8).unwrap_err().code(), 2);
    }

    #[test]
    fn periodic_gamma_only_with_amplitude() {
        assert_eq!(gamma(1.0, 0.0, 1.0), Gamma::Constant { level: 1.0 });
        assert_eq!(gamma(1.0, 0.5, 2.0).lower(), 0.5);
    }
}
