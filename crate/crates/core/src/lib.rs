//! Pathwise simulation of stochastic parabolic equations with
//! multiplicative Stratonovich noise on `(0, pi)`:
//!
//! ```text
//! du = (u_xx + f(t, x, u) + g(t, x)) dt + alpha u o dW,   u(0) = u(pi) = 0.
//! ```
//!
//! The noise is removed by the conjugation `v = e^{-alpha W(t)} u`, leaving
//! a random PDE that is integrated path by path with an exponential Euler
//! scheme on a sine basis. On top of that the crate builds the explicit
//! complete quasi-solution of the linear comparison problem, pullback
//! absorbing radii, the extremal complete quasi-solutions bounding the
//! pullback attractor, random periodic solutions, and the pitchfork of the
//! stochastic Chafee-Infante equation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chafee;
pub mod error;
pub mod linear;
pub mod pde;
pub mod pullback;
pub mod spatial;
pub mod tolerances;
pub mod wiener;

pub use error::{Error, Result};
pub use spatial::Field;
pub use wiener::{NoisePath, ShiftedPath, WienerPath};
