//! The listings of the guide in `book/`, compiled and run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/noise-paths.md")]
pub mod noise_paths {}

#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/linear.md")]
pub mod linear {}

#[doc = include_str!("../../../book/src/pullback.md")]
pub mod pullback {}

#[doc = include_str!("../../../book/src/chafee.md")]
pub mod chafee {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
