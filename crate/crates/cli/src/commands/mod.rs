pub mod bifurcate;
pub mod extremal;
pub mod periodic;
pub mod simulate;
pub mod xi;
