//! Private sampling of synthetic data on the Boolean cube `{-1, 1}^p`.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`walsh`]: Walsh functions, graded index sets, Walsh matrices, low-frequency
//!   coefficients and marginal reconstruction.
//! * [`encode`]: one-hot encoding of categorical tables and empirical density statistics.
//! * [`lp`], [`qp`] and [`kkt`]: the shrinkage linear program, the proximal quadratic
//!   program, the solvers for both and solver-independent optimality residuals.
//! * [`sampler`]: the end-to-end pipeline (reduced space, conditioning check, shrinkage,
//!   proximal point, sampling) and marginal verification.
//! * [`asia`]: a seeded generator for the Asia Bayesian-network benchmark.
//! * [`bounds`]: closed-form privacy and accuracy bounds, evaluated in log10 space, and
//!   the runtime extrapolation used to judge tractability.
//!
//! Inner products follow the density-weighted convention: the coefficient of a density
//! `f` on the Walsh function `w_J` is `sum_x f(x) w_J(x)`, so every probability density
//! has coefficient 1 on the empty index.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asia;
pub mod bounds;
pub mod cube;
pub mod encode;
mod error;
pub mod kkt;
pub mod linalg;
pub mod lp;
pub mod qp;
pub mod rng;
pub mod sampler;
pub mod walsh;

pub use cube::{CubePoint, DataMatrix};
pub use error::{Error, Result};
