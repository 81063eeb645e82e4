//! Numerical analysis of finite-state reversible Markov kernels.
//!
//! A transition matrix `P` that satisfies detailed balance with respect to a
//! distribution `pi` is a bounded self-adjoint operator on the weighted space
//! L²(π). That single fact buys a lot of machinery: real eigenvalues in
//! [-1, 1], spectral gaps, a Dirichlet form whose infimum over unit mean-zero
//! functions *is* the right gap, an exact expression for the asymptotic
//! variance of ergodic averages, and Cheeger-type bounds tying all of it to
//! conductance. This crate computes each of these quantities for dense finite
//! chains and cross-checks every identity along more than one route.
//!
//! Organization:
//!
//! - [`hilbert`] — π-weighted inner products, centering, variance.
//! - [`kernel`] — stochastic matrices, detailed balance, stationary
//!   distributions, Metropolis–Hastings construction, lazy mixtures.
//! - [`spectral`] — symmetrized eigendecomposition, spectral gaps, spectral
//!   measures, geometric decay checks.
//! - [`dirichlet`] — Dirichlet forms, the variational form of the right gap,
//!   flow-ratio ordering certificates between kernels.
//! - [`variance`] — exact asymptotic variance, its spectral bound, the
//!   quadratic variational representation of `<f, (I-P)^{-1} f>`, and
//!   Peskun-style variance orderings.
//! - [`conductance`] — set and kernel conductance, Cheeger bound checks,
//!   Lawler–Sokal diagnostics, and a moment inequality for standardized
//!   distributions.
//! - [`simulate`] — seeded trajectory sampling and batch-means estimation of
//!   the asymptotic variance, cross-validated against the exact solver.
//!
//! The crate is `no_std` (it allocates but never touches the OS); IO, file
//! formats and the command-line front end live in the companion CLI crate.
//!
//! All state spaces are indexed `0..n-1` and all matrices are dense `f64`.
//! Default tolerances: 1e-10 for validation, 1e-12 for algebraic identities
//! on well-conditioned inputs.

#![no_std]
// Dense matrix code indexes rows and columns directly; iterator rewrites of
// those loops obscure the math.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conductance;
pub mod dirichlet;
mod error;
pub mod hilbert;
pub mod kernel;
pub mod linalg;
mod rng;
pub mod simulate;
pub mod spectral;
pub mod testkit;
pub mod variance;

pub use error::{Error, Result};
