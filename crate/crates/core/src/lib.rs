//! Discrete-time quantum walks on a one-dimensional open chain under
//! homogeneous, uncorrelated random, and binary-pair correlated coin noise.
//!
//! The crate is organized bottom-up:
//!
//! - [`walker`]: the walker state, the coin `cosθ·Z + sinθ·X` and the fused
//!   coin-and-shift step;
//! - [`noise`]: seeded generators of coin-angle schedules, spatial or temporal;
//! - [`observables`]: moments, σ(t), power-law and exponential-tail fits;
//! - [`ensemble`]: disorder ensembles, θ₁ scans and finite-size scaling;
//! - [`config`] and [`cli`]: the JSON experiment format and the drivers
//!   behind the `qwalk` binary.

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod noise;
pub mod observables;
pub mod walker;

pub use error::{Error, Result};
