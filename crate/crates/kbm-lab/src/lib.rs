//! Simulation and verification laboratory for kinetic Brownian motion on
//! rotationally symmetric warped-product manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] describes warped metrics `dr² + f(r)²dθ²` and their
//!   curvature and integrability properties.
//! * [`sde`] provides seeded noise streams and projected Euler and Heun steps.
//! * [`kbm`] simulates the Euclidean, polar, radial, half-plane and lifted
//!   processes.
//! * [`roughpath`] builds level-2 rough-path lifts and solves rough
//!   differential equations.
//! * [`cartan`] implements Cartan development and anti-development.
//! * [`stats`] holds ensemble summaries, fits and invariant densities.
//! * [`checks`] evaluates the acceptance criteria shared by the CLI and tests.
//! * [`config`] resolves command-line flags over TOML files over defaults.
//! * [`cli`] implements the `kbm-lab` commands and their output manifests.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod cartan;
pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kbm;
pub mod numerics;
pub mod roughpath;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
