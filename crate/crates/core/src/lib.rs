//! Traveling-wave solutions of the generalized surface quasi-geostrophic
//! equations, computed by minimizing an energy over the Nehari manifold.
//!
//! The pipeline is: build a [`minimizer::SolveConfig`], call
//! [`minimizer::solve`], then check the result with [`verify::verify_bundle`]
//! and [`transport::wave_report`].

pub mod config;
pub mod energy;
pub mod error;
pub mod grid;
pub mod io;
pub mod minimizer;
pub mod nonlinearity;
pub mod rearrange;
pub mod spectral;
pub mod transport;
pub mod verify;

pub use energy::{Functional, WaveParams};
pub use error::{Error, Result};
pub use grid::{Grid, ScalarField};
pub use minimizer::{solve, SolutionBundle, SolveConfig};
pub use nonlinearity::Nonlin;
pub use spectral::{FracParams, Spectral};
