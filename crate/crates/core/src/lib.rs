//! Structure-preserving discretizations of the compressible Euler equations
//! with gravity, in potential temperature and total energy form.
//!
//! The crate provides entropy and total-energy conservative two-point
//! fluxes, well-balanced non-conservative geopotential terms, Cartesian
//! finite volumes and flux-differencing DGSEM on curvilinear meshes, SSPRK43
//! time stepping, diagnostics and the scenario set used by the `thetaflux`
//! command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod averaging;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fluxes;
pub mod mesh;
pub mod output;
pub mod sbp;
pub mod scenarios;
pub mod semidiscretization;
pub mod state;
pub mod time_integration;
pub mod verify;

pub use error::{ConfigError, DomainError, Error, EvalError, MeshError, Result};
