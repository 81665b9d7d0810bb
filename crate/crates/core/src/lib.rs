//! Bulk-surface splitting schemes for the semi-linear wave equation with
//! kinetic and acoustic dynamic boundary conditions.
//!
//! The crate is `no_std` (it only needs `alloc`) and covers the numerical side:
//!
//! - [`mesh`]: deterministic quasi-uniform triangulations of the unit disc,
//! - [`linalg`]: CSR matrices, envelope Cholesky/LU factorizations, CG,
//! - [`assembly`]: P1 bulk and surface matrices, coupling and block views,
//! - [`timestep`]: implicit Euler and IMEX Crank-Nicolson for `M u'' + D u' + A u = f`,
//! - [`kinetic`] / [`acoustic`]: the splitting schemes and monolithic references,
//! - [`study`]: initial data, error norms and convergence-order fits.
//!
//! File formats, the CLI and study orchestration live in the `dynbc` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod acoustic;
pub mod assembly;
mod error;
pub mod kinetic;
pub mod linalg;
pub mod mesh;
pub mod reaction;
pub mod splitting;
pub mod study;
pub mod timestep;
pub mod trajectory;

pub use error::{Error, Result};
