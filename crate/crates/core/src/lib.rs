//! Diffusion-induced transport in one-dimensional periodic channels.
//!
//! A test particle diffuses with temperature `sigma` in a traveling periodic
//! potential `psi(x - V t)`.  The crate computes the moving-frame steady
//! state and its current, evolves the Fokker-Planck equation in either frame,
//! follows deterministic orbits of the probability velocity field, and works
//! the inverse direction: from the response current back to the correlation
//! function of `psi` and to its even moments.
//!
//! Module map:
//!
//! - [`potential`]: trigonometric potentials, moments, symmetry test
//! - [`steady`]: closed-form steady state, mean velocity, collocation oracle
//! - [`evolve`]: finite-volume time stepping with exponentially fitted fluxes
//! - [`particles`]: velocity field, orbits, empirical mean velocity
//! - [`response`]: correlation function, kernels, transform identity,
//!   resistance, series fitting, moment recovery, numerical inversion

pub mod error;
pub mod evolve;
pub mod export;
pub mod interp;
pub mod particles;
pub mod potential;
pub mod quadrature;
pub mod response;
mod spectral;
pub mod steady;
pub mod tridiag;

pub use error::{Error, Result};
pub use potential::PeriodicPotential;
pub use steady::{ChannelParams, QuadratureSpec, SteadyState};
