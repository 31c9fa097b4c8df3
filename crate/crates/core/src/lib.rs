//! Restricted-Boltzmann-machine quantum states for the square-lattice
//! Heisenberg antiferromagnet, their exact mapping onto bipartite Ising
//! models, and the tools to compare Metropolis-Hastings against blocked
//! Gibbs (stochastic Ising machine) sampling of those models.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod advantage;
pub mod autocorr;
pub mod barrier;
pub mod error;
pub mod estimate;
pub mod ising;
pub mod lattice;
pub mod linalg;
mod math;
pub mod oracle;
pub mod rbm;
pub mod rng;
pub mod sampler;
pub mod train;

pub use error::{Error, Result};
pub use ising::IsingModel;
pub use lattice::{SpinConfig, SquareLattice};
pub use math::log_2cosh;
pub use rbm::{RbmModel, ThetaCache};
pub use sampler::{SamplerKind, SpinChain};
