//! Critical theory of photon blockade breakdown in the resonantly driven
//! Jaynes-Cummings model.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Laguerre polynomials, integer-order Bessel functions, log-Gamma.
//! * [`spectrum`]: drive parameters and the exact driven eigenvalues.
//! * [`matel`]: photon matrix elements between driven eigenstates.
//! * [`rates`]: the classical transition-rate matrix (exact and asymptotic).
//! * [`steady`]: stationary distributions and their width.
//! * [`observables`]: steady-state expectation values and critical exponents.
//! * [`meanfield`]: semiclassical Bloch-photon equations and their stability.
//! * [`toymodel`]: biased nearest-neighbour hopping on the dressed lattice.
//!
//! Units: the atom-cavity coupling `g` is 1 everywhere except in [`meanfield`].

pub mod error;
pub mod fit;
pub mod matel;
pub mod meanfield;
pub mod observables;
pub mod rates;
pub mod specfun;
pub mod spectrum;
pub mod steady;
pub mod toymodel;

pub use error::{Error, Result};
pub use spectrum::{Branch, DriveParams, EigenLabel};
