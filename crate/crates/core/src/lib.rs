//! Equilibrium, vibrational spectrum, equivariant degree invariants and
//! continued nonlinear normal modes of the C60 cage.

pub mod continuation;
pub mod degrees;
pub mod equilibrium;
pub mod error;
pub mod forcefield;
pub mod molecule;
pub mod representation;

pub use error::{Error, Result};

/// Crate version embedded in exported files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
