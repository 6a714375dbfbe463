//! Numerical toolkit for symmetry-reduced spectral asymptotics.
//!
//! Given a compact group of isometries acting on a bounded invariant domain
//! and an invariant elliptic symbol, the crate predicts the per-character
//! eigenvalue counting function N_χ(λ) ~ C_χ·λ^p from character data and a
//! quotient volume over the zero level of the momentum map, computes true
//! counts from exact Bessel-zero spectra or a finite-difference Laplacian
//! with isotypic splitting, and verifies the geometric identities and the
//! stationary-phase leading term underlying the asymptotics.

pub mod domains;
pub mod error;
pub mod group_actions;
pub mod quadrature;
pub mod oscillatory;
pub mod reduced_volume;
pub mod spectra;
pub mod weyl;
pub mod rng;
pub mod representations;
pub mod symbols;

pub use error::{Error, Result};

/// Crate version, for report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
