//! Finite-dimensional Lie–Jordan Banach algebras realized inside Hermitian
//! matrices: axiom checks, reduction by Jordan ideals and by non-unital
//! subalgebras, the constraint T-reduction of C*-algebras, reduced states and
//! GNS representations.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod genrand;
pub mod gns;
pub mod linalg;
pub mod ljb_core;
pub mod matspace;
pub mod reduction;
pub mod states;
pub mod tolerance;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use matspace::{AmbientSpace, MatrixSubspace};
