use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Which bilinear product a witness refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Product {
    Jordan,
    Lie,
    /// Associative product `x * y`.
    Left,
    /// Associative product `y * x`.
    Right,
    Adjoint,
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Product::Jordan => "jordan",
            Product::Lie => "lie",
            Product::Left => "left-multiplication",
            Product::Right => "right-multiplication",
            Product::Adjoint => "adjoint",
        };
        f.write_str(s)
    }
}

/// A concrete failing basis pair: `product(basis_a[left], basis_b[right])`
/// left the target subspace with the given residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub left: usize,
    pub right: usize,
    pub product: Product,
    pub residual: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of basis pair ({}, {}) has residual {:.3e}",
            self.product, self.left, self.right, self.residual
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected {n}x{n}")]
    DimensionMismatch { n: usize, rows: usize, cols: usize },

    #[error("ambient size mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("ambient size must be positive")]
    EmptyAmbient,

    #[error("generator {index} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { index: usize, deviation: f64 },

    #[error("{what}: basis element {index} is not contained (residual {residual:.3e})")]
    NotContained {
        what: &'static str,
        index: usize,
        residual: f64,
    },

    #[error("{what}: vector is not a member (residual {residual:.3e})")]
    NotMember { what: &'static str, residual: f64 },

    #[error("invalid parameters lambda={lambda}, kappa={kappa}: {reason}")]
    InvalidParams {
        lambda: f64,
        kappa: f64,
        reason: &'static str,
    },

    #[error("carrier is not closed: {witness}")]
    NotClosed { witness: Witness },

    #[error("not an ideal: {witness}")]
    NotAnIdeal { witness: Witness },

    #[error("not a Lie-Jordan subalgebra: {witness}")]
    NotASubalgebra { witness: Witness },

    #[error("subalgebra contains the unit of the algebra; the reduction would be trivial")]
    UnitalSubalgebra,

    #[error("algebra has no unit")]
    NoUnit,

    #[error("not a state: {reason}")]
    NotAState { reason: String },

    #[error("functional does not vanish on basis element {index} (value {value:.3e})")]
    NotVanishing { index: usize, value: f64 },

    #[error(
        "extension did not converge after {iterations} iterations \
         (affine residual {affine_residual:.3e}, psd violation {psd_violation:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        affine_residual: f64,
        psd_violation: f64,
    },

    #[error("functionals live on different algebras")]
    AlgebraMismatch,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("theorem violation ({theorem}): {detail}")]
    TheoremViolation {
        theorem: &'static str,
        detail: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal a failed numerical certificate rather than bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
