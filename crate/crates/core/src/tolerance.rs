//! Residual tolerances shared by every module.
//!
//! Each constant is a base value. [`scaled`] multiplies it by a process-wide
//! factor, which the command line sets from `--tol` or `LJB_TOL`. Rank cutoffs
//! are never scaled; they decide dimensions, not pass/fail.

use std::sync::atomic::{AtomicU64, Ordering};

/// Relative singular-value cutoff for numerical rank.
pub const RANK: f64 = 1e-9;
/// Floor under the rank cutoff so that pure round-off never counts as rank.
pub const RANK_FLOOR: f64 = 1e-12;
/// Relative membership residual.
pub const MEMBER: f64 = 1e-9;
/// Orthonormality of constructed bases.
pub const ORTHO: f64 = 1e-12;
/// Hermiticity of inputs, relative to the matrix norm.
pub const HERMITIAN: f64 = 1e-12;
/// Relative residual for axiom and certificate checks.
pub const AXIOM: f64 = 1e-8;
/// Minimum-eigenvalue slack for positivity.
pub const PSD: f64 = 1e-9;
/// Relative eigenvalue cutoff for the GNS Gram form.
pub const GELFAND: f64 = 1e-10;
/// Stopping threshold for the extension solver.
pub const DYKSTRA: f64 = 1e-9;
/// Iteration cap for the extension solver.
pub const DYKSTRA_CAP: usize = 100_000;
/// Agreement of state values.
pub const STATE: f64 = 1e-9;
/// Round-trip agreement for state correspondences.
pub const ROUND_TRIP: f64 = 1e-7;
/// Eigenvalue clustering gap used when splitting spectra into blocks.
pub const CLUSTER: f64 = 1e-6;

static SCALE_BITS: AtomicU64 = AtomicU64::new(0x3FF0_0000_0000_0000); // 1.0

/// Sets the global tolerance factor. Non-positive or non-finite values are ignored.
pub fn set_scale(factor: f64) {
    if factor.is_finite() && factor > 0.0 {
        SCALE_BITS.store(factor.to_bits(), Ordering::Relaxed);
    }
}

pub fn scale() -> f64 {
    f64::from_bits(SCALE_BITS.load(Ordering::Relaxed))
}

/// `base` multiplied by the global factor.
pub fn scaled(base: f64) -> f64 {
    base * scale()
}
