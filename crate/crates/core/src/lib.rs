//! Fundamental limits of sparse superresolution on the grid.
//!
//! The on-grid partial Fourier system `a_j(θ) = e^{ijθ}/√(2πy)`, `θ ∈ [−πy, πy]`,
//! is studied through the Gram matrices of its atoms. This crate computes, in
//! arbitrary precision, the lower restricted isometry constants `ε_k`, the
//! `ε`-spark, the Szegő-theoretic quantities of the arc `{e^{iθ} : |θ| ≤ πy}`,
//! and brute-force `ℓ0` recovery, and checks all of them against the explicit
//! two-sided inequalities that govern the minimax error.

pub mod acceptance;
pub mod check;
pub mod error;
pub mod exact;
pub mod hp;
pub mod linalg;
pub mod matrix;
pub mod recovery;
pub mod spectral;
pub mod system;
pub mod szego;

pub use check::BoundCheck;
pub use error::{Error, Result};
pub use hp::{HpComplex, HpReal};
pub use system::{
    build_gram, capacity, gram_entry, measurement_norm, synthesize, CoefficientVector, GramMatrix,
    MeasurementVector, SupportSet, SystemParams,
};
