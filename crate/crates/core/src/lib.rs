//! Negativity-family entanglement measures for bipartite and multipartite
//! quantum states.
//!
//! The crate computes the negativity and logarithmic negativity of
//! finite-dimensional density matrices, their closed forms for pure and
//! highly symmetric states, base-norm ("S-negativity") variational programs,
//! teleportation and distillation bounds, the Gaussian covariance-matrix
//! pipeline, and splitting negativities of multipartite states. Everything
//! is dense, double precision, and aimed at desk-scale dimensions.

pub mod base_norm;
pub mod bounds;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod multipartite;
pub mod states;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dense real matrix (Gaussian covariance work).
pub type RMat = nalgebra::DMatrix<f64>;
