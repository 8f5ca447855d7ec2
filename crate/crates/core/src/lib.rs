//! Degree-two L-functions attached to holomorphic Hecke eigen cusp forms.
//!
//! The crate builds coefficient tables for a small set of eigenforms, evaluates
//! the completed L-function on and around the critical line, counts and
//! locates zeros, and implements the mollified sign-change detector together
//! with the arithmetic sums (Selberg sums, K-factors, Rankin-Selberg means,
//! shifted convolutions, Voronoi summation) that control it.
//!
//! Every numerically delicate quantity is computed by two routes where a
//! second route exists, and each route is exposed so callers can compare them.

pub mod arith;
pub mod detector;
pub mod error;
pub mod forms;
pub mod lfunc;
pub mod mollifier;
pub mod specfun;
pub mod sums;
pub mod voronoi;

pub use error::{Error, Result};
pub use num_complex::Complex64;
