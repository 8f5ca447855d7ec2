//! Special functions, quadrature and compensated summation shared by the
//! numeric modules.

mod bessel;
mod gamma;
mod incgamma;
mod logcomplex;
pub mod quad;
pub mod summation;

pub use bessel::{bessel_j, bessel_j_integral};
pub use gamma::{gamma_lanczos, log_gamma, log_gamma_lanczos};
pub use incgamma::{upper_incomplete_gamma, ScaledComplex};
pub use logcomplex::{wrap_phase, LogComplex};
pub use quad::{
    integrate, integrate_complex, integrate_complex_with, integrate_with, QuadResult,
    QuadratureSpec, Upper,
};
