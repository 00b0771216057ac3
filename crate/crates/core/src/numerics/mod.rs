//! Small numerical kernels shared by the physics modules: adaptive
//! Gauss-Legendre quadrature, bracketed root finding, golden-section search
//! and least-squares/extrapolation helpers.

pub mod fit;
pub mod quad;
pub mod roots;

pub use fit::{linear_fit, richardson_inverse, LinearFit};
pub use quad::{gauss_legendre_rule, integrate, Quadrature};
pub use roots::{brent, golden_max, RootOptions};
