//! Special functions, reference kernels, and the explicit model Riemann–Hilbert solution.

mod airy;
mod kernels;
mod model;

pub use airy::{airy, airy_real, omega, y_alpha, y_alpha_with_derivative, AI0, AIP0, OVERFLOW_GUARD};
pub use kernels::{airy_kernel, sine_kernel, AIRY_DIAGONAL, SINE_DIAGONAL};
pub use model::{model_rh_matrix, model_rh_boundary, verify_model_rh, ModelRHMatrix, RhReport};
