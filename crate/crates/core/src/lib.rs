//! Spectral analysis of the Gaussian Hermitian matrix model with an external source.

pub mod curve;
pub mod error;
pub mod evolution;
pub mod poly;
pub mod quad;
pub mod mc;
pub mod rh;
