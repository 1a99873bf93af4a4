//! Finite-N sampling of `M = A + H` with `H` from the GUE, and the statistics
//! used to compare the samples with the limiting curve.

mod reference;
mod sample;
mod stats;

pub use reference::TwReference;
pub use sample::{
    build_matrix, draw_rng, hermitian_eigenvalues, moments, multiplicities, sample_matrix, EnsembleSample, Moments,
    MAX_N,
};
pub use stats::{
    bulk_statistics, edge_statistics, empirical_density, ks_distance, occupancy, pair_correlation, poisson_spacings,
    unfold, wigner_surmise_cdf, wigner_surmise_pdf, Histogram, KernelStats, Occupancy, PairCorrelation, Spacings,
    MIN_EDGE_DRAWS, MIN_SPACINGS, PAIR_BINS, PAIR_RANGE, WINDOW_MARGIN,
};
