//! Transverse-field Ising chain: free-fermion block states of the infinite
//! chain, exact ring ground states and measure sweeps.

mod chain;
mod fermion;
mod rdm;
mod sweep;

pub use chain::{exact_ground_state, GroundState};
pub use fermion::{
    canonical_skew_form, g_coefficient, g_coefficients, gamma_matrix, CanonicalSkewForm, MajoranaCorrelation,
};
pub use rdm::{block_rdm, xx_correlation, MAX_BLOCK};
pub use sweep::{
    loglog_slope, max_variance_per_particle, scaling_exponent, sweep_block, sweep_csv, sweep_point, sweep_row,
    ScalingFit, SweepRecord,
};
