//! Spin-system descriptors, local and collective operators, canonical states
//! and density-matrix utilities.

mod field;
mod msdm;
mod ops;
mod state;
mod system;

pub use field::DirectionField;
pub use msdm::{parse_msdm, read_msdm, write_msdm};
pub use ops::{
    collective_operator, direction_operator, embed_site, pauli, site_basis, spin_matrices,
    OperatorKind, SiteOp,
};
pub use state::{
    ghz_state, metrology_state, mixed_bell, mixed_ghz, plus_product, product_state,
    random_density, random_pure, spin_cat, DensityMatrix,
};
#[cfg(test)]
pub(crate) use state::basis_vector;
pub(crate) use state::mixed_ghz_components;
pub use system::{SystemDescriptor, MAX_DENSE_DIM};

/// Purity `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Reduced state on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> crate::Result<DensityMatrix> {
    rho.partial_trace(keep)
}
