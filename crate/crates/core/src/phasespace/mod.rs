//! SU(2) phase space of a single spin: Clebsch–Gordan coefficients,
//! irreducible tensors, characteristic functions and Wigner grids.

mod cg;
mod sphere;
mod tensor;
mod wigner;

pub use cg::{cg_doubled, clebsch_gordan};
pub use sphere::{normalized_legendre, spherical_harmonic};
pub use tensor::{
    characteristic_of_operator, characteristic_table, irreducible_tensor, iz_sum,
    purity_from_characteristic, CharacteristicTable,
};
pub use wigner::{
    apply_lz2, iz_quadrature, overlap_expectation, project_characteristic, wigner_grid, GridSpec,
    WignerGrid,
};
