//! Collective decay and dephasing master equations, in the full space and
//! in the symmetric (Dicke) subspace.

mod dicke;
mod generator;
mod integrate;
mod trajectory;

pub use dicke::{dicke_isometry, dicke_measures, DickeState};
pub use generator::{Channel, LindbladSpec};
pub use integrate::{dicke_evolve, evolve, EvolveOptions, Evolution};
pub use trajectory::{dicke_trajectory, full_trajectory, Trajectory, TrajectoryPoint};

use crate::error::Result;
use crate::linalg::CMat;
use crate::spincore::DensityMatrix;

/// `dρ/dt` in the full space.
pub fn lindblad_rhs(rho: &DensityMatrix, spec: &LindbladSpec) -> Result<CMat> {
    Ok(generator::Generator::full(spec, rho.descriptor())?.rhs(rho.matrix()))
}

#[cfg(test)]
mod tests;
