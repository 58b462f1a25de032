//! The measures ℐ and ℱ: `3N×3N` quadratic-form matrices, direction-field
//! optimization, the permutation-symmetric shortcut and fixed-field forms.

mod build;
mod dephasing;
mod matrix;
mod measure;
mod optimize;
mod spectral;
mod symmetric;

pub use build::{build_v, build_v_spectral, build_w, build_w_spectral, QuadraticSource};
pub use dephasing::{dephasing_generator, dephasing_purity_rate};
pub use matrix::{Convention, MatrixKind, MeasureMatrix};
pub use measure::{fisher_at, maximize, measure_f, measure_i, spectral_i, trace_form_i, MeasureResult};
pub use optimize::{local_ascent, optimize_direction, DirectionOptimum, LocalOptimum, OptimizeOptions};
pub use spectral::SpectralDecomposition;
pub use symmetric::{check_permutation_symmetric, symmetric_measure, symmetric_value};
pub(crate) use symmetric::symmetric_optimum;

#[cfg(test)]
mod tests;
