use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::spincore::{collective_operator, DensityMatrix, DirectionField, OperatorKind};

/// `−(1/2NS) d/dt ln Tr ρ²` under `dρ/dt = γ(AρA − ½{A², ρ})`, which is
/// `γ·Tr[ρ²A² − ρAρA]/(NS𝒫)` with `A` built from `field` in the given basis.
pub fn dephasing_purity_rate(
    rho: &DensityMatrix,
    field: &DirectionField,
    kind: OperatorKind,
    gamma: f64,
) -> Result<f64> {
    let desc = rho.descriptor();
    let a = collective_operator(desc, field, kind)?;
    let ra = linalg::matmul(rho.matrix(), &a);
    let t = ra.norm_squared() - linalg::trace_prod(&ra, &ra).re;
    Ok(gamma * t / (desc.num_sites() as f64 * desc.spin() * rho.purity()))
}

/// `γ(AρA − ½{A², ρ})`.
pub fn dephasing_generator(rho: &CMat, a: &CMat, gamma: f64) -> CMat {
    let ar = linalg::matmul(a, rho);
    let ara = linalg::matmul(&ar, a);
    let a2 = linalg::matmul(a, a);
    let left = linalg::matmul(&a2, rho);
    (ara - (&left + left.adjoint()) * linalg::C64::new(0.5, 0.0)) * linalg::C64::new(gamma, 0.0)
}
