use serde::Serialize;

use super::build::QuadraticSource;
use super::matrix::{Convention, MatrixKind, MeasureMatrix};
use super::optimize::{optimize_direction, OptimizeOptions};
use crate::error::Result;
use crate::linalg::{self, CMat, Op};
use crate::numfmt::Sig17;
use crate::spincore::{collective_operator, DensityMatrix, DirectionField, OperatorKind};

/// Optimized value of ℐ or ℱ together with the field that attains it.
#[derive(Clone, Debug)]
pub struct MeasureResult {
    pub measure: MatrixKind,
    pub convention: Convention,
    pub value: f64,
    pub optimal_field: DirectionField,
    pub restarts_used: usize,
    pub best_restart_index: usize,
    pub grad_norm: f64,
    pub spread: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    measure: &'a str,
    convention: &'a str,
    value: Sig17,
    alpha: Vec<[Sig17; 3]>,
    restarts: usize,
    grad_norm: Sig17,
    spread: Sig17,
    seed: u64,
}

impl MeasureResult {
    pub fn to_json(&self) -> String {
        let j = ResultJson {
            measure: self.measure.measure_tag(),
            convention: self.convention.tag(),
            value: Sig17(self.value),
            alpha: self.optimal_field.vectors().iter().map(|v| v.map(Sig17)).collect(),
            restarts: self.restarts_used,
            grad_norm: Sig17(self.grad_norm),
            spread: Sig17(self.spread),
            seed: self.seed,
        };
        serde_json::to_string_pretty(&j).expect("plain struct serializes")
    }

    /// Value in the other convention (spin 1/2 only for the qubit scale).
    pub fn value_in(&self, convention: Convention) -> f64 {
        self.value * convention.factor() / self.convention.factor()
    }
}

/// Maximizes the quadratic form of a prebuilt matrix.
pub fn maximize(m: &MeasureMatrix, opts: &OptimizeOptions) -> Result<MeasureResult> {
    let opt = optimize_direction(m, opts)?;
    Ok(MeasureResult {
        measure: m.kind(),
        convention: m.convention(),
        value: opt.value,
        optimal_field: opt.field,
        restarts_used: opt.restarts,
        best_restart_index: opt.best_restart,
        grad_norm: opt.grad_norm,
        spread: opt.spread,
        seed: opts.seed,
    })
}

/// ℐ: `max_A Tr[ρ²A² − ρAρA]/(NS𝒫)`, times 2 in the qubit convention.
pub fn measure_i<S: QuadraticSource + ?Sized>(
    state: &S,
    convention: Convention,
    opts: &OptimizeOptions,
) -> Result<MeasureResult> {
    maximize(&state.build_v(convention)?, opts)
}

/// ℱ: `max_A F(ρ, A)/(4N)` with Pauli `A` (the qubit convention).
pub fn measure_f<S: QuadraticSource + ?Sized>(
    state: &S,
    convention: Convention,
    opts: &OptimizeOptions,
) -> Result<MeasureResult> {
    maximize(&state.build_w(convention)?, opts)
}

/// `A` at `field` in spin units.
fn spin_unit_operator(rho: &DensityMatrix, field: &DirectionField, kind: OperatorKind) -> Result<CMat> {
    kind.check(rho.descriptor())?;
    let a = collective_operator(rho.descriptor(), field, kind)?;
    Ok(a.unscale(kind.scale()))
}

fn denominator(rho: &DensityMatrix) -> f64 {
    let d = rho.descriptor();
    d.num_sites() as f64 * d.spin()
}

/// ℐ at a fixed field from eigenvalues: `½Σ(π_k−π_l)²|A_kl|²/(NS𝒫)`.
pub fn spectral_i(
    rho: &DensityMatrix,
    field: &DirectionField,
    kind: OperatorKind,
    convention: Convention,
) -> Result<f64> {
    convention.check(rho.descriptor())?;
    let a = spin_unit_operator(rho, field, kind)?;
    let (p, u) = linalg::eigh(rho.matrix())?;
    let au = linalg::matmul(&a, &u);
    let ak = linalg::gemm(&u, Op::H, &au, Op::N);
    let mut s = 0.0;
    for l in 0..p.len() {
        for k in 0..p.len() {
            s += (p[k] - p[l]).powi(2) * ak[(k, l)].norm_sqr();
        }
    }
    Ok(convention.factor() * 0.5 * s / (denominator(rho) * rho.purity()))
}

/// ℐ at a fixed field straight from `Tr[ρ²A² − ρAρA]/(NS𝒫)`.
pub fn trace_form_i(
    rho: &DensityMatrix,
    field: &DirectionField,
    kind: OperatorKind,
    convention: Convention,
) -> Result<f64> {
    convention.check(rho.descriptor())?;
    let a = spin_unit_operator(rho, field, kind)?;
    let ra = linalg::matmul(rho.matrix(), &a);
    // Tr[ρAρA] = Tr[(ρA)²], Tr[ρ²A²] = ‖ρA‖²_F
    let t1 = ra.norm_squared();
    let t2 = linalg::trace_prod(&ra, &ra).re;
    Ok(convention.factor() * (t1 - t2) / (denominator(rho) * rho.purity()))
}

/// ℱ at a fixed field from the eigen-sum `2Σ(π_k−π_l)²/(π_k+π_l)|A_kl|²`.
pub fn fisher_at(
    rho: &DensityMatrix,
    field: &DirectionField,
    kind: OperatorKind,
    convention: Convention,
) -> Result<f64> {
    convention.check(rho.descriptor())?;
    let a = spin_unit_operator(rho, field, kind)?;
    let (p, u) = linalg::eigh(rho.matrix())?;
    let ak = linalg::gemm(&u, Op::H, &linalg::matmul(&a, &u), Op::N);
    let mut q = 0.0;
    for l in 0..p.len() {
        for k in 0..p.len() {
            let s = p[k] + p[l];
            if s > 1e-14 {
                q += 2.0 * (p[k] - p[l]).powi(2) / s * ak[(k, l)].norm_sqr();
            }
        }
    }
    // quantum Fisher information over 4NS
    Ok(convention.factor() * q / (4.0 * denominator(rho)))
}
