use rayon::prelude::*;

use super::chain::exact_ground_state;
use super::rdm::block_rdm;
use crate::error::{Error, Result};
use crate::macromeasure::{measure_f, measure_i, Convention, OptimizeOptions};
use crate::numfmt::csv_row;
use crate::spincore::DirectionField;

/// ℐ and ℱ of one block state.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub lambda: f64,
    pub block_len: usize,
    pub i: f64,
    /// `None` when only ℐ was requested.
    pub f: Option<f64>,
    pub purity: f64,
    pub field_i: DirectionField,
    pub field_f: Option<DirectionField>,
}

/// One record per `(λ, L)`, sorted by `L` then `λ`. Measures are in the
/// qubit convention.
pub fn sweep_block(
    lambdas: &[f64],
    block_lens: &[usize],
    with_f: bool,
    opts: &OptimizeOptions,
) -> Result<Vec<SweepRecord>> {
    let mut points: Vec<(usize, f64)> =
        block_lens.iter().flat_map(|&l| lambdas.iter().map(move |&x| (l, x))).collect();
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.into_par_iter().map(|(l, lambda)| sweep_point(lambda, l, with_f, opts)).collect()
}

pub fn sweep_point(lambda: f64, block_len: usize, with_f: bool, opts: &OptimizeOptions) -> Result<SweepRecord> {
    let rho = block_rdm(lambda, block_len)?;
    let conv = Convention::QubitNormalized;
    let ri = measure_i(&rho, conv, opts)?;
    let rf = if with_f { Some(measure_f(&rho, conv, opts)?) } else { None };
    Ok(SweepRecord {
        lambda,
        block_len,
        i: ri.value,
        f: rf.as_ref().map(|r| r.value),
        purity: rho.purity(),
        field_i: ri.optimal_field,
        field_f: rf.map(|r| r.optimal_field),
    })
}

/// Header `lambda,L,I,F,purity`; a missing ℱ is written as `NaN`.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from("lambda,L,I,F,purity\n");
    for r in records {
        s.push_str(&sweep_row(r));
        s.push('\n');
    }
    s
}

pub fn sweep_row(r: &SweepRecord) -> String {
    let lam = csv_row(&[r.lambda]);
    format!("{lam},{},{}", r.block_len, csv_row(&[r.i, r.f.unwrap_or(f64::NAN), r.purity]))
}

/// `maxVar(A)/N` of the ring ground state, which is ℐ = ℱ in the qubit
/// convention for a pure state.
pub fn max_variance_per_particle(lambda: f64, num_sites: usize, opts: &OptimizeOptions) -> Result<f64> {
    let gs = exact_ground_state(lambda, num_sites)?;
    Ok(measure_i(&gs.spectral()?, Convention::QubitNormalized, opts)?.value)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("need at least two matching points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("x values must differ"));
    }
    Ok(sxy / sxx)
}

/// Scaling of `maxVar/N` with ring length.
#[derive(Clone, Debug)]
pub struct ScalingFit {
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
    pub exponent: f64,
}

impl ScalingFit {
    /// Header `N,maxvar_per_particle`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,maxvar_per_particle\n");
        for (n, v) in self.sizes.iter().zip(&self.values) {
            s.push_str(&format!("{n},{}\n", csv_row(&[*v])));
        }
        s
    }
}

pub fn scaling_exponent(sizes: &[usize], lambda: f64, opts: &OptimizeOptions) -> Result<ScalingFit> {
    let values = sizes
        .par_iter()
        .map(|&n| max_variance_per_particle(lambda, n, opts))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let exponent = loglog_slope(&xs, &values)?;
    Ok(ScalingFit { sizes: sizes.to_vec(), values, exponent })
}
