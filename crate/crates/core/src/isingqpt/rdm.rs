use rayon::prelude::*;

use super::fermion::{canonical_skew_form, gamma_matrix, CanonicalSkewForm};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, ZERO};
use crate::spincore::{DensityMatrix, SystemDescriptor};

/// Largest block handled densely.
pub const MAX_BLOCK: usize = 12;

/// Linear combination `d = Σ_j w_j c_j` of Jordan–Wigner Majoranas
/// `c_{2k} = Z_0⋯Z_{k−1}X_k`, `c_{2k+1} = Z_0⋯Z_{k−1}Y_k`.
struct MajoranaSum {
    len: usize,
    // per site k: (w_{2k} − i w_{2k+1}) when bit k is 0, (w_{2k} + i w_{2k+1}) when 1
    coeff: Vec<[C64; 2]>,
}

impl MajoranaSum {
    fn new(w: &[f64]) -> Self {
        let len = w.len() / 2;
        let coeff = (0..len)
            .map(|k| [C64::new(w[2 * k], -w[2 * k + 1]), C64::new(w[2 * k], w[2 * k + 1])])
            .collect();
        Self { len, coeff }
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        let l = self.len;
        for (x, o) in out.iter_mut().enumerate() {
            let mut s = ZERO;
            let mut sign = 1.0;
            for k in 0..l {
                let b = 1usize << (l - 1 - k);
                let bit = (x & b != 0) as usize;
                s += self.coeff[k][bit] * v[x ^ b] * sign;
                if bit == 1 {
                    sign = -sign;
                }
            }
            *o = s;
        }
    }
}

/// Reduced state of `L` contiguous sites of the infinite-chain ground state,
/// `ρ_L = Π_m (1 + iν_m d_{2m} d_{2m+1})/2` with `d = V c`.
pub fn block_rdm(lambda: f64, block_len: usize) -> Result<DensityMatrix> {
    if block_len == 0 || block_len > MAX_BLOCK {
        return Err(Error::invalid(format!("block length must be in 1..={MAX_BLOCK}")));
    }
    let gamma = gamma_matrix(lambda, block_len)?;
    let form = canonical_skew_form(&gamma.gamma)?;
    rdm_from_form(&form, block_len)
}

pub(crate) fn rdm_from_form(form: &CanonicalSkewForm, block_len: usize) -> Result<DensityMatrix> {
    if let Some(&bad) = form.nu.iter().find(|&&n| !(-1e-10..=1.0 + 1e-10).contains(&n)) {
        return Err(Error::numerical("block state", format!("unphysical mode occupation ν = {bad}")));
    }
    let desc = SystemDescriptor::qubits(block_len)?;
    let d = desc.dim();
    let modes: Vec<(f64, MajoranaSum, MajoranaSum)> = form
        .nu
        .iter()
        .enumerate()
        .map(|(m, &nu)| {
            let r0: Vec<f64> = form.v.row(2 * m).iter().copied().collect();
            let r1: Vec<f64> = form.v.row(2 * m + 1).iter().copied().collect();
            (nu.min(1.0), MajoranaSum::new(&r0), MajoranaSum::new(&r1))
        })
        .collect();
    let cols: Vec<Vec<C64>> = (0..d)
        .into_par_iter()
        .map(|c| {
            let mut v = vec![ZERO; d];
            v[c] = C64::new(1.0, 0.0);
            let mut w = vec![ZERO; d];
            let mut u = vec![ZERO; d];
            for (nu, d0, d1) in &modes {
                d1.apply(&v, &mut w);
                d0.apply(&w, &mut u);
                for (vi, ui) in v.iter_mut().zip(&u) {
                    *vi = (*vi + C64::new(0.0, *nu) * ui) * 0.5;
                }
            }
            v
        })
        .collect();
    let mut m = CMat::zeros(d, d);
    for (c, col) in cols.into_iter().enumerate() {
        m.column_mut(c).copy_from_slice(&col);
    }
    let m = linalg::hermitian_part(&m);
    let tr = linalg::trace(&m).re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::numerical("block state", format!("trace {tr}")));
    }
    // spectrum is Π(1 ± ν_m)/2, nonnegative for ν ∈ [0, 1]
    Ok(DensityMatrix::trusted(desc, m))
}

/// `⟨σ_x σ_x⟩` at distance `r` minus `⟨σ_x⟩²`, from the `(r+1)`-site block.
pub fn xx_correlation(lambda: f64, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::invalid("distance must be at least 1"));
    }
    let rho = block_rdm(lambda, r + 1)?;
    let m = rho.matrix();
    let d = m.nrows();
    let first = 1usize << r;
    let pair = first | 1;
    let mut xx = 0.0;
    let mut x = 0.0;
    for v in 0..d {
        xx += m[(v, v ^ pair)].re;
        x += m[(v, v ^ first)].re;
    }
    Ok(xx - x * x)
}
