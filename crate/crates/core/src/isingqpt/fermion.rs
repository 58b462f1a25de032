use std::f64::consts::PI;

use nalgebra::Schur;

use crate::error::{Error, Result};
use crate::linalg::{C64, RMat};
use crate::quad::gauss_legendre;

const GL_ORDER: usize = 20;
const G_TOL: f64 = 1e-10;

fn integrand(lambda: f64, l: i64, phi: f64) -> C64 {
    let z = C64::from_polar(lambda, -phi) - 1.0;
    let n = z.norm();
    let z = if n > 0.0 { z / n } else { C64::new(0.0, 0.0) };
    C64::from_polar(1.0, -(l as f64) * phi) * z
}

/// `g_l` for every `l` in `ls`, by composite Gauss–Legendre with panel doubling
/// until all coefficients settle.
pub fn g_coefficients(lambda: f64, ls: &[i64]) -> Result<Vec<C64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("coupling must be positive, got {lambda}")));
    }
    let (x, w) = gauss_legendre(GL_ORDER);
    let eval = |panels: usize| -> Vec<C64> {
        let h = 2.0 * PI / panels as f64;
        let mut acc = vec![C64::new(0.0, 0.0); ls.len()];
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                let phi = mid + 0.5 * h * xi;
                let wt = 0.5 * h * wi;
                for (a, &l) in acc.iter_mut().zip(ls) {
                    *a += integrand(lambda, l, phi) * wt;
                }
            }
        }
        acc.into_iter().map(|a| a / (2.0 * PI)).collect()
    };
    let mut panels = 4;
    let mut prev = eval(panels);
    while panels < 1 << 16 {
        panels *= 2;
        let next = eval(panels);
        let change = prev.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if change < G_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::numerical("g quadrature", format!("no convergence at λ = {lambda}")))
}

/// `g_l = (1/2π)∫₀^{2π} e^{−ilφ}(λe^{−iφ}−1)/|λe^{−iφ}−1| dφ`.
pub fn g_coefficient(lambda: f64, l: i64) -> Result<C64> {
    Ok(g_coefficients(lambda, &[l])?[0])
}

/// Majorana correlation matrix of a block of `L` sites in the infinite
/// chain ground state; block Toeplitz with blocks `[[0, g_l], [−g_{−l}, 0]]`.
#[derive(Clone, Debug)]
pub struct MajoranaCorrelation {
    pub block_len: usize,
    pub gamma: RMat,
}

pub fn gamma_matrix(lambda: f64, block_len: usize) -> Result<MajoranaCorrelation> {
    if block_len == 0 {
        return Err(Error::invalid("block length must be at least 1"));
    }
    let l = block_len as i64;
    let ls: Vec<i64> = (1 - l..l).collect();
    let g = g_coefficients(lambda, &ls)?;
    let at = |k: i64| g[(k + l - 1) as usize].re;
    let mut m = RMat::zeros(2 * block_len, 2 * block_len);
    for a in 0..block_len {
        for b in 0..block_len {
            let (ai, bi) = (a as i64, b as i64);
            m[(2 * a, 2 * b + 1)] = at(bi - ai);
            m[(2 * a + 1, 2 * b)] = -at(ai - bi);
        }
    }
    Ok(MajoranaCorrelation { block_len, gamma: m })
}

/// `V Γ Vᵀ = ⊕ ν_m [[0, 1], [−1, 0]]` with `ν` descending and nonnegative.
#[derive(Clone, Debug)]
pub struct CanonicalSkewForm {
    pub v: RMat,
    pub nu: Vec<f64>,
}

impl CanonicalSkewForm {
    /// `max |VΓVᵀ − ⊕ν J|`.
    pub fn residual(&self, gamma: &RMat) -> f64 {
        let t = &self.v * gamma * self.v.transpose();
        let mut target = RMat::zeros(t.nrows(), t.ncols());
        for (m, &nu) in self.nu.iter().enumerate() {
            target[(2 * m, 2 * m + 1)] = nu;
            target[(2 * m + 1, 2 * m)] = -nu;
        }
        (t - target).amax()
    }
}

pub fn canonical_skew_form(gamma: &RMat) -> Result<CanonicalSkewForm> {
    let n = gamma.nrows();
    if n % 2 != 0 || gamma.ncols() != n {
        return Err(Error::invalid("skew form needs an even square matrix"));
    }
    let scale = gamma.amax().max(1.0);
    if (gamma + gamma.transpose()).amax() > 1e-12 * scale {
        return Err(Error::invalid("matrix is not skew-symmetric"));
    }
    let schur = Schur::try_new(gamma.clone(), 1e-15 * scale, 10_000)
        .ok_or_else(|| Error::numerical("real Schur form", "no convergence"))?;
    let (q, t) = schur.unpack();
    // rows of V pair up into modes
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let mut singles = Vec::new();
    let tiny = 1e-13 * scale;
    let mut k = 0;
    while k < n {
        if k + 1 < n && (t[(k + 1, k)].abs() > tiny || t[(k, k + 1)].abs() > tiny) {
            let nu = 0.5 * (t[(k, k + 1)] - t[(k + 1, k)]);
            if nu >= 0.0 {
                pairs.push((nu, k, k + 1));
            } else {
                pairs.push((-nu, k + 1, k));
            }
            k += 2;
        } else {
            singles.push(k);
            k += 1;
        }
    }
    for s in singles.chunks(2) {
        pairs.push((0.0, s[0], s[1]));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let qt = q.transpose();
    let mut v = RMat::zeros(n, n);
    for (m, &(_, r0, r1)) in pairs.iter().enumerate() {
        v.set_row(2 * m, &qt.row(r0));
        v.set_row(2 * m + 1, &qt.row(r1));
    }
    // exact 2×2 cleanup: rotate each pair so the block is [[0, ν], [−ν, 0]]
    let tv = &v * gamma * v.transpose();
    let mut nu = Vec::with_capacity(n / 2);
    for m in 0..n / 2 {
        nu.push(0.5 * (tv[(2 * m, 2 * m + 1)] - tv[(2 * m + 1, 2 * m)]));
    }
    let form = CanonicalSkewForm { v, nu };
    let res = form.residual(gamma);
    if res > 1e-10 * scale {
        return Err(Error::numerical("skew canonical form", format!("residual {res:e}")));
    }
    Ok(form)
}
