use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, Op, ONE, ZERO};
use crate::macromeasure::{symmetric_optimum, Convention, OptimizeOptions};
use crate::spincore::{spin_matrices, DensityMatrix, SystemDescriptor};

/// State of `N` qubits supported on the symmetric subspace, in the basis
/// `|N/2, m⟩` with `m = N/2, …, −N/2` (index `k` has `k` spins down).
#[derive(Clone, Debug)]
pub struct DickeState {
    n: usize,
    mat: CMat,
}

impl DickeState {
    pub fn new(n: usize, mat: CMat) -> Result<Self> {
        if n == 0 || mat.nrows() != n + 1 || mat.ncols() != n + 1 {
            return Err(Error::invalid(format!("Dicke state of {n} qubits needs a {0}x{0} matrix", n + 1)));
        }
        let scale = mat.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
        if linalg::max_abs_diff(&mat, &mat.adjoint()) > 1e-12 * scale {
            return Err(Error::invalid("Dicke matrix is not Hermitian"));
        }
        let tr = linalg::trace(&mat);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::invalid(format!("trace is {tr}, not 1")));
        }
        if linalg::eigvalsh(&mat)?[0] < -1e-10 {
            return Err(Error::invalid("Dicke matrix is not positive semidefinite"));
        }
        Ok(Self { n, mat })
    }

    pub(crate) fn trusted(n: usize, mat: CMat) -> Self {
        Self { n, mat }
    }

    pub fn from_pure(n: usize, psi: &CVec) -> Result<Self> {
        if psi.len() != n + 1 {
            return Err(Error::invalid("state vector length must be N + 1"));
        }
        let v = psi / C64::new(psi.norm(), 0.0);
        Self::new(n, &v * v.adjoint())
    }

    /// `(|N/2⟩ + |−N/2⟩)/√2`.
    pub fn ghz(n: usize) -> Result<Self> {
        let mut v = CVec::zeros(n + 1);
        v[0] = ONE;
        v[n] += ONE;
        Self::from_pure(n, &v)
    }

    /// All spins down, the steady state of collective decay.
    pub fn all_down(n: usize) -> Result<Self> {
        let mut v = CVec::zeros(n + 1);
        v[n] = ONE;
        Self::from_pure(n, &v)
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.norm_squared()
    }

    /// Full-space density matrix.
    pub fn embed(&self) -> Result<DensityMatrix> {
        let desc = SystemDescriptor::qubits(self.n)?;
        let e = dicke_isometry(self.n)?;
        let m = linalg::gemm(&linalg::matmul(&e, &self.mat), Op::N, &e, Op::H);
        DensityMatrix::new(desc, linalg::hermitian_part(&m))
    }
}

/// `D×(N+1)` matrix whose column `k` is the normalized symmetric state with
/// `k` spins down.
pub fn dicke_isometry(n: usize) -> Result<CMat> {
    let desc = SystemDescriptor::qubits(n)?;
    let mut e = CMat::zeros(desc.dim(), n + 1);
    let mut counts = vec![0usize; n + 1];
    for idx in 0..desc.dim() {
        counts[idx.count_ones() as usize] += 1;
    }
    for idx in 0..desc.dim() {
        let k = idx.count_ones() as usize;
        e[(idx, k)] = C64::new(1.0 / (counts[k] as f64).sqrt(), 0.0);
    }
    Ok(e)
}

fn re_trace(a: &CMat, b: &CMat) -> f64 {
    linalg::trace_prod(a, b).re
}

/// ℐ and ℱ of a symmetric state from collective-operator matrix elements only.
pub fn dicke_measures(state: &DickeState, convention: Convention, opts: &OptimizeOptions) -> Result<(f64, f64)> {
    let n = state.n;
    let nf = n as f64;
    let rho = &state.mat;
    let j = spin_matrices(n as u32);
    let p = state.purity();
    let rho2 = linalg::matmul(rho, rho);
    let rj: Vec<CMat> = j.iter().map(|x| linalg::matmul(rho, x)).collect();
    let (w, u) = linalg::eigh(rho)?;
    let pi: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let aj: Vec<CMat> = j.iter().map(|x| linalg::gemm(&u, Op::H, &linalg::matmul(x, &u), Op::N)).collect();
    let dim = n + 1;
    let mut g = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let mut s = ZERO;
            for k in 0..dim {
                for l in 0..dim {
                    let den = pi[k] + pi[l];
                    if den > 1e-14 {
                        s += aj[a][(k, l)] * aj[b][(l, k)] * (pi[k] * pi[l] / den);
                    }
                }
            }
            g[(a, b)] = s.re;
        }
    }
    let cv = convention.factor() * 2.0 / (nf * p);
    let cw = convention.factor() / nf;
    let pair = if n > 1 { 1.0 / (nf * (nf - 1.0)) } else { 0.0 };
    let mut vd = Matrix3::zeros();
    let mut vo = Matrix3::zeros();
    let mut wd = Matrix3::zeros();
    let mut wo = Matrix3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            let delta = if a == b { 1.0 } else { 0.0 };
            let jab = linalg::matmul(&j[a], &j[b]);
            let t2 = re_trace(&rho2, &jab);
            let t1 = re_trace(rho, &jab);
            let cross = re_trace(&rj[a], &rj[b]) / (nf * nf);
            vd[(a, b)] = cv * (p * delta / 4.0 - cross);
            vo[(a, b)] = cv * ((t2 - nf * p * delta / 4.0) * pair - cross);
            let gg = 4.0 * g[(a, b)] / (nf * nf);
            wd[(a, b)] = cw * (delta / 2.0 - gg);
            wo[(a, b)] = cw * (2.0 * (t1 - nf * delta / 4.0) * pair - gg);
        }
    }
    Ok((symmetric_optimum(n, &vd, &vo, opts)?, symmetric_optimum(n, &wd, &wo, opts)?))
}
