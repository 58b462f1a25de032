use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, CVec};
use crate::macromeasure::SpectralDecomposition;
use crate::spincore::{DensityMatrix, SystemDescriptor};

/// Ground state of `H = −Σ_j (λσ_x^jσ_x^{j+1} + σ_z^j)` on a ring, taken in
/// the sector with `Πσ_z = +1`.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub num_sites: usize,
    pub lambda: f64,
    pub energy: f64,
    /// Real amplitudes in the computational basis.
    pub amplitudes: DVector<f64>,
}

impl GroundState {
    pub fn descriptor(&self) -> SystemDescriptor {
        SystemDescriptor::qubits(self.num_sites).expect("validated at construction")
    }

    pub fn vector(&self) -> CVec {
        self.amplitudes.map(|x| C64::new(x, 0.0))
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        SpectralDecomposition::pure(self.descriptor(), &self.vector())
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self.descriptor(), &self.vector())
    }

    /// Reduced state of the first `k` sites.
    pub fn reduced(&self, k: usize) -> Result<DensityMatrix> {
        if k == 0 || k > self.num_sites {
            return Err(Error::invalid("bad block size"));
        }
        let rest = 1usize << (self.num_sites - k);
        let a = DMatrix::from_column_slice(rest, 1 << k, self.amplitudes.as_slice());
        let m = a.transpose() * &a;
        DensityMatrix::new(SystemDescriptor::qubits(k)?, m.map(|x| C64::new(x, 0.0)))
    }
}

struct Hamiltonian {
    diag: Vec<f64>,
    flips: Vec<usize>,
    lambda: f64,
}

impl Hamiltonian {
    fn new(n: usize, lambda: f64) -> Self {
        let dim = 1usize << n;
        let diag = (0..dim).map(|x| -(n as f64 - 2.0 * (x.count_ones() as f64))).collect();
        let bit = |i: usize| 1usize << (n - 1 - i);
        let flips = (0..n).map(|j| bit(j) | bit((j + 1) % n)).collect();
        Self { diag, flips, lambda }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            let mut s = self.diag[x] * v[x];
            for &f in &self.flips {
                s -= self.lambda * v[x ^ f];
            }
            *o = s;
        }
    }
}

fn even(x: usize) -> bool {
    x.count_ones() % 2 == 0
}

/// Lanczos with full reorthogonalization in the even-parity sector.
pub fn exact_ground_state(lambda: f64, num_sites: usize) -> Result<GroundState> {
    if !(3..=14).contains(&num_sites) {
        return Err(Error::invalid("ring length must be in 3..=14"));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid("coupling must be finite and nonnegative"));
    }
    let h = Hamiltonian::new(num_sites, lambda);
    let dim = 1usize << num_sites;
    let mut rng = crate::rng::stream(0x15196, num_sites as u64);
    let mut q0: Vec<f64> = (0..dim).map(|x| if even(x) { rng.random::<f64>() - 0.5 } else { 0.0 }).collect();
    let n0 = q0.iter().map(|x| x * x).sum::<f64>().sqrt();
    q0.iter_mut().for_each(|x| *x /= n0);
    let max_iter = 400.min(dim / 2);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut found: Option<(f64, DVector<f64>)> = None;
    for k in 0..max_iter {
        h.apply(&basis[k], &mut w);
        let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let idx = eig.eigenvalues.imin();
        let e = eig.eigenvalues[idx];
        let y = eig.eigenvectors.column(idx).into_owned();
        let resid = b * y[m - 1].abs();
        if resid < 1e-12 * e.abs().max(1.0) || b < 1e-14 || k + 1 == max_iter {
            found = Some((e, y));
            if resid > 1e-8 * e.abs().max(1.0) {
                return Err(Error::numerical("Lanczos", format!("residual {resid:e} after {m} steps")));
            }
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let (energy, y) = found.ok_or_else(|| Error::numerical("Lanczos", "no iterations"))?;
    let mut psi = DVector::<f64>::zeros(dim);
    for (q, c) in basis.iter().zip(y.iter()) {
        psi.iter_mut().zip(q).for_each(|(p, x)| *p += c * x);
    }
    // fixed sign convention: largest component positive
    let imax = psi.iamax();
    let s = psi[imax].signum();
    let nrm = psi.norm();
    psi *= s / nrm;
    Ok(GroundState { num_sites, lambda, energy, amplitudes: psi })
}

/// Dense reference Hamiltonian for tests.
#[cfg(test)]
pub(crate) fn dense_hamiltonian(n: usize, lambda: f64) -> crate::linalg::CMat {
    let h = Hamiltonian::new(n, lambda);
    let dim = 1usize << n;
    let mut m = crate::linalg::CMat::zeros(dim, dim);
    for x in 0..dim {
        m[(x, x)] += C64::new(h.diag[x], 0.0);
        for &f in &h.flips {
            m[(x ^ f, x)] -= C64::new(lambda, 0.0);
        }
    }
    m
}
