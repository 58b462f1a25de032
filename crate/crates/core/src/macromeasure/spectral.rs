use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, Op};
use crate::spincore::{mixed_ghz_components, DensityMatrix, SystemDescriptor};

/// `ρ = Σ_k π_k |k⟩⟨k|` with `π` descending and orthonormal columns `|k⟩`.
/// May hold fewer than `D` columns for low-rank states.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    desc: SystemDescriptor,
    weights: Vec<f64>,
    vectors: CMat,
}

impl SpectralDecomposition {
    /// Full decomposition; eigenvalues below `-1e-10` are rejected, smaller
    /// negative rounding is clamped to zero.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let (w, v) = linalg::eigh(rho.matrix())?;
        let d = w.len();
        if w[0] < -1e-10 {
            return Err(Error::invalid(format!("negative eigenvalue {:e}", w[0])));
        }
        let weights: Vec<f64> = w.iter().rev().map(|&x| x.max(0.0)).collect();
        let vectors = CMat::from_fn(v.nrows(), d, |r, c| v[(r, d - 1 - c)]);
        Ok(Self { desc: *rho.descriptor(), weights, vectors })
    }

    pub fn pure(desc: SystemDescriptor, psi: &CVec) -> Result<Self> {
        if psi.len() != desc.dim() {
            return Err(Error::invalid("state vector length does not match the descriptor"));
        }
        let n = psi.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("state vector has zero or non-finite norm"));
        }
        let v = psi / C64::new(n, 0.0);
        Ok(Self { desc, weights: vec![1.0], vectors: CMat::from_column_slice(desc.dim(), 1, v.as_slice()) })
    }

    /// `ρ = Φ C Φ†` for a `D×m` factor `Φ` and Hermitian PSD `m×m` `C`.
    /// Columns of `Φ` need not be orthonormal.
    pub fn from_factor(desc: SystemDescriptor, phi: &CMat, c: &CMat) -> Result<Self> {
        let m = phi.ncols();
        if phi.nrows() != desc.dim() || c.nrows() != m || c.ncols() != m {
            return Err(Error::invalid("factor shapes do not match"));
        }
        let qr = phi.clone().qr();
        let q = qr.q();
        let r = qr.r();
        let inner = linalg::hermitian_part(&(&r * c * r.adjoint()));
        let (w, u) = linalg::eigh(&inner)?;
        let tr: f64 = w.iter().sum();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("trace is {tr}, not 1")));
        }
        if w[0] < -1e-10 {
            return Err(Error::invalid(format!("negative eigenvalue {:e}", w[0])));
        }
        let rot = linalg::matmul(&q, &u);
        let keep: Vec<usize> = (0..m).rev().filter(|&k| w[k] > 1e-15).collect();
        let weights = keep.iter().map(|&k| w[k]).collect();
        let vectors = CMat::from_fn(desc.dim(), keep.len(), |r, cc| rot[(r, keep[cc])]);
        Ok(Self { desc, weights, vectors })
    }

    pub fn descriptor(&self) -> &SystemDescriptor {
        &self.desc
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn purity(&self) -> f64 {
        self.weights.iter().map(|p| p * p).sum()
    }

    pub fn reconstruct(&self) -> CMat {
        let mut scaled = self.vectors.clone();
        for (k, &p) in self.weights.iter().enumerate() {
            scaled.column_mut(k).scale_mut(p);
        }
        linalg::gemm(&scaled, Op::N, &self.vectors, Op::H)
    }

    /// Rank-2 form of the mixed GHZ state, usable beyond the dense limit.
    pub fn mixed_ghz(num_sites: usize, eps: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
        }
        let desc = SystemDescriptor::qubits(num_sites)?;
        let (z, e) = mixed_ghz_components(num_sites, eps);
        let mut phi = CMat::zeros(desc.dim(), 2);
        phi.set_column(0, &z);
        phi.set_column(1, &e);
        let norm = 2.0 * (1.0 + gamma * eps.cos().powi(num_sites as i32));
        let (a, g) = (C64::new(1.0 / norm, 0.0), C64::new(gamma / norm, 0.0));
        Self::from_factor(desc, &phi, &CMat::from_row_slice(2, 2, &[a, g, g, a]))
    }

    /// Dense density matrix (positive by construction).
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::trusted(self.desc, linalg::hermitian_part(&self.reconstruct()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spincore::{mixed_ghz, random_density};

    #[test]
    fn round_trip() {
        let desc = SystemDescriptor::qubits(3).unwrap();
        let rho = random_density(desc, 5, 2).unwrap();
        let s = SpectralDecomposition::from_density(&rho).unwrap();
        assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(s.weights().windows(2).all(|w| w[0] >= w[1]));
        assert!(linalg::max_abs_diff(&s.reconstruct(), rho.matrix()) < 1e-9);
    }

    #[test]
    fn factor_matches_dense() {
        let g = 0.6;
        let s = SpectralDecomposition::mixed_ghz(5, 0.4, g).unwrap();
        assert_eq!(s.rank(), 2);
        let dense = mixed_ghz(5, 0.4, g).unwrap();
        assert!(linalg::max_abs_diff(&s.reconstruct(), dense.matrix()) < 1e-12);
    }
}
