use super::SystemDescriptor;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator on a spin system.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    desc: SystemDescriptor,
    mat: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(desc: SystemDescriptor, mat: CMat) -> Result<Self> {
        let rho = Self::checked_shape(desc, mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Skips the eigenvalue check; for states that are positive by construction.
    pub(crate) fn trusted(desc: SystemDescriptor, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), desc.dim());
        Self { desc, mat }
    }

    fn checked_shape(desc: SystemDescriptor, mat: CMat) -> Result<Self> {
        let d = desc.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::invalid(format!(
                "matrix is {}x{}, descriptor needs {d}x{d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { desc, mat })
    }

    pub fn from_pure(desc: SystemDescriptor, psi: &CVec) -> Result<Self> {
        if psi.len() != desc.dim() {
            return Err(Error::invalid("state vector length does not match the descriptor"));
        }
        let n = psi.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::invalid("state vector has zero or non-finite norm"));
        }
        let v = psi / C64::new(n, 0.0);
        Ok(Self { desc, mat: &v * v.adjoint() })
    }

    pub fn maximally_mixed(desc: SystemDescriptor) -> Self {
        let d = desc.dim();
        Self { desc, mat: CMat::identity(d, d) * C64::new(1.0 / d as f64, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        let ev = linalg::eigvalsh(&self.mat)?;
        if ev[0] < -PSD_TOL {
            return Err(Error::invalid(format!("not positive semidefinite: min eigenvalue {:e}", ev[0])));
        }
        Ok(())
    }

    pub fn check_hermitian_trace(&self) -> Result<()> {
        let d = self.mat.nrows();
        let scale = self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !scale.is_finite() {
            return Err(Error::invalid("non-finite entries"));
        }
        let mut dev: f64 = 0.0;
        for j in 0..d {
            for i in j..d {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::invalid(format!("not Hermitian: deviation {dev:e}")));
        }
        let tr = linalg::trace(&self.mat);
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::invalid(format!("trace is {tr}, not 1")));
        }
        Ok(())
    }

    pub fn descriptor(&self) -> &SystemDescriptor {
        &self.desc
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// `Tr ρ²`, via the Frobenius norm since ρ is Hermitian.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::eigvalsh(&self.mat)
    }

    pub fn expectation(&self, op: &CMat) -> C64 {
        linalg::trace_prod(&self.mat, op)
    }

    /// Reduced state on `keep` (any order; output sites follow ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.desc.num_sites();
        if keep.is_empty() {
            return Err(Error::invalid("keep set is empty"));
        }
        let mut sites = keep.to_vec();
        sites.sort_unstable();
        sites.dedup();
        if sites.len() != keep.len() || sites.iter().any(|&s| s >= n) {
            return Err(Error::invalid("keep set has repeated or out-of-range sites"));
        }
        let out_desc = SystemDescriptor::new(sites.len(), self.desc.twice_spin())?;
        let traced: Vec<usize> = (0..n).filter(|s| !sites.contains(s)).collect();
        let ld = self.desc.local_dim();
        let d = self.dim();
        let split = |idx: usize| -> (usize, usize) {
            let (mut k, mut t) = (0, 0);
            for s in 0..n {
                let dig = self.desc.digit(idx, s);
                if sites.contains(&s) {
                    k = k * ld + dig;
                } else {
                    t = t * ld + dig;
                }
            }
            (k, t)
        };
        let parts: Vec<(usize, usize)> = (0..d).map(split).collect();
        let mut out = CMat::zeros(out_desc.dim(), out_desc.dim());
        let _ = traced;
        for c in 0..d {
            let (kc, tc) = parts[c];
            for r in 0..d {
                let (kr, tr) = parts[r];
                if tr == tc {
                    out[(kr, kc)] += self.mat[(r, c)];
                }
            }
        }
        Ok(DensityMatrix { desc: out_desc, mat: out })
    }

    /// Applies `U ρ U†`.
    pub fn conjugated(&self, u: &CMat) -> Result<DensityMatrix> {
        let m = linalg::matmul(&linalg::matmul(u, &self.mat), &u.adjoint());
        Ok(DensityMatrix { desc: self.desc, mat: linalg::hermitian_part(&m) })
    }

    /// `ρ` restricted to the given row/column support pattern as a plain matrix copy.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Tensor product of single-site states.
pub fn product_state(desc: SystemDescriptor, local: &CVec) -> Result<DensityMatrix> {
    if local.len() != desc.local_dim() {
        return Err(Error::invalid("local state has the wrong dimension"));
    }
    let mut psi = CVec::from_element(1, C64::new(1.0, 0.0));
    for _ in 0..desc.num_sites() {
        psi = psi.kronecker(local);
    }
    DensityMatrix::from_pure(desc, &psi)
}

pub(crate) fn basis_vector(dim: usize, idx: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[idx] = C64::new(1.0, 0.0);
    v
}

/// `(|S,S⟩^⊗N + |S,-S⟩^⊗N)/√2`.
pub fn ghz_state(num_sites: usize, twice_spin: u32) -> Result<DensityMatrix> {
    let desc = SystemDescriptor::new(num_sites, twice_spin)?;
    let d = desc.dim();
    let mut psi = CVec::zeros(d);
    psi[0] += C64::new(1.0, 0.0);
    psi[d - 1] += C64::new(1.0, 0.0);
    DensityMatrix::from_pure(desc, &psi)
}

/// `[(|0⟩+|1⟩)/√2]^⊗N`.
pub fn plus_product(num_sites: usize) -> Result<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    product_state(
        SystemDescriptor::qubits(num_sites)?,
        &CVec::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]),
    )
}

/// The two product components of the mixed GHZ family.
pub(crate) fn mixed_ghz_components(num_sites: usize, eps: f64) -> (CVec, CVec) {
    let d = 1usize << num_sites;
    let zero = basis_vector(d, 0);
    let local = CVec::from_vec(vec![C64::new(eps.cos(), 0.0), C64::new(eps.sin(), 0.0)]);
    let mut e = CVec::from_element(1, C64::new(1.0, 0.0));
    for _ in 0..num_sites {
        e = e.kronecker(&local);
    }
    (zero, e)
}

/// `ρ_G = 𝒩⁻¹(|0⟩⟨0|^⊗N + |ε⟩⟨ε|^⊗N + γ|0⟩⟨ε|^⊗N + γ|ε⟩⟨0|^⊗N)` with
/// `|ε⟩ = cos ε|0⟩ + sin ε|1⟩`.
pub fn mixed_ghz(num_sites: usize, eps: f64, gamma: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
    }
    let desc = SystemDescriptor::qubits(num_sites)?;
    let (z, e) = mixed_ghz_components(num_sites, eps);
    let norm = 2.0 * (1.0 + gamma * eps.cos().powi(num_sites as i32));
    let g = C64::new(gamma, 0.0);
    let m = (&z * z.adjoint() + &e * e.adjoint() + (&z * e.adjoint()) * g + (&e * z.adjoint()) * g)
        * C64::new(1.0 / norm, 0.0);
    Ok(DensityMatrix::trusted(desc, m))
}

/// Two-block metrology state on `N` qubits; site 0 carries the block label.
pub fn metrology_state(num_sites: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p {p} outside [0, 1]")));
    }
    if num_sites < 2 {
        return Err(Error::invalid("metrology state needs N >= 2"));
    }
    let desc = SystemDescriptor::qubits(num_sites)?;
    let r0 = CMat::from_row_slice(
        2,
        2,
        &[C64::new((1.0 + p) / 2.0, 0.0), ZERO, ZERO, C64::new((1.0 - p) / 2.0, 0.0)],
    );
    let sx = super::pauli()[0].clone();
    let a = &r0;
    let b = &r0 * &sx;
    let c = &sx * &r0;
    let dd = &sx * &r0 * &sx;
    let pow = |m: &CMat| {
        let mut out = CMat::identity(1, 1);
        for _ in 0..num_sites - 1 {
            out = out.kronecker(m);
        }
        out
    };
    let half = 1usize << (num_sites - 1);
    let mut m = CMat::zeros(2 * half, 2 * half);
    let blocks = [
        (0, 0, pow(a), 1.0),
        (0, half, pow(&b), p),
        (half, 0, pow(&c), p),
        (half, half, pow(&dd), 1.0),
    ];
    for (r, cc, blk, w) in blocks {
        m.view_mut((r, cc), (half, half)).copy_from(&(blk * C64::new(0.5 * w, 0.0)));
    }
    Ok(DensityMatrix::trusted(desc, m))
}

/// `a ρ_0 + (1-a) ρ_1`, with ρ_0 the dephased and ρ_1 the pure Bell state.
pub fn mixed_bell(a: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::invalid(format!("a {a} outside [0, 1]")));
    }
    let desc = SystemDescriptor::qubits(2)?;
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(3, 3)] = C64::new(0.5, 0.0);
    m[(0, 3)] = C64::new(0.5 * (1.0 - a), 0.0);
    m[(3, 0)] = C64::new(0.5 * (1.0 - a), 0.0);
    Ok(DensityMatrix::trusted(desc, m))
}

/// Single spin `(|S,S⟩⟨S,S| + |S,-S⟩⟨S,-S| + γ(|S,S⟩⟨S,-S| + h.c.))/2`.
pub fn spin_cat(twice_spin: u32, gamma: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
    }
    let desc = SystemDescriptor::new(1, twice_spin)?;
    let d = desc.dim();
    let mut m = CMat::zeros(d, d);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(d - 1, d - 1)] = C64::new(0.5, 0.0);
    m[(0, d - 1)] = C64::new(0.5 * gamma, 0.0);
    m[(d - 1, 0)] = C64::new(0.5 * gamma, 0.0);
    Ok(DensityMatrix::trusted(desc, m))
}

/// Ginibre ensemble: `ρ = GG†/Tr(GG†)` with `G` a `D×rank` complex Gaussian
/// matrix filled column by column from stream `(seed, 0)`.
pub fn random_density(desc: SystemDescriptor, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let g = random_factor(desc, rank, seed)?;
    let m = linalg::gram_rows(&g);
    let tr = linalg::trace(&m).re;
    Ok(DensityMatrix::trusted(desc, m * C64::new(1.0 / tr, 0.0)))
}

pub(crate) fn random_factor(desc: SystemDescriptor, rank: usize, seed: u64) -> Result<CMat> {
    if rank == 0 || rank > desc.dim() {
        return Err(Error::invalid(format!("rank {rank} outside [1, {}]", desc.dim())));
    }
    let mut rng = crate::rng::stream(seed, 0);
    Ok(crate::rng::ginibre(&mut rng, desc.dim(), rank))
}

/// Haar-random pure state from stream `(seed, 0)`.
pub fn random_pure(desc: SystemDescriptor, seed: u64) -> Result<DensityMatrix> {
    let mut rng = crate::rng::stream(seed, 0);
    let v = crate::rng::haar_vector(&mut rng, desc.dim());
    DensityMatrix::from_pure(desc, &v)
}
