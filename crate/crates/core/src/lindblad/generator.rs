use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, I, ZERO};
use crate::spincore::{
    direction_operator, site_basis, spin_matrices, DirectionField, OperatorKind, SiteOp, SystemDescriptor,
};

/// Jump operator of the master equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    /// Collective lowering `J₋ = Σσ₋`.
    CollectiveDecay,
    /// Hermitian `A` from a direction field.
    Dephasing { field: DirectionField, kind: OperatorKind },
}

/// `dρ/dt = −i(Ω/2)[J₊+J₋, ρ] + γ(LρL† − ½{L†L, ρ})`.
///
/// For collective decay `L = J₋` and the dissipator carries `γ/2` per
/// `2J₋ρJ₊`, which is the same thing.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    pub rabi: f64,
    pub gamma: f64,
    pub channel: Channel,
}

impl LindbladSpec {
    pub fn new(rabi: f64, gamma: f64, channel: Channel) -> Result<Self> {
        if !rabi.is_finite() || !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::invalid(format!("need finite Ω and γ ≥ 0, got Ω={rabi}, γ={gamma}")));
        }
        Ok(Self { rabi, gamma, channel })
    }

    pub fn collective_decay(gamma: f64) -> Result<Self> {
        Self::new(0.0, gamma, Channel::CollectiveDecay)
    }

    pub fn dephasing(gamma: f64, field: DirectionField, kind: OperatorKind) -> Result<Self> {
        Self::new(0.0, gamma, Channel::Dephasing { field, kind })
    }

    /// Largest stable step for `num_sites` spins of size `spin`.
    pub fn max_dt(&self, num_sites: usize, spin: f64) -> f64 {
        if self.gamma == 0.0 && self.rabi == 0.0 {
            return f64::INFINITY;
        }
        let n = num_sites as f64;
        let rate = match &self.channel {
            Channel::CollectiveDecay => self.gamma * (n + 1.0),
            Channel::Dephasing { kind, .. } => {
                let norm = n * spin * kind.scale();
                self.gamma * norm * norm
            }
        };
        0.1 / rate.max(self.rabi.abs() * (n + 1.0)).max(f64::MIN_POSITIVE)
    }
}

/// Row-sparse complex matrix.
#[derive(Clone, Debug)]
pub(crate) struct Sparse {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    pub fn from_dense(m: &CMat) -> Self {
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).filter(|&c| m[(r, c)] != ZERO).map(|c| (c, m[(r, c)])).collect())
            .collect();
        Self { rows }
    }

    pub fn adjoint(&self) -> Self {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c].push((r, v.conj()));
            }
        }
        Self { rows }
    }

    /// `S M`.
    pub fn mul(&self, m: &CMat) -> CMat {
        let n = m.nrows();
        let rows = self.rows.len();
        let mut out = CMat::zeros(rows, m.ncols());
        for c in 0..m.ncols() {
            let src = &m.as_slice()[c * n..(c + 1) * n];
            let dst = &mut out.as_mut_slice()[c * rows..(c + 1) * rows];
            for (r, row) in self.rows.iter().enumerate() {
                let mut s = ZERO;
                for &(k, v) in row {
                    s += v * src[k];
                }
                dst[r] = s;
            }
        }
        out
    }
}

/// Operators of a spec on a concrete space, ready for repeated evaluation.
pub(crate) struct Generator {
    h: Option<Sparse>,
    jump: Sparse,
    jump_adj: Sparse,
    gamma: f64,
}

fn collective_full(desc: &SystemDescriptor, local: &CMat) -> Result<CMat> {
    let mut out = CMat::zeros(desc.dim(), desc.dim());
    for i in 0..desc.num_sites() {
        SiteOp::new(desc, i, local.clone())?.add_to(&mut out);
    }
    Ok(out)
}

impl Generator {
    fn from_parts(h: Option<CMat>, jump: CMat, gamma: f64) -> Self {
        let jump = Sparse::from_dense(&jump);
        let jump_adj = jump.adjoint();
        Self { h: h.map(|m| Sparse::from_dense(&m)), jump, jump_adj, gamma }
    }

    /// Full tensor-product space.
    pub fn full(spec: &LindbladSpec, desc: &SystemDescriptor) -> Result<Self> {
        let s = spin_matrices(desc.twice_spin());
        let lower = &s[0] - &s[1] * I;
        let h = if spec.rabi != 0.0 {
            Some(collective_full(desc, &s[0])? * C64::new(spec.rabi, 0.0))
        } else {
            None
        };
        let jump = match &spec.channel {
            Channel::CollectiveDecay => collective_full(desc, &lower)?,
            Channel::Dephasing { field, kind } => {
                field.check_sites(desc)?;
                let basis = site_basis(desc, *kind)?;
                let mut a = CMat::zeros(desc.dim(), desc.dim());
                for (i, v) in field.vectors().iter().enumerate() {
                    SiteOp::new(desc, i, direction_operator(&basis, *v))?.add_to(&mut a);
                }
                a
            }
        };
        Ok(Self::from_parts(h, jump, spec.gamma))
    }

    /// Symmetric subspace of `n` qubits, basis `m = n/2 … −n/2`.
    pub fn dicke(spec: &LindbladSpec, n: usize) -> Result<Self> {
        if spec.channel != Channel::CollectiveDecay {
            return Err(Error::invalid("the Dicke path needs the collective decay channel"));
        }
        let j = spin_matrices(n as u32);
        let lower = &j[0] - &j[1] * I;
        // (Ω/2)(J₊+J₋) = Ω·J_x
        let h = (spec.rabi != 0.0).then(|| &j[0] * C64::new(spec.rabi, 0.0));
        Ok(Self::from_parts(h, lower, spec.gamma))
    }

    pub fn rhs(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(rho.nrows(), rho.ncols());
        if let Some(h) = &self.h {
            let hr = h.mul(rho);
            out += (&hr - hr.adjoint()) * C64::new(0.0, -1.0);
        }
        if self.gamma != 0.0 {
            // LρL† = L(Lρ)†, L†Lρ = L†(Lρ)
            let x = self.jump.mul(rho);
            let lrl = self.jump.mul(&x.adjoint());
            let y = self.jump_adj.mul(&x);
            out += (lrl - (&y + y.adjoint()) * C64::new(0.5, 0.0)) * C64::new(self.gamma, 0.0);
        }
        out
    }
}
