use serde::{Deserialize, Serialize};

use super::{DirectionField, SystemDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, I, ONE, ZERO};

/// Which local operator basis builds `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `S_x, S_y, S_z`, operator norm `S`.
    SpinOps,
    /// `σ_x, σ_y, σ_z`, spin-1/2 only.
    PauliOps,
}

impl OperatorKind {
    /// Default for a system: Pauli operators for qubits.
    pub fn default_for(desc: &SystemDescriptor) -> Self {
        if desc.is_qubit() {
            OperatorKind::PauliOps
        } else {
            OperatorKind::SpinOps
        }
    }

    /// Factor relating the basis to spin matrices.
    pub fn scale(self) -> f64 {
        match self {
            OperatorKind::SpinOps => 1.0,
            OperatorKind::PauliOps => 2.0,
        }
    }

    pub fn check(self, desc: &SystemDescriptor) -> Result<()> {
        if self == OperatorKind::PauliOps && !desc.is_qubit() {
            return Err(Error::invalid("Pauli operators need spin 1/2"));
        }
        Ok(())
    }
}

/// `(S_x, S_y, S_z)` on the basis `m = S, S-1, ..., -S`.
pub fn spin_matrices(twice_spin: u32) -> [CMat; 3] {
    let d = twice_spin as usize + 1;
    let s = twice_spin as f64 / 2.0;
    let mut sp = CMat::zeros(d, d);
    for k in 1..d {
        // raises m = s - k to index k - 1
        let m = s - k as f64;
        sp[(k - 1, k)] = C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * C64::new(0.5, 0.0);
    let sy = (&sp - &sm) * C64::new(0.0, -0.5);
    let sz = CMat::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(s - i as f64, 0.0)
        } else {
            ZERO
        }
    });
    [sx, sy, sz]
}

pub fn pauli() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Local operator basis for `kind`.
pub fn site_basis(desc: &SystemDescriptor, kind: OperatorKind) -> Result<[CMat; 3]> {
    kind.check(desc)?;
    Ok(match kind {
        OperatorKind::SpinOps => spin_matrices(desc.twice_spin()),
        OperatorKind::PauliOps => pauli(),
    })
}

/// `Id ⊗ ... ⊗ local ⊗ ... ⊗ Id` with `local` on `site`.
pub fn embed_site(desc: &SystemDescriptor, site: usize, local: &CMat) -> Result<CMat> {
    Ok(SiteOp::new(desc, site, local.clone())?.to_dense())
}

pub fn direction_operator(basis: &[CMat; 3], v: [f64; 3]) -> CMat {
    &basis[0] * C64::new(v[0], 0.0)
        + &basis[1] * C64::new(v[1], 0.0)
        + &basis[2] * C64::new(v[2], 0.0)
}

/// `A = Σ_j α^(j)·basis^(j)`.
pub fn collective_operator(
    desc: &SystemDescriptor,
    field: &DirectionField,
    kind: OperatorKind,
) -> Result<CMat> {
    field.check_sites(desc)?;
    let basis = site_basis(desc, kind)?;
    let mut a = CMat::zeros(desc.dim(), desc.dim());
    for (j, v) in field.vectors().iter().enumerate() {
        SiteOp::new(desc, j, direction_operator(&basis, *v))?.add_to(&mut a);
    }
    Ok(a)
}

/// A single-site operator applied without materializing the `D×D` embedding.
#[derive(Clone, Debug)]
pub struct SiteOp {
    dim: usize,
    d: usize,
    stride: usize,
    local: CMat,
    /// Nonzero local entries `(row, col, value)`.
    entries: Vec<(usize, usize, C64)>,
}

impl SiteOp {
    pub fn new(desc: &SystemDescriptor, site: usize, local: CMat) -> Result<Self> {
        desc.check_site(site)?;
        let d = desc.local_dim();
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::invalid(format!("local operator must be {d}x{d}")));
        }
        let mut entries = Vec::new();
        for r in 0..d {
            for c in 0..d {
                if local[(r, c)] != ZERO {
                    entries.push((r, c, local[(r, c)]));
                }
            }
        }
        Ok(Self { dim: desc.dim(), d, stride: desc.stride(site), local, entries })
    }

    pub fn local(&self) -> &CMat {
        &self.local
    }

    /// Global indices whose digit on this site is zero.
    fn bases(&self) -> impl Iterator<Item = usize> + '_ {
        let block = self.stride * self.d;
        (0..self.dim)
            .step_by(block)
            .flat_map(move |hi| hi..hi + self.stride)
    }

    /// `out = X v`.
    pub fn apply(&self, v: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for base in self.bases() {
            for &(r, c, val) in &self.entries {
                out[base + r * self.stride] += val * v[base + c * self.stride];
            }
        }
    }

    /// `X M`.
    pub fn left_mul(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for c in 0..m.ncols() {
            let src = m.column(c);
            let mut dst = out.column_mut(c);
            self.apply(src.as_slice(), dst.as_mut_slice());
        }
        out
    }

    /// `M X`.
    pub fn right_mul(&self, m: &CMat) -> CMat {
        let rows = m.nrows();
        let mut out = CMat::zeros(rows, m.ncols());
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for base in self.bases() {
            for &(r, c, val) in &self.entries {
                let from = (base + r * self.stride) * rows;
                let to = (base + c * self.stride) * rows;
                for k in 0..rows {
                    dst[to + k] += val * src[from + k];
                }
            }
        }
        out
    }

    /// `Tr[M X]`.
    pub fn trace_right(&self, m: &CMat) -> C64 {
        let mut s = ZERO;
        for base in self.bases() {
            for &(r, c, val) in &self.entries {
                s += m[(base + c * self.stride, base + r * self.stride)] * val;
            }
        }
        s
    }

    pub fn add_to(&self, out: &mut CMat) {
        for base in self.bases() {
            for &(r, c, val) in &self.entries {
                out[(base + r * self.stride, base + c * self.stride)] += val;
            }
        }
    }

    pub fn to_dense(&self) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        self.add_to(&mut out);
        out
    }
}
