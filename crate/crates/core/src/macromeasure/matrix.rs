use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::spincore::{DirectionField, OperatorKind, SystemDescriptor};

/// Normalization of the measure values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Maximum `NS`.
    Raw,
    /// Spin 1/2 only: twice the raw value, maximum `N`.
    QubitNormalized,
}

impl Convention {
    /// Qubit-normalized for spin 1/2, raw otherwise.
    pub fn default_for(desc: &SystemDescriptor) -> Self {
        if desc.is_qubit() {
            Convention::QubitNormalized
        } else {
            Convention::Raw
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Convention::Raw => 1.0,
            Convention::QubitNormalized => 2.0,
        }
    }

    pub fn check(self, desc: &SystemDescriptor) -> Result<()> {
        if self == Convention::QubitNormalized && !desc.is_qubit() {
            return Err(Error::invalid("qubit normalization needs spin 1/2"));
        }
        Ok(())
    }

    pub fn tag(self) -> &'static str {
        match self {
            Convention::Raw => "raw",
            Convention::QubitNormalized => "qubit",
        }
    }
}

/// Which quadratic form: `V` for ℐ, `W` for ℱ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    V,
    W,
}

impl MatrixKind {
    pub fn measure_tag(self) -> &'static str {
        match self {
            MatrixKind::V => "I",
            MatrixKind::W => "F",
        }
    }
}

/// Real symmetric `3N×3N` matrix whose quadratic form over a direction field
/// gives the measure at that field. Row/column index `3i + a` is site `i`,
/// component `a ∈ {x, y, z}`.
#[derive(Clone, Debug)]
pub struct MeasureMatrix {
    kind: MatrixKind,
    desc: SystemDescriptor,
    op_kind: OperatorKind,
    convention: Convention,
    data: RMat,
}

impl MeasureMatrix {
    pub(crate) fn new(
        kind: MatrixKind,
        desc: SystemDescriptor,
        op_kind: OperatorKind,
        convention: Convention,
        mut data: RMat,
    ) -> Self {
        crate::linalg::symmetrize(&mut data);
        Self { kind, desc, op_kind, convention, data }
    }

    /// Wraps an arbitrary symmetric matrix, e.g. for optimizer tests.
    pub fn from_raw(kind: MatrixKind, desc: SystemDescriptor, convention: Convention, data: RMat) -> Result<Self> {
        let n = 3 * desc.num_sites();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::invalid(format!("matrix must be {n}x{n}")));
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if (&data - data.transpose()).iter().any(|v| v.abs() > 1e-10 * scale) {
            return Err(Error::invalid("matrix is not symmetric"));
        }
        Ok(Self::new(kind, desc, OperatorKind::default_for(&desc), convention, data))
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn descriptor(&self) -> &SystemDescriptor {
        &self.desc
    }

    pub fn operator_kind(&self) -> OperatorKind {
        self.op_kind
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn data(&self) -> &RMat {
        &self.data
    }

    pub fn num_sites(&self) -> usize {
        self.desc.num_sites()
    }

    /// `⟨α, M α⟩`.
    pub fn quadratic_form(&self, field: &DirectionField) -> Result<f64> {
        field.check_sites(&self.desc)?;
        let a = DVector::from_vec(field.to_flat());
        Ok(a.dot(&(&self.data * &a)))
    }

    /// Same matrix in the other convention.
    pub fn with_convention(&self, convention: Convention) -> Result<Self> {
        convention.check(&self.desc)?;
        let f = convention.factor() / self.convention.factor();
        Ok(Self { convention, data: &self.data * f, ..self.clone() })
    }

    /// Diagonal block `D_ab = M_{ia,ib}` for site `i`.
    pub fn block(&self, i: usize, j: usize) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|a, b| self.data[(3 * i + a, 3 * j + b)])
    }
}
