use serde::{Deserialize, Serialize};

use super::SystemDescriptor;
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// One unit 3-vector per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionField {
    vectors: Vec<[f64; 3]>,
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl DirectionField {
    pub fn new(vectors: Vec<[f64; 3]>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::invalid("direction field needs at least one site"));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.iter().any(|x| !x.is_finite()) || (norm(*v) - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!("direction {i} is not a unit vector")));
            }
        }
        Ok(Self { vectors })
    }

    /// Normalizes each vector first.
    pub fn normalized(vectors: Vec<[f64; 3]>) -> Result<Self> {
        let v = vectors
            .into_iter()
            .map(|v| {
                let n = norm(v);
                if n < 1e-300 {
                    Err(Error::invalid("zero vector in direction field"))
                } else {
                    Ok([v[0] / n, v[1] / n, v[2] / n])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    pub fn uniform(n: usize, v: [f64; 3]) -> Result<Self> {
        Self::new(vec![v; n])
    }

    /// From polar angles `(θ_i, φ_i)`.
    pub fn from_angles(angles: &[(f64, f64)]) -> Result<Self> {
        Self::normalized(
            angles
                .iter()
                .map(|&(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
                .collect(),
        )
    }

    /// From a flat `3N` coordinate vector.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() % 3 != 0 {
            return Err(Error::invalid("flat field length must be a multiple of 3"));
        }
        Self::normalized(x.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    pub fn vectors(&self) -> &[[f64; 3]] {
        &self.vectors
    }

    pub fn num_sites(&self) -> usize {
        self.vectors.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.vectors.iter().flatten().copied().collect()
    }

    pub(crate) fn check_sites(&self, desc: &SystemDescriptor) -> Result<()> {
        if self.vectors.len() != desc.num_sites() {
            return Err(Error::invalid(format!(
                "field has {} vectors for {} sites",
                self.vectors.len(),
                desc.num_sites()
            )));
        }
        Ok(())
    }
}
