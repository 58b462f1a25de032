use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total dimension allowed for dense matrices.
pub const MAX_DENSE_DIM: usize = 1 << 20;

/// `N` spins of uniform spin `S`, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemDescriptor {
    num_sites: usize,
    twice_spin: u32,
}

impl SystemDescriptor {
    pub fn new(num_sites: usize, twice_spin: u32) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::invalid("need at least one site"));
        }
        if twice_spin == 0 {
            return Err(Error::invalid("twice_spin must be positive"));
        }
        let d = twice_spin as usize + 1;
        let mut dim: usize = 1;
        for _ in 0..num_sites {
            dim = dim
                .checked_mul(d)
                .filter(|&x| x <= MAX_DENSE_DIM)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "dimension ({d})^{num_sites} exceeds the dense limit {MAX_DENSE_DIM}"
                    ))
                })?;
        }
        Ok(Self { num_sites, twice_spin })
    }

    pub fn qubits(num_sites: usize) -> Result<Self> {
        Self::new(num_sites, 1)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn twice_spin(&self) -> u32 {
        self.twice_spin
    }

    pub fn spin(&self) -> f64 {
        self.twice_spin as f64 / 2.0
    }

    pub fn local_dim(&self) -> usize {
        self.twice_spin as usize + 1
    }

    pub fn dim(&self) -> usize {
        self.local_dim().pow(self.num_sites as u32)
    }

    pub fn is_qubit(&self) -> bool {
        self.twice_spin == 1
    }

    /// Index stride of `site` in the row-major (site 0 slowest) layout.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim().pow((self.num_sites - 1 - site) as u32)
    }

    /// Local basis index of `site` inside the global index `idx`.
    pub fn digit(&self, idx: usize, site: usize) -> usize {
        (idx / self.stride(site)) % self.local_dim()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.num_sites {
            return Err(Error::invalid(format!(
                "site {site} out of range for {} sites",
                self.num_sites
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        let d = SystemDescriptor::new(3, 2).unwrap();
        assert_eq!(d.local_dim(), 3);
        assert_eq!(d.dim(), 27);
        assert_eq!(d.stride(0), 9);
        assert_eq!(d.digit(9 * 2 + 1, 0), 2);
        assert_eq!(d.digit(9 * 2 + 1, 2), 1);
    }

    #[test]
    fn rejects_bad() {
        assert!(SystemDescriptor::new(0, 1).is_err());
        assert!(SystemDescriptor::new(2, 0).is_err());
        assert!(SystemDescriptor::new(21, 1).is_err());
        assert!(SystemDescriptor::new(20, 1).is_ok());
        assert!(SystemDescriptor::new(usize::MAX, 3).is_err());
    }
}
