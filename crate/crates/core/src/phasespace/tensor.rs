use super::cg::cg_doubled;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, ZERO};
use crate::spincore::DensityMatrix;

/// `T_{L,M}` on the basis `m = S … -S`:
/// `⟨S,m'|T|S,m⟩ = √((2L+1)/(2S+1)) ⟨S m; L M | S m'⟩`.
pub fn irreducible_tensor(twice_spin: u32, l: u32, m: i32) -> Result<CMat> {
    if l > twice_spin || m.unsigned_abs() > l {
        return Err(Error::invalid(format!("tensor index (L={l}, M={m}) out of range for 2S={twice_spin}")));
    }
    let d = twice_spin as usize + 1;
    let ts = twice_spin as i64;
    let pre = ((2 * l + 1) as f64 / d as f64).sqrt();
    let mut t = CMat::zeros(d, d);
    for col in 0..d {
        let m2 = ts - 2 * col as i64;
        let mp2 = m2 + 2 * m as i64;
        if mp2.abs() > ts {
            continue;
        }
        let row = ((ts - mp2) / 2) as usize;
        t[(row, col)] = C64::new(pre * cg_doubled(ts, m2, 2 * l as i64, 2 * m as i64, ts, mp2), 0.0);
    }
    Ok(t)
}

/// Coefficients `χ_{L,M} = Tr[T†_{L,M} X]` of a single-spin operator.
#[derive(Clone, Debug)]
pub struct CharacteristicTable {
    twice_spin: u32,
    /// `values[L][M + L]`.
    values: Vec<Vec<C64>>,
}

impl CharacteristicTable {
    pub fn twice_spin(&self) -> u32 {
        self.twice_spin
    }

    pub fn get(&self, l: u32, m: i32) -> C64 {
        self.values[l as usize][(m + l as i32) as usize]
    }

    pub(crate) fn from_values(twice_spin: u32, values: Vec<Vec<C64>>) -> Self {
        Self { twice_spin, values }
    }

    /// Iterates `(L, M, χ)`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, C64)> + '_ {
        self.values.iter().enumerate().flat_map(|(l, row)| {
            row.iter()
                .enumerate()
                .map(move |(k, &c)| (l as u32, k as i32 - l as i32, c))
        })
    }
}

/// Expansion of any `d×d` operator over the tensor basis.
pub fn characteristic_of_operator(twice_spin: u32, op: &CMat) -> Result<CharacteristicTable> {
    let d = twice_spin as usize + 1;
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::invalid(format!("operator must be {d}x{d}")));
    }
    let mut values = Vec::with_capacity(d);
    for l in 0..=twice_spin {
        let mut row = Vec::with_capacity(2 * l as usize + 1);
        for m in -(l as i32)..=(l as i32) {
            let t = irreducible_tensor(twice_spin, l, m)?;
            let mut s = ZERO;
            for (a, b) in t.iter().zip(op.iter()) {
                s += a.conj() * b;
            }
            row.push(s);
        }
        values.push(row);
    }
    Ok(CharacteristicTable { twice_spin, values })
}

/// `χ_{L,M} = Tr[T†_{L,M} ρ]` for a single-spin state.
pub fn characteristic_table(rho: &DensityMatrix) -> Result<CharacteristicTable> {
    if rho.descriptor().num_sites() != 1 {
        return Err(Error::invalid("characteristic table needs a single-spin state"));
    }
    characteristic_of_operator(rho.descriptor().twice_spin(), rho.matrix())
}

/// `Σ |χ_{L,M}|² = Tr ρ²`.
pub fn purity_from_characteristic(table: &CharacteristicTable) -> f64 {
    table.iter().map(|(_, _, c)| c.norm_sqr()).sum()
}

/// `I_z = Σ M²|χ_{L,M}|² / (2S 𝒫)`.
pub fn iz_sum(table: &CharacteristicTable) -> f64 {
    let num: f64 = table.iter().map(|(_, m, c)| (m * m) as f64 * c.norm_sqr()).sum();
    num / (table.twice_spin as f64 * purity_from_characteristic(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, trace_prod};
    use crate::spincore::{pauli, spin_cat, spin_matrices, DensityMatrix, SystemDescriptor};

    #[test]
    fn orthonormal_basis() {
        for ts in 1..=6u32 {
            let mut all = Vec::new();
            for l in 0..=ts {
                for m in -(l as i32)..=(l as i32) {
                    all.push(irreducible_tensor(ts, l, m).unwrap());
                }
            }
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let ip = trace_prod(&a.adjoint(), b);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn known_tensors() {
        for ts in 1..=5u32 {
            let d = ts as usize + 1;
            let t00 = irreducible_tensor(ts, 0, 0).unwrap();
            let want = CMat::identity(d, d) * C64::new(1.0 / (d as f64).sqrt(), 0.0);
            assert!(max_abs_diff(&t00, &want) < 1e-14);
        }
        let t10 = irreducible_tensor(1, 1, 0).unwrap();
        assert!(max_abs_diff(&t10, &(pauli()[2].clone() * C64::new(0.5f64.sqrt(), 0.0))) < 1e-14);
        // selection rule
        let t = irreducible_tensor(4, 3, 2).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                if c as i32 - r as i32 != 2 {
                    assert_eq!(t[(r, c)], ZERO);
                }
            }
        }
        assert!(irreducible_tensor(2, 3, 0).is_err());
        assert!(irreducible_tensor(2, 1, 2).is_err());
    }

    #[test]
    fn characteristic_examples() {
        let desc = SystemDescriptor::new(1, 4).unwrap();
        let mixed = characteristic_table(&DensityMatrix::maximally_mixed(desc)).unwrap();
        for (l, _, c) in mixed.iter() {
            if l >= 1 {
                assert!(c.norm() < 1e-14);
            }
        }
        assert!((mixed.get(0, 0).re - 1.0 / 5f64.sqrt()).abs() < 1e-14);
        assert!((purity_from_characteristic(&mixed) - 0.2).abs() < 1e-14);

        let cat = characteristic_table(&spin_cat(10, 1.0).unwrap()).unwrap();
        for (_, m, c) in cat.iter() {
            if ![0, 10, -10].contains(&m) {
                assert!(c.norm() < 1e-14);
            }
        }
        assert!(cat.get(10, 10).norm() > 1e-3);
        assert!((iz_sum(&cat) - 5.0).abs() < 1e-10);

        let half = characteristic_table(&spin_cat(10, 0.5).unwrap()).unwrap();
        assert!((purity_from_characteristic(&half) - 5.0 / 8.0).abs() < 1e-12);
        let rho = spin_cat(10, 0.5).unwrap();
        let sz = &spin_matrices(10)[2];
        let r = rho.matrix();
        let direct = (trace_prod(&(r * r), &(sz * sz)) - trace_prod(&(r * sz), &(r * sz))).re
            / (5.0 * rho.purity());
        assert!((iz_sum(&half) - direct).abs() < 1e-12);
    }

    #[test]
    fn hermitian_symmetry() {
        let desc = SystemDescriptor::new(1, 3).unwrap();
        let rho = crate::spincore::random_density(desc, 4, 3).unwrap();
        let t = characteristic_table(&rho).unwrap();
        for (l, m, c) in t.iter() {
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((t.get(l, -m) - c.conj() * sign).norm() < 1e-10);
        }
    }
}
