use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::sphere::normalized_legendre;
use super::tensor::CharacteristicTable;
use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};
use crate::numfmt::sig17;

/// `n_θ` Gauss–Legendre nodes in `cos θ` times `n_φ` uniform nodes in `φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl GridSpec {
    /// `n_θ = 2S+2`, `n_φ = 4S+4`.
    pub fn default_for(twice_spin: u32) -> Self {
        Self { n_theta: twice_spin as usize + 2, n_phi: 2 * twice_spin as usize + 4 }
    }

    fn check_synthesis(&self, twice_spin: u32) -> Result<()> {
        if self.n_theta < twice_spin as usize + 1 || self.n_phi == 0 {
            return Err(Error::invalid(format!(
                "grid {}x{} undersamples spin 2S={twice_spin} (need n_theta >= {})",
                self.n_theta,
                self.n_phi,
                twice_spin + 1
            )));
        }
        Ok(())
    }

    fn check_quadrature(&self, twice_spin: u32) -> Result<()> {
        self.check_synthesis(twice_spin)?;
        if self.n_phi < 2 * twice_spin as usize + 2 {
            return Err(Error::invalid(format!(
                "n_phi = {} too small for quadrature at 2S={twice_spin} (need >= {})",
                self.n_phi,
                2 * twice_spin + 2
            )));
        }
        Ok(())
    }
}

/// Real Wigner function sampled on a [`GridSpec`]; θ ascending, θ-major storage.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    twice_spin: u32,
    spec: GridSpec,
    thetas: Vec<f64>,
    /// Gauss–Legendre weights matching `thetas`.
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn twice_spin(&self) -> u32 {
        self.twice_spin
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phi(&self, b: usize) -> f64 {
        2.0 * PI * b as f64 / self.spec.n_phi as f64
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.spec.n_phi + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn with_values(&self, values: Vec<f64>) -> WignerGrid {
        WignerGrid { values, ..self.clone() }
    }

    /// `∫ f dΩ` for a field sampled on this grid.
    fn integrate(&self, f: &[f64]) -> f64 {
        let dphi = 2.0 * PI / self.spec.n_phi as f64;
        self.weights
            .iter()
            .enumerate()
            .map(|(a, w)| w * dphi * f[a * self.spec.n_phi..(a + 1) * self.spec.n_phi].iter().sum::<f64>())
            .sum()
    }

    /// CSV with header `theta,phi,w`, θ-major.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,phi,w\n");
        for (a, &t) in self.thetas.iter().enumerate() {
            for b in 0..self.spec.n_phi {
                s.push_str(&format!("{},{},{}\n", sig17(t), sig17(self.phi(b)), sig17(self.value(a, b))));
            }
        }
        s
    }

    fn check_compatible(&self, other: &WignerGrid) -> Result<()> {
        if self.spec != other.spec || self.twice_spin != other.twice_spin {
            return Err(Error::invalid("grids differ in spec or spin"));
        }
        Ok(())
    }
}

/// `W(n) = √(4π/(2S+1)) Σ χ_{L,M} Y_{L,M}(n)`.
pub fn wigner_grid(table: &CharacteristicTable, spec: GridSpec) -> Result<WignerGrid> {
    let ts = table.twice_spin();
    spec.check_synthesis(ts)?;
    let lmax = ts as usize;
    let (x, w) = crate::quad::gauss_legendre(spec.n_theta);
    // x ascending means θ descending; store θ ascending
    let nodes: Vec<(f64, f64)> = x.iter().zip(&w).rev().map(|(&x, &w)| (x, w)).collect();
    let pref = (4.0 * PI / (ts as f64 + 1.0)).sqrt();
    let mut values = Vec::with_capacity(spec.n_theta * spec.n_phi);
    let mut worst_imag: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &(xa, _) in &nodes {
        let p = normalized_legendre(lmax, xa);
        for b in 0..spec.n_phi {
            let phi = 2.0 * PI * b as f64 / spec.n_phi as f64;
            let mut s = ZERO;
            for (l, m, chi) in table.iter() {
                let ma = m.unsigned_abs() as usize;
                let y = p[l as usize][ma] * C64::from_polar(1.0, ma as f64 * phi);
                let y = if m >= 0 {
                    y
                } else if ma % 2 == 0 {
                    y.conj()
                } else {
                    -y.conj()
                };
                s += chi * y;
            }
            s *= pref;
            worst_imag = worst_imag.max(s.im.abs());
            scale = scale.max(s.re.abs());
            values.push(s.re);
        }
    }
    if worst_imag > 1e-10 * scale.max(1.0) {
        return Err(Error::numerical(
            "wigner_grid",
            format!("imaginary residue {worst_imag:e}; table is not Hermitian"),
        ));
    }
    Ok(WignerGrid {
        twice_spin: ts,
        spec,
        thetas: nodes.iter().map(|(x, _)| x.acos()).collect(),
        weights: nodes.iter().map(|(_, w)| *w).collect(),
        values,
    })
}

/// `L̂_z² W = -∂²W/∂φ²`, applied per θ row through the DFT.
pub fn apply_lz2(grid: &WignerGrid) -> WignerGrid {
    let n = grid.spec.n_phi;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out = Vec::with_capacity(grid.values.len());
    let mut buf = vec![ZERO; n];
    for row in grid.values.chunks(n) {
        for (z, &v) in buf.iter_mut().zip(row) {
            *z = C64::new(v, 0.0);
        }
        fwd.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            *z *= m * m / n as f64;
        }
        inv.process(&mut buf);
        out.extend(buf.iter().map(|z| z.re));
    }
    grid.with_values(out)
}

/// `I_z` from the phase-space integral `∫ W L̂_z² W dΩ`.
pub fn iz_quadrature(grid: &WignerGrid) -> Result<f64> {
    grid.spec.check_quadrature(grid.twice_spin)?;
    let lz = apply_lz2(grid);
    let prod: Vec<f64> = grid.values.iter().zip(&lz.values).map(|(a, b)| a * b).collect();
    let sq: Vec<f64> = grid.values.iter().map(|a| a * a).collect();
    let num = grid.integrate(&prod);
    let purity_scaled = grid.integrate(&sq);
    if purity_scaled <= 0.0 {
        return Err(Error::numerical("iz_quadrature", "vanishing purity integral"));
    }
    Ok(num / (grid.twice_spin as f64 * purity_scaled))
}

/// `Tr[ρ f] = (2S+1)/(4π) ∫ W_ρ W_f dΩ`.
pub fn overlap_expectation(grid_rho: &WignerGrid, grid_op: &WignerGrid) -> Result<f64> {
    grid_rho.check_compatible(grid_op)?;
    grid_rho.spec.check_quadrature(grid_rho.twice_spin)?;
    let prod: Vec<f64> = grid_rho.values.iter().zip(&grid_op.values).map(|(a, b)| a * b).collect();
    Ok((grid_rho.twice_spin as f64 + 1.0) / (4.0 * PI) * grid_rho.integrate(&prod))
}

/// Recovers `χ_{L,M} = √((2S+1)/(4π)) ∫ W Y*_{L,M} dΩ`.
pub fn project_characteristic(grid: &WignerGrid) -> Result<CharacteristicTable> {
    let ts = grid.twice_spin;
    grid.spec.check_quadrature(ts)?;
    let n_phi = grid.spec.n_phi;
    let dphi = 2.0 * PI / n_phi as f64;
    let pref = ((ts as f64 + 1.0) / (4.0 * PI)).sqrt();
    let mut values: Vec<Vec<C64>> = (0..=ts).map(|l| vec![ZERO; 2 * l as usize + 1]).collect();
    for (a, &theta) in grid.thetas.iter().enumerate() {
        let p = normalized_legendre(ts as usize, theta.cos());
        for b in 0..n_phi {
            let phi = grid.phi(b);
            let wv = grid.value(a, b) * grid.weights[a] * dphi;
            for l in 0..=ts as usize {
                for m in -(l as i32)..=(l as i32) {
                    let ma = m.unsigned_abs() as usize;
                    let mut y = p[l][ma] * C64::from_polar(1.0, ma as f64 * phi);
                    if m < 0 {
                        y = if ma % 2 == 0 { y.conj() } else { -y.conj() };
                    }
                    values[l][(m + l as i32) as usize] += y.conj() * wv;
                }
            }
        }
    }
    for row in values.iter_mut() {
        for v in row.iter_mut() {
            *v *= pref;
        }
    }
    Ok(CharacteristicTable::from_values(ts, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::{characteristic_of_operator, characteristic_table, iz_sum, purity_from_characteristic};
    use crate::spincore::{random_density, spin_cat, spin_matrices, DensityMatrix, SystemDescriptor};
    use crate::linalg::CMat;

    fn grid_of(rho: &DensityMatrix) -> WignerGrid {
        let t = characteristic_table(rho).unwrap();
        wigner_grid(&t, GridSpec::default_for(rho.descriptor().twice_spin())).unwrap()
    }

    #[test]
    fn maximally_mixed_is_flat() {
        for ts in [1, 2, 5, 10] {
            let rho = DensityMatrix::maximally_mixed(SystemDescriptor::new(1, ts).unwrap());
            let g = grid_of(&rho);
            let (lo, hi) = g.values().iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            assert!(hi - lo < 1e-10);
            assert!(iz_quadrature(&g).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn identity_grid_is_one() {
        let ts = 4;
        let t = characteristic_of_operator(ts, &CMat::identity(5, 5)).unwrap();
        let g = wigner_grid(&t, GridSpec::default_for(ts)).unwrap();
        assert!(g.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let rho = random_density(SystemDescriptor::new(1, ts).unwrap(), 3, 4).unwrap();
        assert!((overlap_expectation(&grid_of(&rho), &g).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn overlap_examples() {
        let ts = 4;
        let id = wigner_grid(
            &characteristic_of_operator(ts, &CMat::identity(5, 5)).unwrap(),
            GridSpec::default_for(ts),
        )
        .unwrap();
        let [sx, _, sz] = spin_matrices(ts);
        let gz = wigner_grid(&characteristic_of_operator(ts, &sz).unwrap(), GridSpec::default_for(ts)).unwrap();
        let gx = wigner_grid(&characteristic_of_operator(ts, &sx).unwrap(), GridSpec::default_for(ts)).unwrap();
        let desc = SystemDescriptor::new(1, ts).unwrap();
        let up = DensityMatrix::from_pure(desc, &crate::spincore::basis_vector(5, 0)).unwrap();
        assert!((overlap_expectation(&grid_of(&up), &gz).unwrap() - 2.0).abs() < 1e-8);
        assert!((overlap_expectation(&grid_of(&up), &id).unwrap() - 1.0).abs() < 1e-8);
        let cat = spin_cat(ts, 1.0).unwrap();
        assert!(overlap_expectation(&grid_of(&cat), &gx).unwrap().abs() < 1e-8);
    }

    #[test]
    fn fringes_and_iz() {
        let cat = spin_cat(10, 1.0).unwrap();
        let spec = GridSpec { n_theta: 13, n_phi: 40 };
        let g = wigner_grid(&characteristic_table(&cat).unwrap(), spec).unwrap();
        // the equator lies between the two middle nodes; use the row nearest π/2
        let a = (0..13).min_by(|&i, &j| {
            (g.thetas()[i] - PI / 2.0).abs().partial_cmp(&(g.thetas()[j] - PI / 2.0).abs()).unwrap()
        }).unwrap();
        // period π/5 = 4 grid steps at n_phi = 40
        for b in 0..40 {
            assert!((g.value(a, b) - g.value(a, (b + 4) % 40)).abs() < 1e-10);
        }
        assert!((iz_quadrature(&g).unwrap() - 5.0).abs() < 1e-6);
        let mixed = spin_cat(10, 0.0).unwrap();
        let g0 = wigner_grid(&characteristic_table(&mixed).unwrap(), spec).unwrap();
        for a in 0..13 {
            for b in 1..40 {
                assert!((g0.value(a, b) - g0.value(a, 0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lz2_eigenfunction() {
        let ts = 6;
        for (l, m) in [(3u32, 2i32), (6, -5), (4, 0)] {
            let mut values: Vec<Vec<C64>> = (0..=ts).map(|k| vec![ZERO; 2 * k as usize + 1]).collect();
            values[l as usize][(m + l as i32) as usize] = C64::new(1.0, 0.0);
            values[l as usize][(-m + l as i32) as usize] += C64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            let t = CharacteristicTable::from_values(ts, values);
            let g = wigner_grid(&t, GridSpec::default_for(ts)).unwrap();
            let lz = apply_lz2(&g);
            for (a, b) in g.values().iter().zip(lz.values()) {
                assert!((b - (m * m) as f64 * a).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ensemble_identities() {
        for ts in [1u32, 2, 3, 4, 10] {
            let desc = SystemDescriptor::new(1, ts).unwrap();
            for seed in 0..10 {
                let rank = 1 + (seed as usize % (ts as usize + 1));
                let rho = random_density(desc, rank, seed).unwrap();
                let t = characteristic_table(&rho).unwrap();
                assert!((purity_from_characteristic(&t) - rho.purity()).abs() < 1e-10);
                let g = wigner_grid(&t, GridSpec::default_for(ts)).unwrap();
                assert!((iz_sum(&t) - iz_quadrature(&g).unwrap()).abs() < 1e-6);
                assert!(iz_sum(&t) <= ts as f64 / 2.0 + 1e-10);
                let back = project_characteristic(&g).unwrap();
                for (l, m, c) in t.iter() {
                    assert!((back.get(l, m) - c).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn rejects_undersampled() {
        let t = characteristic_table(&spin_cat(4, 1.0).unwrap()).unwrap();
        assert!(wigner_grid(&t, GridSpec { n_theta: 4, n_phi: 10 }).is_err());
        let g = wigner_grid(&t, GridSpec { n_theta: 5, n_phi: 9 }).unwrap();
        assert!(iz_quadrature(&g).is_err());
    }
}
