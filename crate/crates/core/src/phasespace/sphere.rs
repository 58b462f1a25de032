use std::f64::consts::PI;

use crate::linalg::C64;

/// Orthonormal associated Legendre values `P̄_L^M(x)` for `0 ≤ M ≤ L ≤ lmax`,
/// including the Condon–Shortley phase and the `1/√(4π)` factor, so that
/// `Y_{L,M}(θ,φ) = P̄_L^M(cos θ) e^{iMφ}`. Indexed `[L][M]`.
pub fn normalized_legendre(lmax: usize, x: f64) -> Vec<Vec<f64>> {
    let mut p = vec![Vec::new(); lmax + 1];
    for (l, row) in p.iter_mut().enumerate() {
        *row = vec![0.0; l + 1];
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= -s * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
        }
        p[m][m] = pmm;
        if m < lmax {
            p[m + 1][m] = x * ((2 * m + 3) as f64).sqrt() * pmm;
        }
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    p
}

/// `Y_{L,M}(θ, φ)`.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> C64 {
    let p = normalized_legendre(l as usize, theta.cos());
    let ma = m.unsigned_abs() as usize;
    let base = p[l as usize][ma] * C64::from_polar(1.0, ma as f64 * phi);
    if m >= 0 {
        base
    } else if ma % 2 == 0 {
        base.conj()
    } else {
        -base.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre;

    #[test]
    fn low_order_closed_forms() {
        let (t, p) = (0.7, 1.3);
        let y10 = spherical_harmonic(1, 0, t, p);
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * t.cos()).abs() < 1e-14);
        let y11 = spherical_harmonic(1, 1, t, p);
        let want = C64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * t.sin(), p);
        assert!((y11 - want).norm() < 1e-14);
        let y22 = spherical_harmonic(2, 2, t, p);
        let want = C64::from_polar(0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2), 2.0 * p);
        assert!((y22 - want).norm() < 1e-14);
    }

    #[test]
    fn orthonormal_on_sphere() {
        let lmax = 6;
        let (x, w) = gauss_legendre(lmax + 1);
        let nphi = 2 * lmax + 2;
        let mut idx = Vec::new();
        for l in 0..=lmax as u32 {
            for m in -(l as i32)..=(l as i32) {
                idx.push((l, m));
            }
        }
        for &(l1, m1) in &idx {
            for &(l2, m2) in &idx {
                let mut s = C64::new(0.0, 0.0);
                for (xa, wa) in x.iter().zip(&w) {
                    let th = xa.acos();
                    for b in 0..nphi {
                        let ph = 2.0 * PI * b as f64 / nphi as f64;
                        s += spherical_harmonic(l1, m1, th, ph).conj()
                            * spherical_harmonic(l2, m2, th, ph)
                            * (wa * 2.0 * PI / nphi as f64);
                    }
                }
                let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((s - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}
