//! Maximization of `⟨α, Mα⟩` over one unit vector per site.
//!
//! Each restart runs BFGS on the `2N` polar angles, then a trust-region
//! Newton polish on the product of spheres to drive the tangent gradient
//! below tolerance (angle coordinates are degenerate at the poles).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::matrix::MeasureMatrix;
use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::rng;
use crate::spincore::DirectionField;

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Tangent-space gradient norm accepted as converged.
    pub tol: f64,
    pub max_bfgs_iter: usize,
    pub max_newton_iter: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { restarts: 200, seed: 0, tol: 1e-9, max_bfgs_iter: 500, max_newton_iter: 100 }
    }
}

impl OptimizeOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Outcome of a single restart.
#[derive(Clone, Debug)]
pub struct LocalOptimum {
    pub value: f64,
    pub alpha: Vec<[f64; 3]>,
    pub grad_norm: f64,
    pub converged: bool,
}

/// Best optimum over all restarts.
#[derive(Clone, Debug)]
pub struct DirectionOptimum {
    pub value: f64,
    pub field: DirectionField,
    pub restarts: usize,
    pub best_restart: usize,
    pub grad_norm: f64,
    pub spread: f64,
}

fn angles_to_alpha(x: &[f64]) -> Vec<[f64; 3]> {
    x.chunks(2)
        .map(|c| {
            let (st, ct) = c[0].sin_cos();
            let (sp, cp) = c[1].sin_cos();
            [st * cp, st * sp, ct]
        })
        .collect()
}

fn alpha_to_angles(alpha: &[[f64; 3]]) -> Vec<f64> {
    alpha
        .iter()
        .flat_map(|a| [a[2].clamp(-1.0, 1.0).acos(), a[1].atan2(a[0])])
        .collect()
}

fn flat(alpha: &[[f64; 3]]) -> DVector<f64> {
    DVector::from_iterator(3 * alpha.len(), alpha.iter().flatten().copied())
}

/// `(value, 2Mα)`.
fn eval(m: &RMat, alpha: &[[f64; 3]]) -> (f64, DVector<f64>) {
    let a = flat(alpha);
    let ma = m * &a;
    (a.dot(&ma), ma * 2.0)
}

/// Euclidean gradient projected on each tangent plane.
fn tangent_grad_norm(alpha: &[[f64; 3]], g: &DVector<f64>) -> f64 {
    let mut s = 0.0;
    for (i, a) in alpha.iter().enumerate() {
        let gi = [g[3 * i], g[3 * i + 1], g[3 * i + 2]];
        let p = a[0] * gi[0] + a[1] * gi[1] + a[2] * gi[2];
        for k in 0..3 {
            let t = gi[k] - p * a[k];
            s += t * t;
        }
    }
    s.sqrt()
}

/// Negated value and its angle gradient, for minimization.
fn angle_objective(m: &RMat, x: &[f64]) -> (f64, Vec<f64>) {
    let alpha = angles_to_alpha(x);
    let (v, g) = eval(m, &alpha);
    let mut grad = vec![0.0; x.len()];
    for i in 0..alpha.len() {
        let (st, ct) = x[2 * i].sin_cos();
        let (sp, cp) = x[2 * i + 1].sin_cos();
        let gi = [g[3 * i], g[3 * i + 1], g[3 * i + 2]];
        let dth = [ct * cp, ct * sp, -st];
        let dph = [-st * sp, st * cp, 0.0];
        grad[2 * i] = -(gi[0] * dth[0] + gi[1] * dth[1] + gi[2] * dth[2]);
        grad[2 * i + 1] = -(gi[0] * dph[0] + gi[1] * dph[1]);
    }
    (-v, grad)
}

fn bfgs(m: &RMat, x0: Vec<f64>, max_iter: usize, gtol: f64) -> Vec<f64> {
    let n = x0.len();
    let mut x = DVector::from_vec(x0);
    let (mut f, g) = angle_objective(m, x.as_slice());
    let mut g = DVector::from_vec(g);
    let mut h = DMatrix::<f64>::identity(n, n);
    for _ in 0..max_iter {
        if g.norm() <= gtol {
            break;
        }
        let mut p = -(&h * &g);
        let mut slope = p.dot(&g);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = p.dot(&g);
        }
        // Armijo backtracking
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &p * t;
            let (fnew, gnew) = angle_objective(m, xn.as_slice());
            if fnew <= f + 1e-4 * t * slope {
                accepted = Some((xn, fnew, DVector::from_vec(gnew)));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else { break };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-16 * s.norm() * y.norm() && sy > 0.0 {
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ, expanded
            h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        let done = (f - fnew).abs() <= 1e-16 * f.abs().max(1.0);
        x = xn;
        f = fnew;
        g = gn;
        if done {
            break;
        }
    }
    x.iter().copied().collect()
}

/// Orthonormal basis of the plane perpendicular to `a`.
fn tangent_basis(a: [f64; 3]) -> [[f64; 3]; 2] {
    let seed = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = seed[0] * a[0] + seed[1] * a[1] + seed[2] * a[2];
    let mut u = [seed[0] - p * a[0], seed[1] - p * a[1], seed[2] - p * a[2]];
    let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u.iter_mut().for_each(|x| *x /= nu);
    let v = [a[1] * u[2] - a[2] * u[1], a[2] * u[0] - a[0] * u[2], a[0] * u[1] - a[1] * u[0]];
    [u, v]
}

/// Step `s` maximizing `gᵀs + ½sᵀHs` within `|s| ≤ radius`.
fn trust_step(h: &DMatrix<f64>, g: &DVector<f64>, radius: f64) -> DVector<f64> {
    let eig = SymmetricEigen::new(h.clone());
    let q = &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let gq = q.transpose() * g;
    let step_for = |mu: f64| -> DVector<f64> {
        // s = (μI − H)⁻¹ g in the eigenbasis
        let c = DVector::from_fn(gq.len(), |k, _| gq[k] / (mu - lam[k]).max(1e-300));
        q * c
    };
    let lmax = lam.max();
    if lmax < 0.0 {
        let s = step_for(0.0);
        if s.norm() <= radius {
            return s;
        }
    }
    let mut lo = lmax.max(0.0);
    let mut hi = lo + g.norm() / radius + 1.0;
    while step_for(hi).norm() > radius {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if step_for(mid).norm() > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    step_for(hi)
}

fn newton_polish(m: &RMat, mut alpha: Vec<[f64; 3]>, tol: f64, max_iter: usize) -> LocalOptimum {
    let n = alpha.len();
    let (mut val, mut g) = eval(m, &alpha);
    let mut radius = 0.5;
    let mut gn = tangent_grad_norm(&alpha, &g);
    for _ in 0..max_iter {
        if gn <= tol {
            break;
        }
        let bases: Vec<[[f64; 3]; 2]> = alpha.iter().map(|&a| tangent_basis(a)).collect();
        let b = DMatrix::from_fn(3 * n, 2 * n, |r, c| {
            if r / 3 == c / 2 {
                bases[r / 3][c % 2][r % 3]
            } else {
                0.0
            }
        });
        let rg = b.transpose() * &g;
        let mut h = b.transpose() * (m * 2.0) * &b;
        for i in 0..n {
            let lam = alpha[i][0] * g[3 * i] + alpha[i][1] * g[3 * i + 1] + alpha[i][2] * g[3 * i + 2];
            h[(2 * i, 2 * i)] -= lam;
            h[(2 * i + 1, 2 * i + 1)] -= lam;
        }
        let s = trust_step(&h, &rg, radius);
        let predicted = rg.dot(&s) + 0.5 * s.dot(&(&h * &s));
        let trial: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let [u, v] = bases[i];
                let (a, b2) = (s[2 * i], s[2 * i + 1]);
                let mut w = [0.0; 3];
                for k in 0..3 {
                    w[k] = alpha[i][k] + a * u[k] + b2 * v[k];
                }
                let nw = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                [w[0] / nw, w[1] / nw, w[2] / nw]
            })
            .collect();
        let (tval, tg) = eval(m, &trial);
        let actual = tval - val;
        let ratio = if predicted.abs() < 1e-300 { 1.0 } else { actual / predicted };
        if ratio < 0.25 {
            radius *= 0.25;
        } else if ratio > 0.75 && (s.norm() - radius).abs() < 1e-12 * radius.max(1.0) {
            radius = (2.0 * radius).min(std::f64::consts::PI);
        }
        let tgn = tangent_grad_norm(&trial, &tg);
        // accept on real progress, or on a rounding-level change that still
        // lowers the gradient
        if ratio > 0.1 || (actual.abs() <= 1e-14 * val.abs().max(1.0) && tgn < gn) {
            alpha = trial;
            val = tval;
            g = tg;
            gn = tgn;
        }
        if radius < 1e-15 {
            break;
        }
    }
    LocalOptimum { value: val, alpha, grad_norm: gn, converged: gn <= tol }
}

/// One ascent from `start`.
pub fn local_ascent(m: &MeasureMatrix, start: &DirectionField, opts: &OptimizeOptions) -> Result<LocalOptimum> {
    start.check_sites(m.descriptor())?;
    Ok(ascend(m.data(), start.vectors(), opts))
}

pub(crate) fn ascend(data: &RMat, start: &[[f64; 3]], opts: &OptimizeOptions) -> LocalOptimum {
    let x = bfgs(data, alpha_to_angles(start), opts.max_bfgs_iter, 1e-8);
    newton_polish(data, angles_to_alpha(&x), opts.tol, opts.max_newton_iter)
}

pub(crate) fn seeded_restart(data: &RMat, index: usize, opts: &OptimizeOptions) -> LocalOptimum {
    let mut r = rng::stream(opts.seed, index as u64);
    let start: Vec<[f64; 3]> = (0..data.nrows() / 3).map(|_| rng::unit_vector(&mut r)).collect();
    ascend(data, &start, opts)
}

fn restart(m: &MeasureMatrix, index: usize, opts: &OptimizeOptions) -> LocalOptimum {
    seeded_restart(m.data(), index, opts)
}

/// Best local maximum over `opts.restarts` seeded starts, run in parallel.
pub fn optimize_direction(m: &MeasureMatrix, opts: &OptimizeOptions) -> Result<DirectionOptimum> {
    if opts.restarts == 0 {
        return Err(Error::invalid("at least one restart is needed"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let runs: Vec<LocalOptimum> = (0..opts.restarts).into_par_iter().map(|k| restart(m, k, opts)).collect();
    let best_value = runs.iter().filter(|r| r.converged).map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    if best_value == f64::NEG_INFINITY {
        let best = runs.iter().max_by(|a, b| a.value.total_cmp(&b.value)).unwrap();
        return Err(Error::NonConvergence { best: best.value, grad_norm: best.grad_norm });
    }
    let best_restart = runs.iter().position(|r| r.converged && r.value >= best_value - 1e-9).unwrap();
    let worst = runs.iter().filter(|r| r.converged).map(|r| r.value).fold(f64::INFINITY, f64::min);
    let best = &runs[best_restart];
    Ok(DirectionOptimum {
        value: best.value,
        field: DirectionField::normalized(best.alpha.clone())?,
        restarts: opts.restarts,
        best_restart,
        grad_norm: best.grad_norm,
        spread: best_value - worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macromeasure::{Convention, MatrixKind};
    use crate::spincore::SystemDescriptor;

    fn random_sym(n: usize, seed: u64) -> RMat {
        let mut r = rng::stream(seed, 0);
        let a = RMat::from_fn(n, n, |_, _| rng::normal(&mut r));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn single_site_is_top_eigenvalue() {
        for seed in 0..5 {
            let data = random_sym(3, seed);
            let top = SymmetricEigen::new(data.clone()).eigenvalues.max();
            let desc = SystemDescriptor::qubits(1).unwrap();
            let m = MeasureMatrix::from_raw(MatrixKind::V, desc, Convention::Raw, data).unwrap();
            let opt = optimize_direction(&m, &OptimizeOptions { restarts: 8, ..Default::default() }).unwrap();
            assert!((opt.value - top).abs() < 1e-9);
            assert!(opt.grad_norm <= 1e-9);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let desc = SystemDescriptor::qubits(4).unwrap();
        let m = MeasureMatrix::from_raw(MatrixKind::V, desc, Convention::Raw, random_sym(12, 3)).unwrap();
        let opts = OptimizeOptions { restarts: 20, seed: 11, ..Default::default() };
        let a = optimize_direction(&m, &opts).unwrap();
        let b = optimize_direction(&m, &opts).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_restart, b.best_restart);
        assert_eq!(a.field, b.field);
        let q = m.quadratic_form(&a.field).unwrap();
        assert!((q - a.value).abs() < 1e-10);
    }

    #[test]
    fn polar_optimum_converges() {
        // optimum exactly at the poles, where angle gradients degenerate
        let desc = SystemDescriptor::qubits(3).unwrap();
        let mut data = RMat::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                data[(3 * i + 2, 3 * j + 2)] = 1.0;
            }
            data[(3 * i, 3 * i)] = 0.5;
        }
        let m = MeasureMatrix::from_raw(MatrixKind::V, desc, Convention::Raw, data).unwrap();
        let opt = optimize_direction(&m, &OptimizeOptions { restarts: 10, ..Default::default() }).unwrap();
        assert!((opt.value - 9.0).abs() < 1e-9);
    }
}
