use super::dicke::DickeState;
use super::generator::{Generator, LindbladSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat};
use crate::spincore::DensityMatrix;

/// Fixed-step RK4 settings. The step is shrunk so that `t_max` is hit exactly.
#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Keep every k-th step (and always `t = 0`).
    pub save_every: usize,
}

/// States at the saved times.
#[derive(Clone, Debug)]
pub struct Evolution<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Step actually used.
    pub dt: f64,
}

fn lincomb(a: &CMat, b: &CMat, s: f64) -> CMat {
    a + b * C64::new(s, 0.0)
}

fn rk4_step(g: &Generator, rho: &CMat, dt: f64) -> CMat {
    let k1 = g.rhs(rho);
    let k2 = g.rhs(&lincomb(rho, &k1, 0.5 * dt));
    let k3 = g.rhs(&lincomb(rho, &k2, 0.5 * dt));
    let k4 = g.rhs(&lincomb(rho, &k3, dt));
    rho + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
}

fn run(g: &Generator, rho0: &CMat, size: (usize, f64), spec: &LindbladSpec, opts: &EvolveOptions) -> Result<Evolution<CMat>> {
    if !(opts.t_max >= 0.0) || !(opts.dt > 0.0) || opts.save_every == 0 {
        return Err(Error::invalid("need t_max ≥ 0, dt > 0 and save_every ≥ 1"));
    }
    let bound = spec.max_dt(size.0, size.1);
    if opts.dt > bound * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("dt {} exceeds the stability bound {bound:e}", opts.dt)));
    }
    let steps = ((opts.t_max / opts.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { opts.t_max / steps as f64 };
    let mut rho = rho0.clone();
    let mut times = vec![0.0];
    let mut states = vec![rho.clone()];
    for k in 1..=steps {
        rho = linalg::hermitian_part(&rk4_step(g, &rho, dt));
        let tr = linalg::trace(&rho).re;
        if (tr - 1.0).abs() > 1e-12 {
            rho /= C64::new(tr, 0.0);
        }
        if k % opts.save_every == 0 || k == steps {
            let t = k as f64 * dt;
            let min = linalg::eigvalsh(&rho)?[0];
            if min < -1e-8 {
                return Err(Error::numerical("time stepping", format!("state lost positivity at t = {t} (eigenvalue {min:e})")));
            }
            times.push(t);
            states.push(rho.clone());
        }
    }
    Ok(Evolution { times, states, dt })
}

/// Full-space evolution.
pub fn evolve(rho0: &DensityMatrix, spec: &LindbladSpec, opts: &EvolveOptions) -> Result<Evolution<DensityMatrix>> {
    let desc = *rho0.descriptor();
    let g = Generator::full(spec, &desc)?;
    let ev = run(&g, rho0.matrix(), (desc.num_sites(), desc.spin()), spec, opts)?;
    Ok(Evolution {
        times: ev.times,
        states: ev.states.into_iter().map(|m| DensityMatrix::trusted(desc, m)).collect(),
        dt: ev.dt,
    })
}

/// Evolution inside the symmetric subspace; collective decay only.
pub fn dicke_evolve(rho0: &DickeState, spec: &LindbladSpec, opts: &EvolveOptions) -> Result<Evolution<DickeState>> {
    let n = rho0.num_sites();
    let g = Generator::dicke(spec, n)?;
    let ev = run(&g, rho0.matrix(), (n, 0.5), spec, opts)?;
    Ok(Evolution {
        times: ev.times,
        states: ev.states.into_iter().map(|m| DickeState::trusted(n, m)).collect(),
        dt: ev.dt,
    })
}
