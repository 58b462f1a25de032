use rayon::prelude::*;

use super::{
    emit, CmdResult, ConventionArg, DissipateArgs, Failure, MeasureArgs, OptimizerArgs, PathArg,
    ScalingArgs, SweepArgs, Which, WignerArgs, EXIT_NUMERICAL,
};
use crate::isingqpt::{scaling_exponent, sweep_point, sweep_row};
use crate::lindblad::{
    dicke_evolve, dicke_trajectory, evolve, full_trajectory, DickeState, EvolveOptions, LindbladSpec,
};
use crate::macromeasure::{measure_f, measure_i, Convention, MeasureResult, OptimizeOptions};
use crate::phasespace::{characteristic_table, wigner_grid, GridSpec};
use crate::spincore::{ghz_state, read_msdm, spin_cat, SystemDescriptor};

/// Largest N for which the full-space path is offered.
pub const FULL_PATH_MAX_N: usize = 10;

impl OptimizerArgs {
    pub fn options(&self) -> Result<OptimizeOptions, Failure> {
        if self.restarts == 0 {
            return Err(Failure::usage("--restarts must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Failure::usage("--tol must be positive"));
        }
        Ok(OptimizeOptions { restarts: self.restarts, seed: self.seed, tol: self.tol, ..OptimizeOptions::default() })
    }
}

fn convention(arg: Option<ConventionArg>, desc: &SystemDescriptor) -> Result<Convention, Failure> {
    let c = match arg {
        None => Convention::default_for(desc),
        Some(ConventionArg::Raw) => Convention::Raw,
        Some(ConventionArg::Qubit) => Convention::QubitNormalized,
    };
    c.check(desc).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(c)
}

pub fn measure(a: &MeasureArgs, out: &str) -> CmdResult {
    let rho = read_msdm(&a.input).map_err(|e| Failure::from_error("reading state", e))?;
    let conv = convention(a.convention, rho.descriptor())?;
    let opts = a.opt.options()?;
    let mut results: Vec<MeasureResult> = Vec::new();
    if a.measure != Which::F {
        results.push(measure_i(&rho, conv, &opts).map_err(|e| Failure::from_error("optimizing I", e))?);
    }
    if a.measure != Which::I {
        results.push(measure_f(&rho, conv, &opts).map_err(|e| Failure::from_error("optimizing F", e))?);
    }
    let text = if results.len() == 1 {
        results[0].to_json()
    } else {
        let parts: Vec<String> = results
            .iter()
            .map(|r| r.to_json().lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n"))
            .collect();
        format!("[\n{}\n]", parts.join(",\n"))
    };
    emit(out, &(text + "\n"))
}

pub fn wigner(a: &WignerArgs, out: &str) -> CmdResult {
    if a.spin == 0 {
        return Err(Failure::usage("--spin must be at least 1"));
    }
    let rho = spin_cat(a.spin, a.gamma).map_err(|e| Failure::usage(e.to_string()))?;
    let def = GridSpec::default_for(a.spin);
    let spec = GridSpec { n_theta: a.ntheta.unwrap_or(def.n_theta), n_phi: a.nphi.unwrap_or(def.n_phi) };
    let table = characteristic_table(&rho).map_err(|e| Failure::from_error("characteristic function", e))?;
    let grid = wigner_grid(&table, spec).map_err(|e| Failure::from_error("grid synthesis", e))?;
    emit(out, &grid.to_csv())
}

/// `steps` values from `lmin` to `lmax`, geometric unless `linear`.
pub fn lambda_grid(lmin: f64, lmax: f64, steps: usize, linear: bool) -> Result<Vec<f64>, Failure> {
    if !(lmin > 0.0) || !(lmax >= lmin) || steps == 0 {
        return Err(Failure::usage("need 0 < lmin <= lmax and steps >= 1"));
    }
    if steps == 1 {
        return Ok(vec![lmin]);
    }
    let t = |k: usize| k as f64 / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if linear { lmin + (lmax - lmin) * t(k) } else { lmin * (lmax / lmin).powf(t(k)) })
        .collect())
}

pub fn ising_sweep(a: &SweepArgs, out: &str) -> CmdResult {
    let lambdas = lambda_grid(a.lmin, a.lmax, a.steps, a.linear)?;
    if a.block_lens.iter().any(|&l| l == 0 || l > crate::isingqpt::MAX_BLOCK) {
        return Err(Failure::usage(format!("--L entries must lie in 1..={}", crate::isingqpt::MAX_BLOCK)));
    }
    let opts = a.opt.options()?;
    let mut points: Vec<(usize, f64)> =
        a.block_lens.iter().flat_map(|&l| lambdas.iter().map(move |&x| (l, x))).collect();
    points.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let results: Vec<_> =
        points.par_iter().map(|&(l, lam)| sweep_point(lam, l, !a.no_f, &opts)).collect();
    let mut csv = String::from("lambda,L,I,F,purity\n");
    for (&(l, lam), r) in points.iter().zip(results) {
        match r {
            Ok(rec) => {
                csv.push_str(&sweep_row(&rec));
                csv.push('\n');
            }
            Err(e) => {
                csv.push_str(&format!("{},{l},FAIL,FAIL,FAIL\n", crate::numfmt::sig17(lam)));
                emit(out, &csv)?;
                return Err(Failure { code: EXIT_NUMERICAL, message: format!("sweep point λ={lam}, L={l}: {e}") });
            }
        }
    }
    emit(out, &csv)
}

pub fn ising_scaling(a: &ScalingArgs, out: &str) -> CmdResult {
    if a.sizes.len() < 2 {
        return Err(Failure::usage("--N needs at least two sizes"));
    }
    let opts = a.opt.options()?;
    let fit = scaling_exponent(&a.sizes, a.lambda, &opts).map_err(|e| Failure::from_error("scaling run", e))?;
    eprintln!("exponent {}", crate::numfmt::sig17(fit.exponent));
    emit(out, &fit.to_csv())
}

pub fn dissipate(a: &DissipateArgs, out: &str) -> CmdResult {
    if a.n == 0 {
        return Err(Failure::usage("--N must be at least 1"));
    }
    let dicke = match a.path {
        PathArg::Full if a.n > FULL_PATH_MAX_N => {
            return Err(Failure::usage(format!("the full-space path is limited to N <= {FULL_PATH_MAX_N}")))
        }
        PathArg::Full => false,
        PathArg::Auto | PathArg::Dicke => true,
    };
    let mut spec = LindbladSpec::collective_decay(a.gamma).map_err(|e| Failure::usage(e.to_string()))?;
    spec.rabi = a.rabi;
    if !a.rabi.is_finite() {
        return Err(Failure::usage("--rabi must be finite"));
    }
    let dt = a.dt.unwrap_or_else(|| spec.max_dt(a.n, 0.5).min(0.01));
    let eo = EvolveOptions { t_max: a.tmax, dt, save_every: a.save_every };
    let conv = match a.convention {
        ConventionArg::Raw => Convention::Raw,
        ConventionArg::Qubit => Convention::QubitNormalized,
    };
    let opts = a.opt.options()?;
    let traj = if dicke {
        let rho0 = DickeState::ghz(a.n).map_err(|e| Failure::usage(e.to_string()))?;
        let ev = dicke_evolve(&rho0, &spec, &eo).map_err(|e| Failure::from_error("integration", e))?;
        dicke_trajectory(&ev, conv, &opts).map_err(|e| Failure::from_error("measures", e))?
    } else {
        let rho0 = ghz_state(a.n, 1).map_err(|e| Failure::usage(e.to_string()))?;
        let ev = evolve(&rho0, &spec, &eo).map_err(|e| Failure::from_error("integration", e))?;
        full_trajectory(&ev, conv, &opts).map_err(|e| Failure::from_error("measures", e))?
    };
    emit(out, &traj.to_csv())
}
