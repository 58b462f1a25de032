use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{emit, CmdResult, Failure, SelftestArgs, EXIT_SELFTEST};
use crate::error::{Error, Result};
use crate::isingqpt::{block_rdm, loglog_slope, scaling_exponent, sweep_point, xx_correlation};
use crate::linalg::{self, CMat};
use crate::lindblad::{dicke_evolve, dicke_measures, lindblad_rhs, DickeState, EvolveOptions, LindbladSpec};
use crate::macromeasure::{
    dephasing_purity_rate, measure_f, measure_i, trace_form_i, Convention, OptimizeOptions,
};
use crate::numfmt::{sig17, Sig17};
use crate::phasespace::{characteristic_table, iz_sum, wigner_grid, GridSpec, WignerGrid};
use crate::spincore::{
    ghz_state, mixed_bell, plus_product, product_state, spin_cat, DensityMatrix, DirectionField,
    OperatorKind, SystemDescriptor,
};

const EMBEDDED: &str = include_str!("goldens.json");

/// Expected outcome of one check.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expect {
    Value { value: f64, tol: f64 },
    Range { min: f64, max: f64 },
}

impl Expect {
    fn accepts(&self, x: f64) -> bool {
        match *self {
            Expect::Value { value, tol } => (x - value).abs() <= tol,
            Expect::Range { min, max } => (min..=max).contains(&x),
        }
    }

    fn describe(&self) -> String {
        match *self {
            Expect::Value { value, tol } => format!("{} ± {tol:e}", sig17(value)),
            Expect::Range { min, max } => format!("[{}, {}]", sig17(min), sig17(max)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Golden {
    pub name: String,
    #[serde(flatten)]
    pub expect: Expect,
}

impl Golden {
    pub fn embedded() -> Vec<Golden> {
        serde_json::from_str(EMBEDDED).expect("embedded golden table parses")
    }

    pub fn parse(text: &str) -> Result<Vec<Golden>> {
        serde_json::from_str(text).map_err(|e| Error::format("golden table", e.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: Option<f64>,
    pub expect: Expect,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub checks: Vec<CheckOutcome>,
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    pass: bool,
    measured: Option<Sig17>,
    expected: &'a Expect,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    passed: bool,
    checks: Vec<CheckJson<'a>>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let got = match (&c.measured, &c.error) {
                (_, Some(e)) => format!("error: {e}"),
                (Some(x), None) => sig17(*x),
                (None, None) => "-".into(),
            };
            let tag = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {} got {got} want {}\n", c.name, c.expect.describe()));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let r = ReportJson {
            passed: self.passed(),
            checks: self
                .checks
                .iter()
                .map(|c| CheckJson {
                    name: &c.name,
                    pass: c.pass,
                    measured: c.measured.map(Sig17),
                    expected: &c.expect,
                    error: c.error.as_deref(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&r).expect("plain struct serializes")
    }
}

fn opts() -> OptimizeOptions {
    OptimizeOptions::default()
}

fn qubit_i(rho: &DensityMatrix) -> Result<f64> {
    Ok(measure_i(rho, Convention::QubitNormalized, &opts())?.value)
}

fn qubit_f(rho: &DensityMatrix) -> Result<f64> {
    Ok(measure_f(rho, Convention::QubitNormalized, &opts())?.value)
}

fn cat_grid(twice_spin: u32, gamma: f64, spec: GridSpec) -> Result<WignerGrid> {
    wigner_grid(&characteristic_table(&spin_cat(twice_spin, gamma)?)?, spec)
}

/// Grid with a θ = π/2 row (odd Gauss–Legendre count).
const EQUATOR_SPEC: GridSpec = GridSpec { n_theta: 13, n_phi: 64 };

fn equator_row(g: &WignerGrid) -> Vec<f64> {
    let a = g.spec().n_theta / 2;
    (0..g.spec().n_phi).map(|b| g.value(a, b)).collect()
}

fn harmonic_amplitude(row: &[f64], k: usize) -> f64 {
    let n = row.len() as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for (b, v) in row.iter().enumerate() {
        let ph = 2.0 * PI * (k * b) as f64 / n;
        c += v * ph.cos();
        s += v * ph.sin();
    }
    (c * c + s * s).sqrt() / n
}

fn ghz8_final() -> Result<(f64, f64, f64)> {
    let spec = LindbladSpec::collective_decay(1.0)?;
    let eo = EvolveOptions { t_max: 5.0, dt: spec.max_dt(8, 0.5), save_every: 10 };
    let ev = dicke_evolve(&DickeState::ghz(8)?, &spec, &eo)?;
    let min = ev.states.iter().map(|s| s.purity()).fold(f64::INFINITY, f64::min);
    let last = ev.states.last().expect("t = 0 is always saved");
    Ok((min, last.purity(), last.matrix()[(8, 8)].re))
}

fn compute(name: &str) -> Result<f64> {
    let tail = |prefix: &str| -> Result<usize> {
        name.strip_prefix(prefix)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::invalid(format!("no check named '{name}'")))
    };
    match name {
        "phasespace.iz_cat_s5" => Ok(iz_sum(&characteristic_table(&spin_cat(10, 1.0)?)?)),
        "phasespace.wigner_gamma0_phi_spread" => {
            let g = cat_grid(10, 0.0, GridSpec::default_for(10))?;
            let n_phi = g.spec().n_phi;
            Ok((0..g.spec().n_theta)
                .map(|a| {
                    let row = &g.values()[a * n_phi..(a + 1) * n_phi];
                    let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                    hi - lo
                })
                .fold(0.0, f64::max))
        }
        "phasespace.wigner_fringe_harmonic_s5" => {
            let row = equator_row(&cat_grid(10, 1.0, EQUATOR_SPEC)?);
            let best = (1..EQUATOR_SPEC.n_phi / 2)
                .max_by(|&a, &b| harmonic_amplitude(&row, a).total_cmp(&harmonic_amplitude(&row, b)))
                .expect("nonempty range");
            Ok(best as f64)
        }
        "phasespace.wigner_fringe_ratio_gamma_half" => {
            let amp = |g: f64| -> Result<f64> { Ok(harmonic_amplitude(&equator_row(&cat_grid(10, g, EQUATOR_SPEC)?), 10)) };
            let (half, full, zero) = (amp(0.5)?, amp(1.0)?, amp(0.0)?);
            if !(half > zero) {
                return Err(Error::numerical("fringe amplitude", "γ=1/2 not above γ=0"));
            }
            Ok(half / full)
        }
        "macro.dephasing_rate_minus_i_ghz4_z" => {
            let ghz = ghz_state(4, 1)?;
            let z = DirectionField::uniform(4, [0.0, 0.0, 1.0])?;
            let rate = dephasing_purity_rate(&ghz, &z, OperatorKind::SpinOps, 1.0)?;
            Ok(rate - trace_form_i(&ghz, &z, OperatorKind::SpinOps, Convention::Raw)?)
        }
        "macro.bell_i_raw_a0" | "macro.bell_i_raw_a0.5" | "macro.bell_i_raw_a1" => {
            let a: f64 = name["macro.bell_i_raw_a".len()..].parse().expect("literal suffix");
            Ok(measure_i(&mixed_bell(a)?, Convention::Raw, &opts())?.value)
        }
        "lindblad.steady_rhs_norm_n4" => {
            let desc = SystemDescriptor::qubits(4)?;
            let down = product_state(desc, &nalgebra::dvector![linalg::ZERO, linalg::ONE])?;
            let r = lindblad_rhs(&down, &LindbladSpec::collective_decay(1.0)?)?;
            Ok(r.norm())
        }
        "lindblad.ghz8_min_purity" => Ok(ghz8_final()?.0),
        "lindblad.ghz8_final_purity" => Ok(ghz8_final()?.1),
        "lindblad.ghz8_final_ground_population" => Ok(ghz8_final()?.2),
        "lindblad.dicke_ghz50_i" => Ok(dicke_measures(&DickeState::ghz(50)?, Convention::QubitNormalized, &OptimizeOptions::default())?.0),
        "lindblad.dicke_ghz50_f" => Ok(dicke_measures(&DickeState::ghz(50)?, Convention::QubitNormalized, &OptimizeOptions::default())?.1),
        "lindblad.dicke_down50_i" => Ok(dicke_measures(&DickeState::all_down(50)?, Convention::QubitNormalized, &OptimizeOptions::default())?.0),
        "lindblad.dicke_down50_f" => Ok(dicke_measures(&DickeState::all_down(50)?, Convention::QubitNormalized, &OptimizeOptions::default())?.1),
        "ising.block_small_lambda_l3_distance" => {
            let rho = block_rdm(1e-9, 3)?;
            let mut up = CMat::zeros(8, 8);
            up[(0, 0)] = linalg::ONE;
            Ok(linalg::max_abs_diff(rho.matrix(), &up))
        }
        "ising.xx_slope_critical" => {
            let rs: Vec<f64> = (2..=10).map(|r| r as f64).collect();
            let c = (2..=10).map(|r| xx_correlation(1.0, r).map(f64::abs)).collect::<Result<Vec<_>>>()?;
            loglog_slope(&rs, &c)
        }
        "ising.block_l4_lambda0.05_i" => Ok(sweep_point(0.05, 4, false, &opts())?.i),
        "ising.block_l4_lambda0.05_f" => sweep_point(0.05, 4, true, &opts())?.f.ok_or_else(|| Error::invalid("no F")),
        "ising.block_l4_lambda20_i" => Ok(sweep_point(20.0, 4, false, &opts())?.i),
        "ising.block_l4_lambda20_f" => sweep_point(20.0, 4, true, &opts())?.f.ok_or_else(|| Error::invalid("no F")),
        "ising.peak_lambda_l8" => {
            let lams: Vec<f64> = (0..=25).map(|k| 0.7 + 0.02 * k as f64).collect();
            let vals = lams.par_iter().map(|&l| Ok(sweep_point(l, 8, false, &opts())?.i)).collect::<Result<Vec<_>>>()?;
            let k = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("nonempty grid");
            Ok(lams[k])
        }
        "ising.scaling_exponent_critical" => Ok(scaling_exponent(&[8, 10, 12, 14], 1.0, &opts())?.exponent),
        _ if name.starts_with("macro.ghz_i_") => qubit_i(&ghz_state(tail("macro.ghz_i_")?, 1)?),
        _ if name.starts_with("macro.ghz_f_") => qubit_f(&ghz_state(tail("macro.ghz_f_")?, 1)?),
        _ if name.starts_with("macro.plus_i_") => qubit_i(&plus_product(tail("macro.plus_i_")?)?),
        _ if name.starts_with("macro.plus_f_") => qubit_f(&plus_product(tail("macro.plus_f_")?)?),
        _ => Err(Error::invalid(format!("no check named '{name}'"))),
    }
}

/// Evaluates every golden check.
pub fn run_selftest(goldens: &[Golden]) -> SelftestReport {
    let checks = goldens
        .par_iter()
        .map(|g| {
            let (measured, error) = match compute(&g.name) {
                Ok(x) => (Some(x), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let pass = measured.is_some_and(|x| g.expect.accepts(x));
            CheckOutcome { name: g.name.clone(), measured, expect: g.expect.clone(), error, pass }
        })
        .collect();
    SelftestReport { checks }
}

pub(super) fn command(a: &SelftestArgs, out: &str) -> CmdResult {
    let goldens = match &a.golden {
        None => Golden::embedded(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure { code: EXIT_SELFTEST, message: format!("golden fixture {}: {e}", p.display()) })?;
            Golden::parse(&text)
                .map_err(|e| Failure { code: EXIT_SELFTEST, message: format!("golden fixture {}: {e}", p.display()) })?
        }
    };
    let report = run_selftest(&goldens);
    emit(out, &if a.json { report.to_json() + "\n" } else { report.to_lines() })?;
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure { code: EXIT_SELFTEST, message: format!("check {} failed", c.name) }),
    }
}
