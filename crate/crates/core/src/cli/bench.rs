use std::fmt;
use std::time::Instant;

use rand::RngCore;

use super::{emit, BenchArgs, CmdResult, Failure};
use crate::error::{Error, Result};
use crate::isingqpt::loglog_slope;
use crate::macromeasure::{build_v, build_w, maximize, Convention, MeasureMatrix, OptimizeOptions};
use crate::numfmt::sig17;
use crate::spincore::{random_density, DensityMatrix, OperatorKind, SystemDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchPhase {
    BuildV,
    BuildW,
    OptimizeV,
    OptimizeW,
}

impl BenchPhase {
    pub const ALL: [BenchPhase; 4] =
        [BenchPhase::BuildV, BenchPhase::BuildW, BenchPhase::OptimizeV, BenchPhase::OptimizeW];
}

impl fmt::Display for BenchPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchPhase::BuildV => "BuildV",
            BenchPhase::BuildW => "BuildW",
            BenchPhase::OptimizeV => "OptimizeV",
            BenchPhase::OptimizeW => "OptimizeW",
        })
    }
}

/// Median time of one phase at one `N`.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub n: usize,
    pub phase: BenchPhase,
    /// Median over samples of the per-sample median over reps.
    pub seconds: f64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub reps: usize,
    pub seed: u64,
    pub restarts: usize,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(f64, T)> {
    let t0 = Instant::now();
    let out = f()?;
    // a zero reading would break the log fit
    Ok((t0.elapsed().as_secs_f64().max(1e-9), out))
}

struct Sample {
    rho: DensityMatrix,
    v: Option<MeasureMatrix>,
    w: Option<MeasureMatrix>,
}

fn run_phase(s: &mut Sample, phase: BenchPhase, opts: &OptimizeOptions) -> Result<f64> {
    let kind = OperatorKind::PauliOps;
    let conv = Convention::QubitNormalized;
    let (t, ()) = match phase {
        BenchPhase::BuildV => time(|| build_v(&s.rho, kind, conv).map(|m| s.v = Some(m)))?,
        BenchPhase::BuildW => time(|| build_w(&s.rho, kind, conv).map(|m| s.w = Some(m)))?,
        BenchPhase::OptimizeV => {
            let m = s.v.as_ref().ok_or_else(|| Error::invalid("V not built"))?;
            time(|| maximize(m, opts).map(|_| ()))?
        }
        BenchPhase::OptimizeW => {
            let m = s.w.as_ref().ok_or_else(|| Error::invalid("W not built"))?;
            time(|| maximize(m, opts).map(|_| ()))?
        }
    };
    Ok(t)
}

/// Times every phase on `samples` full-rank random states per `N`, pinned to
/// one thread. One untimed warmup pass runs on the first state.
pub fn run_bench(o: &BenchOptions) -> Result<Vec<BenchRecord>> {
    if o.samples == 0 || o.reps == 0 || o.restarts == 0 {
        return Err(Error::invalid("samples, reps and restarts must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::numerical("thread pool", e.to_string()))?;
    crate::linalg::set_blas_threads(1);
    pool.install(|| bench_on_current_thread(o))
}

fn bench_on_current_thread(o: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let opts = OptimizeOptions { restarts: o.restarts, ..OptimizeOptions::with_seed(o.seed) };
    let mut seeds = crate::rng::stream(o.seed, 0xbe9c);
    let mut out = Vec::new();
    for &n in &o.sizes {
        let desc = SystemDescriptor::qubits(n)?;
        let mut per_phase: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(o.samples)).collect();
        for k in 0..o.samples {
            let rho = random_density(desc, desc.dim(), seeds.next_u64())?;
            let mut s = Sample { rho, v: None, w: None };
            if k == 0 {
                for p in BenchPhase::ALL {
                    run_phase(&mut s, p, &opts)?;
                }
            }
            for (pi, p) in BenchPhase::ALL.into_iter().enumerate() {
                let mut reps: Vec<f64> =
                    (0..o.reps).map(|_| run_phase(&mut s, p, &opts)).collect::<Result<_>>()?;
                per_phase[pi].push(median(&mut reps));
            }
        }
        for (pi, p) in BenchPhase::ALL.into_iter().enumerate() {
            out.push(BenchRecord { n, phase: p, seconds: median(&mut per_phase[pi]), samples: o.samples });
        }
    }
    Ok(out)
}

/// Header `N,phase,median_seconds,samples`.
pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from("N,phase,median_seconds,samples\n");
    for r in records {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.phase, sig17(r.seconds), r.samples));
    }
    s
}

/// Log-log slope of a phase's median time against `D = 2^N`.
pub fn fit_exponent(records: &[BenchRecord], phase: BenchPhase) -> Result<f64> {
    let (d, t): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.phase == phase)
        .map(|r| (2f64.powi(r.n as i32), r.seconds))
        .unzip();
    loglog_slope(&d, &t)
}

pub(super) fn command(a: &BenchArgs, out: &str) -> CmdResult {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(Failure::usage("--N needs positive sizes"));
    }
    let o = BenchOptions { sizes: a.sizes.clone(), samples: a.samples, reps: a.reps, seed: a.seed, restarts: a.restarts };
    let recs = run_bench(&o).map_err(|e| Failure::from_error("benchmark", e))?;
    if a.sizes.len() >= 2 {
        for p in [BenchPhase::BuildV, BenchPhase::BuildW] {
            if let Ok(e) = fit_exponent(&recs, p) {
                eprintln!("{p} exponent vs D: {}", sig17(e));
            }
        }
    }
    emit(out, &bench_csv(&recs))
}
