//! Time to assemble the ℐ matrix `V` and the ℱ matrix `W` on random states.

use spinmacro::cli::{bench_csv, fit_exponent, run_bench, BenchOptions, BenchPhase};

fn main() -> spinmacro::Result<()> {
    let o = BenchOptions { sizes: vec![3, 4, 5, 6, 7, 8], samples: 5, reps: 3, seed: 1, restarts: 50 };
    let recs = run_bench(&o)?;
    print!("{}", bench_csv(&recs));
    println!(
        "exponent vs D: V {:.2}, W {:.2}",
        fit_exponent(&recs, BenchPhase::BuildV)?,
        fit_exponent(&recs, BenchPhase::BuildW)?
    );
    Ok(())
}
