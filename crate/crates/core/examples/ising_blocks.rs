//! ℐ and ℱ of contiguous blocks of the critical Ising chain ground state.

use spinmacro::isingqpt::{sweep_block, sweep_csv};
use spinmacro::macromeasure::OptimizeOptions;

fn main() -> spinmacro::Result<()> {
    let lambdas: Vec<f64> = (0..=12).map(|k| 0.05 * 400f64.powf(k as f64 / 12.0)).collect();
    let opts = OptimizeOptions { restarts: 50, ..OptimizeOptions::default() };
    let recs = sweep_block(&lambdas, &[2, 4, 6], true, &opts)?;
    print!("{}", sweep_csv(&recs));
    Ok(())
}
