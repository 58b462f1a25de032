//! Maximal variance per spin of ring ground states; grows as a power of N at
//! λ = 1 and stays flat away from it.

use spinmacro::isingqpt::{scaling_exponent, xx_correlation};
use spinmacro::macromeasure::OptimizeOptions;

fn main() -> spinmacro::Result<()> {
    let opts = OptimizeOptions::default();
    for lambda in [1.0, 0.2] {
        let fit = scaling_exponent(&[6, 8, 10, 12], lambda, &opts)?;
        print!("{}", fit.to_csv());
        println!("λ={lambda}: exponent {:.4}\n", fit.exponent);
    }
    for r in [1, 2, 4, 8] {
        println!("⟨σx σx⟩ at distance {r}: {:.6}", xx_correlation(1.0, r)?);
    }
    Ok(())
}
