//! ℐ and ℱ for a few textbook states.
//!
//! ```text
//! cargo run --release --example measures
//! ```

use spinmacro::macromeasure::{measure_f, measure_i, Convention, OptimizeOptions};
use spinmacro::spincore::{ghz_state, mixed_bell, plus_product};

fn main() -> spinmacro::Result<()> {
    let opts = OptimizeOptions::default();
    let q = Convention::QubitNormalized;

    for n in [2, 4, 6] {
        let ghz = ghz_state(n, 1)?;
        let plus = plus_product(n)?;
        println!(
            "N={n}: GHZ I={:.6} F={:.6}   |+>^N I={:.6}",
            measure_i(&ghz, q, &opts)?.value,
            measure_f(&ghz, q, &opts)?.value,
            measure_i(&plus, q, &opts)?.value,
        );
    }

    // dephasing a Bell pair: the value is not convex in the mixing weight
    for a in [0.0, 0.5, 1.0] {
        let r = measure_i(&mixed_bell(a)?, Convention::Raw, &opts)?;
        println!("mixed Bell a={a}: I={:.6} (raw), optimal field {:?}", r.value, r.optimal_field.vectors()[0]);
    }

    let spin1 = ghz_state(3, 2)?;
    println!("spin-1 GHZ, N=3: I={:.6} (raw, max NS = 3)", measure_i(&spin1, Convention::Raw, &opts)?.value);
    Ok(())
}
