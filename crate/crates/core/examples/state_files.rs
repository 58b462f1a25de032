//! Writes a state to the MSDM text format, reads it back and measures it.

use spinmacro::macromeasure::{measure_i, Convention, OptimizeOptions};
use spinmacro::spincore::{metrology_state, parse_msdm, write_msdm};

fn main() -> spinmacro::Result<()> {
    let rho = metrology_state(4, 0.4)?;
    let text = write_msdm(&rho);
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    let back = parse_msdm(&text)?;
    assert_eq!(back.matrix(), rho.matrix());
    let r = measure_i(&back, Convention::QubitNormalized, &OptimizeOptions::with_seed(7))?;
    println!("...\nI = {:.8}, best of {} restarts (index {})", r.value, r.restarts_used, r.best_restart_index);
    println!("{}", r.to_json());
    Ok(())
}
