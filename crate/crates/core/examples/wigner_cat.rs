//! Wigner function of `(|S,S⟩⟨S,S| + |S,−S⟩⟨S,−S| + γ·coherences)/2` and the
//! fringe-based `I_z`.

use spinmacro::phasespace::{characteristic_table, iz_quadrature, iz_sum, wigner_grid, GridSpec};
use spinmacro::spincore::spin_cat;

fn main() -> spinmacro::Result<()> {
    let twice_spin = 10;
    // odd θ count puts a row on the equator
    let spec = GridSpec { n_theta: 13, n_phi: 40 };
    for gamma in [1.0, 0.5, 0.0] {
        let table = characteristic_table(&spin_cat(twice_spin, gamma)?)?;
        let grid = wigner_grid(&table, spec)?;
        let eq = spec.n_theta / 2;
        let row: Vec<f64> = (0..spec.n_phi).map(|b| grid.value(eq, b)).collect();
        let amp = row.iter().cloned().fold(f64::MIN, f64::max) - row.iter().cloned().fold(f64::MAX, f64::min);
        println!(
            "γ={gamma}: I_z sum={:.8} quadrature={:.8}, equator fringe swing {amp:.4}",
            iz_sum(&table),
            iz_quadrature(&grid)?
        );
    }
    if std::env::args().any(|a| a == "--csv") {
        let grid = wigner_grid(&characteristic_table(&spin_cat(twice_spin, 1.0)?)?, spec)?;
        print!("{}", grid.to_csv());
    }
    Ok(())
}
