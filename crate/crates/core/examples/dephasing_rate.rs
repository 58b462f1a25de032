//! ℐ at a fixed field is the purity decay rate under dephasing by that field.

use spinmacro::linalg::C64;
use spinmacro::macromeasure::{dephasing_generator, dephasing_purity_rate, trace_form_i, Convention};
use spinmacro::spincore::{collective_operator, random_density, DirectionField, OperatorKind, SystemDescriptor};

fn main() -> spinmacro::Result<()> {
    let desc = SystemDescriptor::qubits(3)?;
    let rho = random_density(desc, 3, 42)?;
    let field = DirectionField::normalized(vec![[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])?;
    let kind = OperatorKind::SpinOps;
    let gamma = 0.8;

    let rate = dephasing_purity_rate(&rho, &field, kind, gamma)?;
    let value = trace_form_i(&rho, &field, kind, Convention::Raw)?;

    let a = collective_operator(&desc, &field, kind)?;
    let h = 1e-5;
    let step = |s: f64| (rho.matrix() + dephasing_generator(rho.matrix(), &a, gamma) * C64::new(s, 0.0)).norm_squared().ln();
    let fd = -(step(h) - step(-h)) / (2.0 * h) / (2.0 * 3.0 * 0.5);

    println!("rate {rate:.10}  γ·I(A) {:.10}  finite difference {fd:.10}", gamma * value);
    Ok(())
}
