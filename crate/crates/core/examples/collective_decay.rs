//! A 50-qubit GHZ state under collective decay, evolved in the Dicke basis.

use spinmacro::lindblad::{dicke_evolve, dicke_trajectory, DickeState, EvolveOptions, LindbladSpec};
use spinmacro::macromeasure::{Convention, OptimizeOptions};

fn main() -> spinmacro::Result<()> {
    let n = 50;
    let spec = LindbladSpec::collective_decay(1.0)?;
    let opts = EvolveOptions { t_max: 5.0, dt: spec.max_dt(n, 0.5), save_every: 5 };
    let ev = dicke_evolve(&DickeState::ghz(n)?, &spec, &opts)?;
    let traj = dicke_trajectory(&ev, Convention::QubitNormalized, &OptimizeOptions::default())?;

    let min = traj.min_i().expect("trajectory is never empty");
    println!("step {:.3e}, {} saved points", traj.dt, traj.points.len());
    println!("I(0) = {:.4}, minimum I = {:.4} at γt = {:.3}", traj.points[0].i, min.i, min.t);
    for p in traj.points.iter().step_by(40) {
        println!("γt={:6.3}  purity={:.4}  I={:8.4}  F={:8.4}", p.t, p.purity, p.i, p.f);
    }
    Ok(())
}
