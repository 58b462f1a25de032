use super::*;
use crate::linalg::{self, C64, CMat};
use crate::macromeasure::{dephasing_purity_rate, measure_f, measure_i, Convention, OptimizeOptions};
use crate::spincore::*;

fn decay(gamma: f64) -> LindbladSpec {
    LindbladSpec::collective_decay(gamma).unwrap()
}

#[test]
fn rhs_hand_values() {
    let desc = SystemDescriptor::qubits(1).unwrap();
    let up = DensityMatrix::from_pure(desc, &basis_vector(2, 0)).unwrap();
    let r = lindblad_rhs(&up, &decay(1.0)).unwrap();
    assert!((r[(0, 0)].re + 1.0).abs() < 1e-15 && (r[(1, 1)].re - 1.0).abs() < 1e-15);
    let q4 = SystemDescriptor::qubits(4).unwrap();
    let down = DensityMatrix::from_pure(q4, &basis_vector(16, 15)).unwrap();
    assert!(lindblad_rhs(&down, &decay(1.0)).unwrap().iter().all(|z| z.norm() < 1e-15));
}

#[test]
fn rhs_trace_and_hermiticity() {
    let desc = SystemDescriptor::qubits(3).unwrap();
    let field = DirectionField::uniform(3, [0.6, 0.0, 0.8]).unwrap();
    let specs = [
        LindbladSpec::new(0.7, 1.3, Channel::CollectiveDecay).unwrap(),
        LindbladSpec::new(0.2, 0.5, Channel::Dephasing { field, kind: OperatorKind::PauliOps }).unwrap(),
    ];
    for seed in 0..5 {
        let rho = random_density(desc, 8, seed).unwrap();
        for spec in &specs {
            let r = lindblad_rhs(&rho, spec).unwrap();
            assert!(linalg::trace(&r).norm() < 1e-12);
            assert!(linalg::max_abs_diff(&r, &r.adjoint()) < 1e-12);
        }
    }
    assert!(LindbladSpec::collective_decay(-1.0).is_err());
}

#[test]
fn single_qubit_decay_closed_form() {
    let desc = SystemDescriptor::qubits(1).unwrap();
    let up = DensityMatrix::from_pure(desc, &basis_vector(2, 0)).unwrap();
    let ev = evolve(&up, &decay(1.0), &EvolveOptions { t_max: 2.0, dt: 0.01, save_every: 10 }).unwrap();
    for (t, s) in ev.times.iter().zip(&ev.states) {
        assert!((s.matrix()[(1, 1)].re - (1.0 - (-t).exp())).abs() < 1e-8);
    }
    assert!((ev.times.last().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn frozen_without_coupling() {
    let rho = random_density(SystemDescriptor::qubits(3).unwrap(), 3, 1).unwrap();
    let ev = evolve(&rho, &decay(0.0), &EvolveOptions { t_max: 1.0, dt: 0.1, save_every: 1 }).unwrap();
    for s in &ev.states {
        assert!(s.frobenius_distance(&rho) < 1e-15);
    }
}

#[test]
fn step_bound_enforced() {
    let ghz = ghz_state(4, 1).unwrap();
    assert!(evolve(&ghz, &decay(1.0), &EvolveOptions { t_max: 1.0, dt: 0.1, save_every: 1 }).is_err());
}

#[test]
fn dicke_matches_full_space() {
    let n = 8;
    let opts = EvolveOptions { t_max: 1.0, dt: 0.01, save_every: 5 };
    let full = evolve(&ghz_state(n, 1).unwrap(), &decay(1.0), &opts).unwrap();
    let dicke = dicke_evolve(&DickeState::ghz(n).unwrap(), &decay(1.0), &opts).unwrap();
    assert_eq!(full.times, dicke.times);
    for (f, d) in full.states.iter().zip(&dicke.states) {
        assert!(linalg::max_abs_diff(f.matrix(), d.embed().unwrap().matrix()) < 1e-8);
    }
    // purity dips and recovers
    let p: Vec<f64> = full.states.iter().map(|s| s.purity()).collect();
    let min = p.iter().cloned().fold(1.0, f64::min);
    assert!(min < 0.5 && *p.last().unwrap() > min);
}

#[test]
fn dicke_measures_match_optimizer() {
    let n = 6;
    let opts = EvolveOptions { t_max: 1.0, dt: 0.01, save_every: 10 };
    let ev = dicke_evolve(&DickeState::ghz(n).unwrap(), &decay(1.0), &opts).unwrap();
    let o = OptimizeOptions { restarts: 20, seed: 1, ..Default::default() };
    for s in &ev.states {
        let (i, f) = dicke_measures(s, Convention::QubitNormalized, &o).unwrap();
        let full = s.embed().unwrap();
        let fi = measure_i(&full, Convention::QubitNormalized, &o).unwrap().value;
        let ff = measure_f(&full, Convention::QubitNormalized, &o).unwrap().value;
        assert!((i - fi).abs() < 1e-8, "{i} {fi}");
        assert!((f - ff).abs() < 1e-8, "{f} {ff}");
    }
    // a random symmetric state with coherences in every direction
    let mut r = crate::rng::stream(3, 0);
    let g = crate::rng::ginibre(&mut r, n + 1, 3);
    let m = linalg::gram_rows(&g);
    let tr = linalg::trace(&m).re;
    let st = DickeState::new(n, m / C64::new(tr, 0.0)).unwrap();
    let (i, f) = dicke_measures(&st, Convention::Raw, &o).unwrap();
    let full = st.embed().unwrap();
    assert!((i - measure_i(&full, Convention::Raw, &o).unwrap().value).abs() < 1e-8);
    assert!((f - measure_f(&full, Convention::Raw, &o).unwrap().value).abs() < 1e-8);
}

#[test]
fn dicke_endpoints() {
    let (i, f) = dicke_measures(&DickeState::ghz(50).unwrap(), Convention::QubitNormalized, &OptimizeOptions::default()).unwrap();
    assert!((i - 50.0).abs() < 1e-9 && (f - 50.0).abs() < 1e-9);
    let (i, f) = dicke_measures(&DickeState::all_down(50).unwrap(), Convention::QubitNormalized, &OptimizeOptions::default()).unwrap();
    assert!((i - 1.0).abs() < 1e-9 && (f - 1.0).abs() < 1e-9);
    let e = DickeState::ghz(4).unwrap().embed().unwrap();
    assert!(e.frobenius_distance(&ghz_state(4, 1).unwrap()) < 1e-14);
}

#[test]
fn dephasing_channel_rate() {
    let desc = SystemDescriptor::qubits(3).unwrap();
    for seed in 0..4 {
        let rho = random_density(desc, 4, seed + 10).unwrap();
        let mut r = crate::rng::stream(seed, 1);
        let field = DirectionField::new((0..3).map(|_| crate::rng::unit_vector(&mut r)).collect()).unwrap();
        let spec = LindbladSpec::dephasing(1.0, field.clone(), OperatorKind::SpinOps).unwrap();
        let dt = 1e-6;
        let next: CMat = rho.matrix() + lindblad_rhs(&rho, &spec).unwrap() * C64::new(dt, 0.0);
        let fd = -(next.norm_squared().ln() - rho.purity().ln()) / dt / 3.0;
        let rate = dephasing_purity_rate(&rho, &field, OperatorKind::SpinOps, 1.0).unwrap();
        assert!((fd - rate).abs() < 1e-4 * rate);
    }
}
