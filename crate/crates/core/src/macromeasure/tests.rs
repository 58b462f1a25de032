//! Brute-force oracles: every entry from full `D×D` products of embedded
//! operators.

use super::*;
use crate::linalg::{self, C64, CMat, RMat};
use crate::spincore::*;

fn embedded(desc: &SystemDescriptor, kind: OperatorKind) -> Vec<CMat> {
    let basis = site_basis(desc, kind).unwrap();
    let mut v = Vec::new();
    for i in 0..desc.num_sites() {
        for b in &basis {
            // spin units
            v.push(embed_site(desc, i, b).unwrap() / C64::new(kind.scale(), 0.0));
        }
    }
    v
}

fn brute_v(rho: &DensityMatrix, conv: Convention) -> RMat {
    let desc = rho.descriptor();
    let ops = embedded(desc, OperatorKind::default_for(desc));
    let r = rho.matrix();
    let r2 = r * r;
    let c = conv.factor() / (desc.num_sites() as f64 * desc.spin() * rho.purity());
    RMat::from_fn(ops.len(), ops.len(), |x, y| {
        let t = linalg::trace(&(&r2 * &ops[x] * &ops[y])) - linalg::trace(&(r * &ops[x] * r * &ops[y]));
        c * t.re
    })
}

fn brute_w(rho: &DensityMatrix, conv: Convention) -> RMat {
    let desc = rho.descriptor();
    let ops = embedded(desc, OperatorKind::default_for(desc));
    let (p, u) = linalg::eigh(rho.matrix()).unwrap();
    let a: Vec<CMat> = ops.iter().map(|o| u.adjoint() * o * &u).collect();
    let c = conv.factor() / (2.0 * desc.num_sites() as f64 * desc.spin());
    RMat::from_fn(ops.len(), ops.len(), |x, y| {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..p.len() {
            for l in 0..p.len() {
                let den = p[k] + p[l];
                if den > 1e-14 {
                    s += a[x][(k, l)] * a[y][(l, k)] * ((p[k] - p[l]).powi(2) / den);
                }
            }
        }
        c * s.re
    })
}

fn max_diff(a: &RMat, b: &RMat) -> f64 {
    (a - b).amax()
}

fn opts(restarts: usize) -> OptimizeOptions {
    OptimizeOptions { restarts, seed: 5, ..Default::default() }
}

fn states() -> Vec<DensityMatrix> {
    let q3 = SystemDescriptor::qubits(3).unwrap();
    let q4 = SystemDescriptor::qubits(4).unwrap();
    let s1 = SystemDescriptor::new(2, 2).unwrap();
    let s32 = SystemDescriptor::new(2, 3).unwrap();
    vec![
        random_density(q3, 8, 1).unwrap(),
        random_density(q4, 3, 2).unwrap(),
        random_pure(q3, 3).unwrap(),
        random_density(s1, 9, 4).unwrap(),
        random_density(s32, 2, 5).unwrap(),
        random_pure(SystemDescriptor::new(1, 4).unwrap(), 6).unwrap(),
        mixed_bell(0.5).unwrap(),
    ]
}

#[test]
fn v_matches_brute_force() {
    for rho in states() {
        let conv = Convention::Raw;
        let kind = OperatorKind::default_for(rho.descriptor());
        let v = build_v(&rho, kind, conv).unwrap();
        assert!(max_diff(v.data(), &brute_v(&rho, conv)) < 1e-12, "{:?}", rho.descriptor());
        let s = SpectralDecomposition::from_density(&rho).unwrap();
        let vs = build_v_spectral(&s, kind, conv).unwrap();
        assert!(max_diff(v.data(), vs.data()) < 1e-12);
    }
}

#[test]
fn w_matches_brute_force() {
    for rho in states() {
        let conv = Convention::Raw;
        let kind = OperatorKind::default_for(rho.descriptor());
        let w = build_w(&rho, kind, conv).unwrap();
        assert!(max_diff(w.data(), &brute_w(&rho, conv)) < 1e-11, "{:?}", rho.descriptor());
        let s = SpectralDecomposition::from_density(&rho).unwrap();
        let ws = build_w_spectral(&s, kind, conv).unwrap();
        assert!(max_diff(w.data(), ws.data()) < 1e-11);
    }
}

#[test]
fn truncated_spectral_forms() {
    // a rank-2 factorized state: the missing complement must not matter
    let rho = mixed_ghz(5, 0.3, 0.5).unwrap();
    let s = SpectralDecomposition::from_density(&rho).unwrap();
    let keep = SpectralDecomposition::from_factor(
        *rho.descriptor(),
        &s.vectors().columns(0, 2).into_owned(),
        &CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(s.weights()[0], 0.0),
            C64::new(s.weights()[1], 0.0),
        ])),
    )
    .unwrap();
    assert_eq!(keep.rank(), 2);
    let kind = OperatorKind::PauliOps;
    let conv = Convention::QubitNormalized;
    let v = build_v(&rho, kind, conv).unwrap();
    let w = build_w(&rho, kind, conv).unwrap();
    assert!(max_diff(v.data(), build_v_spectral(&keep, kind, conv).unwrap().data()) < 1e-12);
    assert!(max_diff(w.data(), build_w_spectral(&keep, kind, conv).unwrap().data()) < 1e-12);
}

#[test]
fn pure_state_v_is_connected_correlator() {
    let desc = SystemDescriptor::qubits(3).unwrap();
    let rho = random_pure(desc, 9).unwrap();
    let ops = embedded(&desc, OperatorKind::PauliOps);
    let v = build_v(&rho, OperatorKind::PauliOps, Convention::Raw).unwrap();
    let w = build_w(&rho, OperatorKind::PauliOps, Convention::Raw).unwrap();
    for x in 0..9 {
        for y in 0..9 {
            let xy = rho.expectation(&(&ops[x] * &ops[y])).re;
            let yx = rho.expectation(&(&ops[y] * &ops[x])).re;
            let c = 0.5 * (xy + yx) - rho.expectation(&ops[x]).re * rho.expectation(&ops[y]).re;
            assert!((v.data()[(x, y)] - c / 1.5).abs() < 1e-12);
        }
    }
    assert!(max_diff(v.data(), w.data()) < 1e-12);
}

#[test]
fn trivial_matrices() {
    let desc = SystemDescriptor::qubits(3).unwrap();
    let mm = DensityMatrix::maximally_mixed(desc);
    assert!(build_v(&mm, OperatorKind::PauliOps, Convention::Raw).unwrap().data().amax() < 1e-15);
    assert!(build_w(&mm, OperatorKind::PauliOps, Convention::Raw).unwrap().data().amax() < 1e-15);
    let one = SystemDescriptor::qubits(1).unwrap();
    let a = random_density(one, 2, 1).unwrap();
    let b = random_density(SystemDescriptor::qubits(2).unwrap(), 4, 2).unwrap();
    let prod = DensityMatrix::new(desc, linalg::kron(a.matrix(), b.matrix())).unwrap();
    let v = build_v(&prod, OperatorKind::PauliOps, Convention::Raw).unwrap();
    for j in 1..3 {
        assert!(v.block(0, j).amax() < 1e-12);
    }
    assert!(build_v(&prod, OperatorKind::PauliOps, Convention::QubitNormalized).is_ok());
    let spin1 = random_density(SystemDescriptor::new(2, 2).unwrap(), 2, 1).unwrap();
    assert!(build_v(&spin1, OperatorKind::SpinOps, Convention::QubitNormalized).is_err());
    assert!(build_v(&spin1, OperatorKind::PauliOps, Convention::Raw).is_err());
}

#[test]
fn bell_oracles() {
    let bell = mixed_bell(0.0).unwrap();
    let z = DirectionField::uniform(2, [0.0, 0.0, 1.0]).unwrap();
    let x = DirectionField::uniform(2, [1.0, 0.0, 0.0]).unwrap();
    let v = build_v(&bell, OperatorKind::SpinOps, Convention::Raw).unwrap();
    assert!((v.quadratic_form(&z).unwrap() - 1.0).abs() < 1e-14);
    let half = mixed_bell(0.5).unwrap();
    let w = build_w(&half, OperatorKind::PauliOps, Convention::QubitNormalized).unwrap();
    assert!((w.quadratic_form(&x).unwrap() - 1.5).abs() < 1e-12);
    assert!((w.quadratic_form(&z).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn mixed_bell_values() {
    for (a, want) in [(0.0, 1.0), (0.5, 0.9), (1.0, 0.5)] {
        let rho = mixed_bell(a).unwrap();
        let r = measure_i(&rho, Convention::Raw, &opts(20)).unwrap();
        assert!((r.value - want).abs() < 1e-9, "a={a}: {}", r.value);
        assert!((r.value_in(Convention::QubitNormalized) - 2.0 * want).abs() < 1e-9);
    }
    let f = measure_f(&mixed_bell(0.5).unwrap(), Convention::Raw, &opts(20)).unwrap();
    assert!((f.value - 0.75).abs() < 1e-9);
}

#[test]
fn mixed_bell_optimum_is_x() {
    // dense 1° scan over a shared direction on both sites
    let rho = mixed_bell(0.5).unwrap();
    let v = build_v(&rho, OperatorKind::SpinOps, Convention::Raw).unwrap();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for it in 0..=180 {
        for ip in 0..360 {
            let (t, p) = ((it as f64).to_radians(), (ip as f64).to_radians());
            let f = DirectionField::from_angles(&[(t, p), (t, p)]).unwrap();
            let q = v.quadratic_form(&f).unwrap();
            if q > best.0 + 1e-12 {
                best = (q, t, p);
            }
        }
    }
    assert!((best.0 - 0.9).abs() < 1e-12);
    assert!((best.1 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let z = DirectionField::uniform(2, [0.0, 0.0, 1.0]).unwrap();
    assert!(v.quadratic_form(&z).unwrap() < 0.9 - 0.1);
    let r = measure_i(&rho, Convention::Raw, &opts(20)).unwrap();
    assert!(r.optimal_field.vectors().iter().all(|a| a[2].abs() < 1e-6));
}

#[test]
fn ghz_and_product() {
    for n in 2..=6 {
        let ghz = ghz_state(n, 1).unwrap();
        let r = measure_i(&ghz, Convention::QubitNormalized, &opts(10)).unwrap();
        assert!((r.value - n as f64).abs() < 1e-8);
        let f = measure_f(&ghz, Convention::QubitNormalized, &opts(10)).unwrap();
        assert!((f.value - n as f64).abs() < 1e-8);
        let s = symmetric_measure(&ghz, MatrixKind::V, Convention::QubitNormalized, &opts(4)).unwrap();
        assert!((s - n as f64).abs() < 1e-8);
    }
    for n in 1..=6 {
        let p = plus_product(n).unwrap();
        let r = measure_i(&p, Convention::QubitNormalized, &opts(10)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let s = symmetric_measure(&p, MatrixKind::W, Convention::QubitNormalized, &opts(4)).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
    }
}

#[test]
fn fixed_field_forms_agree() {
    for (k, rho) in states().into_iter().enumerate() {
        let desc = *rho.descriptor();
        let kind = OperatorKind::default_for(&desc);
        let conv = Convention::default_for(&desc);
        let v = build_v(&rho, kind, conv).unwrap();
        let w = build_w(&rho, kind, conv).unwrap();
        let mut r = crate::rng::stream(77, k as u64);
        let f = DirectionField::new((0..desc.num_sites()).map(|_| crate::rng::unit_vector(&mut r)).collect()).unwrap();
        let t = trace_form_i(&rho, &f, kind, conv).unwrap();
        let s = spectral_i(&rho, &f, kind, conv).unwrap();
        assert!((t - s).abs() < 1e-12);
        assert!((v.quadratic_form(&f).unwrap() - t).abs() < 1e-12);
        assert!((w.quadratic_form(&f).unwrap() - fisher_at(&rho, &f, kind, conv).unwrap()).abs() < 1e-12);
        let so = OperatorKind::SpinOps;
        assert!((trace_form_i(&rho, &f, so, conv).unwrap() - t).abs() < 1e-12);
    }
}

#[test]
fn symmetric_rejects_asymmetric() {
    let rho = random_density(SystemDescriptor::qubits(3).unwrap(), 2, 3).unwrap();
    assert!(symmetric_measure(&rho, MatrixKind::V, Convention::Raw, &opts(4)).is_err());
}

#[test]
fn dephasing_rate_matches_measure() {
    let ghz = ghz_state(4, 1).unwrap();
    let z = DirectionField::uniform(4, [0.0, 0.0, 1.0]).unwrap();
    let rate = dephasing_purity_rate(&ghz, &z, OperatorKind::SpinOps, 1.0).unwrap();
    let i = trace_form_i(&ghz, &z, OperatorKind::SpinOps, Convention::Raw).unwrap();
    assert!((rate - i).abs() < 1e-12);
    let diag = DensityMatrix::new(
        *ghz.descriptor(),
        CMat::from_diagonal(&ghz.matrix().diagonal()),
    )
    .unwrap();
    assert!(dephasing_purity_rate(&diag, &z, OperatorKind::PauliOps, 1.0).unwrap().abs() < 1e-15);
}

#[test]
fn dephasing_rate_finite_difference() {
    let desc = SystemDescriptor::qubits(3).unwrap();
    for seed in 0..5 {
        let rho = random_density(desc, 4, seed).unwrap();
        let mut r = crate::rng::stream(seed, 9);
        let f = DirectionField::new((0..3).map(|_| crate::rng::unit_vector(&mut r)).collect()).unwrap();
        let gamma = 0.7;
        let a = collective_operator(&desc, &f, OperatorKind::PauliOps).unwrap();
        let dt = 1e-6;
        let next = rho.matrix() + dephasing_generator(rho.matrix(), &a, gamma) * C64::new(dt, 0.0);
        let p1 = next.norm_squared();
        let p0 = rho.purity();
        let fd = -(p1.ln() - p0.ln()) / dt / (2.0 * 3.0 * 0.5);
        let rate = dephasing_purity_rate(&rho, &f, OperatorKind::PauliOps, gamma).unwrap();
        assert!((fd - rate).abs() < 1e-4 * rate.abs(), "{fd} vs {rate}");
    }
}

#[test]
fn result_json_keys() {
    let r = measure_i(&mixed_bell(0.5).unwrap(), Convention::Raw, &opts(4)).unwrap();
    let j = r.to_json();
    let keys = ["measure", "convention", "value", "alpha", "restarts", "grad_norm", "spread", "seed"];
    let mut pos = 0;
    for k in keys {
        let p = j.find(&format!("\"{k}\"")).unwrap();
        assert!(p >= pos);
        pos = p;
    }
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["measure"], "I");
    assert_eq!(v["convention"], "raw");
}
