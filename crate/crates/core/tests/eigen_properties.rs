use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sacs_core::eigen::{MINUS, PLUS, ZERO};
use sacs_core::{
    build_hamiltonian, dark_state, eigensystem, track_adiabatic, HamiltonianParams, HermitianMatrix3, C64,
};

fn residual(h: &HermitianMatrix3, lambda: f64, v: &[C64; 3]) -> f64 {
    let hv = h.apply(v);
    (0..3)
        .map(|i| (hv[i] - v[i] * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn params() -> impl Strategy<Value = HamiltonianParams> {
    (
        -200.0..200.0f64,
        -200.0..200.0f64,
        -100.0..100.0f64,
        -100.0..100.0f64,
        0.0..200.0f64,
        -3.2..3.2f64,
    )
        .prop_map(|(omega1, omega2, delta2, delta3, stark, beta)| HamiltonianParams {
            omega1,
            omega2,
            delta2,
            delta3,
            stark,
            beta,
        })
}

proptest! {
    #[test]
    fn residual_and_trace(p in params()) {
        let h = build_hamiltonian(&p).unwrap();
        let f = eigensystem(&h);
        let norm = h.frobenius_norm().max(1e-300);
        for k in 0..3 {
            prop_assert!(residual(&h, f.values[k], &f.vectors[k]) < 1e-12 * norm);
        }
        let sum: f64 = f.values.iter().sum();
        prop_assert!((sum - h.trace()).abs() <= 1e-10 * norm);
        prop_assert!(f.values[0] <= f.values[1] && f.values[1] <= f.values[2]);
    }

    #[test]
    fn eigenvectors_orthonormal(p in params()) {
        let f = eigensystem(&build_hamiltonian(&p).unwrap());
        for j in 0..3 {
            for k in 0..3 {
                let dot: C64 = (0..3).map(|i| f.vectors[j][i].conj() * f.vectors[k][i]).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dark_state_at_resonance(o1 in 0.01..100.0f64, o2 in 0.01..100.0f64, d2 in -50.0..50.0f64) {
        let h = build_hamiltonian(&HamiltonianParams {
            omega1: o1, omega2: o2, delta2: d2, delta3: -d2, stark: 0.0, beta: 0.0,
        }).unwrap();
        let f = eigensystem(&h);
        let k = (0..3).min_by(|&a, &b| f.values[a].abs().total_cmp(&f.values[b].abs())).unwrap();
        prop_assert!(f.values[k].abs() < 1e-12 * h.frobenius_norm());
        let d = dark_state(o1, o2, 0.0).unwrap();
        let ov: C64 = (0..3).map(|i| d.0[i].conj() * f.vectors[k][i]).sum();
        prop_assert!((1.0 - ov.norm()).abs() < 1e-10);
    }

    #[test]
    fn equal_drive_characteristic_polynomial(omega in 0.1..100.0f64, d2 in -50.0..50.0f64) {
        let h = build_hamiltonian(&HamiltonianParams::resonant(omega, d2, 0.0)).unwrap();
        let f = eigensystem(&h);
        let scale = h.frobenius_norm();
        let nonzero: Vec<f64> = f.values.iter().copied().filter(|l| l.abs() > 1e-9 * scale).collect();
        prop_assert_eq!(nonzero.len(), 2);
        for l in nonzero {
            prop_assert!((l * l - d2 * l - omega * omega / 2.0).abs() < 1e-10 * scale * scale);
        }
    }

    #[test]
    fn tracking_is_idempotent(p in params()) {
        let f = eigensystem(&build_hamiltonian(&p).unwrap());
        let once = track_adiabatic(&f, &f);
        let twice = track_adiabatic(&once, &once);
        prop_assert_eq!(once.values, twice.values);
        for k in 0..3 {
            let ov: C64 = (0..3).map(|i| once.vectors[k][i].conj() * twice.vectors[k][i]).sum();
            prop_assert!(ov.im.abs() < 1e-12 && ov.re > 1.0 - 1e-12);
        }
    }
}

#[test]
fn zero_coupling_limit_over_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..1000 {
        let delta2: f64 = rng.gen_range(-100.0..100.0);
        let stark: f64 = rng.gen_range(0.0..200.0);
        let h = build_hamiltonian(&HamiltonianParams::resonant(0.0, delta2, stark)).unwrap();
        let f = eigensystem(&h);
        let mut got = f.values;
        let mut want = [-stark, 0.0, delta2];
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for k in 0..3 {
            let tol = 1e-12 * want[k].abs().max(1e-300);
            assert!(
                (got[k] - want[k]).abs() <= tol,
                "Δ₂={delta2} Δ_S={stark}: {got:?} vs {want:?}"
            );
        }
        // Eigenvectors are basis vectors.
        for v in &f.vectors {
            let big = v.iter().filter(|c| c.norm() > 1.0 - 1e-12).count();
            assert_eq!(big, 1);
        }
    }
}

#[test]
fn dark_state_over_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let o1: f64 = rng.gen_range(0.01..150.0);
        let o2: f64 = rng.gen_range(0.01..150.0);
        let d2: f64 = rng.gen_range(-80.0..80.0);
        let h = build_hamiltonian(&HamiltonianParams {
            omega1: o1,
            omega2: o2,
            delta2: d2,
            delta3: -d2,
            stark: 0.0,
            beta: 0.0,
        })
        .unwrap();
        let f = eigensystem(&h);
        let k = (0..3)
            .min_by(|&a, &b| f.values[a].abs().total_cmp(&f.values[b].abs()))
            .unwrap();
        let d = dark_state(o1, o2, 0.0).unwrap();
        let ov: C64 = (0..3).map(|i| d.0[i].conj() * f.vectors[k][i]).sum();
        let phase = ov / ov.norm();
        let err = (0..3)
            .map(|i| (f.vectors[k][i] - d.0[i] * phase).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "Ω₁={o1} Ω₂={o2} Δ₂={d2}: err {err:e}");
    }
}

#[test]
fn origin_tie_break() {
    // Ω = 0, Δ_S = 0: Φ₀ is state 1 and Φ₋ is state 3.
    let f = eigensystem(&build_hamiltonian(&HamiltonianParams::resonant(0.0, 20.0, 0.0)).unwrap());
    assert!((f.vectors[ZERO][0].norm() - 1.0).abs() < 1e-15);
    assert!((f.vectors[MINUS][2].norm() - 1.0).abs() < 1e-15);
    assert!((f.vectors[PLUS][1].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn beta_rotates_dark_state_phase() {
    let (o1, o2) = (30.0, 40.0);
    for beta in [0.0, 0.4, -1.3, 2.9] {
        let h = build_hamiltonian(&HamiltonianParams {
            omega1: o1,
            omega2: o2,
            delta2: 20.0,
            delta3: -20.0,
            stark: 0.0,
            beta,
        })
        .unwrap();
        let f = eigensystem(&h);
        let k = (0..3)
            .min_by(|&a, &b| f.values[a].abs().total_cmp(&f.values[b].abs()))
            .unwrap();
        let d = dark_state(o1, o2, beta).unwrap();
        let ov: C64 = (0..3).map(|i| d.0[i].conj() * f.vectors[k][i]).sum();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
    }
}
