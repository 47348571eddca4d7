use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sacs_core::eigen::ZERO;
use sacs_core::propagator::{final_populations, propagate, step};
use sacs_core::protocols::{make_sacs, SacsParams};
use sacs_core::{dark_state, HermitianMatrix3, StateVector, C64};

type M3 = [[C64; 3]; 3];

fn matmul(a: &M3, b: &M3) -> M3 {
    let mut c = [[C64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// exp(−iHt) by scaling and squaring of a Taylor series; independent of the
/// eigensolver used by the propagator.
fn expm(h: &HermitianMatrix3, t: f64) -> M3 {
    let a = h.to_array();
    let norm = h.frobenius_norm() * t;
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = t / 2f64.powi(squarings);
    let mut x = [[C64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            x[i][j] = a[i][j] * C64::new(0.0, -scale);
        }
    }
    let mut sum = [[C64::default(); 3]; 3];
    let mut term = [[C64::default(); 3]; 3];
    for i in 0..3 {
        sum[i][i] = C64::new(1.0, 0.0);
        term[i][i] = C64::new(1.0, 0.0);
    }
    for n in 1..30 {
        term = matmul(&term, &x);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= n as f64;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> HermitianMatrix3 {
    let mut c = || C64::new(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0));
    let (h12, h13, h23) = (c(), c(), c());
    HermitianMatrix3::new(
        [
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
            rng.gen_range(-60.0..60.0),
        ],
        h12,
        h13,
        h23,
    )
}

fn random_state(rng: &mut ChaCha8Rng) -> StateVector {
    let v = StateVector([
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    ]);
    v.normalized().unwrap()
}

#[test]
fn constant_hamiltonian_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let h = random_hermitian(&mut rng);
        let psi0 = random_state(&mut rng);
        let t = rng.gen_range(0.1..2.0);
        let n = ((t * h.frobenius_norm()) / 0.05).ceil() as usize;
        let dt = t / n as f64;
        let mut psi = psi0;
        for _ in 0..n {
            psi = step(&psi, &h, dt).unwrap();
        }
        let u = expm(&h, t);
        for i in 0..3 {
            let want: C64 = (0..3).map(|j| u[i][j] * psi0.0[j]).sum();
            assert!((psi.0[i] - want).norm() < 1e-10, "amplitude {i}: {} vs {}", psi.0[i], want);
        }
    }
}

#[test]
fn rabi_formula() {
    for omega in [1.0, 7.5, 33.0] {
        let h = HermitianMatrix3::new([0.0; 3], C64::new(omega / 2.0, 0.0), C64::default(), C64::default());
        let dt = 0.01 / omega;
        let mut psi = StateVector::ground();
        for k in 1..=2000 {
            psi = step(&psi, &h, dt).unwrap();
            let t = k as f64 * dt;
            let want = (omega * t / 2.0).sin().powi(2);
            assert!((psi.populations()[1] - want).abs() < 1e-8);
        }
    }
}

fn mercury_sacs() -> sacs_core::protocols::ScenarioConfig {
    make_sacs(&SacsParams::mercury()).unwrap()
}

#[test]
fn basis_propagation_is_unitary() {
    let base = mercury_sacs();
    let grid = base.grid(None).unwrap();
    let trajs: Vec<_> = (0..3)
        .map(|n| {
            let mut s = base.clone();
            s.initial = StateVector::basis(n);
            propagate(&s, &grid).unwrap()
        })
        .collect();
    for i in (0..trajs[0].len()).step_by(7) {
        for a in 0..3 {
            for b in 0..3 {
                let dot: C64 = (0..3)
                    .map(|k| trajs[a].states[i].0[k].conj() * trajs[b].states[i].0[k])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-9, "sample {i}");
            }
        }
    }
}

#[test]
fn step_doubling_converges() {
    let s = mercury_sacs();
    let grid = s.grid(None).unwrap();
    let coarse = final_populations(&propagate(&s, &grid).unwrap()).unwrap();
    let fine = final_populations(&propagate(&s, &grid.refined()).unwrap()).unwrap();
    for (a, b) in coarse.as_array().iter().zip(fine.as_array()) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn default_grid_is_fine_enough() {
    let grid = mercury_sacs().grid(None).unwrap();
    assert!(grid.steps() >= 1300);
}

#[test]
fn statevector_follows_tracked_dark_state() {
    let s = mercury_sacs();
    let traj = propagate(&s, &s.grid(None).unwrap()).unwrap();
    let worst = traj.overlaps.iter().map(|o| o[ZERO]).fold(1.0, f64::min);
    assert!(worst > 0.98, "min overlap with Φ₀ = {worst}");
    assert!(traj.norm_drift < 1e-9);
}

#[test]
fn dark_state_after_stark_pulse() {
    let s = mercury_sacs();
    let traj = propagate(&s, &s.grid(None).unwrap()).unwrap();
    let stark_end = s.stark.support().unwrap().1;
    let mut checked = 0;
    for (t, psi) in traj.times.iter().zip(&traj.states) {
        let (o1, o2, _) = s.couplings_at(*t);
        if *t <= stark_end || o1.hypot(o2) < 1e-6 {
            continue;
        }
        let d = dark_state(o1, o2, s.beta).unwrap();
        assert!(psi.fidelity(&d) > 0.99, "t = {t}: {}", psi.fidelity(&d));
        checked += 1;
    }
    assert!(checked > 100);
}
