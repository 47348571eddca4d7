//! Adiabatic-state bookkeeping: continuity tracking, dark states and
//! finite-difference nonadiabatic couplings.

use serde::{Deserialize, Serialize};

use crate::eigen::{inner, norm, AdiabaticFrame, FrameOrdering};
use crate::{Error, Result, C64};

/// Rotating-frame amplitudes `(C₁, C₂, C₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub [C64; 3]);

impl StateVector {
    pub fn basis(n: usize) -> Self {
        let mut c = [C64::default(); 3];
        c[n] = C64::new(1.0, 0.0);
        StateVector(c)
    }

    /// Ground state ψ₁.
    pub fn ground() -> Self {
        Self::basis(0)
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("state", "cannot normalise a null or non-finite state"));
        }
        for c in self.0.iter_mut() {
            *c /= n;
        }
        Ok(self)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        inner(&self.0, &other.0).norm_sqr()
    }

    pub fn scaled(mut self, z: C64) -> Self {
        for c in self.0.iter_mut() {
            *c *= z;
        }
        self
    }
}

/// Dark state `(Ω_S, 0, −e^{−iβ}Ω_P)/√(Ω_S² + Ω_P²)` of the ladder, with the
/// pump on the 1–2 transition and the Stokes field on 2–3.
pub fn dark_state(omega_p: f64, omega_s: f64, beta: f64) -> Result<StateVector> {
    if !(omega_p.is_finite() && omega_s.is_finite() && beta.is_finite()) {
        return Err(Error::NonFinite("dark_state"));
    }
    let n = omega_p.hypot(omega_s);
    if n == 0.0 {
        return Err(Error::UndefinedDarkState);
    }
    Ok(StateVector([
        C64::new(omega_s / n, 0.0),
        C64::default(),
        -C64::from_polar(omega_p / n, -beta),
    ]))
}

const TIE_TOL: f64 = 1e-9;

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Reorder `next` so slot `k` holds the eigenvector with the largest overlap
/// with `prev`'s slot `k`, and rotate each eigenvector's phase so that
/// `⟨Φ_k(prev)|Φ_k(next)⟩` is real and non-negative.
///
/// When the best assignment is not unique (total overlaps within 1e-9) the
/// frame is flagged degenerate and the assignment with the smallest total
/// eigenvalue displacement wins; remaining ties keep value order.
///
/// Eigenvalues of `next` that coincide to 1e-12 of the spectral scale leave
/// their eigenvectors undetermined; such eigenspaces are re-based on the
/// projections of `prev`'s vectors so the frame stays continuous.
pub fn track_adiabatic(prev: &AdiabaticFrame, next: &AdiabaticFrame) -> AdiabaticFrame {
    let (aligned, rebased) = align_degenerate(prev, next);
    let next = &aligned;
    let mut ov = [[0.0; 3]; 3];
    for (j, row) in ov.iter_mut().enumerate() {
        for (k, o) in row.iter_mut().enumerate() {
            *o = inner(&prev.vectors[j], &next.vectors[k]).norm();
        }
    }
    let score = |perm: &[usize; 3]| (0..3).map(|k| ov[k][perm[k]]).sum::<f64>();
    let displacement = |perm: &[usize; 3]| {
        (0..3)
            .map(|k| (prev.values[k] - next.values[perm[k]]).abs())
            .sum::<f64>()
    };
    let best_score = PERMUTATIONS
        .iter()
        .map(score)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<&[usize; 3]> = PERMUTATIONS
        .iter()
        .filter(|p| best_score - score(p) <= TIE_TOL)
        .collect();
    let degenerate = rebased || tied.len() > 1;
    let perm = if degenerate {
        let mut chosen = tied[0];
        let mut best = displacement(chosen);
        for p in &tied[1..] {
            let d = displacement(p);
            if d < best - TIE_TOL * (1.0 + best) {
                best = d;
                chosen = p;
            }
        }
        *chosen
    } else {
        *tied[0]
    };

    let mut out = AdiabaticFrame {
        values: [0.0; 3],
        vectors: [[C64::default(); 3]; 3],
        ordering: FrameOrdering::ContinuityOrdered,
        degenerate,
    };
    for k in 0..3 {
        out.values[k] = next.values[perm[k]];
        let mut v = next.vectors[perm[k]];
        let o = inner(&prev.vectors[k], &v);
        let r = o.norm();
        if r > 1e-300 {
            let ph = o.conj() / r;
            for x in v.iter_mut() {
                *x *= ph;
            }
        }
        out.vectors[k] = v;
    }
    out
}

const COINCIDENT: f64 = 1e-12;

fn align_degenerate(prev: &AdiabaticFrame, next: &AdiabaticFrame) -> (AdiabaticFrame, bool) {
    let mut out = *next;
    let scale = next.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = COINCIDENT * scale.max(f64::MIN_POSITIVE);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| next.values[a].total_cmp(&next.values[b]));
    let mut rebased = false;
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && next.values[order[end]] - next.values[order[end - 1]] <= tol {
            end += 1;
        }
        let cluster = &order[start..end];
        if cluster.len() > 1 {
            if let Some(vs) = project_onto(prev, next, cluster) {
                for (&k, v) in cluster.iter().zip(vs) {
                    out.vectors[k] = v;
                }
                rebased = true;
            }
        }
        start = end;
    }
    (out, rebased)
}

/// Orthonormalised projections of the `prev` vectors that overlap most with
/// the eigenspace spanned by `next.vectors[cluster]`.
fn project_onto(prev: &AdiabaticFrame, next: &AdiabaticFrame, cluster: &[usize]) -> Option<Vec<[C64; 3]>> {
    let project = |v: &[C64; 3]| {
        let mut p = [C64::default(); 3];
        for &k in cluster {
            let c = inner(&next.vectors[k], v);
            for (x, y) in p.iter_mut().zip(&next.vectors[k]) {
                *x += c * y;
            }
        }
        p
    };
    let mut candidates: Vec<[C64; 3]> = prev.vectors.iter().map(project).collect();
    candidates.sort_by(|a, b| norm(b).total_cmp(&norm(a)));
    let mut basis: Vec<[C64; 3]> = Vec::with_capacity(cluster.len());
    for mut v in candidates {
        if basis.len() == cluster.len() {
            break;
        }
        for b in &basis {
            let c = inner(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let n = norm(&v);
        if n < 1e-6 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        basis.push(v);
    }
    (basis.len() == cluster.len()).then_some(basis)
}

/// Pairwise nonadiabatic coupling magnitudes (rad/ns) between two
/// continuity-ordered frames separated by `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix(pub [[f64; 3]; 3]);

impl CouplingMatrix {
    /// Coupling between `Φ_j` and `Φ_k`.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[j][k]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Finite-difference estimate `|⟨Φ_j(t)|Φ_k(t+dt)⟩|/dt`, `j ≠ k`.
pub fn nonadiabatic_coupling(
    f1: &AdiabaticFrame,
    f2: &AdiabaticFrame,
    dt: f64,
) -> Result<CouplingMatrix> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveStep(dt));
    }
    let mut m = [[0.0; 3]; 3];
    for (j, row) in m.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            if j != k {
                *e = inner(&f1.vectors[j], &f2.vectors[k]).norm() / dt;
            }
        }
    }
    Ok(CouplingMatrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{eigensystem, MINUS, ZERO};
    use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: C64, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-14 && (a.im - im).abs() < 1e-14
    }

    #[test]
    fn dark_state_examples() {
        let d = dark_state(1.0, 1.0, 0.0).unwrap();
        assert!(close(d.0[0], FRAC_1_SQRT_2, 0.0) && close(d.0[2], -FRAC_1_SQRT_2, 0.0));
        let d = dark_state(0.0, 3.0, 0.0).unwrap();
        assert_eq!(d, StateVector::ground());
        let d = dark_state((PI / 6.0).tan(), 1.0, 0.0).unwrap();
        assert!(close(d.0[0], 3f64.sqrt() / 2.0, 0.0));
        assert!(close(d.0[2], -0.5, 0.0));
        assert!(matches!(dark_state(0.0, 0.0, 0.0), Err(Error::UndefinedDarkState)));
    }

    #[test]
    fn tracking_restores_order() {
        let prev = AdiabaticFrame::identity();
        let mut next = prev;
        next.vectors.swap(1, 2);
        next.values = [0.0, 2.0, 1.0];
        next.ordering = FrameOrdering::ValueSorted;
        let out = track_adiabatic(&prev, &next);
        assert_eq!(out.vectors, prev.vectors);
        assert_eq!(out.values, [0.0, 1.0, 2.0]);
        assert!(!out.degenerate);
    }

    #[test]
    fn tracking_fixes_sign() {
        let prev = AdiabaticFrame::identity();
        let mut next = prev;
        next.vectors[1] = [C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)];
        let out = track_adiabatic(&prev, &next);
        assert_eq!(out.vectors[1][1], C64::new(1.0, 0.0));
    }

    #[test]
    fn degenerate_origin_is_flagged() {
        let at_origin = eigensystem(&build_hamiltonian(&HamiltonianParams::resonant(0.0, 20.0, 0.0)).unwrap());
        let start = track_adiabatic(&at_origin, &at_origin);
        let next = eigensystem(&build_hamiltonian(&HamiltonianParams::resonant(1e-3, 20.0, 0.0)).unwrap());
        let out = track_adiabatic(&start, &next);
        assert!(out.degenerate);
        // displacement tie-break keeps λ₀ = 0 in the zero slot
        assert!(out.values[ZERO].abs() < 1e-12);
        assert!(out.values[MINUS] < 0.0);
    }

    #[test]
    fn coupling_of_rotation() {
        let f1 = AdiabaticFrame::identity();
        let delta: f64 = 1e-3;
        let mut f2 = f1;
        let (c, s) = (delta.cos(), delta.sin());
        // rotate Φ₋ = ψ₁ and Φ₀ = ψ₃ in the 1–3 plane
        f2.vectors[0] = [C64::new(c, 0.0), C64::default(), C64::new(s, 0.0)];
        f2.vectors[2] = [C64::new(-s, 0.0), C64::default(), C64::new(c, 0.0)];
        let dt = 0.01;
        let m = nonadiabatic_coupling(&f1, &f2, dt).unwrap();
        assert!((m.get(2, 0) - delta / dt).abs() < 1e-4 * delta / dt);
        let z = nonadiabatic_coupling(&f1, &f1, dt).unwrap();
        assert_eq!(z.max(), 0.0);
        assert!(nonadiabatic_coupling(&f1, &f1, 0.0).is_err());
    }
}
