//! Instantaneous eigensystem of a 3×3 Hermitian matrix.
//!
//! Roots of the characteristic cubic are found in closed form (trigonometric
//! form) and polished with one Newton step. Eigenvectors come from cross
//! products of rows of `H − λI`; a short Jacobi cleanup on `V†HV` then pins
//! residuals at rounding level. When two roots lie closer than `1e-8·‖H‖` the
//! cross products are unreliable and cyclic Jacobi runs from the identity.

use serde::Serialize;

use crate::hamiltonian::HermitianMatrix3;
use crate::C64;

pub(crate) type Vec3 = [C64; 3];
type Mat3 = [[C64; 3]; 3];

/// Index of λ₋ / Φ₋ inside a frame.
pub const MINUS: usize = 0;
/// Index of λ₀ / Φ₀ inside a frame.
pub const ZERO: usize = 1;
/// Index of λ₊ / Φ₊ inside a frame.
pub const PLUS: usize = 2;

const CLOSE_ROOTS: f64 = 1e-8;
const TIE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameOrdering {
    /// Eigenvalues ascending, as returned by [`eigensystem`].
    ValueSorted,
    /// Ordered by overlap with a predecessor frame.
    ContinuityOrdered,
}

/// Eigenvalues (rad/ns) and unit eigenvectors of the instantaneous Hamiltonian.
///
/// Slot `k` pairs `values[k]` with `vectors[k]`; slots are named
/// [`MINUS`], [`ZERO`], [`PLUS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
    pub ordering: FrameOrdering,
    /// Set by tracking when the overlap assignment was ambiguous.
    pub degenerate: bool,
}

impl AdiabaticFrame {
    pub fn identity() -> Self {
        let mut vectors = [[C64::default(); 3]; 3];
        for (k, v) in vectors.iter_mut().enumerate() {
            v[k] = C64::new(1.0, 0.0);
        }
        AdiabaticFrame {
            values: [0.0; 3],
            vectors,
            ordering: FrameOrdering::ContinuityOrdered,
            degenerate: false,
        }
    }

    pub fn lambda_minus(&self) -> f64 {
        self.values[MINUS]
    }

    pub fn lambda_zero(&self) -> f64 {
        self.values[ZERO]
    }

    pub fn lambda_plus(&self) -> f64 {
        self.values[PLUS]
    }

    /// Largest `‖HΦ_k − λ_kΦ_k‖` over the three pairs.
    pub fn max_residual(&self, h: &HermitianMatrix3) -> f64 {
        (0..3)
            .map(|k| {
                let hv = h.apply(&self.vectors[k]);
                let lam = self.values[k];
                norm(&[
                    hv[0] - self.vectors[k][0] * lam,
                    hv[1] - self.vectors[k][1] * lam,
                    hv[2] - self.vectors[k][2] * lam,
                ])
            })
            .fold(0.0, f64::max)
    }

    /// `|⟨Φ_k|ψ⟩|²` for each slot.
    pub fn overlaps(&self, psi: &Vec3) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, v) in out.iter_mut().zip(&self.vectors) {
            *o = inner(v, psi).norm_sqr();
        }
        out
    }
}

/// Diagonalise `h`. Eigenvalues are returned ascending; exact ties are broken
/// so the vector dominated by ψ₃ precedes ψ₁, which precedes ψ₂.
pub fn eigensystem(h: &HermitianMatrix3) -> AdiabaticFrame {
    let scale = h.frobenius_norm();
    let (values, vectors) = if h.is_diagonal() {
        diagonal_case(h)
    } else {
        let roots = cubic_roots(h);
        let min_sep = (roots[1] - roots[0]).min(roots[2] - roots[1]);
        if min_sep < CLOSE_ROOTS * scale {
            jacobi(h, identity())
        } else {
            let v = analytic_vectors(h, &roots);
            jacobi(h, v)
        }
    };
    sort_frame(values, vectors, scale)
}

fn diagonal_case(h: &HermitianMatrix3) -> ([f64; 3], Mat3) {
    // Columns of the identity; vectors are stored row-wise as Φ_k.
    (h.diag(), identity())
}

fn sort_frame(values: [f64; 3], mut vectors: Mat3, scale: f64) -> AdiabaticFrame {
    for v in vectors.iter_mut() {
        fix_phase_largest(v);
    }
    // ψ₃ first, then ψ₁, then ψ₂ among exact ties.
    let priority = |v: &Vec3| match dominant(v) {
        2 => 0,
        0 => 1,
        _ => 2,
    };
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| {
        let (la, lb) = (values[a], values[b]);
        if (la - lb).abs() <= TIE * scale.max(f64::MIN_POSITIVE) {
            priority(&vectors[a]).cmp(&priority(&vectors[b]))
        } else {
            la.partial_cmp(&lb).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    AdiabaticFrame {
        values: [values[idx[0]], values[idx[1]], values[idx[2]]],
        vectors: [vectors[idx[0]], vectors[idx[1]], vectors[idx[2]]],
        ordering: FrameOrdering::ValueSorted,
        degenerate: false,
    }
}

/// Closed-form roots of the characteristic polynomial, ascending, each
/// polished by one Newton step.
pub fn cubic_roots(h: &HermitianMatrix3) -> [f64; 3] {
    let d = h.diag();
    let (h12, h13, h23) = (h.get(0, 1), h.get(0, 2), h.get(1, 2));
    let off = h12.norm_sqr() + h13.norm_sqr() + h23.norm_sqr();
    let q = (d[0] + d[1] + d[2]) / 3.0;
    let b = [d[0] - q, d[1] - q, d[2] - q];
    let p2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + 2.0 * off;
    if p2 == 0.0 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    // det(H − qI) for a Hermitian matrix.
    let det_b = b[0] * b[1] * b[2] + 2.0 * (h12 * h23 * h13.conj()).re
        - b[0] * h23.norm_sqr()
        - b[1] * h13.norm_sqr()
        - b[2] * h12.norm_sqr();
    let r = (det_b / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;

    // λ³ − c2 λ² + c1 λ − c0
    let c2 = d[0] + d[1] + d[2];
    let c1 = d[0] * d[1] + d[0] * d[2] + d[1] * d[2] - off;
    let c0 = b_det_full(h);
    let polish = |x: f64| {
        let f = ((x - c2) * x + c1) * x - c0;
        let df = (3.0 * x - 2.0 * c2) * x + c1;
        if df.abs() > 1e-12 * p * p {
            let y = x - f / df;
            if y.is_finite() && (y - x).abs() < 1e-6 * p {
                return y;
            }
        }
        x
    };
    let mut roots = [polish(lo), polish(mid), polish(hi)];
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

fn b_det_full(h: &HermitianMatrix3) -> f64 {
    let d = h.diag();
    let (h12, h13, h23) = (h.get(0, 1), h.get(0, 2), h.get(1, 2));
    d[0] * d[1] * d[2] + 2.0 * (h12 * h23 * h13.conj()).re
        - d[0] * h23.norm_sqr()
        - d[1] * h13.norm_sqr()
        - d[2] * h12.norm_sqr()
}

fn analytic_vectors(h: &HermitianMatrix3, roots: &[f64; 3]) -> Mat3 {
    let m = h.to_array();
    let mut vecs = [[C64::default(); 3]; 3];
    for (k, &lam) in roots.iter().enumerate() {
        let mut rows = m;
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] -= lam;
        }
        let candidates = [
            cross(&rows[0], &rows[1]),
            cross(&rows[0], &rows[2]),
            cross(&rows[1], &rows[2]),
        ];
        let best = candidates
            .iter()
            .max_by(|a, b| norm(a).partial_cmp(&norm(b)).unwrap())
            .copied()
            .unwrap();
        vecs[k] = best;
    }
    gram_schmidt(&mut vecs);
    vecs
}

/// Cyclic Jacobi on `V†HV`, starting from the (row-stored) basis `v`.
/// Returns the Rayleigh quotients and the rotated basis.
fn jacobi(h: &HermitianMatrix3, v: Mat3) -> ([f64; 3], Mat3) {
    let hm = h.to_array();
    // Columns of `u` are the basis vectors.
    let mut u = transpose(&v);
    let mut a = mul(&mul(&adjoint(&u), &hm), &u);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..30 {
        let off = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            let r = apq.norm();
            if r <= 1e-300 {
                continue;
            }
            let phase = apq / r;
            let app = a[p][p].re;
            let aqq = a[q][q].re;
            let tau = (aqq - app) / (2.0 * r);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            // Unitary acting on the (p, q) plane: D·R with D = diag(1, e^{-iφ}).
            let mut g = identity();
            g[p][p] = C64::new(c, 0.0);
            g[p][q] = C64::new(s, 0.0);
            g[q][p] = -phase.conj() * s;
            g[q][q] = phase.conj() * c;
            a = mul(&mul(&adjoint(&g), &a), &g);
            u = mul(&u, &g);
        }
    }
    let values = [a[0][0].re, a[1][1].re, a[2][2].re];
    let mut vecs = transpose(&u);
    for v in vecs.iter_mut() {
        let n = norm(v);
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    (values, vecs)
}

fn identity() -> Mat3 {
    let mut m = [[C64::default(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    m
}

fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[C64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn adjoint(m: &Mat3) -> Mat3 {
    let mut t = transpose(m);
    for row in t.iter_mut() {
        for x in row.iter_mut() {
            *x = x.conj();
        }
    }
    t
}

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[C64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn gram_schmidt(vecs: &mut Mat3) {
    for k in 0..3 {
        for j in 0..k {
            let proj = inner(&vecs[j], &vecs[k]);
            let vj = vecs[j];
            for (x, y) in vecs[k].iter_mut().zip(vj) {
                *x -= proj * y;
            }
        }
        let n = norm(&vecs[k]);
        for x in vecs[k].iter_mut() {
            *x /= n;
        }
    }
}

/// `⟨a|b⟩`, conjugating the left argument.
#[inline]
pub(crate) fn inner(a: &Vec3, b: &Vec3) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

#[inline]
pub(crate) fn norm(v: &Vec3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

fn dominant(v: &Vec3) -> usize {
    let mut best = 0;
    for k in 1..3 {
        if v[k].norm() > v[best].norm() * (1.0 + 1e-12) {
            best = k;
        }
    }
    best
}

/// Rotate `v` so its largest-magnitude component is real and positive.
pub(crate) fn fix_phase_largest(v: &mut Vec3) {
    let z = v[dominant(v)];
    let r = z.norm();
    if r > 0.0 {
        let ph = z.conj() / r;
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};

    fn frame(p: HamiltonianParams) -> (HermitianMatrix3, AdiabaticFrame) {
        let h = build_hamiltonian(&p).unwrap();
        (h, eigensystem(&h))
    }

    fn assert_basis(v: &Vec3, k: usize) {
        for (i, z) in v.iter().enumerate() {
            let want = if i == k { 1.0 } else { 0.0 };
            assert!((z.re - want).abs() < 1e-14 && z.im.abs() < 1e-14, "{v:?} vs psi{}", k + 1);
        }
    }

    #[test]
    fn limiting_case_without_coupling() {
        let (_, f) = frame(HamiltonianParams {
            delta2: 20.0,
            delta3: -20.0,
            stark: 10.0,
            ..Default::default()
        });
        assert_eq!(f.values, [-10.0, 0.0, 20.0]);
        assert_basis(&f.vectors[MINUS], 2);
        assert_basis(&f.vectors[ZERO], 0);
        assert_basis(&f.vectors[PLUS], 1);
    }

    #[test]
    fn origin_tie_break() {
        let (_, f) = frame(HamiltonianParams {
            delta2: 20.0,
            delta3: -20.0,
            ..Default::default()
        });
        assert_eq!(f.values, [0.0, 0.0, 20.0]);
        assert_basis(&f.vectors[MINUS], 2);
        assert_basis(&f.vectors[ZERO], 0);
        let (_, f) = frame(HamiltonianParams::default());
        assert_basis(&f.vectors[MINUS], 2);
        assert_basis(&f.vectors[ZERO], 0);
        assert_basis(&f.vectors[PLUS], 1);
    }

    #[test]
    fn resonant_equal_drive_roots() {
        // λ(λ² − Δ₂λ − Ω²/2) with Δ₂ = 0, Ω = 10.
        let (h, f) = frame(HamiltonianParams::resonant(10.0, 0.0, 0.0));
        let r = 10.0 / 2f64.sqrt();
        assert!((f.values[0] + r).abs() < 1e-12);
        assert!(f.values[1].abs() < 1e-12);
        assert!((f.values[2] - r).abs() < 1e-12);
        assert!(f.max_residual(&h) < 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn mercury_drive_roots() {
        let (h, f) = frame(HamiltonianParams::resonant(52.0, 20.0, 0.0));
        let s = (400.0f64 + 2.0 * 52.0 * 52.0).sqrt();
        assert!((f.values[0] - 0.5 * (20.0 - s)).abs() < 1e-11);
        assert!(f.values[1].abs() < 1e-11);
        assert!((f.values[2] - 0.5 * (20.0 + s)).abs() < 1e-11);
        assert!((f.values[0] + 28.10).abs() < 0.01 && (f.values[2] - 48.10).abs() < 0.01);
        // dark state (1, 0, −1)/√2 in the zero slot
        let d = f.vectors[ZERO];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d[0].re - r).abs() < 1e-12 && d[1].norm() < 1e-12 && (d[2].re + r).abs() < 1e-12);
        assert!(f.max_residual(&h) < 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn near_degenerate_uses_fallback() {
        // Tiny coupling splits the origin degeneracy by ~1e-20.
        let (h, f) = frame(HamiltonianParams::resonant(1e-10, 20.0, 0.0));
        assert!(f.max_residual(&h) < 1e-12 * h.frobenius_norm());
        for k in 0..3 {
            assert!((norm(&f.vectors[k]) - 1.0).abs() < 1e-12);
        }
        assert!((f.values.iter().sum::<f64>() - h.trace()).abs() < 1e-10 * h.frobenius_norm());
    }

    #[test]
    fn general_complex_matrix() {
        let h = HermitianMatrix3::new(
            [1.0, -2.0, 0.5],
            C64::new(0.3, 0.4),
            C64::new(-1.0, 0.2),
            C64::new(0.0, 2.0),
        );
        let f = eigensystem(&h);
        assert!(f.values[0] <= f.values[1] && f.values[1] <= f.values[2]);
        assert!(f.max_residual(&h) < 1e-12 * h.frobenius_norm());
        for j in 0..3 {
            for k in 0..3 {
                let ip = inner(&f.vectors[j], &f.vectors[k]).norm();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }
}
