//! Rotating-wave Hamiltonian of the three-state ladder.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Instantaneous couplings and detunings, all in rad/ns.
///
/// `stark` is the magnitude of the dynamic Stark shift of state 3; it lowers
/// that state, so it enters the Hamiltonian with a minus sign. `beta` is the
/// relative phase of the second field and rotates the 2–3 coupling.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub omega1: f64,
    pub omega2: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub stark: f64,
    #[serde(default)]
    pub beta: f64,
}

impl HamiltonianParams {
    /// Equal driving fields on two-photon resonance.
    pub fn resonant(omega: f64, delta2: f64, stark: f64) -> Self {
        HamiltonianParams {
            omega1: omega,
            omega2: omega,
            delta2,
            delta3: -delta2,
            stark,
            beta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
            ("stark", self.stark),
            ("beta", self.beta),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.stark < 0.0 {
            return Err(Error::invalid(
                "stark",
                format!("Stark magnitude must be non-negative, got {}", self.stark),
            ));
        }
        Ok(())
    }
}

/// 3×3 Hermitian matrix in rad/ns, stored as a real diagonal and the three
/// upper off-diagonal entries. Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix3 {
    diag: [f64; 3],
    /// (1,2), (1,3), (2,3) entries; the lower triangle is their conjugate.
    upper: [C64; 3],
}

impl HermitianMatrix3 {
    pub const ZERO: HermitianMatrix3 = HermitianMatrix3 {
        diag: [0.0; 3],
        upper: [C64::new(0.0, 0.0); 3],
    };

    pub fn new(diag: [f64; 3], h12: C64, h13: C64, h23: C64) -> Self {
        HermitianMatrix3 {
            diag,
            upper: [h12, h13, h23],
        }
    }

    pub fn diagonal(diag: [f64; 3]) -> Self {
        Self::new(diag, C64::default(), C64::default(), C64::default())
    }

    #[inline]
    pub fn diag(&self) -> [f64; 3] {
        self.diag
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match (i, j) {
            (i, j) if i == j => C64::new(self.diag[i], 0.0),
            (0, 1) => self.upper[0],
            (0, 2) => self.upper[1],
            (1, 2) => self.upper[2],
            (1, 0) => self.upper[0].conj(),
            (2, 0) => self.upper[1].conj(),
            (2, 1) => self.upper[2].conj(),
            _ => panic!("index ({i}, {j}) out of range for a 3x3 matrix"),
        }
    }

    pub fn to_array(&self) -> [[C64; 3]; 3] {
        let mut m = [[C64::default(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.get(i, j);
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64; 3]) -> [C64; 3] {
        let m = self.to_array();
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let o: f64 = self.upper.iter().map(|z| z.norm_sqr()).sum();
        (d + 2.0 * o).sqrt()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        self.upper.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.diag.iter().all(|x| x.is_finite())
            && self.upper.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Rotating-wave Hamiltonian of the ladder (ħ factored out):
///
/// ```text
/// | 0      Ω₁/2          0               |
/// | Ω₁/2   Δ₂            Ω₂ e^{iβ}/2     |
/// | 0      Ω₂ e^{-iβ}/2  Δ₂ + Δ₃ − Δ_S   |
/// ```
pub fn build_hamiltonian(p: &HamiltonianParams) -> Result<HermitianMatrix3> {
    p.validate()?;
    let h12 = C64::new(0.5 * p.omega1, 0.0);
    let h23 = C64::from_polar(0.5 * p.omega2, p.beta);
    Ok(HermitianMatrix3::new(
        [0.0, p.delta2, p.delta2 + p.delta3 - p.stark],
        h12,
        C64::default(),
        h23,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_detunings_give_diagonal() {
        let h = build_hamiltonian(&HamiltonianParams {
            delta2: 20.0,
            delta3: -20.0,
            stark: 10.0,
            ..Default::default()
        })
        .unwrap();
        assert!(h.is_diagonal());
        assert_eq!(h.diag(), [0.0, 20.0, -10.0]);
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        let h = build_hamiltonian(&HamiltonianParams::default()).unwrap();
        assert_eq!(h, HermitianMatrix3::ZERO);
        assert_eq!(h.frobenius_norm(), 0.0);
    }

    #[test]
    fn mercury_magnitudes() {
        let h = build_hamiltonian(&HamiltonianParams::resonant(52.0, 20.0, 0.0)).unwrap();
        assert_eq!(h.get(0, 1), C64::new(26.0, 0.0));
        assert_eq!(h.get(1, 2), C64::new(26.0, 0.0));
        assert_eq!(h.get(2, 1), C64::new(26.0, 0.0));
        assert_eq!(h.get(0, 2), C64::default());
        assert_eq!(h.diag(), [0.0, 20.0, 0.0]);
        assert_eq!(h.trace(), 20.0);
    }

    #[test]
    fn hermitian_with_phase() {
        let mut p = HamiltonianParams::resonant(3.0, 1.0, 0.5);
        p.beta = 0.7;
        let h = build_hamiltonian(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
        assert!((h.trace() - (1.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let p = HamiltonianParams {
            omega1: f64::NAN,
            ..Default::default()
        };
        assert!(matches!(build_hamiltonian(&p), Err(Error::NonFinite("omega1"))));
        let p = HamiltonianParams {
            stark: -1.0,
            ..Default::default()
        };
        assert!(build_hamiltonian(&p).is_err());
    }
}
