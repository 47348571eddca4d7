//! Mercury spectroscopic data: transition records, level energies and the
//! Einstein-coefficient consistency check.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::constants::{
    angular_frequency, DIPOLE_UNIT, EINSTEIN_UNIT, EPSILON_0, HBAR, SPEED_OF_LIGHT,
};
use crate::{Error, Result};

/// The shipped data file.
pub const SHIPPED_TABLE: &str = include_str!("../../data/mercury.dat");

pub const GROUND: &str = "6^1S_0";
/// State 2 of the ladder.
pub const INTERMEDIATE: &str = "6^3P_1";
/// State 3 of the ladder.
pub const TARGET: &str = "7^1S_0";

const REQUIRED: [(&str, &str); 8] = [
    ("6^3P_1", "6^1S_0"),
    ("7^1S_0", "6^3P_1"),
    ("6^1P_1", "6^1S_0"),
    ("7^1S_0", "6^1P_1"),
    ("7^1P_1", "6^1S_0"),
    ("7^1P_1", "7^1S_0"),
    ("9^1P_1", "6^1S_0"),
    ("9^1P_1", "7^1S_0"),
];

/// Tolerance on the Einstein-relation dipole check.
pub const CONSISTENCY_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionRecord {
    pub upper: String,
    pub lower: String,
    /// Vacuum wavelength, nm.
    pub wavelength_nm: f64,
    /// Einstein A coefficient, 10⁸ s⁻¹.
    pub einstein_a: f64,
    /// Dipole moment, 10⁻³⁰ C·m.
    pub dipole: f64,
}

impl TransitionRecord {
    pub fn label(&self) -> String {
        format!("{}->{}", self.upper, self.lower)
    }

    /// Bohr angular frequency, rad/s.
    pub fn omega(&self) -> f64 {
        angular_frequency(self.wavelength_nm)
    }

    pub fn dipole_si(&self) -> f64 {
        self.dipole * DIPOLE_UNIT
    }

    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.upper == a && self.lower == b) || (self.upper == b && self.lower == a)
    }

    /// The level on the other end of the transition from `state`.
    pub fn partner(&self, state: &str) -> Option<&str> {
        if self.upper == state {
            Some(&self.lower)
        } else if self.lower == state {
            Some(&self.upper)
        } else {
            None
        }
    }

    /// Dipole (C·m) implied by the tabulated A via A = ω³d²/(3πε₀ħc³).
    pub fn dipole_from_einstein(&self) -> f64 {
        let w = self.omega();
        (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3) * self.einstein_a * EINSTEIN_UNIT
            / w.powi(3))
        .sqrt()
    }

    /// Einstein A (s⁻¹) implied by the tabulated dipole.
    pub fn einstein_from_dipole(&self) -> f64 {
        let w = self.omega();
        w.powi(3) * self.dipole_si().powi(2) / (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3))
    }
}

/// Energy of a level above the ground state, as an angular frequency (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub label: String,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MercuryData {
    pub records: Vec<TransitionRecord>,
    /// `Some(false)` when the file carries a checksum that does not match its rows.
    pub checksum_ok: Option<bool>,
}

impl MercuryData {
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_TABLE).expect("shipped mercury table parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::DataLoad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parse the whitespace-delimited table. `#` starts a comment; a
    /// `# sha256 <hex>` line records the digest of the normalised rows.
    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        let mut canonical = String::new();
        let mut declared = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(hex) = comment.trim().strip_prefix("sha256") {
                    declared = Some(hex.trim().to_ascii_lowercase());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 5 {
                return Err(Error::DataLoad(format!(
                    "line {}: expected 5 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| {
                    Error::DataLoad(format!("line {}: bad {what} '{s}'", lineno + 1))
                })?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::DataLoad(format!(
                        "line {}: {what} must be positive",
                        lineno + 1
                    )));
                }
                Ok(v)
            };
            records.push(TransitionRecord {
                upper: cols[0].to_string(),
                lower: cols[1].to_string(),
                wavelength_nm: num(cols[2], "wavelength")?,
                einstein_a: num(cols[3], "Einstein coefficient")?,
                dipole: num(cols[4], "dipole")?,
            });
            canonical.push_str(&cols.join(" "));
            canonical.push('\n');
        }
        for (u, l) in REQUIRED {
            if !records.iter().any(|r| r.upper == u && r.lower == l) {
                return Err(Error::DataLoad(format!("missing row {u}->{l}")));
            }
        }
        let checksum_ok = declared.map(|d| {
            format!("{:x}", Sha256::digest(canonical.as_bytes())) == d
        });
        Ok(MercuryData {
            records,
            checksum_ok,
        })
    }

    pub fn transition(&self, a: &str, b: &str) -> Result<&TransitionRecord> {
        self.records
            .iter()
            .find(|r| r.connects(a, b))
            .ok_or_else(|| Error::DataLoad(format!("no transition {a}<->{b}")))
    }

    /// Level energies from a breadth-first walk of the transition graph,
    /// starting at the ground state.
    pub fn levels(&self) -> Vec<Level> {
        let mut energy: HashMap<&str, f64> = HashMap::new();
        let mut order = vec![GROUND];
        energy.insert(GROUND, 0.0);
        let mut queue = VecDeque::from([GROUND]);
        while let Some(state) = queue.pop_front() {
            let e = energy[state];
            for r in &self.records {
                let Some(other) = r.partner(state) else { continue };
                if energy.contains_key(other) {
                    continue;
                }
                let sign = if r.upper == other { 1.0 } else { -1.0 };
                energy.insert(other, e + sign * r.omega());
                order.push(other);
                queue.push_back(other);
            }
        }
        order
            .into_iter()
            .map(|l| Level {
                label: l.to_string(),
                energy: energy[l],
            })
            .collect()
    }

    pub fn level_energy(&self, label: &str) -> Result<f64> {
        self.levels()
            .into_iter()
            .find(|l| l.label == label)
            .map(|l| l.energy)
            .ok_or_else(|| Error::DataLoad(format!("level {label} not reachable from ground")))
    }

    /// Transitions driven by fields 1 (6¹S₀–6³P₁) and 2 (6³P₁–7¹S₀).
    pub fn driving_transitions(&self) -> Result<(&TransitionRecord, &TransitionRecord)> {
        Ok((
            self.transition(GROUND, INTERMEDIATE)?,
            self.transition(INTERMEDIATE, TARGET)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowDeviation {
    pub transition: String,
    pub dipole_table: f64,
    /// Dipole implied by A, in 10⁻³⁰ C·m.
    pub dipole_from_a: f64,
    /// `d_table/d_from_A − 1`.
    pub deviation: f64,
    /// `A_from_d/A_table − 1`.
    pub deviation_a: f64,
    pub within_tolerance: bool,
}

/// Per-row Einstein-relation consistency of tabulated dipoles.
pub fn validate_table(records: &[TransitionRecord]) -> Vec<RowDeviation> {
    records
        .iter()
        .map(|r| {
            let d_a = r.dipole_from_einstein() / DIPOLE_UNIT;
            let dev = r.dipole / d_a - 1.0;
            let dev_a = r.einstein_from_dipole() / (r.einstein_a * EINSTEIN_UNIT) - 1.0;
            RowDeviation {
                transition: r.label(),
                dipole_table: r.dipole,
                dipole_from_a: d_a,
                deviation: dev,
                deviation_a: dev_a,
                within_tolerance: dev.abs() < CONSISTENCY_TOLERANCE,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_checksum_and_rows() {
        let data = MercuryData::shipped();
        assert_eq!(data.records.len(), 8);
        assert_eq!(data.checksum_ok, Some(true));
    }

    #[test]
    fn einstein_consistency() {
        let data = MercuryData::shipped();
        let rows = validate_table(&data.records);
        assert!(rows.iter().all(|r| r.within_tolerance), "{rows:#?}");
        let p1 = rows.iter().find(|r| r.transition == "6^1P_1->6^1S_0").unwrap();
        assert!((p1.dipole_from_a - 12.9).abs() < 0.1);
        let p3 = rows.iter().find(|r| r.transition == "6^3P_1->6^1S_0").unwrap();
        assert!((p3.dipole_from_a - 2.15).abs() < 0.01);
    }

    #[test]
    fn doubled_dipole_is_flagged() {
        let mut data = MercuryData::shipped();
        data.records[2].dipole *= 2.0;
        let rows = validate_table(&data.records);
        assert!(!rows[2].within_tolerance);
        assert!((rows[2].deviation_a - 3.0).abs() < 0.01);
        assert!((rows[2].deviation - 1.0).abs() < 0.01);
    }

    #[test]
    fn missing_row_is_load_error() {
        let text: String = SHIPPED_TABLE
            .lines()
            .filter(|l| !l.starts_with("9^1P_1   7^1S_0"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(matches!(MercuryData::parse(&text), Err(Error::DataLoad(_))));
    }

    #[test]
    fn corrupted_row_fails_checksum_but_parses() {
        let text = SHIPPED_TABLE.replace("12.94", "25.88");
        let data = MercuryData::parse(&text).unwrap();
        assert_eq!(data.checksum_ok, Some(false));
    }

    #[test]
    fn target_energy_two_routes_agree() {
        let data = MercuryData::shipped();
        let via_triplet = angular_frequency(253.728) + angular_frequency(407.898);
        let via_singlet = angular_frequency(184.950) + angular_frequency(1014.254);
        let e = data.level_energy(TARGET).unwrap();
        assert!((e - via_triplet).abs() / e < 1e-5);
        assert!((e - via_singlet).abs() / e < 1e-5);
        // two-photon wavelength of the ladder (ω₁ + ω₂ ≈ 1.20e16 s⁻¹)
        assert!((e / 1.20e16 - 1.0).abs() < 0.01);
    }
}
