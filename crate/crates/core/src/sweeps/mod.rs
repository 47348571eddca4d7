//! Parameter sweeps, eigenvalue surfaces, level lines and adiabaticity scores.
//!
//! Cells are evaluated in parallel and collected in row-major order, so the
//! output does not depend on the number of threads.

mod level;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adiabatic::{nonadiabatic_coupling, track_adiabatic};
use crate::eigen::{eigensystem, MINUS, ZERO};
use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};
use crate::propagator::{evolve, fmt12};
use crate::protocols::{make_gaussian_pair, make_sacs, GaussianPairParams, SacsParams, ScenarioConfig};
use crate::{Error, Result, TOOL_VERSION};

pub use level::level_line;

/// Couplings below this (rad/ns) count as zero in the adiabaticity score.
pub const COUPLING_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced points from `min` to `max` inclusive.
    pub fn linspace(name: &str, unit: &str, min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::NonFinite("axis bounds"));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("axis {name}: count {count} < 2")));
        }
        if max <= min {
            return Err(Error::InvalidGrid(format!("axis {name}: max {max} <= min {min}")));
        }
        let h = (max - min) / (count - 1) as f64;
        let values = (0..count)
            .map(|k| if k == count - 1 { max } else { min + k as f64 * h })
            .collect();
        Ok(Axis {
            name: name.to_string(),
            unit: unit.to_string(),
            values,
        })
    }

    pub fn from_values(name: &str, unit: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!("axis {name}: fewer than 2 points")));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!("axis {name}: not strictly increasing")));
        }
        Ok(Axis {
            name: name.to_string(),
            unit: unit.to_string(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, v: f64) -> Option<usize> {
        let tol = 1e-9 * (self.values[self.len() - 1] - self.values[0]);
        self.values.iter().position(|x| (x - v).abs() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

/// 1-D or 2-D grid with per-cell results. For 2-D grids cell `(i, j)` sits
/// at index `i·ny + j` (x-major).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub kind: String,
    pub x: Axis,
    pub y: Option<Axis>,
    pub fields: Vec<Field>,
    /// SHA-256 of the base scenario or surface parameters.
    pub scenario_hash: String,
}

impl SweepGrid {
    pub fn cells(&self) -> usize {
        self.x.len() * self.y.as_ref().map_or(1, Axis::len)
    }

    pub fn field(&self, name: &str) -> Result<&[f64]> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.values.as_slice())
            .ok_or_else(|| Error::InvalidGrid(format!("no field {name}")))
    }

    pub fn at(&self, name: &str, i: usize, j: usize) -> Result<f64> {
        let ny = self.y.as_ref().map_or(1, Axis::len);
        Ok(self.field(name)?[i * ny + j])
    }

    /// Values of `name` along x at fixed `j`.
    pub fn row(&self, name: &str, j: usize) -> Result<Vec<f64>> {
        let ny = self.y.as_ref().map_or(1, Axis::len);
        let f = self.field(name)?;
        Ok((0..self.x.len()).map(|i| f[i * ny + j]).collect())
    }

    /// One line per cell: axis coordinates then fields, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec![self.x.name.clone()];
        if let Some(y) = &self.y {
            header.push(y.name.clone());
        }
        header.extend(self.fields.iter().map(|f| f.name.clone()));
        writeln!(w, "{}", header.join(","))?;
        let ny = self.y.as_ref().map_or(1, Axis::len);
        for i in 0..self.x.len() {
            for j in 0..ny {
                let mut row = vec![fmt12(self.x.values[i])];
                if let Some(y) = &self.y {
                    row.push(fmt12(y.values[j]));
                }
                row.extend(self.fields.iter().map(|f| fmt12(f.values[i * ny + j])));
                writeln!(w, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    pub fn sidecar(&self) -> SweepMeta {
        let axis = |a: &Axis| AxisMeta {
            name: a.name.clone(),
            unit: a.unit.clone(),
            min: a.values[0],
            max: a.values[a.len() - 1],
            count: a.len(),
        };
        SweepMeta {
            kind: self.kind.clone(),
            axes: std::iter::once(axis(&self.x))
                .chain(self.y.as_ref().map(axis))
                .collect(),
            fields: self
                .fields
                .iter()
                .map(|f| FieldMeta {
                    name: f.name.clone(),
                    unit: f.unit.clone(),
                })
                .collect(),
            order: "row-major, first axis outermost".into(),
            scenario_hash: self.scenario_hash.clone(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisMeta {
    pub name: String,
    pub unit: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMeta {
    pub name: String,
    pub unit: String,
}

/// JSON sidecar describing a [`SweepGrid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub kind: String,
    pub axes: Vec<AxisMeta>,
    pub fields: Vec<FieldMeta>,
    pub order: String,
    pub scenario_hash: String,
    pub tool_version: String,
}

/// SHA-256 (hex) of the JSON serialisation of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("serialisable");
    format!("{:x}", Sha256::digest(&json))
}

fn grid2(kind: &str, x: &Axis, y: &Axis, hash: String, fields: Vec<Field>) -> SweepGrid {
    SweepGrid {
        kind: kind.to_string(),
        x: x.clone(),
        y: Some(y.clone()),
        fields,
        scenario_hash: hash,
    }
}

/// Value-sorted eigenvalues of the resonant Hamiltonian over (Ω, Δ_S).
/// With `normalize` the eigenvalues are divided by Δ₂.
pub fn eigen_surfaces(delta2: f64, omega: &Axis, stark: &Axis, normalize: bool) -> Result<SweepGrid> {
    if !delta2.is_finite() || (normalize && delta2 == 0.0) {
        return Err(Error::invalid("delta2", "must be finite and non-zero to normalise"));
    }
    let ny = stark.len();
    let cells: Vec<[f64; 3]> = (0..omega.len() * ny)
        .into_par_iter()
        .map(|k| {
            let p = HamiltonianParams::resonant(omega.values[k / ny], delta2, stark.values[k % ny]);
            build_hamiltonian(&p).map(|h| eigensystem(&h).values)
        })
        .collect::<Result<_>>()?;
    let s = if normalize { 1.0 / delta2 } else { 1.0 };
    let unit = if normalize { "delta2" } else { "rad/ns" };
    let fields = ["lambda_minus", "lambda_zero", "lambda_plus"]
        .iter()
        .enumerate()
        .map(|(n, name)| Field {
            name: name.to_string(),
            unit: unit.into(),
            values: cells.iter().map(|c| c[n] * s).collect(),
        })
        .collect();
    let hash = content_hash(&("surface", delta2, omega, stark));
    Ok(grid2("surface", omega, stark, hash, fields))
}

/// λ₀ − λ₋ of the resonant Hamiltonian over (Ω, Δ_S), in rad/ns.
pub fn gap_surface(delta2: f64, omega: &Axis, stark: &Axis) -> Result<SweepGrid> {
    let s = eigen_surfaces(delta2, omega, stark, false)?;
    let lo = s.field("lambda_minus")?;
    let mid = s.field("lambda_zero")?;
    let gap = mid.iter().zip(lo).map(|(a, b)| a - b).collect();
    Ok(grid2(
        "gap",
        omega,
        stark,
        content_hash(&("gap", delta2, omega, stark)),
        vec![Field {
            name: "gap".into(),
            unit: "rad/ns".into(),
            values: gap,
        }],
    ))
}

/// Closed-form gap λ₀ − λ₋ on the Δ_S = 0 plane: ½(√(Δ₂² + 2Ω²) − Δ₂).
pub fn gap_without_stark(delta2: f64, omega: f64) -> f64 {
    0.5 * ((delta2 * delta2 + 2.0 * omega * omega).sqrt() - delta2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    /// Time in ns for scenario paths; `None` for level lines.
    pub t: Option<f64>,
    pub omega: f64,
    pub stark: f64,
    /// λ₀ − λ₋ at the point.
    pub gap: f64,
}

/// Ordered points in the (Ω, Δ_S) plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterPath {
    pub points: Vec<PathPoint>,
}

impl ParameterPath {
    pub fn from_points(points: Vec<PathPoint>) -> Self {
        ParameterPath { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Starts and ends within `tol` of the origin.
    pub fn is_closed_loop(&self, tol: f64) -> bool {
        let near = |p: &PathPoint| p.omega.hypot(p.stark) <= tol;
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => near(a) && near(b),
            _ => false,
        }
    }

    /// Ω where the path meets Δ_S = `stark`, interpolated along the segment
    /// that crosses it; the first crossing wins.
    pub fn omega_at_stark(&self, stark: f64) -> Option<f64> {
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.stark == stark {
                return Some(a.omega);
            }
            if (a.stark - stark) * (b.stark - stark) <= 0.0 && a.stark != b.stark {
                let t = (stark - a.stark) / (b.stark - a.stark);
                return Some(a.omega + t * (b.omega - a.omega));
            }
        }
        self.points.last().filter(|p| p.stark == stark).map(|p| p.omega)
    }

    /// Mean distance from this path's points to the polyline `reference`.
    pub fn mean_distance_to(&self, reference: &ParameterPath) -> Option<f64> {
        if self.points.is_empty() || reference.points.is_empty() {
            return None;
        }
        let total: f64 = self
            .points
            .iter()
            .map(|p| distance_to_polyline((p.omega, p.stark), reference))
            .sum();
        Some(total / self.points.len() as f64)
    }
}

fn distance_to_polyline(p: (f64, f64), line: &ParameterPath) -> f64 {
    if line.points.len() == 1 {
        let q = line.points[0];
        return (p.0 - q.omega).hypot(p.1 - q.stark);
    }
    line.points
        .windows(2)
        .map(|w| {
            let (ax, ay, bx, by) = (w[0].omega, w[0].stark, w[1].omega, w[1].stark);
            let (dx, dy) = (bx - ax, by - ay);
            let l2 = dx * dx + dy * dy;
            let t = if l2 > 0.0 {
                (((p.0 - ax) * dx + (p.1 - ay) * dy) / l2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (p.0 - ax - t * dx).hypot(p.1 - ay - t * dy)
        })
        .fold(f64::INFINITY, f64::min)
}

/// System-point path of a scenario and its adiabaticity score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathScore {
    pub path: ParameterPath,
    /// max_t |⟨Φ₀|∂_tΦ₋⟩| / (λ₀ − λ₋); infinite if the gap closes while the
    /// states are coupled.
    pub score: f64,
    /// Time of the maximum.
    pub score_time: f64,
    /// Mean distance to the reference level line, when one is given.
    pub reference_distance: Option<f64>,
}

/// Sample Ω₁(t) and Δ_S(t) on the scenario's default grid and score the
/// path by the largest ratio of the Φ₀–Φ₋ coupling to their gap.
///
/// Steps into a frame where λ₀ = λ₋ exactly carry no defined coupling and
/// are skipped; steps out of such a frame are scored, so a path that starts
/// on the degeneracy and immediately mixes the states scores infinity.
pub fn scenario_path(
    scenario: &ScenarioConfig,
    reference: Option<&ParameterPath>,
) -> Result<PathScore> {
    let grid = scenario.grid(None)?;
    let n = grid.steps();
    let h = grid.step_size();
    let mut points = Vec::with_capacity(n + 1);
    let first = eigensystem(&scenario.hamiltonian_at(grid.start));
    let mut prev = track_adiabatic(&first, &first);
    let push = |points: &mut Vec<PathPoint>, t: f64, f: &crate::AdiabaticFrame| {
        let (o, _, s) = scenario.couplings_at(t);
        points.push(PathPoint {
            t: Some(t),
            omega: o,
            stark: s,
            gap: f.values[ZERO] - f.values[MINUS],
        });
    };
    push(&mut points, grid.start, &prev);
    let mut score = 0.0f64;
    let mut score_time = grid.start;
    for k in 1..=n {
        let t = grid.time(k);
        let next = track_adiabatic(&prev, &eigensystem(&scenario.hamiltonian_at(t)));
        push(&mut points, t, &next);
        let gap_next = next.values[ZERO] - next.values[MINUS];
        if gap_next.abs() > 0.0 {
            let c = nonadiabatic_coupling(&prev, &next, h)?.get(ZERO, MINUS);
            let gap = 0.5 * (gap_next + prev.values[ZERO] - prev.values[MINUS]);
            let ratio = if c <= COUPLING_FLOOR {
                0.0
            } else if gap.abs() <= 0.0 {
                f64::INFINITY
            } else {
                c / gap.abs()
            };
            if ratio > score {
                score = ratio;
                score_time = t;
            }
        }
        prev = next;
    }
    let path = ParameterPath::from_points(points);
    let reference_distance = reference.and_then(|r| path.mean_distance_to(r));
    Ok(PathScore {
        path,
        score,
        score_time,
        reference_distance,
    })
}

fn population_fields(states: &[[f64; 3]]) -> Vec<Field> {
    ["p1", "p2", "p3"]
        .iter()
        .enumerate()
        .map(|(n, name)| Field {
            name: name.to_string(),
            unit: "1".into(),
            values: states.iter().map(|p| p[n]).collect(),
        })
        .collect()
}

fn final_pops(sc: &ScenarioConfig, dt: Option<f64>) -> Result<[f64; 3]> {
    Ok(evolve(sc, &sc.grid(dt)?)?.populations())
}

/// Final populations of `base` for each two-photon detuning Δ₂ + Δ₃ on
/// `axis` (rad/ns). Δ₂ is held fixed and Δ₃ varies.
pub fn detuning_scan(base: &ScenarioConfig, axis: &Axis, dt: Option<f64>) -> Result<SweepGrid> {
    let pops: Vec<[f64; 3]> = axis
        .values
        .par_iter()
        .map(|&d| {
            let mut sc = base.clone();
            sc.delta3 = d - sc.delta2;
            final_pops(&sc, dt)
        })
        .collect::<Result<_>>()?;
    Ok(SweepGrid {
        kind: "detuning".into(),
        x: axis.clone(),
        y: None,
        fields: population_fields(&pops),
        scenario_hash: content_hash(base),
    })
}

/// Final populations over (Stokes peak, delay) for Gaussian pulses built by
/// [`make_gaussian_pair`] from `base`.
pub fn contour_sweep(
    base: &GaussianPairParams,
    stokes: &Axis,
    delay: &Axis,
    dt: Option<f64>,
) -> Result<SweepGrid> {
    let ny = delay.len();
    let pops: Vec<[f64; 3]> = (0..stokes.len() * ny)
        .into_par_iter()
        .map(|k| {
            let p = GaussianPairParams {
                stokes: stokes.values[k / ny],
                delay: delay.values[k % ny],
                ..*base
            };
            final_pops(&make_gaussian_pair(&p)?, dt)
        })
        .collect::<Result<_>>()?;
    Ok(grid2(
        "contour",
        stokes,
        delay,
        content_hash(base),
        population_fields(&pops),
    ))
}

/// SACS with Ω₁ = r·Ω₂ for each ratio r on `ratio`. Besides the final
/// populations the grid carries `predicted` = r², the dark-state value of
/// |C₃|²/|C₁|² at the end of the sequence, and `measured` = P₃/P₁.
pub fn weight_control_scan(base: &SacsParams, ratio: &Axis, dt: Option<f64>) -> Result<SweepGrid> {
    let pops: Vec<[f64; 3]> = ratio
        .values
        .par_iter()
        .map(|&r| {
            let p = SacsParams {
                omega1: r * base.omega2,
                weight_control: true,
                ..*base
            };
            final_pops(&make_sacs(&p)?, dt)
        })
        .collect::<Result<_>>()?;
    let mut fields = population_fields(&pops);
    fields.push(Field {
        name: "predicted".into(),
        unit: "1".into(),
        values: ratio.values.iter().map(|r| r * r).collect(),
    });
    fields.push(Field {
        name: "measured".into(),
        unit: "1".into(),
        values: pops.iter().map(|p| p[2] / p[0]).collect(),
    });
    Ok(SweepGrid {
        kind: "weight-control".into(),
        x: ratio.clone(),
        y: None,
        fields,
        scenario_hash: content_hash(base),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_validation() {
        assert!(Axis::linspace("x", "1", 0.0, 1.0, 1).is_err());
        assert!(Axis::linspace("x", "1", 1.0, 1.0, 5).is_err());
        let a = Axis::linspace("x", "1", -40.0, 40.0, 41).unwrap();
        assert_eq!(a.values[20], 0.0);
        assert_eq!(a.values[40], 40.0);
        assert!(Axis::from_values("x", "1", vec![0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn limiting_slices() {
        let om = Axis::linspace("omega", "rad/ns", 0.0, 60.0, 7).unwrap();
        let st = Axis::linspace("stark", "rad/ns", 0.0, 40.0, 5).unwrap();
        let s = eigen_surfaces(20.0, &om, &st, false).unwrap();
        for j in 0..st.len() {
            let d = st.values[j];
            assert!((s.at("lambda_minus", 0, j).unwrap() + d).abs() < 1e-12);
            assert!(s.at("lambda_zero", 0, j).unwrap().abs() < 1e-12);
            assert!((s.at("lambda_plus", 0, j).unwrap() - 20.0).abs() < 1e-12);
        }
        for i in 0..om.len() {
            assert!(s.at("lambda_zero", i, 0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn optimized_point_roots() {
        let om = Axis::from_values("omega", "delta2", vec![0.0, 2.6]).unwrap();
        let st = Axis::from_values("stark", "delta2", vec![0.0, 1.0]).unwrap();
        let s = eigen_surfaces(1.0, &om, &st, true).unwrap();
        let r = (1.0f64 + 13.52).sqrt();
        assert!((s.at("lambda_minus", 1, 0).unwrap() - 0.5 * (1.0 - r)).abs() < 1e-12);
        assert!((s.at("lambda_plus", 1, 0).unwrap() - 0.5 * (1.0 + r)).abs() < 1e-12);
        let g = gap_surface(1.0, &om, &st).unwrap();
        assert!((g.at("gap", 1, 0).unwrap() - gap_without_stark(1.0, 2.6)).abs() < 1e-12);
        assert!((g.at("gap", 1, 0).unwrap() / 1.4 - 1.0).abs() < 0.1);
        assert!((g.at("gap", 0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn level_line_reaches_optimum() {
        let om = Axis::linspace("omega", "delta2", 0.0, 3.5, 101).unwrap();
        let st = Axis::linspace("stark", "delta2", 0.0, 2.0, 101).unwrap();
        let g = gap_surface(1.0, &om, &st).unwrap();
        let path = level_line(&g, "gap", 1.5, (0.0, 1.5)).unwrap();
        let end = path.omega_at_stark(0.0).unwrap();
        assert!((end - 2.739).abs() < 0.01, "{end}");
        let first = path.points[0];
        assert!(first.omega.abs() < 1e-12 && (first.stark - 1.5).abs() < 1e-9);
        assert!(matches!(level_line(&g, "gap", 10.0, (0.0, 0.0)), Err(Error::EmptyPath(_))));
    }

    #[test]
    fn constant_surface_boundary() {
        let x = Axis::linspace("x", "1", 0.0, 1.0, 4).unwrap();
        let y = Axis::linspace("y", "1", 0.0, 2.0, 3).unwrap();
        let g = grid2(
            "c",
            &x,
            &y,
            String::new(),
            vec![Field {
                name: "f".into(),
                unit: "1".into(),
                values: vec![0.7; 12],
            }],
        );
        let p = level_line(&g, "f", 0.7, (0.0, 0.0)).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.is_closed_loop(1e-12));
        assert!(level_line(&g, "f", 0.8, (0.0, 0.0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let x = Axis::linspace("x", "1", 0.0, 1.0, 2).unwrap();
        let g = SweepGrid {
            kind: "t".into(),
            x,
            y: None,
            fields: vec![Field {
                name: "p1".into(),
                unit: "1".into(),
                values: vec![1.0, 0.25],
            }],
            scenario_hash: String::new(),
        };
        let mut out = Vec::new();
        g.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "x,p1\n0.00000000000e0,1.00000000000e0\n1.00000000000e0,2.50000000000e-1\n"
        );
    }
}
