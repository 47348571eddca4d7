//! Time integration of `i dC/dt = H(t) C`.
//!
//! Each step applies the exact exponential of the Hamiltonian sampled at the
//! step midpoint, built from its eigensystem, so the norm is conserved to
//! rounding and the scheme is second order in the envelope variation.

use std::io::Write;

use serde::Serialize;

use crate::adiabatic::{track_adiabatic, StateVector};
use crate::eigen::{eigensystem, inner, AdiabaticFrame};
use crate::hamiltonian::HermitianMatrix3;
use crate::protocols::ScenarioConfig;
use crate::{Error, Result, Warning, C64};

/// Stability bound on `dt·‖H‖` accepted by [`step`].
pub const STEP_BOUND: f64 = 0.5;
/// Envelopes above this fraction of their peak at the grid end raise a warning.
pub const END_ACTIVITY: f64 = 1e-12;

/// Uniform time grid in ns. The step actually taken is `(end − start)/n`
/// with `n = ⌈(end − start)/dt⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, dt: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && dt.is_finite()) {
            return Err(Error::NonFinite("time grid"));
        }
        if start >= end {
            return Err(Error::InvalidGrid(format!("start {start} >= end {end}")));
        }
        if dt <= 0.0 {
            return Err(Error::InvalidGrid(format!("dt must be > 0, got {dt}")));
        }
        if (end - start) / dt < 10.0 {
            return Err(Error::InvalidGrid(format!(
                "fewer than 10 steps: span {} / dt {dt}",
                end - start
            )));
        }
        Ok(TimeGrid { start, end, dt })
    }

    pub fn steps(&self) -> usize {
        ((self.end - self.start) / self.dt - 1e-9).ceil() as usize
    }

    pub fn step_size(&self) -> f64 {
        (self.end - self.start) / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps() {
            self.end
        } else {
            self.start + k as f64 * self.step_size()
        }
    }

    /// Same span with the step halved.
    pub fn refined(&self) -> Self {
        TimeGrid {
            dt: self.step_size() / 2.0,
            ..*self
        }
    }
}

/// Advance `state` by `dt` under the constant Hamiltonian `h_mid`.
pub fn step(state: &StateVector, h_mid: &HermitianMatrix3, dt: f64) -> Result<StateVector> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveStep(dt));
    }
    let frame = eigensystem(h_mid);
    apply_exponential(state, &frame, dt)
}

fn apply_exponential(state: &StateVector, frame: &AdiabaticFrame, dt: f64) -> Result<StateVector> {
    let spectral = frame.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if dt * spectral >= STEP_BOUND {
        return Err(Error::StepTooLarge(dt * spectral));
    }
    let mut out = [C64::default(); 3];
    for k in 0..3 {
        let v = &frame.vectors[k];
        let amp = inner(v, &state.0) * C64::from_polar(1.0, -frame.values[k] * dt);
        for (o, x) in out.iter_mut().zip(v) {
            *o += amp * x;
        }
    }
    Ok(StateVector(out))
}

/// Sampled solution of one scenario.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub populations: Vec<[f64; 3]>,
    /// Continuity-ordered adiabatic frames at each sample.
    pub frames: Vec<AdiabaticFrame>,
    /// `|⟨Φ_k|Ψ⟩|²` per sample, in frame slot order.
    pub overlaps: Vec<[f64; 3]>,
    /// Largest `|‖Ψ‖ − 1|` over the run.
    pub norm_drift: f64,
    /// Time integral of the intermediate population P₂, ns.
    pub integrated_p2: f64,
    /// Largest relative envelope value at the final sample.
    pub end_activity: f64,
    pub warnings: Vec<Warning>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&StateVector> {
        self.states.last()
    }

    /// CSV with columns `t, ReC₁, ImC₁, …, P₁..P₃, λ₋, λ₀, λ₊, overlaps`,
    /// 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,p1,p2,p3,lambda_minus,lambda_zero,lambda_plus,overlap_minus,overlap_zero,overlap_plus"
        )?;
        for i in 0..self.len() {
            let c = &self.states[i].0;
            let row = [
                self.times[i],
                c[0].re,
                c[0].im,
                c[1].re,
                c[1].im,
                c[2].re,
                c[2].im,
                self.populations[i][0],
                self.populations[i][1],
                self.populations[i][2],
                self.frames[i].values[0],
                self.frames[i].values[1],
                self.frames[i].values[2],
                self.overlaps[i][0],
                self.overlaps[i][1],
                self.overlaps[i][2],
            ];
            let line: Vec<String> = row.iter().map(|x| fmt12(*x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Twelve significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    // Normalise negative zero so identical runs stay byte-identical.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Integrate `scenario` over `grid`, recording every step.
pub fn propagate(scenario: &ScenarioConfig, grid: &TimeGrid) -> Result<Trajectory> {
    let n = grid.steps();
    let h = grid.step_size();
    let mut state = scenario.initial;
    let mut frame = {
        let f = eigensystem(&scenario.hamiltonian_at(grid.start));
        track_adiabatic(&f, &f)
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        populations: Vec::with_capacity(n + 1),
        frames: Vec::with_capacity(n + 1),
        overlaps: Vec::with_capacity(n + 1),
        norm_drift: 0.0,
        integrated_p2: 0.0,
        end_activity: 0.0,
        warnings: Vec::new(),
    };
    record(&mut traj, grid.start, &state, &frame);
    for k in 0..n {
        let t0 = grid.time(k);
        let mid = scenario.hamiltonian_at(t0 + 0.5 * h);
        state = step(&state, &mid, h)?;
        let t1 = grid.time(k + 1);
        frame = track_adiabatic(&frame, &eigensystem(&scenario.hamiltonian_at(t1)));
        let p2_prev = traj.populations.last().map_or(0.0, |p| p[1]);
        record(&mut traj, t1, &state, &frame);
        traj.integrated_p2 += 0.5 * h * (p2_prev + state.populations()[1]);
    }
    traj.end_activity = scenario.activity_at(grid.end);
    if traj.end_activity > END_ACTIVITY {
        traj.warnings.push(Warning::EnvelopesActive {
            time: grid.end,
            relative: traj.end_activity,
        });
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, t: f64, state: &StateVector, frame: &AdiabaticFrame) {
    traj.times.push(t);
    traj.states.push(*state);
    traj.populations.push(state.populations());
    traj.frames.push(*frame);
    traj.overlaps.push(frame.overlaps(&state.0));
    traj.norm_drift = traj.norm_drift.max((state.norm() - 1.0).abs());
}

/// Final state of `scenario` without diagnostics; used by sweeps.
pub fn evolve(scenario: &ScenarioConfig, grid: &TimeGrid) -> Result<StateVector> {
    let n = grid.steps();
    let h = grid.step_size();
    let mut state = scenario.initial;
    for k in 0..n {
        let mid = scenario.hamiltonian_at(grid.time(k) + 0.5 * h);
        state = step(&state, &mid, h)?;
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalPopulations {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Envelopes had not returned to zero at the last sample.
    pub envelopes_active: bool,
}

impl FinalPopulations {
    pub fn as_array(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }
}

pub fn final_populations(traj: &Trajectory) -> Result<FinalPopulations> {
    let p = traj.populations.last().ok_or(Error::EmptyTrajectory)?;
    Ok(FinalPopulations {
        p1: p[0],
        p2: p[1],
        p3: p[2],
        envelopes_active: traj.end_activity > END_ACTIVITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, HamiltonianParams};

    #[test]
    fn zero_hamiltonian_is_identity() {
        let psi = StateVector([C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::default()]);
        let out = step(&psi, &HermitianMatrix3::ZERO, 0.3).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn diagonal_phase() {
        let h = HermitianMatrix3::diagonal([0.0, 2.5, 0.0]);
        let out = step(&StateVector::basis(1), &h, 0.1).unwrap();
        let want = C64::from_polar(1.0, -0.25);
        assert!((out.0[1] - want).norm() < 1e-15);
    }

    #[test]
    fn constant_rabi_oscillation() {
        let omega = 3.0;
        let h = build_hamiltonian(&HamiltonianParams {
            omega1: omega,
            ..Default::default()
        })
        .unwrap();
        let dt = 0.01;
        let mut psi = StateVector::ground();
        for k in 1..=200 {
            psi = step(&psi, &h, dt).unwrap();
            let t = k as f64 * dt;
            let p2 = (omega * t / 2.0).sin().powi(2);
            assert!((psi.populations()[1] - p2).abs() < 1e-12);
        }
    }

    #[test]
    fn step_guards() {
        let h = HermitianMatrix3::diagonal([0.0, 10.0, 0.0]);
        assert!(matches!(
            step(&StateVector::ground(), &h, 0.05),
            Err(Error::StepTooLarge(_))
        ));
        assert!(step(&StateVector::ground(), &h, 0.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 0.2).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.01).is_err());
        assert!(TimeGrid::new(0.0, 1.0, -0.01).is_err());
        let g = TimeGrid::new(0.0, 1.0, 0.03).unwrap();
        assert_eq!(g.steps(), 34);
        assert_eq!(g.time(34), 1.0);
        assert!(g.step_size() <= 0.03);
    }

    #[test]
    fn fmt_is_twelve_digits() {
        assert_eq!(fmt12(0.5), "5.00000000000e-1");
        assert_eq!(fmt12(-0.0), "0.00000000000e0");
    }
}
