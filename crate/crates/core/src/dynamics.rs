//! No-jump evolution, detection probabilities, and a Monte-Carlo jump sampler.
//!
//! With a single excitation and no drive there is at most one jump, and it
//! always lands in the dark ground state. The ensemble density operator is
//! therefore `|ψ̃⟩⟨ψ̃| + P(t)|g,0⟩⟨g,0|`, so integrating the unnormalized
//! `ψ̃` once gives every population exactly; no trajectory averaging is
//! needed. [`sample_trajectories`] exists to cross-check that construction.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CascadeError, Result};
use crate::integrate::{self, Generator};
use crate::model::{output_amplitude_b, CascadeOperators, StateVector};

impl Generator for CascadeOperators {
    fn dim(&self) -> usize {
        CascadeOperators::dim(self)
    }

    fn write_h(&self, _t: f64, out: &mut [Complex64]) {
        out.iter_mut()
            .zip(self.h_nh().iter())
            .for_each(|(o, h)| *o = *h);
    }

    fn time_dependent(&self) -> bool {
        false
    }

    fn jump_a(&self) -> ArrayView1<'_, Complex64> {
        CascadeOperators::jump_a(self)
    }

    fn jump_b(&self) -> ArrayView1<'_, Complex64> {
        CascadeOperators::jump_b(self)
    }
}

/// Sampled no-jump evolution on a uniform grid.
///
/// Times are in the same units as the inverse rates in the `ArraySpec` (the
/// scenarios use `1/κ₁`).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub times: Array1<f64>,
    /// `times.len() × dim` amplitudes of the unnormalized state.
    pub amplitudes: Array2<Complex64>,
    /// `|c_i(t)|²` per basis slot.
    pub p_basis: Array2<f64>,
    /// Cumulative probability that D_a has clicked by `t`.
    pub p_det_a: Array1<f64>,
    /// Cumulative probability that D_b has clicked by `t`.
    pub p_det_b: Array1<f64>,
}

impl TrajectoryResult {
    pub(crate) fn from_integrated(run: integrate::Integrated) -> Self {
        let p_basis = run.amplitudes.mapv(|c| c.norm_sqr());
        TrajectoryResult {
            times: Array1::from(run.times),
            amplitudes: run.amplitudes,
            p_basis,
            p_det_a: Array1::from(run.p_det_a),
            p_det_b: Array1::from(run.p_det_b),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.ncols()
    }

    /// Grid step (0 for a single-point grid).
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn state_at(&self, index: usize) -> StateVector {
        StateVector::new(self.amplitudes.row(index).to_owned())
    }

    /// `‖ψ̃(t)‖²`, the probability that no click has happened yet.
    pub fn norm_squared(&self) -> Array1<f64> {
        self.p_basis.sum_axis(ndarray::Axis(1))
    }

    /// Largest `|‖ψ̃‖² + p_det_a + p_det_b − 1|` over the grid.
    pub fn conservation_defect(&self) -> f64 {
        self.norm_squared()
            .iter()
            .zip(self.p_det_a.iter().zip(self.p_det_b.iter()))
            .map(|(n, (a, b))| (n + a + b - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `jump · ψ̃(t)` along the grid.
    pub fn output_series(&self, jump: ArrayView1<'_, Complex64>) -> Array1<Complex64> {
        self.amplitudes.dot(&jump)
    }

    /// Grid index of time `t`, if it lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let dt = self.dt();
        if self.times.is_empty() {
            return None;
        }
        if dt == 0.0 {
            return ((t - self.times[0]).abs() < 1e-12).then_some(0);
        }
        let x = (t - self.times[0]) / dt;
        let k = x.round();
        if k < 0.0 || (x - k).abs() > 1e-6 || k as usize >= self.times.len() {
            return None;
        }
        Some(k as usize)
    }

    /// Populations of one slot over time.
    pub fn population(&self, slot: usize) -> Array1<f64> {
        self.p_basis.column(slot).to_owned()
    }
}

pub(crate) fn check_grid(dt: f64, t_end: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CascadeError::invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(CascadeError::invalid("t_end", format!("must be non-negative, got {t_end}")));
    }
    Ok(())
}

pub(crate) fn check_initial(initial: &StateVector, dim: usize) -> Result<()> {
    if initial.dim() != dim {
        return Err(CascadeError::DimensionMismatch {
            expected: dim,
            got: initial.dim(),
        });
    }
    let norm = initial.norm_squared();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(CascadeError::invalid(
            "initial",
            format!("state must be normalized, |ψ|² = {norm}"),
        ));
    }
    Ok(())
}

/// Integrate `i dψ̃/dt = h_nh ψ̃` from `t = 0` to `t_end` with classical RK4.
///
/// `dt` must satisfy `dt ≤ 0.01 · min(1/κ_i, 1/|g|)`. The detection
/// probabilities `∫ Π_{a,b} dt` are advanced inside the same RK4 step so
/// that `‖ψ̃‖² + p_det_a + p_det_b = 1` holds to the integrator's order.
pub fn evolve(
    ops: &CascadeOperators,
    initial: &StateVector,
    t_end: f64,
    dt: f64,
) -> Result<TrajectoryResult> {
    check_grid(dt, t_end)?;
    let max = ops.max_step();
    if dt > max * (1.0 + 1e-9) {
        return Err(CascadeError::StepTooLarge { dt, max });
    }
    check_initial(initial, ops.dim())?;
    let steps = integrate::step_count(t_end, dt);
    let run = integrate::rk4(ops, initial.amplitudes(), 0.0, steps, dt)?;
    Ok(TrajectoryResult::from_integrated(run))
}

/// Instantaneous click rates `(Π_a, Π_b) = (|J_a·ψ|², |J_b·ψ|²)`.
pub fn jump_rates(state: &StateVector, ops: &CascadeOperators) -> Result<(f64, f64)> {
    let a = crate::model::output_amplitude_a(state, ops)?;
    let b = output_amplitude_b(state, ops)?;
    Ok((a.norm_sqr(), b.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub detector: Detector,
}

/// Outcome of `n_traj` sampled trajectories. `None` means no click before `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSample {
    pub t_end: f64,
    pub jumps: Vec<Option<JumpRecord>>,
}

/// Empirical jump-time densities (clicks per trajectory per unit time).
#[derive(Debug, Clone, PartialEq)]
pub struct JumpHistogram {
    pub edges: Vec<f64>,
    pub density_a: Vec<f64>,
    pub density_b: Vec<f64>,
}

impl JumpSample {
    pub fn n_traj(&self) -> usize {
        self.jumps.len()
    }

    pub fn clicks(&self, detector: Detector) -> usize {
        self.jumps
            .iter()
            .filter(|j| matches!(j, Some(r) if r.detector == detector))
            .count()
    }

    pub fn click_fraction(&self, detector: Detector) -> f64 {
        self.clicks(detector) as f64 / self.n_traj() as f64
    }

    /// Fraction of trajectories whose click at `detector` happened before `t`.
    pub fn cumulative_fraction(&self, detector: Detector, t: f64) -> f64 {
        let n = self
            .jumps
            .iter()
            .filter(|j| matches!(j, Some(r) if r.detector == detector && r.time <= t))
            .count();
        n as f64 / self.n_traj() as f64
    }

    /// Histogram on `n_bins` equal bins over `[0, t_end]`.
    pub fn histogram(&self, n_bins: usize) -> JumpHistogram {
        let n_bins = n_bins.max(1);
        let width = self.t_end / n_bins as f64;
        let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * width).collect();
        let mut counts_a = vec![0usize; n_bins];
        let mut counts_b = vec![0usize; n_bins];
        for rec in self.jumps.iter().flatten() {
            let bin = ((rec.time / width) as usize).min(n_bins - 1);
            match rec.detector {
                Detector::A => counts_a[bin] += 1,
                Detector::B => counts_b[bin] += 1,
            }
        }
        let norm = self.n_traj() as f64 * width;
        JumpHistogram {
            edges,
            density_a: counts_a.iter().map(|&c| c as f64 / norm).collect(),
            density_b: counts_b.iter().map(|&c| c as f64 / norm).collect(),
        }
    }
}

/// Bin-averaged click densities implied by a deterministic trajectory,
/// `(p_det(t_hi) − p_det(t_lo)) / (t_hi − t_lo)` for each bin.
pub fn expected_density(traj: &TrajectoryResult, edges: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let times = traj.times.as_slice().expect("contiguous");
    let pa = traj.p_det_a.as_slice().expect("contiguous");
    let pb = traj.p_det_b.as_slice().expect("contiguous");
    let mut da = Vec::with_capacity(edges.len().saturating_sub(1));
    let mut db = Vec::with_capacity(edges.len().saturating_sub(1));
    for w in edges.windows(2) {
        let span = w[1] - w[0];
        da.push((crate::series::interp(times, pa, w[1]) - crate::series::interp(times, pa, w[0])) / span);
        db.push((crate::series::interp(times, pb, w[1]) - crate::series::interp(times, pb, w[0])) / span);
    }
    (da, db)
}

/// Draw `n_traj` quantum-jump trajectories.
///
/// Every trajectory follows the same no-jump evolution until it jumps, so the
/// evolution is integrated once. Trajectory `i` draws `u ~ U(0,1)` from its
/// own ChaCha8 stream `(seed, i)` and jumps when the cumulative click
/// probability `1 − ‖ψ̃(t)‖²` first reaches `u`; the detector is then chosen
/// in proportion to the two click probabilities accrued over that step.
/// Results do not depend on the number of worker threads.
pub fn sample_trajectories(
    ops: &CascadeOperators,
    initial: &StateVector,
    t_end: f64,
    dt: f64,
    n_traj: usize,
    seed: u64,
) -> Result<JumpSample> {
    if n_traj == 0 {
        return Err(CascadeError::invalid("n_traj", "must be at least 1"));
    }
    let traj = evolve(ops, initial, t_end, dt)?;
    Ok(sample_from(&traj, n_traj, seed))
}

pub(crate) fn sample_from(traj: &TrajectoryResult, n_traj: usize, seed: u64) -> JumpSample {
    let pa = &traj.p_det_a;
    let pb = &traj.p_det_b;
    let total: Vec<f64> = pa.iter().zip(pb.iter()).map(|(a, b)| a + b).collect();
    let times = &traj.times;
    let last = *total.last().unwrap_or(&0.0);

    let jumps = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            if u >= last {
                return None;
            }
            let k = total.partition_point(|&x| x <= u).max(1);
            let (lo, hi) = (total[k - 1], total[k]);
            let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.0 };
            let time = times[k - 1] + frac * (times[k] - times[k - 1]);
            let inc_a = pa[k] - pa[k - 1];
            let inc_b = pb[k] - pb[k - 1];
            let share_a = if inc_a + inc_b > 0.0 {
                inc_a / (inc_a + inc_b)
            } else {
                0.5
            };
            let detector = if v < share_a { Detector::A } else { Detector::B };
            Some(JumpRecord { time, detector })
        })
        .collect();

    JumpSample {
        t_end: *times.last().unwrap_or(&0.0),
        jumps,
    }
}
