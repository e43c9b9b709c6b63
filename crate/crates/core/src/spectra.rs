//! Time-dependent and synthesized spectra behind a Lorentzian filter.
//!
//! The filter is one more cascaded mode driven by the output field,
//! `ḟ = −(Γ + iΔk) f + √Γ A(t)`, so `N(t) = |f(t)|²` is the counting rate
//! behind the filter. Because the conditional state holds at most one
//! excitation and the post-jump state is dark, the two-time correlation of
//! the output factorizes as `A*(t₁) A(t₂)`, and the double time integral of
//! the physical spectrum collapses to this single ODE.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryResult;
use crate::error::{CascadeError, Result};
use crate::model::CascadeOperators;
use crate::series::cumulative_trapezoid;

/// Default filter width in units of `κ₁`.
pub const DEFAULT_GAMMA: f64 = 0.25;

/// Anything with a D_a output vector to feed the filter.
pub trait OutputChannel {
    fn output_jump(&self) -> ArrayView1<'_, Complex64>;
}

impl OutputChannel for CascadeOperators {
    fn output_jump(&self) -> ArrayView1<'_, Complex64> {
        self.jump_a()
    }
}

/// Lorentzian detector of width `gamma` centered at `delta_k` (both in the
/// simulation frame, rad per unit time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub gamma: f64,
    pub delta_k: f64,
}

impl FilterSpec {
    pub fn new(gamma: f64, delta_k: f64) -> Result<Self> {
        let spec = FilterSpec { gamma, delta_k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(CascadeError::invalid(
                "gamma",
                format!("must be positive, got {}", self.gamma),
            ));
        }
        if !self.delta_k.is_finite() {
            return Err(CascadeError::invalid("delta_k", "must be finite"));
        }
        Ok(())
    }
}

/// `N` and `N_S` sampled on a Δk × t grid. Row `i` belongs to
/// `delta_k_grid[i]`, column `j` to `times[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub delta_k_grid: Array1<f64>,
    pub times: Array1<f64>,
    pub n_t: Array2<f64>,
    pub n_s: Array2<f64>,
}

impl SpectrumResult {
    /// Column index of sample time `t`, matched to within `1e-9`.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    /// Row index of the grid point closest to `delta_k`.
    pub fn nearest_delta_k(&self, delta_k: f64) -> Option<usize> {
        self.delta_k_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - delta_k).abs().total_cmp(&(b.1 - delta_k).abs()))
            .map(|(i, _)| i)
    }
}

/// Uniform grid spacing, or an error naming the first offending step.
pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(CascadeError::NonUniformGrid { index: 0, dt });
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(CascadeError::NonUniformGrid { index: i, dt });
        }
    }
    Ok(dt)
}

/// Midpoint values `A(t_i + dt/2)` from four-point Lagrange interpolation.
fn midpoints(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    if n < 2 {
        return Vec::new();
    }
    if n < 4 {
        return a.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    let s = 1.0 / 16.0;
    (0..n - 1)
        .map(|i| {
            if i == 0 {
                (a[0] * 5.0 + a[1] * 15.0 - a[2] * 5.0 + a[3]) * s
            } else if i == n - 2 {
                (a[n - 4] - a[n - 3] * 5.0 + a[n - 2] * 15.0 + a[n - 1] * 5.0) * s
            } else {
                ((a[i] + a[i + 1]) * 9.0 - a[i - 1] - a[i + 2]) * s
            }
        })
        .collect()
}

fn filter_series(a: &[Complex64], mids: &[Complex64], dt: f64, filter: &FilterSpec) -> Vec<Complex64> {
    let z = Complex64::new(filter.gamma, filter.delta_k);
    let drive = filter.gamma.sqrt();
    let mut out = Vec::with_capacity(a.len());
    let mut f = Complex64::default();
    out.push(f);
    for i in 0..a.len().saturating_sub(1) {
        let k1 = -z * f + a[i] * drive;
        let k2 = -z * (f + k1 * (0.5 * dt)) + mids[i] * drive;
        let k3 = -z * (f + k2 * (0.5 * dt)) + mids[i] * drive;
        let k4 = -z * (f + k3 * dt) + a[i + 1] * drive;
        f += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        out.push(f);
    }
    out
}

/// Filter amplitude `f(t) = √Γ ∫₀ᵗ e^{−(Γ+iΔk)(t−t′)} A(t′) dt′` on the grid
/// of `times`, which must be uniform and start where `f = 0`.
pub fn filtered_amplitude(
    times: &[f64],
    a_out: &[Complex64],
    filter: &FilterSpec,
) -> Result<Vec<Complex64>> {
    filter.validate()?;
    if times.is_empty() {
        return Err(CascadeError::EmptyGrid("times"));
    }
    if times.len() != a_out.len() {
        return Err(CascadeError::GridMismatch(format!(
            "{} times but {} samples",
            times.len(),
            a_out.len()
        )));
    }
    let dt = uniform_step(times)?;
    Ok(filter_series(a_out, &midpoints(a_out), dt, filter))
}

fn output_of<O: OutputChannel>(traj: &TrajectoryResult, ops: &O) -> Result<Vec<Complex64>> {
    let jump = ops.output_jump();
    if jump.len() != traj.dim() {
        return Err(CascadeError::DimensionMismatch {
            expected: jump.len(),
            got: traj.dim(),
        });
    }
    Ok(traj.output_series(jump).to_vec())
}

/// `N(t; Δk, Γ) = |f(t)|²` along the trajectory grid.
pub fn time_dependent_spectrum<O: OutputChannel>(
    traj: &TrajectoryResult,
    ops: &O,
    filter: &FilterSpec,
) -> Result<Array1<f64>> {
    let a = output_of(traj, ops)?;
    let times = traj.times.as_slice().expect("contiguous");
    let f = filtered_amplitude(times, &a, filter)?;
    Ok(f.iter().map(|c| c.norm_sqr()).collect())
}

/// `N_S(t; Δk, Γ) = ∫₀ᵗ N dt′` (trapezoid on the grid).
pub fn synthesized_spectrum<O: OutputChannel>(
    traj: &TrajectoryResult,
    ops: &O,
    filter: &FilterSpec,
) -> Result<Array1<f64>> {
    let n = time_dependent_spectrum(traj, ops, filter)?;
    Ok(Array1::from(cumulative_trapezoid(n.as_slice().expect("contiguous"), traj.dt())))
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| lo + i as f64 * step).collect()
        }
    }
}

/// 601 points over `[−15κ₁, 15κ₁]`.
pub fn default_delta_k_grid(kappa1: f64) -> Vec<f64> {
    linear_grid(-15.0 * kappa1, 15.0 * kappa1, 601)
}

/// `N` and `N_S` for every Δk in `delta_k_grid` at every `sample_times`
/// entry. Sample times must lie on the trajectory grid and increase
/// strictly; Δk values are independent and may come in any order. The
/// sweep runs in parallel and is identical to the sequential result.
pub fn spectrum_grid<O: OutputChannel + Sync>(
    traj: &TrajectoryResult,
    ops: &O,
    gamma: f64,
    delta_k_grid: &[f64],
    sample_times: &[f64],
) -> Result<SpectrumResult> {
    if delta_k_grid.is_empty() {
        return Err(CascadeError::EmptyGrid("delta_k_grid"));
    }
    if sample_times.is_empty() {
        return Err(CascadeError::EmptyGrid("sample_times"));
    }
    FilterSpec::new(gamma, 0.0)?;
    for &dk in delta_k_grid {
        FilterSpec::new(gamma, dk)?;
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CascadeError::invalid("sample_times", "must be strictly increasing"));
    }
    let columns = sample_times
        .iter()
        .map(|&t| {
            traj.index_of(t).ok_or_else(|| {
                CascadeError::GridMismatch(format!("sample time {t} is not on the trajectory grid"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let a = output_of(traj, ops)?;
    let times = traj.times.as_slice().expect("contiguous");
    let dt = uniform_step(times)?;
    let mids = midpoints(&a);

    let rows: Vec<(Vec<f64>, Vec<f64>)> = delta_k_grid
        .par_iter()
        .map(|&dk| {
            let f = filter_series(&a, &mids, dt, &FilterSpec { gamma, delta_k: dk });
            let n: Vec<f64> = f.iter().map(|c| c.norm_sqr()).collect();
            let ns = cumulative_trapezoid(&n, dt);
            (
                columns.iter().map(|&j| n[j]).collect(),
                columns.iter().map(|&j| ns[j]).collect(),
            )
        })
        .collect();

    let (m, k) = (delta_k_grid.len(), sample_times.len());
    let mut n_t = Array2::zeros((m, k));
    let mut n_s = Array2::zeros((m, k));
    for (i, (n, ns)) in rows.into_iter().enumerate() {
        for j in 0..k {
            n_t[[i, j]] = n[j];
            n_s[[i, j]] = ns[j];
        }
    }
    Ok(SpectrumResult {
        delta_k_grid: Array1::from(delta_k_grid.to_vec()),
        times: Array1::from(sample_times.to_vec()),
        n_t,
        n_s,
    })
}
