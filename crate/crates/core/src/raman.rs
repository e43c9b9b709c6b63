//! Raman (Λ-system) photon source after adiabatic elimination of the
//! intermediate level.
//!
//! In the frame of the drive laser the effective two-level Hamiltonian is
//!
//! ```text
//! H = Σ Δ_ci a_i†a_i + Δ_c1 b†b − |Ω(t)|²/(4δ) |g⟩⟨g|
//!     − |g|²/δ (a_1†a_1 + b†b) |e⟩⟨e|
//!     − [g*Ω/(2δ) |g⟩⟨e| a_1 + gΩ*/(2δ) |e⟩⟨g| a_1†]
//!     − [gΩ*/(2δ) |g⟩⟨e| b   + g*Ω/(2δ) |e⟩⟨g| b†]
//! ```
//!
//! The basis mirrors [`crate::model`], with slot 0 now holding the atom in
//! `|g⟩` and no photons (the initial state); photon slots carry the atom in
//! `|e⟩`. The Stark shift on photon slots only applies to ring 1, the only
//! ring the atom sees.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{check_grid, TrajectoryResult};
use crate::error::{CascadeError, Result};
use crate::integrate::{self, Generator};
use crate::model::{build_cascade, ArraySpec, CascadeOperators, StateVector, MODE_A1_SLOT, MODE_B_SLOT};
use crate::spectra::OutputChannel;

/// Slot of `|g, vacuum⟩`.
pub const GROUND_SLOT: usize = 0;

/// Threshold on `Ω₀/(2|δ|)` and `|g|/|δ|` above which the elimination is
/// flagged as questionable.
pub const ADIABATIC_LIMIT: f64 = 0.25;

/// Drive envelope `Ω(t)` (real).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Pulse {
    /// `Ω₀ exp(−(t − t₀)²/(2τ_L²))`; `center` defaults to `3τ_L` so the run
    /// starts with negligible drive.
    Gaussian {
        peak: f64,
        width: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    Constant { value: f64 },
}

impl Pulse {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Pulse::Gaussian { peak, width, center } => {
                let x = (t - center.unwrap_or(3.0 * width)) / width;
                peak * (-0.5 * x * x).exp()
            }
            Pulse::Constant { value } => value,
        }
    }

    /// `max_t |Ω(t)|`.
    pub fn peak(&self) -> f64 {
        match *self {
            Pulse::Gaussian { peak, .. } => peak.abs(),
            Pulse::Constant { value } => value.abs(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Pulse::Gaussian { peak, width, center } => {
                if !peak.is_finite() {
                    return Err(CascadeError::invalid("pulse.peak", "not finite"));
                }
                if !(width.is_finite() && width > 0.0) {
                    return Err(CascadeError::invalid(
                        "pulse.width",
                        format!("must be positive, got {width}"),
                    ));
                }
                if center.is_some_and(|c| !c.is_finite()) {
                    return Err(CascadeError::invalid("pulse.center", "not finite"));
                }
            }
            Pulse::Constant { value } => {
                if !value.is_finite() {
                    return Err(CascadeError::invalid("pulse.value", "not finite"));
                }
            }
        }
        Ok(())
    }
}

fn default_true() -> bool {
    true
}

/// Raman source driving `delta_c.len() − 1` empty rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanSpec {
    /// Cavity coupling on the `|i⟩ ↔ |e⟩` leg.
    pub g: Complex64,
    /// `δ = ω_i − ω_g − ω_L`.
    pub delta_raman: f64,
    /// `Δ_ci = ω_ci − ω_L` per ring.
    pub delta_c: Vec<f64>,
    pub kappa: Vec<f64>,
    pub pulse: Pulse,
    /// Include the two AC-Stark terms. Switching them off is only useful for
    /// comparing against the plain two-level dynamics.
    #[serde(default = "default_true")]
    pub stark_shifts: bool,
}

impl RamanSpec {
    pub fn n_cavities(&self) -> usize {
        self.kappa.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_raman.is_finite() && self.delta_raman != 0.0) {
            return Err(CascadeError::invalid(
                "delta_raman",
                format!("must be finite and non-zero, got {}", self.delta_raman),
            ));
        }
        if self.kappa.is_empty() {
            return Err(CascadeError::invalid("kappa", "need at least one ring"));
        }
        if self.delta_c.len() != self.kappa.len() {
            return Err(CascadeError::invalid(
                "delta_c",
                format!("expected {} entries, got {}", self.kappa.len(), self.delta_c.len()),
            ));
        }
        self.pulse.validate()?;
        self.as_array_spec().validate()
    }

    /// Warnings for parameters outside the adiabatic-elimination regime.
    pub fn adiabaticity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d = self.delta_raman.abs();
        let drive = self.pulse.peak() / (2.0 * d);
        if drive > ADIABATIC_LIMIT {
            out.push(format!(
                "pulse peak / (2|delta_raman|) = {drive:.3} exceeds {ADIABATIC_LIMIT}; adiabatic elimination is questionable"
            ));
        }
        let cav = self.g.norm() / d;
        if cav > ADIABATIC_LIMIT {
            out.push(format!(
                "|g| / |delta_raman| = {cav:.3} exceeds {ADIABATIC_LIMIT}; adiabatic elimination is questionable"
            ));
        }
        out
    }

    /// Photon part of the system as an uncoupled chain (atom slot at zero energy).
    fn as_array_spec(&self) -> ArraySpec {
        let first = self.delta_c.first().copied().unwrap_or(0.0);
        ArraySpec::chain(Complex64::new(0.0, 0.0), first, self.kappa.clone(), self.delta_c.clone())
    }
}

/// Effective couplings `(g*Ω(t)/(2δ), gΩ(t)/(2δ))` for the `a1` and `b` legs.
pub fn effective_coupling(spec: &RamanSpec, t: f64) -> Result<(Complex64, Complex64)> {
    if spec.delta_raman == 0.0 || !spec.delta_raman.is_finite() {
        return Err(CascadeError::invalid("delta_raman", "must be finite and non-zero"));
    }
    let s = spec.pulse.at(t) / (2.0 * spec.delta_raman);
    Ok((spec.g.conj() * s, spec.g * s))
}

/// Time-dependent `h_nh(t)` and jump vectors of the Raman cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanCascade {
    spec: RamanSpec,
    photons: CascadeOperators,
    rate_scale: f64,
}

impl RamanCascade {
    pub fn spec(&self) -> &RamanSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.photons.dim()
    }

    pub fn jump_a(&self) -> ArrayView1<'_, Complex64> {
        self.photons.jump_a()
    }

    pub fn jump_b(&self) -> ArrayView1<'_, Complex64> {
        self.photons.jump_b()
    }

    /// `|g, vacuum⟩`.
    pub fn ground_state(&self) -> StateVector {
        StateVector::excited_atom(self.spec.n_cavities())
    }

    /// Step bound: `0.01 / (fastest rate)`, and at most `τ_L / 100` for a
    /// Gaussian pulse.
    pub fn max_step(&self) -> f64 {
        let base = 0.01 / self.rate_scale;
        match self.spec.pulse {
            Pulse::Gaussian { width, .. } => base.min(width / 100.0),
            Pulse::Constant { .. } => base,
        }
    }

    pub fn h_nh(&self, t: f64) -> Array2<Complex64> {
        let n = self.dim();
        let mut buf = vec![Complex64::default(); n * n];
        self.write_h(t, &mut buf);
        Array2::from_shape_vec((n, n), buf).expect("square")
    }
}

impl Generator for RamanCascade {
    fn dim(&self) -> usize {
        RamanCascade::dim(self)
    }

    fn write_h(&self, t: f64, out: &mut [Complex64]) {
        let n = self.dim();
        out.iter_mut()
            .zip(self.photons.h_nh().iter())
            .for_each(|(o, h)| *o = *h);
        let delta = self.spec.delta_raman;
        let omega = self.spec.pulse.at(t);
        if self.spec.stark_shifts {
            out[GROUND_SLOT * n + GROUND_SLOT] += -omega * omega / (4.0 * delta);
        }
        let s = omega / (2.0 * delta);
        let g = self.spec.g;
        out[GROUND_SLOT * n + MODE_A1_SLOT] = -g.conj() * s;
        out[MODE_A1_SLOT * n + GROUND_SLOT] = -g * s;
        out[GROUND_SLOT * n + MODE_B_SLOT] = -g * s;
        out[MODE_B_SLOT * n + GROUND_SLOT] = -g.conj() * s;
    }

    fn time_dependent(&self) -> bool {
        true
    }

    fn jump_a(&self) -> ArrayView1<'_, Complex64> {
        self.photons.jump_a()
    }

    fn jump_b(&self) -> ArrayView1<'_, Complex64> {
        self.photons.jump_b()
    }
}

impl OutputChannel for RamanCascade {
    fn output_jump(&self) -> ArrayView1<'_, Complex64> {
        self.photons.jump_a()
    }
}

/// Build the Raman source with `n_empty` downstream rings; `delta_c` and
/// `kappa` must list `n_empty + 1` rings.
pub fn build_raman_cascade(spec: &RamanSpec, n_empty: usize) -> Result<RamanCascade> {
    spec.validate()?;
    if spec.n_cavities() != n_empty + 1 {
        return Err(CascadeError::invalid(
            "kappa",
            format!("expected {} rings for {n_empty} empty ones, got {}", n_empty + 1, spec.n_cavities()),
        ));
    }
    let photons = build_cascade(&spec.as_array_spec())?;
    let mut h = photons.h_nh().clone();
    if spec.stark_shifts {
        let shift = spec.g.norm_sqr() / spec.delta_raman;
        h[[MODE_A1_SLOT, MODE_A1_SLOT]] -= shift;
        h[[MODE_B_SLOT, MODE_B_SLOT]] -= shift;
    }
    let jump_a: Array1<Complex64> = photons.jump_a().to_owned();
    let jump_b: Array1<Complex64> = photons.jump_b().to_owned();
    let d = spec.delta_raman.abs();
    let peak = spec.pulse.peak();
    let kappa_max = spec.kappa.iter().cloned().fold(0.0, f64::max);
    let mut rate_scale = kappa_max.max(spec.g.norm() * peak / (2.0 * d));
    if spec.stark_shifts {
        rate_scale = rate_scale.max(peak * peak / (4.0 * d)).max(spec.g.norm_sqr() / d);
    }
    let photons = CascadeOperators::from_parts(h, jump_a, jump_b, photons.rate_scale());
    Ok(RamanCascade {
        spec: spec.clone(),
        photons,
        rate_scale,
    })
}

/// Integrate from `|g, vacuum⟩` at `t = 0` to `t_end`.
pub fn run_raman(spec: &RamanSpec, n_empty: usize, t_end: f64, dt: f64) -> Result<TrajectoryResult> {
    let cascade = build_raman_cascade(spec, n_empty)?;
    evolve_raman(&cascade, t_end, dt)
}

/// As [`run_raman`] for an already built cascade.
pub fn evolve_raman(cascade: &RamanCascade, t_end: f64, dt: f64) -> Result<TrajectoryResult> {
    check_grid(dt, t_end)?;
    let max = cascade.max_step();
    if dt > max * (1.0 + 1e-9) {
        return Err(CascadeError::StepTooLarge { dt, max });
    }
    let steps = integrate::step_count(t_end, dt);
    let psi0 = cascade.ground_state();
    let run = integrate::rk4(cascade, psi0.amplitudes(), 0.0, steps, dt)?;
    Ok(TrajectoryResult::from_integrated(run))
}
