//! Closed-form amplitudes for the one- and two-ring systems and stationary
//! emission spectra.
//!
//! With `p = κ₁/4 + iΔ/2` and `α² = p² − 2|g|²`, the single-ring system has
//! poles `s± = −p ± α` and, for the atom initially excited,
//!
//! ```text
//! c_e(t) = e^{−pt} [cosh αt + p sinh(αt)/α]
//! c_1(t) = −i g* e^{−pt} sinh(αt)/α
//! c_2(t) = −i g  e^{−pt} sinh(αt)/α
//! ```
//!
//! For two identical rings the empty-ring amplitude solves
//! `ċ₃ = −(iΔ + κ/2)c₃ − κc₁`, which integrates to
//! `c₃(t) = iκ (e^{−2pt} − c_e(t)) / (2g)`.
//!
//! `cosh` and `sinh(αt)/α` are even in `α`, so the branch of the square root
//! does not matter; `α = 0` is handled through the series of `sinh(αt)/α`.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CascadeError, Result};
use crate::model::{build_cascade, chain_slot, ArraySpec, ATOM_SLOT};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pole structure of the single-ring Laplace-domain system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceSolution {
    /// Principal root `√(κ₁² + 4iκ₁Δ − 4Δ² − 32|g|²) / 4`.
    pub alpha: Complex64,
    /// `(s+, s−)`.
    pub poles: (Complex64, Complex64),
    /// `κ₁/4 + iΔ/2`.
    pub center: Complex64,
    g: Complex64,
    /// Energy of the atom slot; multiplies every amplitude by `e^{−iEt}`.
    frame_shift: f64,
}

/// `sinh(αt)/α`, continuous through `α = 0`.
fn sinh_over(alpha: Complex64, t: f64) -> Complex64 {
    let z = alpha * t;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        (Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0) * t
    } else {
        z.sinh() / alpha
    }
}

impl LaplaceSolution {
    pub fn new(kappa1: f64, delta: f64, g: Complex64) -> Self {
        let center = Complex64::new(kappa1 / 4.0, delta / 2.0);
        let disc = Complex64::new(
            kappa1 * kappa1 - 4.0 * delta * delta - 32.0 * g.norm_sqr(),
            4.0 * kappa1 * delta,
        );
        let alpha = disc.sqrt() / 4.0;
        LaplaceSolution {
            alpha,
            poles: (-center + alpha, -center - alpha),
            center,
            g,
            frame_shift: 0.0,
        }
    }

    /// Pole structure for the first ring of `spec`.
    pub fn from_spec(spec: &ArraySpec) -> Result<Self> {
        spec.validate()?;
        let mut sol = Self::new(spec.kappa[0], spec.delta_atom, spec.g);
        sol.frame_shift = spec.atom_energy();
        Ok(sol)
    }

    fn phase(&self, t: f64) -> Complex64 {
        if self.frame_shift == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            (-I * self.frame_shift * t).exp()
        }
    }

    /// `(c_e, c_1, c_2)` at time `t` for the atom initially excited.
    pub fn amplitudes(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let envelope = (-self.center * t).exp() * self.phase(t);
        let sh = sinh_over(self.alpha, t);
        let ch = (self.alpha * t).cosh();
        let ce = envelope * (ch + self.center * sh);
        let common = -I * envelope * sh;
        (ce, common * self.g.conj(), common * self.g)
    }
}

/// Closed-form `(c_e, c_1, c_2)` for the atom-cavity source.
///
/// The source amplitudes do not feel the downstream rings, so any chain
/// length is accepted; only ring 1 parameters are used.
pub fn amplitudes_single(spec: &ArraySpec, t: f64) -> Result<(Complex64, Complex64, Complex64)> {
    Ok(LaplaceSolution::from_spec(spec)?.amplitudes(t))
}

/// Closed-form amplitude of the photon in ring 2 for two identical rings.
pub fn amplitude_cavity2(spec: &ArraySpec, t: f64) -> Result<Complex64> {
    spec.validate()?;
    if spec.n_cavities != 2 {
        return Err(CascadeError::Unsupported(format!(
            "closed form needs exactly two rings, got {}",
            spec.n_cavities
        )));
    }
    let (k1, k2) = (spec.kappa[0], spec.kappa[1]);
    if (k1 - k2).abs() > 1e-12 * k1.max(k2) {
        return Err(CascadeError::Unsupported(format!(
            "closed form needs equal decay rates, got {k1} and {k2}"
        )));
    }
    let (d1, d2) = (spec.delta_cavity[0], spec.delta_cavity[1]);
    if (d1 - d2).abs() > 1e-12 * d1.abs().max(d2.abs()).max(1.0) {
        return Err(CascadeError::Unsupported(format!(
            "closed form needs equal resonances, got {d1} and {d2}"
        )));
    }
    if spec.g == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // ċ₃ + 2p c₃ = −iκ ċ_e / (2g); integrating by parts against
    // c_e = e^{−pt}(cosh αt + p sinh(αt)/α) gives the form below.
    let sol = LaplaceSolution::from_spec(spec)?;
    let p = sol.center;
    let sh = sinh_over(sol.alpha, t);
    let ch = (sol.alpha * t).cosh();
    let bracket = (-p * 2.0 * t).exp() - (-p * t).exp() * (ch - p * sh);
    Ok(I * k1 * bracket * sol.phase(t) / (2.0 * spec.g))
}

/// Stationary D_a spectrum of the single ring in the small-filter form,
///
/// ```text
/// P(Δk) = 4|g|²κ₁Γ / ([4|g|² − 2x(x − Δ)]² + κ₁²x²),   x = Δk − E_atom
/// ```
///
/// where `Δk` is measured in the same frame as the cavity detunings, so the
/// bare-cavity peak sits at `x = +Δ`. This equals `Γ |Â(Δk)|²` with `Â` the
/// Fourier transform of the output amplitude; it is not the Lorentzian-
/// filtered long-time limit of the synthesized spectrum, see
/// [`filtered_stationary_spectrum`] for that.
pub fn stationary_spectrum(delta_k: f64, spec: &ArraySpec, gamma: f64) -> f64 {
    let g2 = spec.g.norm_sqr();
    if g2 == 0.0 {
        return 0.0;
    }
    let kappa = spec.kappa[0];
    let x = delta_k - spec.atom_energy();
    let a = 4.0 * g2 - 2.0 * x * (x - spec.delta_atom);
    4.0 * g2 * kappa * gamma / (a * a + kappa * kappa * x * x)
}

/// Exact `t → ∞` limit of the synthesized spectrum `N_S(t; Δk, Γ)` for the
/// whole chain, i.e. `∫₀^∞ |f(t)|² dt` where `f` is the filter amplitude
/// driven by the D_a output.
///
/// Source, chain and filter form one linear system `ẋ = Mx`, so the integral
/// is `x₀^† W x₀` with `M^†W + WM = −e_f e_f^†`, solved densely.
pub fn filtered_stationary_spectrum(delta_k: f64, spec: &ArraySpec, gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(CascadeError::invalid("gamma", format!("must be positive, got {gamma}")));
    }
    let ops = build_cascade(spec)?;
    if spec.g == Complex64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let n = ops.dim() + 1;
    let filter = n - 1;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for i in 0..ops.dim() {
        for j in 0..ops.dim() {
            m[[i, j]] = -I * ops.h_nh()[[i, j]];
        }
    }
    m[[filter, filter]] = -Complex64::new(gamma, delta_k);
    for j in 1..=spec.n_cavities {
        let slot = chain_slot(j);
        m[[filter, slot]] = gamma.sqrt() * ops.jump_a()[slot];
    }

    // Vectorized Lyapunov equation, unknown W[i][j] at i*n + j.
    let nn = n * n;
    let mut a = DMatrix::<Complex64>::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                a[(row, k * n + j)] += m[[k, i]].conj();
                a[(row, i * n + k)] += m[[k, j]];
            }
        }
    }
    let mut b = DVector::<Complex64>::zeros(nn);
    b[filter * n + filter] = Complex64::new(-1.0, 0.0);
    let w = a.lu().solve(&b).ok_or_else(|| {
        CascadeError::Unsupported("singular Lyapunov system (undamped mode)".into())
    })?;
    Ok(w[ATOM_SLOT * n + ATOM_SLOT].re)
}
