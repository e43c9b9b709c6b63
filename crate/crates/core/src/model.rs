//! Single-excitation basis and the cascaded non-Hermitian Hamiltonian.
//!
//! Basis ordering for an array of `N` rings:
//!
//! | slot      | state                                   |
//! |-----------|-----------------------------------------|
//! | 0         | atom excited, no photons                |
//! | 1         | photon in ring-1 mode `a1` (ccw)        |
//! | 2         | photon in ring-1 mode `b` (cw)          |
//! | 3..=N+1   | photon in empty ring 2..=N              |
//!
//! The forward chain is `a1, a2, ..., aN`; mode `b` leaks towards the
//! opposite detector and drives nothing.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};

pub const ATOM_SLOT: usize = 0;
pub const MODE_A1_SLOT: usize = 1;
pub const MODE_B_SLOT: usize = 2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Basis slot of the forward-chain mode of ring `j` (1-based).
pub fn chain_slot(j: usize) -> usize {
    debug_assert!(j >= 1);
    if j == 1 {
        MODE_A1_SLOT
    } else {
        j + 1
    }
}

/// Atom–cavity source plus `n_cavities - 1` empty rings.
///
/// All rates are angular frequencies in a frame rotating at the atomic
/// transition (so `delta_cavity[0] == delta_atom` in the usual setup).
/// The input-output model is only valid on timescales long compared with the
/// ring round-trip time; that is an assumption, not something checked here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub n_cavities: usize,
    /// Atom coupling to mode `a1`; mode `b` couples with the conjugate.
    pub g: Complex64,
    /// Ring-1 resonance minus atomic transition frequency.
    pub delta_atom: f64,
    pub kappa: Vec<f64>,
    pub delta_cavity: Vec<f64>,
    /// Propagation delays between neighbouring rings. Only used to shift
    /// output time axes for presentation; dynamics ignores them.
    pub tau_d: Vec<f64>,
}

impl ArraySpec {
    /// One ring containing the atom, frame at the atomic transition.
    pub fn single(g: Complex64, delta: f64, kappa: f64) -> Self {
        Self::chain(g, delta, vec![kappa], vec![delta])
    }

    /// Arbitrary chain with zero propagation delays.
    pub fn chain(g: Complex64, delta_atom: f64, kappa: Vec<f64>, delta_cavity: Vec<f64>) -> Self {
        let n = kappa.len();
        ArraySpec {
            n_cavities: n,
            g,
            delta_atom,
            kappa,
            delta_cavity,
            tau_d: vec![0.0; n.saturating_sub(1)],
        }
    }

    /// `n` rings of equal decay rate; the empty rings share one detuning.
    pub fn uniform(n: usize, g: Complex64, delta_atom: f64, kappa: f64, delta_empty: f64) -> Self {
        let mut delta_cavity = vec![delta_empty; n];
        if let Some(first) = delta_cavity.first_mut() {
            *first = delta_atom;
        }
        Self::chain(g, delta_atom, vec![kappa; n], delta_cavity)
    }

    /// Number of basis states, `N + 2`.
    pub fn dim(&self) -> usize {
        self.n_cavities + 2
    }

    /// Energy of the excited-atom slot in the chosen frame.
    pub fn atom_energy(&self) -> f64 {
        self.delta_cavity.first().copied().unwrap_or(0.0) - self.delta_atom
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_cavities;
        if n == 0 {
            return Err(CascadeError::invalid("n_cavities", "must be at least 1"));
        }
        if self.kappa.len() != n {
            return Err(CascadeError::invalid(
                "kappa",
                format!("expected {n} entries, got {}", self.kappa.len()),
            ));
        }
        if self.delta_cavity.len() != n {
            return Err(CascadeError::invalid(
                "delta_cavity",
                format!("expected {n} entries, got {}", self.delta_cavity.len()),
            ));
        }
        if self.tau_d.len() != n - 1 {
            return Err(CascadeError::invalid(
                "tau_d",
                format!("expected {} entries, got {}", n - 1, self.tau_d.len()),
            ));
        }
        for (i, &k) in self.kappa.iter().enumerate() {
            if !(k.is_finite() && k > 0.0) {
                return Err(CascadeError::invalid(
                    format!("kappa[{i}]"),
                    format!("decay rate must be positive, got {k}"),
                ));
            }
        }
        for (i, &d) in self.delta_cavity.iter().enumerate() {
            if !d.is_finite() {
                return Err(CascadeError::invalid(format!("delta_cavity[{i}]"), "not finite"));
            }
        }
        for (i, &d) in self.tau_d.iter().enumerate() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(CascadeError::invalid(
                    format!("tau_d[{i}]"),
                    format!("delay must be non-negative, got {d}"),
                ));
            }
        }
        if !(self.g.re.is_finite() && self.g.im.is_finite()) {
            return Err(CascadeError::invalid("g", "not finite"));
        }
        if !self.delta_atom.is_finite() {
            return Err(CascadeError::invalid("delta_atom", "not finite"));
        }
        Ok(())
    }
}

/// Complex amplitudes over the single-excitation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Array1<Complex64>);

impl StateVector {
    pub fn new(amplitudes: Array1<Complex64>) -> Self {
        StateVector(amplitudes)
    }

    /// Atom excited, all rings empty: the initial condition of every
    /// two-level scenario.
    pub fn excited_atom(n_cavities: usize) -> Self {
        let mut amps = Array1::zeros(n_cavities + 2);
        amps[ATOM_SLOT] = Complex64::new(1.0, 0.0);
        StateVector(amps)
    }

    /// The zero vector, i.e. all probability already in the ground state.
    pub fn vacuum(n_cavities: usize) -> Self {
        StateVector(Array1::zeros(n_cavities + 2))
    }

    pub fn amplitudes(&self) -> ArrayView1<'_, Complex64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array1<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }
}

impl From<Vec<Complex64>> for StateVector {
    fn from(v: Vec<Complex64>) -> Self {
        StateVector(Array1::from(v))
    }
}

/// Non-Hermitian Hamiltonian and the two detector jump vectors.
///
/// `h_nh = H_herm - (i/2)(Ja^† Ja + Jb^† Jb)` with `H_herm` Hermitian. The
/// cascade terms only appear below the diagonal in chain order.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeOperators {
    h_nh: Array2<Complex64>,
    jump_a: Array1<Complex64>,
    jump_b: Array1<Complex64>,
    rate_scale: f64,
}

impl CascadeOperators {
    pub(crate) fn from_parts(
        h_nh: Array2<Complex64>,
        jump_a: Array1<Complex64>,
        jump_b: Array1<Complex64>,
        rate_scale: f64,
    ) -> Self {
        CascadeOperators {
            h_nh,
            jump_a,
            jump_b,
            rate_scale,
        }
    }

    pub fn h_nh(&self) -> &Array2<Complex64> {
        &self.h_nh
    }

    /// Amplitude functional of detector D_a: `A = Σ_j √κ_j c_{a_j}`.
    pub fn jump_a(&self) -> ArrayView1<'_, Complex64> {
        self.jump_a.view()
    }

    /// Amplitude functional of detector D_b: `√κ_1 c_b`.
    pub fn jump_b(&self) -> ArrayView1<'_, Complex64> {
        self.jump_b.view()
    }

    pub fn dim(&self) -> usize {
        self.jump_a.len()
    }

    /// Largest of `max κ_i` and `|g|`; the step heuristic is `dt ≤ 0.01 / rate_scale`.
    pub fn rate_scale(&self) -> f64 {
        self.rate_scale
    }

    pub fn max_step(&self) -> f64 {
        0.01 / self.rate_scale
    }

    /// `Ja^† Ja + Jb^† Jb`.
    pub fn decay_matrix(&self) -> Array2<Complex64> {
        let n = self.dim();
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.jump_a[i].conj() * self.jump_a[j] + self.jump_b[i].conj() * self.jump_b[j]
        })
    }

    pub fn hermitian_part(&self) -> Array2<Complex64> {
        let h = &self.h_nh;
        Array2::from_shape_fn(h.dim(), |(i, j)| (h[[i, j]] + h[[j, i]].conj()) * 0.5)
    }

    /// Largest entry of `|(h - h^†) + i (Ja^†Ja + Jb^†Jb)|`; zero up to rounding.
    pub fn decomposition_defect(&self) -> f64 {
        let h = &self.h_nh;
        let d = self.decay_matrix();
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = h[[i, j]] - h[[j, i]].conj();
                worst = worst.max((lhs + I * d[[i, j]]).norm());
            }
        }
        worst
    }
}

/// Assemble `h_nh` and the jump vectors for `spec`.
pub fn build_cascade(spec: &ArraySpec) -> Result<CascadeOperators> {
    spec.validate()?;
    let n = spec.n_cavities;
    let dim = spec.dim();
    let g = spec.g;

    let mut h = Array2::<Complex64>::zeros((dim, dim));
    h[[ATOM_SLOT, ATOM_SLOT]] = Complex64::new(spec.atom_energy(), 0.0);

    // Atom exchange. Row = final state, column = initial state.
    h[[ATOM_SLOT, MODE_A1_SLOT]] = g;
    h[[MODE_A1_SLOT, ATOM_SLOT]] = g.conj();
    h[[ATOM_SLOT, MODE_B_SLOT]] = g.conj();
    h[[MODE_B_SLOT, ATOM_SLOT]] = g;

    let k1 = spec.kappa[0];
    h[[MODE_B_SLOT, MODE_B_SLOT]] = Complex64::new(spec.delta_cavity[0], -0.5 * k1);

    let mut jump_a = Array1::<Complex64>::zeros(dim);
    let mut jump_b = Array1::<Complex64>::zeros(dim);
    jump_b[MODE_B_SLOT] = Complex64::new(k1.sqrt(), 0.0);

    for j in 1..=n {
        let slot = chain_slot(j);
        let kj = spec.kappa[j - 1];
        h[[slot, slot]] = Complex64::new(spec.delta_cavity[j - 1], -0.5 * kj);
        jump_a[slot] = Complex64::new(kj.sqrt(), 0.0);
        for i in 1..j {
            let ki = spec.kappa[i - 1];
            h[[slot, chain_slot(i)]] = Complex64::new(0.0, -(ki * kj).sqrt());
        }
    }

    let kappa_max = spec.kappa.iter().cloned().fold(0.0, f64::max);
    let ops = CascadeOperators::from_parts(h, jump_a, jump_b, kappa_max.max(g.norm()));
    debug_assert!(ops.decomposition_defect() <= 1e-12 * ops.rate_scale().max(1.0));
    Ok(ops)
}

fn check_dim(state: &StateVector, ops: &CascadeOperators) -> Result<()> {
    if state.dim() != ops.dim() {
        return Err(CascadeError::DimensionMismatch {
            expected: ops.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// Output field amplitude seen by detector D_a. Input-field terms are dropped
/// since the fibre starts in vacuum.
pub fn output_amplitude_a(state: &StateVector, ops: &CascadeOperators) -> Result<Complex64> {
    check_dim(state, ops)?;
    Ok(ops.jump_a().dot(&state.amplitudes()))
}

pub(crate) fn output_amplitude_b(state: &StateVector, ops: &CascadeOperators) -> Result<Complex64> {
    check_dim(state, ops)?;
    Ok(ops.jump_b().dot(&state.amplitudes()))
}
