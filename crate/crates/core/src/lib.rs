//! Single-photon propagation through cascaded ring-resonator arrays.
//!
//! An atom in the first ring emits one photon into two counter-propagating
//! modes; the forward mode drives a chain of empty rings unidirectionally.
//! Between detector clicks the state evolves under a non-Hermitian
//! Hamiltonian restricted to the single-excitation subspace, and because the
//! only post-jump state is the dark ground state, the ensemble is fully
//! determined by that no-jump evolution.
//!
//! Modules:
//! - [`model`]: basis, cascade Hamiltonian and jump vectors.
//! - [`dynamics`]: fixed-step RK4 evolution, detection probabilities and a
//!   Monte-Carlo jump sampler.
//! - [`analytic`]: closed-form amplitudes and stationary spectra.
//! - [`spectra`]: filtered (time-dependent and synthesized) spectra.
//! - [`raman`]: Λ-system source after adiabatic elimination.
//! - [`classical`]: ring-resonator transfer functions.
//! - [`cli`]: scenario configuration, runner and file output.

pub mod analytic;
pub mod classical;
pub mod cli;
pub mod dynamics;
mod error;
mod integrate;
pub mod model;
pub mod raman;
pub mod series;
pub mod spectra;

pub use error::{CascadeError, Result};
pub use num_complex::Complex64;

pub use dynamics::{evolve, jump_rates, sample_trajectories, TrajectoryResult};
pub use model::{build_cascade, output_amplitude_a, ArraySpec, CascadeOperators, StateVector};
pub use spectra::{FilterSpec, SpectrumResult};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
