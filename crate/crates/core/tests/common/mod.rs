//! Helpers shared by the integration tests and the acceptance runner.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use ringcascade_core::{build_cascade, evolve, ArraySpec, CascadeOperators, StateVector, TrajectoryResult};

pub fn real(g: f64) -> Complex64 {
    Complex64::new(g, 0.0)
}

/// Atom-excited evolution of `spec` up to `t_end`.
pub fn run(spec: &ArraySpec, t_end: f64, dt: f64) -> (CascadeOperators, TrajectoryResult) {
    let ops = build_cascade(spec).expect("valid spec");
    let traj = evolve(&ops, &StateVector::excited_atom(spec.n_cavities), t_end, dt).expect("evolve");
    (ops, traj)
}

/// Composite Simpson weights for `n` (odd) equally spaced nodes.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count");
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Physical spectrum at time `t` as the unfactorized double integral
/// `Γ ∫∫ e^{−(Γ−iΔk)(t−t₁)} e^{−(Γ+iΔk)(t−t₂)} G(t₁, t₂) dt₁ dt₂`,
/// composite Simpson on `nodes` points per axis.
///
/// The two-time correlation `G(t₁, t₂) = ⟨a_out†(t₁) a_out(t₂)⟩` comes from
/// the regression theorem with exact matrix-exponential propagators, so
/// neither the Runge-Kutta integrator nor the filter ODE is involved.
pub fn double_integral_spectrum(ops: &CascadeOperators, gamma: f64, delta_k: f64, t: f64, nodes: usize) -> f64 {
    let d = ops.dim();
    let h = t / (nodes - 1) as f64;
    let hm = DMatrix::from_fn(d, d, |i, j| ops.h_nh()[[i, j]]);
    let step = (hm * Complex64::new(0.0, -h)).exp();
    let jump = DVector::from_iterator(d, ops.jump_a().iter().copied());

    // psi[k] = U(kh) psi(0), row[k] = jump^T U(kh).
    let mut psi = Vec::with_capacity(nodes);
    let mut row = Vec::with_capacity(nodes);
    let mut state = DVector::from_element(d, Complex64::new(0.0, 0.0));
    state[0] = Complex64::new(1.0, 0.0);
    let mut r = jump.transpose();
    for _ in 0..nodes {
        psi.push(state.clone());
        row.push(r.clone());
        state = &step * state;
        r = r * &step;
    }
    let psi: Vec<Vec<Complex64>> = psi.iter().map(|p| p.iter().copied().collect()).collect();
    let row: Vec<Vec<Complex64>> = row.iter().map(|r| r.iter().copied().collect()).collect();
    let dot = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(u, v)| u * v).sum::<Complex64>();
    let a: Vec<Complex64> = psi.iter().map(|p| dot(&row[0], p)).collect();

    // G(t_i, t_j) for j >= i; the lower triangle is the conjugate.
    let corr = |i: usize, j: usize| -> Complex64 {
        if j >= i {
            a[i].conj() * dot(&row[j - i], &psi[i])
        } else {
            (a[j].conj() * dot(&row[i - j], &psi[j])).conj()
        }
    };

    let w = simpson_weights(nodes, h);
    let z = Complex64::new(gamma, delta_k);
    let decay: Vec<Complex64> = (0..nodes).map(|i| (-z * (t - i as f64 * h)).exp()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..nodes {
        for j in 0..nodes {
            total += decay[i].conj() * decay[j] * corr(i, j) * (w[i] * w[j]);
        }
    }
    gamma * total.re
}
