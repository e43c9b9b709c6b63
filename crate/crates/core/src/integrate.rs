//! Fixed-step RK4 for `dψ/dt = -i h(t) ψ`, with the two detection
//! probabilities carried as extra components of the same step.

use ndarray::{Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{CascadeError, Result};

/// Anything that can hand out `h_nh(t)` and the two jump vectors.
pub(crate) trait Generator {
    fn dim(&self) -> usize;
    /// Row-major `h_nh(t)` into `out` (length `dim²`).
    fn write_h(&self, t: f64, out: &mut [Complex64]);
    fn time_dependent(&self) -> bool;
    fn jump_a(&self) -> ArrayView1<'_, Complex64>;
    fn jump_b(&self) -> ArrayView1<'_, Complex64>;
}

pub(crate) struct Integrated {
    pub times: Vec<f64>,
    pub amplitudes: Array2<Complex64>,
    pub p_det_a: Vec<f64>,
    pub p_det_b: Vec<f64>,
}

/// Number of steps needed to reach `t_end` with step `dt` (the last grid
/// point may overshoot by less than one step).
pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(0.0) as usize
}

#[inline]
fn rate(jump: &[Complex64], psi: &[Complex64]) -> f64 {
    jump.iter()
        .zip(psi)
        .map(|(j, c)| j * c)
        .sum::<Complex64>()
        .norm_sqr()
}

/// `out = -i h ψ`; returns `(Π_a, Π_b)` at `ψ`.
#[inline]
fn deriv(
    h: &[Complex64],
    ja: &[Complex64],
    jb: &[Complex64],
    psi: &[Complex64],
    out: &mut [Complex64],
) -> (f64, f64) {
    let n = psi.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &h[i * n..(i + 1) * n];
        let acc: Complex64 = row.iter().zip(psi).map(|(a, b)| a * b).sum();
        *o = Complex64::new(acc.im, -acc.re);
    }
    (rate(ja, psi), rate(jb, psi))
}

pub(crate) fn rk4<G: Generator>(
    gen: &G,
    psi0: ArrayView1<'_, Complex64>,
    t0: f64,
    n_steps: usize,
    dt: f64,
) -> Result<Integrated> {
    let n = gen.dim();
    if psi0.len() != n {
        return Err(CascadeError::DimensionMismatch {
            expected: n,
            got: psi0.len(),
        });
    }
    let ja = gen.jump_a().to_vec();
    let jb = gen.jump_b().to_vec();

    let mut h0 = vec![Complex64::default(); n * n];
    let mut hm = vec![Complex64::default(); n * n];
    let mut h1 = vec![Complex64::default(); n * n];
    let dynamic = gen.time_dependent();
    if !dynamic {
        gen.write_h(t0, &mut h0);
        hm.copy_from_slice(&h0);
        h1.copy_from_slice(&h0);
    }

    let mut amplitudes = Array2::<Complex64>::zeros((n_steps + 1, n));
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut p_a = Vec::with_capacity(n_steps + 1);
    let mut p_b = Vec::with_capacity(n_steps + 1);

    let mut psi: Vec<Complex64> = psi0.to_vec();
    let (mut acc_a, mut acc_b) = (0.0, 0.0);
    amplitudes.row_mut(0).iter_mut().zip(&psi).for_each(|(d, s)| *d = *s);
    times.push(t0);
    p_a.push(0.0);
    p_b.push(0.0);

    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut tmp = vec![Complex64::default(); n];

    for step in 0..n_steps {
        let t = t0 + step as f64 * dt;
        if dynamic {
            gen.write_h(t, &mut h0);
            gen.write_h(t + 0.5 * dt, &mut hm);
            gen.write_h(t + dt, &mut h1);
        }
        let r1 = deriv(&h0, &ja, &jb, &psi, &mut k1);
        for i in 0..n {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        let r2 = deriv(&hm, &ja, &jb, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        let r3 = deriv(&hm, &ja, &jb, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        let r4 = deriv(&h1, &ja, &jb, &tmp, &mut k4);

        let w = dt / 6.0;
        for i in 0..n {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
        acc_a += w * (r1.0 + 2.0 * (r2.0 + r3.0) + r4.0);
        acc_b += w * (r1.1 + 2.0 * (r2.1 + r3.1) + r4.1);

        let t_next = t0 + (step + 1) as f64 * dt;
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if !(norm.is_finite() && acc_a.is_finite() && acc_b.is_finite()) || norm > 1e6 {
            return Err(CascadeError::NonFinite { t: t_next });
        }
        amplitudes
            .row_mut(step + 1)
            .iter_mut()
            .zip(&psi)
            .for_each(|(d, s)| *d = *s);
        times.push(t_next);
        p_a.push(acc_a);
        p_b.push(acc_b);
    }

    Ok(Integrated {
        times,
        amplitudes,
        p_det_a: p_a,
        p_det_b: p_b,
    })
}
