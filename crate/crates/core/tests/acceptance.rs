//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every tolerance is pinned here.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use ringcascade_core::analytic::{amplitude_cavity2, amplitudes_single, filtered_stationary_spectrum, stationary_spectrum};
use ringcascade_core::classical::{classical_transfer, correspondence_error, inout_transfer, ClassicalRingSpec};
use ringcascade_core::cli::scenarios::{chain_peak_times, rel_sup, truncate};
use ringcascade_core::dynamics::{expected_density, Detector};
use ringcascade_core::model::chain_slot;
use ringcascade_core::raman::{build_raman_cascade, effective_coupling, evolve_raman, Pulse, RamanSpec};
use ringcascade_core::series::{argmax, local_maxima, local_minima, two_highest_peaks};
use ringcascade_core::spectra::{linear_grid, spectrum_grid};
use ringcascade_core::{build_cascade, sample_trajectories, ArraySpec, StateVector};

use common::{double_integral_spectrum, real, run};

const GAMMA: f64 = 0.25;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, what: &str, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id:<5} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [1, 2, 5] {
        for g in [0.25, 5.0] {
            let spec = ArraySpec::uniform(n, real(g), 0.5, 1.0, 0.5);
            let ops = build_cascade(&spec).unwrap();
            let (_, traj) = run(&spec, 40.0, ops.max_step());
            worst = worst.max(traj.conservation_defect());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    r.line(
        "1",
        worst <= 1e-8 && secs < 5.0,
        "norm + detection = 1, N in {1,2,5}, |g| in {0.25,5}",
        format!("max defect {worst:.2e} (tol 1e-8), runtime {secs:.2} s (limit 5 s)"),
    );
}

fn criterion_2(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for g in [0.25f64, 1.0, 5.0] {
        for delta in [0.0, 0.5, 2.0] {
            let dt = 0.01 / g.max(1.0);
            let spec = ArraySpec::uniform(2, real(g), delta, 1.0, delta);
            let (_, traj) = run(&spec, 10.0, dt);
            for i in 0..traj.len() {
                let t = traj.times[i];
                let (ce, c1, c2) = amplitudes_single(&spec, t).unwrap();
                let c3 = amplitude_cavity2(&spec, t).unwrap();
                worst = worst
                    .max((ce - traj.amplitudes[[i, 0]]).norm())
                    .max((c1 - traj.amplitudes[[i, 1]]).norm())
                    .max((c2 - traj.amplitudes[[i, 2]]).norm())
                    .max((c3 - traj.amplitudes[[i, chain_slot(2)]]).norm());
            }
        }
    }
    let g2: f64 = 1.0 / 32.0;
    let mut jump: f64 = 0.0;
    for t in [0.5, 2.0, 7.0] {
        let lo = amplitudes_single(&ArraySpec::single(real((g2 - 1e-8).sqrt()), 0.0, 1.0), t).unwrap();
        let hi = amplitudes_single(&ArraySpec::single(real((g2 + 1e-8).sqrt()), 0.0, 1.0), t).unwrap();
        jump = jump.max((lo.0 - hi.0).norm()).max((lo.1 - hi.1).norm());
    }
    r.line(
        "2",
        worst <= 1e-6 && jump <= 1e-6,
        "closed forms vs integrator over the 9-point sweep",
        format!("sup deviation {worst:.2e} (tol 1e-6), jump across alpha=0 {jump:.2e} (tol 1e-6)"),
    );
}

fn criterion_3(r: &mut Report) {
    let weak = ArraySpec::single(real(0.25), 0.5, 1.0);
    let (_, traj) = run(&weak, 80.0, 0.01);
    let last = traj.len() - 1;
    let (right, left) = (traj.p_det_a[last], traj.p_det_b[last]);
    let weak_ok = (right - 0.5).abs() <= 1e-3 && (left - 0.5).abs() <= 1e-3;
    r.line(
        "3a",
        weak_ok,
        "weak coupling fibres approach 0.5",
        format!("P_fiber_right {right:.6}, P_fiber_left {left:.6} at t=80 (tol 1e-3)"),
    );

    let g = 5.0;
    let strong = ArraySpec::single(real(g), 0.5, 1.0);
    let (_, traj) = run(&strong, 10.0, 0.001);
    let pe = traj.population(0).to_vec();
    let minima = local_minima(&pe);
    let period = traj.times[minima[1]] - traj.times[minima[0]];
    let expected = 2.0 * PI / (2.0 * 2f64.sqrt() * g);
    r.line(
        "3b",
        (period - expected).abs() <= 0.05 * expected,
        "strong coupling P_e period",
        format!("{period:.5} vs {expected:.5} (tol 5%)"),
    );
}

fn criterion_4(r: &mut Report) {
    let g = 5.0;
    let spec = ArraySpec::single(real(g), 0.5, 1.0);
    let (ops, traj) = run(&spec, 40.0, 0.002);
    let grid = linear_grid(-15.0, 15.0, 601);
    let res = spectrum_grid(&traj, &ops, GAMMA, &grid, &[40.0]).unwrap();
    let ns = res.n_s.column(0).to_vec();
    let (lo, hi) = two_highest_peaks(&grid, &ns).unwrap();
    let expected = 2.0 * 2f64.sqrt() * g;
    let (hl, hr) = (ns[res.nearest_delta_k(lo).unwrap()], ns[res.nearest_delta_k(hi).unwrap()]);
    let asym = (hl - hr).abs() / hl.max(hr);
    let sep_ok = ((hi - lo) - expected).abs() <= 0.05 * expected && asym > 0.01;
    r.line(
        "4a",
        sep_ok,
        "two peaks split by 2*sqrt(2)|g|, unequal heights",
        format!(
            "separation {:.4} vs {expected:.4} (tol 5%), heights {hl:.4e} / {hr:.4e} (asymmetry {asym:.3}, need > 0.01)",
            hi - lo
        ),
    );

    let formula: Vec<f64> = grid.iter().map(|&x| stationary_spectrum(x, &spec, GAMMA)).collect();
    let limit: Vec<f64> = grid
        .iter()
        .map(|&x| filtered_stationary_spectrum(x, &spec, GAMMA).unwrap())
        .collect();
    let err = rel_sup(&ns, &formula);
    r.line(
        "4b",
        err <= 0.02,
        "N_S(t=40) vs stationary formula",
        format!(
            "relative sup error {err:.4} (tol 0.02); against the exact filtered limit {:.2e}",
            rel_sup(&ns, &limit)
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let delay = |g: f64, t_end: f64| {
        let spec = ArraySpec::uniform(2, real(g), 0.5, 1.0, 0.5);
        let (_, traj) = run(&spec, t_end, 0.002);
        let p = chain_peak_times(&traj, 2);
        p[1] - p[0]
    };
    let strong = delay(5.0, 20.0);
    r.line(
        "5a",
        (strong - 0.24).abs() <= 0.2 * 0.24,
        "strong coupling ring-to-ring delay",
        format!("{strong:.4} vs 0.24 (tol 20%)"),
    );
    let weak = delay(0.25, 80.0);
    r.line(
        "5b",
        (weak - 1.5).abs() <= 0.2 * 1.5,
        "weak coupling ring-to-ring delay",
        format!("{weak:.4} vs 1.5 (tol 20%)"),
    );
}

fn criterion_6(r: &mut Report) {
    let spec = ArraySpec::uniform(2, real(5.0), 0.5, 1.0, 7.32);
    let (ops, traj) = run(&spec, 40.0, 0.002);
    let grid = linear_grid(-15.0, 15.0, 601);
    let times = [1.8, 3.6, 5.5, 40.0];
    let res = spectrum_grid(&traj, &ops, GAMMA, &grid, &times).unwrap();
    let reference = res.n_s.column(3).to_vec();
    let (left, right) = two_highest_peaks(&grid, &reference).unwrap();
    let (il, ir) = (res.nearest_delta_k(left).unwrap(), res.nearest_delta_k(right).unwrap());
    let ratio = |j: usize, i: usize| res.n_s[[i, j]] / reference[i];
    let (r18, l18, l55) = (ratio(0, ir), ratio(0, il), ratio(2, il));
    // Frozen from the reference run of this scenario.
    let frozen = [(r18, 0.0143), (l55, 0.507)];
    let drift = frozen.iter().map(|(v, f)| (v - f).abs() / f).fold(0.0, f64::max);
    r.line(
        "6",
        r18 < 0.2 && l55 > 0.5 && drift <= 0.05,
        "right peak held back early, left peak grows",
        format!(
            "right(1.8)/right(40) {r18:.4} (< 0.2), left(5.5)/left(40) {l55:.4} (> 0.5), left(1.8)/left(40) {l18:.4}; peaks at {left:.2}, {right:.2}; drift from frozen values {drift:.3} (tol 0.05)"
        ),
    );
}

fn criterion_7(r: &mut Report) {
    let weak = ArraySpec::uniform(5, real(0.25), 0.5, 1.0, -0.12);
    let (_, traj) = run(&weak, 60.0, 0.002);
    let peaks = chain_peak_times(&traj, 5);
    let sequential = peaks.windows(2).all(|w| w[1] > w[0]);
    let last = *peaks.last().unwrap();
    r.line(
        "7a",
        sequential && last >= 15.0,
        "five rings fill in sequence, trapping lasts ~15/kappa",
        format!("ring maxima at {peaks:.3?}; last ring peaks at {last:.3} (need >= 15)"),
    );

    let strong = ArraySpec::uniform(5, real(5.0), 0.5, 1.0, 7.32);
    // N_S(t=6) at the right peak Δk = 7.32, and the largest value right of Δk = 3.
    let grid = linear_grid(-15.0, 15.0, 601);
    let right_peak = |n: usize| {
        let spec = truncate(&strong, n);
        let (ops, traj) = run(&spec, 6.0, 0.002);
        let at = spectrum_grid(&traj, &ops, GAMMA, &[7.32], &[6.0]).unwrap().n_s[[0, 0]];
        let res = spectrum_grid(&traj, &ops, GAMMA, &grid, &[6.0]).unwrap();
        let side = grid
            .iter()
            .zip(res.n_s.column(0).iter())
            .filter(|(x, _)| **x > 3.0)
            .map(|(_, y)| *y)
            .fold(0.0, f64::max);
        (at, side)
    };
    let ((n2, s2), (n5, s5)) = (right_peak(2), right_peak(5));
    let ratio = n5 / n2;
    r.line(
        "7b",
        (ratio - 0.2).abs() <= 0.3 * 0.2,
        "right peak N_S(t=6) five rings vs two",
        format!(
            "{n5:.4e} / {n2:.4e} = {ratio:.4} vs 0.2 (tol 30%); right-side maxima ratio {:.4}",
            s5 / s2
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let mut worst: f64 = 0.0;
    let cases = [
        (ArraySpec::single(real(5.0), 0.5, 1.0), vec![-7.0, -3.0, 0.0, 2.0, 7.3]),
        (ArraySpec::uniform(2, real(5.0), 0.5, 1.0, 7.32), vec![-7.0, 0.0, 7.32]),
    ];
    for (spec, dks) in &cases {
        let t = 3.0;
        let (ops, traj) = run(spec, t, 0.001);
        let res = spectrum_grid(&traj, &ops, GAMMA, dks, &[t]).unwrap();
        for (i, &dk) in dks.iter().enumerate() {
            let direct = double_integral_spectrum(&ops, GAMMA, dk, t, 1601);
            worst = worst.max((res.n_t[[i, 0]] - direct).abs() / direct);
        }
    }
    r.line(
        "8",
        worst <= 1e-6,
        "filter ODE vs double integral over the two-time correlation",
        format!("max relative deviation {worst:.2e} (tol 1e-6), N=1 and N=2"),
    );
}

fn criterion_9(r: &mut Report) {
    let n = 100_000;
    let spec = ArraySpec::single(real(0.25), 0.5, 1.0);
    let (ops, traj) = run(&spec, 40.0, 0.01);
    let sample = sample_trajectories(&ops, &StateVector::excited_atom(1), 40.0, 0.01, n, 2024).unwrap();
    let mut worst_sigma: f64 = 0.0;
    for (det, series) in [(Detector::A, &traj.p_det_a), (Detector::B, &traj.p_det_b)] {
        for t in [1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let p = series[traj.index_of(t).unwrap()];
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            worst_sigma = worst_sigma.max((sample.cumulative_fraction(det, t) - p).abs() / sigma);
        }
    }
    let hist = sample.histogram(40);
    let (ea, eb) = expected_density(&traj, &hist.edges);
    let mut sup: f64 = 0.0;
    for (got, want) in [(&hist.density_a, &ea), (&hist.density_b, &eb)] {
        let scale = want.iter().cloned().fold(0.0, f64::max);
        let d = got.iter().zip(want.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        sup = sup.max(d / scale);
    }
    r.line(
        "9",
        worst_sigma <= 3.0 && sup <= 0.05,
        "1e5 sampled trajectories vs deterministic detection",
        format!("worst deviation {worst_sigma:.2} sigma (tol 3), density sup-norm {sup:.4} of peak (tol 0.05)"),
    );
}

fn criterion_10(r: &mut Report) {
    let ring = |r: f64| ClassicalRingSpec {
        r,
        tau: 1.0,
        omega_c: 0.0,
        ring_radius: 1.0,
    };
    let err = |s: &ClassicalRingSpec| correspondence_error(s, &linear_grid(-s.kappa(), s.kappa(), 401));
    let ratio = err(&ring(0.05)) / err(&ring(0.025));
    let spec = ring(0.05);
    let mut unimodular: f64 = 0.0;
    for phi in linear_grid(-PI, PI, 2001) {
        unimodular = unimodular
            .max((classical_transfer(&spec, phi).norm() - 1.0).abs())
            .max((inout_transfer(phi, 0.0, spec.kappa()).norm() - 1.0).abs());
    }
    r.line(
        "10",
        (3.0..=5.0).contains(&ratio) && unimodular <= 1e-13,
        "classical ring vs input-output limit at r=0.05",
        format!("error ratio on halving r {ratio:.4} (need [3, 5]), unimodularity defect {unimodular:.1e} (tol 1e-13)"),
    );
}

fn raman(g: f64, delta: f64, peak: f64, width: f64, center: f64) -> RamanSpec {
    RamanSpec {
        g: real(g),
        delta_raman: delta,
        delta_c: vec![0.25, 0.25],
        kappa: vec![1.0, 1.0],
        pulse: Pulse::Gaussian {
            peak,
            width,
            center: Some(center),
        },
        stark_shifts: true,
    }
}

fn flipped(spec: &RamanSpec) -> RamanSpec {
    RamanSpec {
        delta_raman: -spec.delta_raman,
        delta_c: spec.delta_c.iter().map(|d| -d).collect(),
        ..spec.clone()
    }
}

fn raman_spectrum(spec: &RamanSpec, t_end: f64, dt: f64, grid: &[f64]) -> Vec<f64> {
    let cascade = build_raman_cascade(spec, 1).unwrap();
    let traj = evolve_raman(&cascade, t_end, dt).unwrap();
    spectrum_grid(&traj, &cascade, GAMMA, grid, &[t_end]).unwrap().n_s.column(0).to_vec()
}

fn criterion_11(r: &mut Report) {
    let weak = raman(0.25, 0.5, 0.25, 10.0, 30.0);
    let strong = raman(2.0, 1.5, 1.5, 10.0, 30.0);
    let mut defect: f64 = 0.0;
    let mut totals = Vec::new();
    for (spec, dt) in [(&weak, 0.01), (&strong, 0.002)] {
        let traj = evolve_raman(&build_raman_cascade(spec, 1).unwrap(), 100.0, dt).unwrap();
        defect = defect.max(traj.conservation_defect());
        let last = traj.len() - 1;
        totals.push(traj.p_det_a[last] + traj.p_det_b[last]);
    }
    r.line(
        "11a",
        defect <= 1e-8 && totals.iter().all(|&p| p < 1.0),
        "Raman norm-flux identity, detection below unity",
        format!("defect {defect:.2e} (tol 1e-8), detected totals {totals:.4?} (need < 1)"),
    );

    let limit = RamanSpec {
        g: real(0.8),
        delta_raman: 10.0,
        delta_c: vec![0.25],
        kappa: vec![1.0],
        pulse: Pulse::Constant { value: 2.0 },
        stark_shifts: false,
    };
    let (g_a1, _) = effective_coupling(&limit, 0.0).unwrap();
    let two_level = ArraySpec::single(-g_a1.conj(), 0.25, 1.0);
    let traj = evolve_raman(&build_raman_cascade(&limit, 0).unwrap(), 20.0, 0.005).unwrap();
    let mut dev: f64 = 0.0;
    for i in 0..traj.len() {
        let (ce, c1, c2) = amplitudes_single(&two_level, traj.times[i]).unwrap();
        let p = traj.p_basis.row(i);
        dev = dev
            .max((p[0] - ce.norm_sqr()).abs())
            .max((p[1] - c1.norm_sqr()).abs())
            .max((p[2] - c2.norm_sqr()).abs());
    }
    r.line(
        "11b",
        dev <= 1e-4,
        "constant drive, no Stark terms vs two-level closed form",
        format!("population sup deviation {dev:.2e} (tol 1e-4), g_eff = {:.4}", g_a1.norm()),
    );

    let grid = linear_grid(-8.0, 8.0, 321);
    let mirrored: Vec<f64> = grid.iter().rev().copied().collect();
    let a = raman_spectrum(&strong, 100.0, 0.002, &grid);
    let b = raman_spectrum(&flipped(&strong), 100.0, 0.002, &mirrored);
    let mirror = rel_sup(&b, &a);
    let top = |ys: &[f64], xs: &[f64]| xs[argmax(ys).unwrap()];
    let (sa, sb) = (top(&a, &grid), top(&b, &mirrored));

    let short = raman(2.0, 1.5, 3.0, 1.0, 5.0);
    let fine = linear_grid(-8.0, 8.0, 641);
    let heights = |spec: &RamanSpec| {
        let ys = raman_spectrum(spec, 40.0, 0.001, &fine);
        let mut peaks = local_maxima(&ys);
        peaks.sort_by(|&i, &j| ys[j].total_cmp(&ys[i]));
        let (p, q) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
        (ys[p], ys[q])
    };
    let (l0, r0) = heights(&short);
    let (l1, r1) = heights(&flipped(&short));
    let swapped = (l0 > r0) != (l1 > r1);
    r.line(
        "11c",
        mirror <= 1e-10 && sa * sb < 0.0 && swapped,
        "detuning flip mirrors the spectrum and swaps peak heights",
        format!(
            "mirror defect {mirror:.1e} (tol 1e-10); dominant peak {sa:.3} -> {sb:.3}; two-peak pulse heights (left, right) ({l0:.3e}, {r0:.3e}) -> ({l1:.3e}, {r1:.3e})"
        ),
    );
}

fn main() {
    let mut report = Report { failed: 0 };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    criterion_9(&mut report);
    criterion_10(&mut report);
    criterion_11(&mut report);
    if report.failed > 0 {
        println!("{} criteria failed", report.failed);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
