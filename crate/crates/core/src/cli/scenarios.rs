//! Registered scenarios: presets and runners.

use serde_json::{json, Value};

use super::config::{ClassicalRun, FilterGrid, Model, MonteCarlo, RamanRun, RunConfig, TimeGrid};
use super::output::Table;
use super::CliError;
use crate::analytic::{filtered_stationary_spectrum, stationary_spectrum};
use crate::classical::{classical_transfer, correspondence_error, inout_transfer, ClassicalRingSpec};
use crate::dynamics::{evolve, expected_density, sample_from, Detector, TrajectoryResult};
use crate::model::{build_cascade, chain_slot, ArraySpec, StateVector};
use crate::raman::{build_raman_cascade, evolve_raman, Pulse, RamanSpec};
use crate::series::{argmax, local_maxima, local_minima, two_highest_peaks};
use crate::spectra::{spectrum_grid, linear_grid, OutputChannel, SpectrumResult, DEFAULT_GAMMA};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Populations,
    Spectra,
    TwoCavity,
    Tds,
    Array,
    Raman,
    Classical,
}

#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: Kind,
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "fig2-populations",
        description: "atom in one ring: populations of atom, ring modes and both fibres",
        kind: Kind::Populations,
    },
    Scenario {
        name: "fig3-spectra",
        description: "atom in one ring: long-time synthesized spectrum and Rabi splitting",
        kind: Kind::Spectra,
    },
    Scenario {
        name: "fig5-two-cavity",
        description: "source ring driving one empty ring: populations and transfer delay",
        kind: Kind::TwoCavity,
    },
    Scenario {
        name: "fig6-tds",
        description: "empty ring tuned to the right peak: time-dependent spectra and hole burning",
        kind: Kind::Tds,
    },
    Scenario {
        name: "fig8-array",
        description: "five-ring array: sequential trapping and spectra for 2..5 rings",
        kind: Kind::Array,
    },
    Scenario {
        name: "fig10-raman-weak",
        description: "Raman source, weak coupling, Gaussian pulse: populations and spectra",
        kind: Kind::Raman,
    },
    Scenario {
        name: "fig11-raman-strong",
        description: "Raman source, strong coupling, Gaussian pulse: populations and spectra",
        kind: Kind::Raman,
    },
    Scenario {
        name: "classical-correspondence",
        description: "classical ring transfer function against its input-output limit",
        kind: Kind::Classical,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

pub fn names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

/// Defaults a configuration is merged over.
#[derive(Debug, Clone)]
pub struct Preset {
    pub time: TimeGrid,
    pub filter: FilterGrid,
    pub model: Model,
    pub uses_spectra: bool,
}

fn filter(sample_times: &[f64]) -> FilterGrid {
    FilterGrid {
        gamma: DEFAULT_GAMMA,
        delta_k_min: -15.0,
        delta_k_max: 15.0,
        delta_k_points: 601,
        sample_times: sample_times.to_vec(),
    }
}

fn real(g: f64) -> Complex64 {
    Complex64::new(g, 0.0)
}

fn raman_preset(g: f64, delta: f64, peak: f64) -> RamanRun {
    RamanRun {
        spec: RamanSpec {
            g: real(g),
            delta_raman: delta,
            delta_c: vec![0.25, 0.25],
            kappa: vec![1.0, 1.0],
            pulse: Pulse::Gaussian {
                peak,
                width: 10.0,
                center: Some(30.0),
            },
            stark_shifts: true,
        },
        n_empty: 1,
    }
}

impl Scenario {
    pub fn preset(&self) -> Preset {
        let time = |t_end, dt| TimeGrid {
            t_end,
            dt,
            output_step: 0.01,
        };
        match self.name {
            "fig2-populations" => Preset {
                time: time(80.0, 0.002),
                filter: filter(&[80.0]),
                model: Model::Array(ArraySpec::single(real(0.25), 0.5, 1.0)),
                uses_spectra: false,
            },
            "fig3-spectra" => Preset {
                time: time(40.0, 0.002),
                filter: filter(&[40.0]),
                model: Model::Array(ArraySpec::single(real(5.0), 0.5, 1.0)),
                uses_spectra: true,
            },
            "fig5-two-cavity" => Preset {
                time: time(20.0, 0.002),
                filter: filter(&[20.0]),
                model: Model::Array(ArraySpec::uniform(2, real(5.0), 0.5, 1.0, 0.5)),
                uses_spectra: false,
            },
            "fig6-tds" => Preset {
                time: time(40.0, 0.002),
                filter: filter(&[1.8, 3.6, 5.5, 40.0]),
                model: Model::Array(ArraySpec::uniform(2, real(5.0), 0.5, 1.0, 7.32)),
                uses_spectra: true,
            },
            "fig8-array" => Preset {
                time: time(60.0, 0.002),
                filter: filter(&[6.0]),
                model: Model::ArrayPair {
                    populations: ArraySpec::uniform(5, real(0.25), 0.5, 1.0, -0.12),
                    spectra: ArraySpec::uniform(5, real(5.0), 0.5, 1.0, 7.32),
                },
                uses_spectra: true,
            },
            "fig10-raman-weak" => Preset {
                time: time(100.0, 0.01),
                filter: filter(&[20.0, 30.0, 40.0, 100.0]),
                model: Model::Raman(raman_preset(0.25, 0.5, 0.25)),
                uses_spectra: true,
            },
            "fig11-raman-strong" => Preset {
                time: time(100.0, 0.002),
                filter: filter(&[20.0, 30.0, 40.0, 100.0]),
                model: Model::Raman(raman_preset(2.0, 1.5, 1.5)),
                uses_spectra: true,
            },
            "classical-correspondence" => Preset {
                time: time(1.0, 1.0),
                filter: filter(&[1.0]),
                model: Model::Classical(ClassicalRun {
                    spec: ClassicalRingSpec {
                        r: 0.05,
                        tau: 1.0,
                        omega_c: 0.0,
                        ring_radius: 1.0,
                    },
                    detuning_points: 401,
                }),
                uses_spectra: false,
            },
            other => unreachable!("no preset for {other}"),
        }
    }
}

/// Tables and a JSON summary produced by one run.
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub summary: Value,
}

fn lib_err(e: crate::CascadeError) -> CliError {
    CliError::Invalid(e.to_string())
}

/// Population columns: source level, ring-1 modes, empty rings, fibres.
pub fn population_header(n_cavities: usize, source_label: &str) -> Vec<String> {
    let mut h = vec!["t".to_string(), source_label.to_string(), "P_1cc".into(), "P_1c".into()];
    h.extend((2..=n_cavities).map(|j| format!("P_cav{j}")));
    h.push("P_fiber_right".into());
    h.push("P_fiber_left".into());
    h
}

fn population_table(traj: &TrajectoryResult, n_cavities: usize, source_label: &str, time: &TimeGrid) -> Table {
    let stride = ((time.output_step / time.dt).round() as usize).max(1);
    let last = traj.len() - 1;
    let rows = (0..traj.len())
        .filter(|&i| i % stride == 0 || i == last)
        .map(|i| {
            let mut row = Vec::with_capacity(n_cavities + 5);
            row.push(traj.times[i]);
            row.extend(traj.p_basis.row(i).iter().copied());
            row.push(traj.p_det_a[i]);
            row.push(traj.p_det_b[i]);
            row
        })
        .collect();
    Table {
        name: "populations".into(),
        header: population_header(n_cavities, source_label),
        rows,
    }
}

fn spectrum_table(name: &str, res: &SpectrumResult) -> Table {
    let mut rows = Vec::with_capacity(res.delta_k_grid.len() * res.times.len());
    for (j, &t) in res.times.iter().enumerate() {
        for (i, &dk) in res.delta_k_grid.iter().enumerate() {
            rows.push(vec![dk, t, res.n_t[[i, j]], res.n_s[[i, j]]]);
        }
    }
    Table {
        name: name.into(),
        header: ["delta_k", "t", "N", "N_S"].iter().map(|s| s.to_string()).collect(),
        rows,
    }
}

/// Mean spacing of successive maxima of `ys`, if there are at least two.
pub fn oscillation_period(times: &[f64], ys: &[f64]) -> Option<f64> {
    let peaks = local_maxima(ys);
    if peaks.len() < 2 {
        return None;
    }
    let span = times[*peaks.last().unwrap()] - times[peaks[0]];
    Some(span / (peaks.len() - 1) as f64)
}

/// Depth of the deepest interior dip of `ys` within `|x − center| ≤ half_width`,
/// as `1 − dip / min(left flank max, right flank max)`.
pub fn hole_contrast(xs: &[f64], ys: &[f64], center: f64, half_width: f64) -> Option<f64> {
    let idx: Vec<usize> = (0..xs.len()).filter(|&i| (xs[i] - center).abs() <= half_width).collect();
    if idx.len() < 3 {
        return None;
    }
    let window: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let dip = local_minima(&window)
        .into_iter()
        .min_by(|&a, &b| window[a].total_cmp(&window[b]))?;
    let left = window[..dip].iter().cloned().fold(f64::MIN, f64::max);
    let right = window[dip + 1..].iter().cloned().fold(f64::MIN, f64::max);
    let flank = left.min(right);
    (flank > 0.0).then(|| 1.0 - window[dip] / flank)
}

fn column(res: &SpectrumResult, j: usize) -> Vec<f64> {
    res.n_s.column(j).to_vec()
}

fn peaks_json(res: &SpectrumResult, j: usize) -> Value {
    let xs = res.delta_k_grid.to_vec();
    let ys = column(res, j);
    match two_highest_peaks(&xs, &ys) {
        Some((lo, hi)) => {
            let h = |x: f64| ys[res.nearest_delta_k(x).expect("nonempty")];
            json!({
                "left": lo,
                "right": hi,
                "left_height": h(lo),
                "right_height": h(hi),
                "separation": hi - lo,
            })
        }
        None => Value::Null,
    }
}

fn spectra_for<O: OutputChannel + Sync>(
    traj: &TrajectoryResult,
    ops: &O,
    filter: &FilterGrid,
) -> Result<SpectrumResult, CliError> {
    spectrum_grid(traj, ops, filter.gamma, &filter.delta_k_grid(), &filter.sample_times).map_err(lib_err)
}

fn monte_carlo(traj: &TrajectoryResult, mc: &MonteCarlo) -> (Table, Value) {
    let sample = sample_from(traj, mc.n_traj, mc.seed);
    let hist = sample.histogram(mc.bins);
    let (exp_a, exp_b) = expected_density(traj, &hist.edges);
    let rows: Vec<Vec<f64>> = (0..mc.bins)
        .map(|i| {
            vec![
                hist.edges[i],
                hist.edges[i + 1],
                hist.density_a[i],
                hist.density_b[i],
                exp_a[i],
                exp_b[i],
            ]
        })
        .collect();
    let n = mc.n_traj as f64;
    let pa = *traj.p_det_a.last().unwrap();
    let pb = *traj.p_det_b.last().unwrap();
    let sigma = |p: f64| (p * (1.0 - p) / n).sqrt();
    let table = Table {
        name: "jump_density".into(),
        header: ["t_lo", "t_hi", "density_a", "density_b", "expected_a", "expected_b"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    };
    let summary = json!({
        "n_traj": mc.n_traj,
        "seed": mc.seed,
        "click_fraction_a": sample.click_fraction(Detector::A),
        "click_fraction_b": sample.click_fraction(Detector::B),
        "p_det_a": pa,
        "p_det_b": pb,
        "sigma_a": sigma(pa),
        "sigma_b": sigma(pb),
    });
    (table, summary)
}

fn evolve_array(spec: &ArraySpec, time: &TimeGrid) -> Result<(crate::CascadeOperators, TrajectoryResult), CliError> {
    let ops = build_cascade(spec).map_err(lib_err)?;
    let traj = evolve(&ops, &StateVector::excited_atom(spec.n_cavities), time.t_end, time.dt).map_err(lib_err)?;
    Ok((ops, traj))
}

fn final_populations(traj: &TrajectoryResult, header: &[String]) -> Value {
    let last = traj.len() - 1;
    let mut map = serde_json::Map::new();
    for (k, name) in header.iter().skip(1).enumerate() {
        let v = if k < traj.dim() {
            traj.p_basis[[last, k]]
        } else if k == traj.dim() {
            traj.p_det_a[last]
        } else {
            traj.p_det_b[last]
        };
        map.insert(name.clone(), json!(v));
    }
    Value::Object(map)
}

/// Times of the maxima of the forward-chain populations `a1, a2, ...`.
pub fn chain_peak_times(traj: &TrajectoryResult, n_cavities: usize) -> Vec<f64> {
    (1..=n_cavities)
        .map(|j| {
            let p = traj.population(chain_slot(j));
            traj.times[argmax(p.as_slice().expect("contiguous")).expect("nonempty")]
        })
        .collect()
}

fn run_array_kind(kind: Kind, cfg: &RunConfig, spec: &ArraySpec) -> Result<Artifacts, CliError> {
    let (ops, traj) = evolve_array(spec, &cfg.time)?;
    let pops = population_table(&traj, spec.n_cavities, "P_e", &cfg.time);
    let mut summary = json!({
        "scenario": cfg.scenario,
        "conservation_defect": traj.conservation_defect(),
        "final": final_populations(&traj, &pops.header),
    });
    let mut tables = vec![pops];
    let g = spec.g.norm();

    match kind {
        Kind::Populations => {
            let times = traj.times.to_vec();
            let pe = traj.population(0).to_vec();
            summary["p_e_period"] = json!(oscillation_period(&times, &pe));
            summary["rabi_period_expected"] = json!(if g > 0.0 {
                Some(2.0 * std::f64::consts::PI / (2.0 * 2f64.sqrt() * g))
            } else {
                None
            });
        }
        Kind::Spectra => {
            let res = spectra_for(&traj, &ops, &cfg.filter)?;
            let j = res.times.len() - 1;
            let xs = res.delta_k_grid.to_vec();
            let ns = column(&res, j);
            let formula: Vec<f64> = xs.iter().map(|&x| stationary_spectrum(x, spec, cfg.filter.gamma)).collect();
            let limit = xs
                .iter()
                .map(|&x| filtered_stationary_spectrum(x, spec, cfg.filter.gamma))
                .collect::<Result<Vec<_>, _>>()
                .map_err(lib_err)?;
            summary["t"] = json!(res.times[j]);
            summary["peaks"] = peaks_json(&res, j);
            summary["peak_separation"] = summary["peaks"]["separation"].clone();
            summary["rabi_splitting_expected"] = json!(2.0 * 2f64.sqrt() * g);
            summary["stationary_formula_rel_sup_error"] = json!(rel_sup(&ns, &formula));
            summary["filtered_limit_rel_sup_error"] = json!(rel_sup(&ns, &limit));
            tables.push(spectrum_table("spectrum", &res));
        }
        Kind::TwoCavity => {
            let peaks = chain_peak_times(&traj, spec.n_cavities);
            summary["chain_peak_times"] = json!(peaks);
            if peaks.len() >= 2 {
                summary["delay_cav2_minus_cav1"] = json!(peaks[1] - peaks[0]);
            }
        }
        Kind::Tds => {
            let res = spectra_for(&traj, &ops, &cfg.filter)?;
            summary["peaks"] = tds_summary(&res, spec);
            tables.push(spectrum_table("spectrum", &res));
        }
        Kind::Array | Kind::Raman | Kind::Classical => unreachable!(),
    }

    if let Some(mc) = &cfg.monte_carlo {
        let (table, s) = monte_carlo(&traj, mc);
        tables.push(table);
        summary["monte_carlo"] = s;
    }
    Ok(Artifacts { tables, summary })
}

/// `max |a − b| / max |b|`.
pub fn rel_sup(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    diff / scale
}

/// Growth of both peaks relative to the last sample time, and the dip near
/// the second ring's resonance.
fn tds_summary(res: &SpectrumResult, spec: &ArraySpec) -> Value {
    let last = res.times.len() - 1;
    let xs = res.delta_k_grid.to_vec();
    let reference = column(res, last);
    let Some((left, right)) = two_highest_peaks(&xs, &reference) else {
        return Value::Null;
    };
    let (il, ir) = (res.nearest_delta_k(left).unwrap(), res.nearest_delta_k(right).unwrap());
    let target = spec.delta_cavity.get(1).copied().unwrap_or(right);
    let per_time: Vec<Value> = (0..res.times.len())
        .map(|j| {
            let ys = column(res, j);
            json!({
                "t": res.times[j],
                "left_ratio": ys[il] / reference[il],
                "right_ratio": ys[ir] / reference[ir],
                "hole_contrast": hole_contrast(&xs, &ys, target, 1.5),
            })
        })
        .collect();
    json!({ "left": left, "right": right, "growth": per_time })
}

fn run_array_pair(cfg: &RunConfig, populations: &ArraySpec, spectra: &ArraySpec) -> Result<Artifacts, CliError> {
    let (_, traj) = evolve_array(populations, &cfg.time)?;
    let pops = population_table(&traj, populations.n_cavities, "P_e", &cfg.time);
    let peaks = chain_peak_times(&traj, populations.n_cavities);
    let mut summary = json!({
        "scenario": cfg.scenario,
        "conservation_defect": traj.conservation_defect(),
        "final": final_populations(&traj, &pops.header),
        "chain_peak_times": peaks,
        "last_ring_peak_time": peaks.last(),
    });
    let mut tables = vec![pops];
    if let Some(mc) = &cfg.monte_carlo {
        let (table, s) = monte_carlo(&traj, mc);
        tables.push(table);
        summary["monte_carlo"] = s;
    }

    let t_needed = *cfg.filter.sample_times.last().expect("checked");
    let time = TimeGrid { t_end: t_needed, ..cfg.time };
    let target = spectra.delta_cavity.get(1).copied().unwrap_or(0.0);
    let mut right = serde_json::Map::new();
    for n in 2..=spectra.n_cavities {
        let spec = truncate(spectra, n);
        let (ops, traj) = evolve_array(&spec, &time)?;
        let res = spectra_for(&traj, &ops, &cfg.filter)?;
        tables.push(spectrum_table(&format!("spectrum_n{n}"), &res));
        let at = spectrum_grid(&traj, &ops, cfg.filter.gamma, &[target], &cfg.filter.sample_times).map_err(lib_err)?;
        right.insert(format!("n{n}"), json!(at.n_s.row(0).to_vec()));
    }
    summary["right_peak_delta_k"] = json!(target);
    summary["right_peak_n_s"] = Value::Object(right);
    summary["sample_times"] = json!(cfg.filter.sample_times);
    Ok(Artifacts { tables, summary })
}

/// Largest `N_S` on each side of `Δk = 0` and where the global maximum sits.
/// Raman spectra under a slow pulse are often single-peaked, so the two
/// sides are compared instead of two local maxima.
fn half_line_maxima(res: &SpectrumResult, j: usize) -> Value {
    let ys = column(res, j);
    let xs = res.delta_k_grid.to_vec();
    let side = |keep: &dyn Fn(f64) -> bool| {
        xs.iter().zip(&ys).filter(|(x, _)| keep(**x)).map(|(_, y)| *y).fold(0.0, f64::max)
    };
    let top = argmax(&ys).map(|i| xs[i]);
    json!({
        "left": side(&|x| x < 0.0),
        "right": side(&|x| x > 0.0),
        "argmax_delta_k": top,
    })
}

/// The first `n` rings of `spec`.
pub fn truncate(spec: &ArraySpec, n: usize) -> ArraySpec {
    ArraySpec {
        n_cavities: n,
        g: spec.g,
        delta_atom: spec.delta_atom,
        kappa: spec.kappa[..n].to_vec(),
        delta_cavity: spec.delta_cavity[..n].to_vec(),
        tau_d: spec.tau_d[..n - 1].to_vec(),
    }
}

fn run_raman(cfg: &RunConfig, run: &RamanRun) -> Result<Artifacts, CliError> {
    let cascade = build_raman_cascade(&run.spec, run.n_empty).map_err(lib_err)?;
    let traj = evolve_raman(&cascade, cfg.time.t_end, cfg.time.dt).map_err(lib_err)?;
    let pops = population_table(&traj, run.spec.n_cavities(), "P_g", &cfg.time);
    let res = spectra_for(&traj, &cascade, &cfg.filter)?;
    let last = traj.len() - 1;
    let summary = json!({
        "scenario": cfg.scenario,
        "conservation_defect": traj.conservation_defect(),
        "final": final_populations(&traj, &pops.header),
        "detected_total": traj.p_det_a[last] + traj.p_det_b[last],
        "peak_effective_coupling": run.spec.g.norm() * run.spec.pulse.peak() / (2.0 * run.spec.delta_raman.abs()),
        "adiabaticity_warnings": run.spec.adiabaticity_warnings(),
        "peaks": peaks_json(&res, res.times.len() - 1),
        "half_line_maxima": half_line_maxima(&res, res.times.len() - 1),
    });
    Ok(Artifacts {
        tables: vec![pops, spectrum_table("spectrum", &res)],
        summary,
    })
}

fn run_classical(cfg: &RunConfig, run: &ClassicalRun) -> Result<Artifacts, CliError> {
    let spec = run.spec;
    let grid_for = |s: &ClassicalRingSpec| {
        let k = s.kappa();
        linear_grid(-k, k, run.detuning_points)
    };
    let grid = grid_for(&spec);
    let kappa = spec.kappa();
    let mut unimodular: f64 = 0.0;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .map(|&d| {
            let phi = spec.phase(spec.omega_c + d);
            let c = classical_transfer(&spec, phi);
            let q = inout_transfer(spec.omega_c + d, spec.omega_c, kappa);
            unimodular = unimodular.max((c.norm() - 1.0).abs()).max((q.norm() - 1.0).abs());
            vec![d, phi, c.re, c.im, q.re, q.im, (c - q).norm()]
        })
        .collect();
    let half = ClassicalRingSpec { r: spec.r / 2.0, ..spec };
    let e_full = correspondence_error(&spec, &grid);
    let e_half = correspondence_error(&half, &grid_for(&half));
    let summary = json!({
        "scenario": cfg.scenario,
        "kappa": kappa,
        "error": e_full,
        "error_half_r": e_half,
        "error_ratio": e_full / e_half,
        "max_unimodularity_defect": unimodular,
    });
    let table = Table {
        name: "transfer".into(),
        header: ["detuning", "phi", "classical_re", "classical_im", "inout_re", "inout_im", "abs_diff"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    };
    Ok(Artifacts {
        tables: vec![table],
        summary,
    })
}

/// Execute a resolved configuration without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let scenario = find(&cfg.scenario).ok_or_else(|| CliError::UnknownScenario(cfg.scenario.clone()))?;
    match (&cfg.model, scenario.kind) {
        (Model::Array(spec), kind) => run_array_kind(kind, cfg, spec),
        (Model::ArrayPair { populations, spectra }, _) => run_array_pair(cfg, populations, spectra),
        (Model::Raman(run), _) => run_raman(cfg, run),
        (Model::Classical(run), _) => run_classical(cfg, run),
    }
}
