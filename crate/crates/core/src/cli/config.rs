//! TOML run configuration and its resolution against scenario presets.
//!
//! Every section is optional; anything left out falls back to the preset
//! of the chosen scenario. See `configs/` for one file per scenario.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scenarios::{self, Kind, Preset};
use super::CliError;
use crate::classical::ClassicalRingSpec;
use crate::model::ArraySpec;
use crate::raman::{Pulse, RamanSpec};
use crate::spectra::linear_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexInput> for Complex64 {
    fn from(c: ComplexInput) -> Self {
        match c {
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A scalar broadcast to every ring, or one value per ring.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerRing {
    All(f64),
    Each(Vec<f64>),
}

impl PerRing {
    fn expand(&self, n: usize) -> Vec<f64> {
        match self {
            PerRing::All(v) => vec![*v; n],
            PerRing::Each(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    /// Spacing of rows in the populations table (rounded to a multiple of `dt`).
    pub output_step: Option<f64>,
}

/// Two-level source and chain. Detunings are measured from the atomic
/// transition: `delta_atom` is ring 1, `delta_empty` the downstream rings.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub n_cavities: Option<usize>,
    pub g: Option<ComplexInput>,
    pub delta_atom: Option<f64>,
    pub kappa: Option<PerRing>,
    pub delta_empty: Option<PerRing>,
    pub tau_d: Option<PerRing>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub gamma: Option<f64>,
    pub delta_k_min: Option<f64>,
    pub delta_k_max: Option<f64>,
    pub delta_k_points: Option<usize>,
    pub sample_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanSection {
    pub g: Option<ComplexInput>,
    pub delta_raman: Option<f64>,
    pub n_empty: Option<usize>,
    pub delta_c: Option<PerRing>,
    pub kappa: Option<PerRing>,
    pub pulse: Option<Pulse>,
    pub stark_shifts: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSection {
    pub r: Option<f64>,
    pub tau: Option<f64>,
    pub omega_c: Option<f64>,
    pub ring_radius: Option<f64>,
    pub detuning_points: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub n_traj: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    40
}

/// The file as written by the user.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: String,
    pub output_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub time: TimeSection,
    pub array: Option<ArraySection>,
    /// Strong-coupling chain used for the spectra of `fig8-array`.
    pub spectrum_array: Option<ArraySection>,
    #[serde(default)]
    pub filter: FilterSection,
    pub raman: Option<RamanSection>,
    pub classical: Option<ClassicalSection>,
    pub monte_carlo: Option<MonteCarloSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Resolved time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    pub output_step: f64,
}

/// Resolved filter and Δk sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterGrid {
    pub gamma: f64,
    pub delta_k_min: f64,
    pub delta_k_max: f64,
    pub delta_k_points: usize,
    pub sample_times: Vec<f64>,
}

impl FilterGrid {
    pub fn delta_k_grid(&self) -> Vec<f64> {
        linear_grid(self.delta_k_min, self.delta_k_max, self.delta_k_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub n_traj: usize,
    pub seed: u64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamanRun {
    pub spec: RamanSpec,
    pub n_empty: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalRun {
    pub spec: ClassicalRingSpec,
    pub detuning_points: usize,
}

/// Physical parameters of a run, by scenario family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Array(ArraySpec),
    /// Weak-coupling population chain plus strong-coupling spectrum chains
    /// of 2..=N rings.
    ArrayPair { populations: ArraySpec, spectra: ArraySpec },
    Raman(RamanRun),
    Classical(ClassicalRun),
}

/// Fully resolved configuration; this is what the manifest records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub format: OutputFormat,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub time: TimeGrid,
    pub model: Model,
    pub filter: FilterGrid,
    pub monte_carlo: Option<MonteCarlo>,
}

/// One problem found while resolving or validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub field: String,
    pub message: String,
    pub fatal: bool,
}

impl Finding {
    fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            field: field.into(),
            message: message.into(),
            fatal: true,
        }
    }

    fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            field: field.into(),
            message: message.into(),
            fatal: false,
        }
    }
}

fn resolve_array(preset: &ArraySpec, section: Option<&ArraySection>) -> ArraySpec {
    let Some(s) = section else {
        return preset.clone();
    };
    let n = s.n_cavities.unwrap_or(preset.n_cavities);
    let g = s.g.map(Complex64::from).unwrap_or(preset.g);
    let delta_atom = s.delta_atom.unwrap_or(preset.delta_atom);
    let kappa = match &s.kappa {
        Some(k) => k.expand(n),
        None => extend(&preset.kappa, n),
    };
    let preset_empty: Vec<f64> = preset.delta_cavity.iter().skip(1).copied().collect();
    let empty = match &s.delta_empty {
        Some(d) => d.expand(n.saturating_sub(1)),
        None => extend(&preset_empty, n.saturating_sub(1)),
    };
    let mut delta_cavity = vec![delta_atom];
    delta_cavity.extend(empty);
    let tau_d = match &s.tau_d {
        Some(d) => d.expand(n.saturating_sub(1)),
        None => vec![0.0; n.saturating_sub(1)],
    };
    ArraySpec {
        n_cavities: n,
        g,
        delta_atom,
        kappa,
        delta_cavity,
        tau_d,
    }
}

/// Resize a preset list by repeating its last entry.
fn extend(values: &[f64], n: usize) -> Vec<f64> {
    match values.last() {
        None => vec![0.0; n],
        Some(&last) => (0..n).map(|i| values.get(i).copied().unwrap_or(last)).collect(),
    }
}

fn resolve_raman(preset: &RamanRun, section: Option<&RamanSection>) -> RamanRun {
    let Some(s) = section else {
        return preset.clone();
    };
    let n_empty = s.n_empty.unwrap_or(preset.n_empty);
    let n = n_empty + 1;
    RamanRun {
        spec: RamanSpec {
            g: s.g.map(Complex64::from).unwrap_or(preset.spec.g),
            delta_raman: s.delta_raman.unwrap_or(preset.spec.delta_raman),
            delta_c: s.delta_c.as_ref().map(|d| d.expand(n)).unwrap_or_else(|| extend(&preset.spec.delta_c, n)),
            kappa: s.kappa.as_ref().map(|k| k.expand(n)).unwrap_or_else(|| extend(&preset.spec.kappa, n)),
            pulse: s.pulse.unwrap_or(preset.spec.pulse),
            stark_shifts: s.stark_shifts.unwrap_or(preset.spec.stark_shifts),
        },
        n_empty,
    }
}

fn resolve_classical(preset: &ClassicalRun, section: Option<&ClassicalSection>) -> ClassicalRun {
    let Some(s) = section else {
        return *preset;
    };
    ClassicalRun {
        spec: ClassicalRingSpec {
            r: s.r.unwrap_or(preset.spec.r),
            tau: s.tau.unwrap_or(preset.spec.tau),
            omega_c: s.omega_c.unwrap_or(preset.spec.omega_c),
            ring_radius: s.ring_radius.unwrap_or(preset.spec.ring_radius),
        },
        detuning_points: s.detuning_points.unwrap_or(preset.detuning_points),
    }
}

/// Sections that make no sense for the chosen scenario are reported rather
/// than silently ignored.
fn stray_sections(file: &ConfigFile, kind: Kind) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut check = |present: bool, name: &str, allowed: bool| {
        if present && !allowed {
            out.push(Finding::error(name, format!("section not used by scenario `{}`", file.scenario)));
        }
    };
    let two_level = matches!(kind, Kind::Populations | Kind::Spectra | Kind::TwoCavity | Kind::Tds | Kind::Array);
    check(file.array.is_some(), "array", two_level);
    check(file.spectrum_array.is_some(), "spectrum_array", kind == Kind::Array);
    check(file.raman.is_some(), "raman", kind == Kind::Raman);
    check(file.classical.is_some(), "classical", kind == Kind::Classical);
    check(file.monte_carlo.is_some(), "monte_carlo", two_level);
    out
}

/// Merge `file` over its scenario preset. Unknown scenarios are an error of
/// their own; everything else is reported as findings.
pub fn resolve(file: &ConfigFile) -> Result<(RunConfig, Vec<Finding>), CliError> {
    let scenario = scenarios::find(&file.scenario).ok_or_else(|| CliError::UnknownScenario(file.scenario.clone()))?;
    let preset = scenario.preset();
    let mut findings = stray_sections(file, scenario.kind);

    let time = TimeGrid {
        t_end: file.time.t_end.unwrap_or(preset.time.t_end),
        dt: file.time.dt.unwrap_or(preset.time.dt),
        output_step: file.time.output_step.unwrap_or(preset.time.output_step),
    };
    let f = &file.filter;
    let filter = FilterGrid {
        gamma: f.gamma.unwrap_or(preset.filter.gamma),
        delta_k_min: f.delta_k_min.unwrap_or(preset.filter.delta_k_min),
        delta_k_max: f.delta_k_max.unwrap_or(preset.filter.delta_k_max),
        delta_k_points: f.delta_k_points.unwrap_or(preset.filter.delta_k_points),
        sample_times: f.sample_times.clone().unwrap_or_else(|| preset.filter.sample_times.clone()),
    };
    let model = match &preset.model {
        Model::Array(a) => Model::Array(resolve_array(a, file.array.as_ref())),
        Model::ArrayPair { populations, spectra } => Model::ArrayPair {
            populations: resolve_array(populations, file.array.as_ref()),
            spectra: resolve_array(spectra, file.spectrum_array.as_ref()),
        },
        Model::Raman(r) => Model::Raman(resolve_raman(r, file.raman.as_ref())),
        Model::Classical(c) => Model::Classical(resolve_classical(c, file.classical.as_ref())),
    };
    let monte_carlo = file.monte_carlo.as_ref().map(|m| MonteCarlo {
        n_traj: m.n_traj,
        seed: m.seed,
        bins: m.bins,
    });
    let config = RunConfig {
        scenario: scenario.name.to_string(),
        format: file.format.unwrap_or_default(),
        output_dir: file
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("output").join(scenario.name)),
        time,
        model,
        filter,
        monte_carlo,
    };
    findings.extend(check(&config, &preset));
    Ok((config, findings))
}

fn check_array(prefix: &str, spec: &ArraySpec, time: &TimeGrid, out: &mut Vec<Finding>) {
    if let Err(e) = spec.validate() {
        out.push(Finding::error(format!("{prefix}.{}", field_of(&e)), e.to_string()));
        return;
    }
    if let Ok(ops) = crate::model::build_cascade(spec) {
        if time.dt > ops.max_step() * (1.0 + 1e-9) {
            out.push(Finding::error(
                "time.dt",
                format!("{} exceeds the step bound {} for `{prefix}`", time.dt, ops.max_step()),
            ));
        }
    }
}

fn field_of(e: &crate::CascadeError) -> String {
    match e {
        crate::CascadeError::InvalidParameter { field, .. } => field.clone(),
        _ => "spec".into(),
    }
}

/// Every invariant of the resolved configuration, fatal or not.
pub fn check(config: &RunConfig, preset: &Preset) -> Vec<Finding> {
    let mut out = Vec::new();
    let time = &config.time;
    if !(time.dt.is_finite() && time.dt > 0.0) {
        out.push(Finding::error("time.dt", format!("must be positive, got {}", time.dt)));
    }
    if !(time.t_end.is_finite() && time.t_end > 0.0) {
        out.push(Finding::error("time.t_end", format!("must be positive, got {}", time.t_end)));
    }
    if !(time.output_step.is_finite() && time.output_step > 0.0) {
        out.push(Finding::error("time.output_step", format!("must be positive, got {}", time.output_step)));
    }
    let time_ok = out.is_empty();

    match &config.model {
        Model::Array(spec) => {
            if time_ok {
                check_array("array", spec, time, &mut out);
            }
        }
        Model::ArrayPair { populations, spectra } => {
            if time_ok {
                check_array("array", populations, time, &mut out);
                check_array("spectrum_array", spectra, time, &mut out);
            }
            if spectra.n_cavities < 2 {
                out.push(Finding::error("spectrum_array.n_cavities", "need at least two rings"));
            }
        }
        Model::Raman(run) => {
            if run.spec.n_cavities() != run.n_empty + 1 {
                out.push(Finding::error(
                    "raman.kappa",
                    format!("expected {} rings, got {}", run.n_empty + 1, run.spec.n_cavities()),
                ));
            } else if let Err(e) = crate::raman::build_raman_cascade(&run.spec, run.n_empty) {
                out.push(Finding::error(format!("raman.{}", field_of(&e)), e.to_string()));
            } else if time_ok {
                let cascade = crate::raman::build_raman_cascade(&run.spec, run.n_empty).expect("checked");
                if time.dt > cascade.max_step() * (1.0 + 1e-9) {
                    out.push(Finding::error(
                        "time.dt",
                        format!("{} exceeds the step bound {}", time.dt, cascade.max_step()),
                    ));
                }
            }
            for w in run.spec.adiabaticity_warnings() {
                out.push(Finding::warning("raman", w));
            }
        }
        Model::Classical(run) => {
            if let Err(e) = run.spec.validate() {
                out.push(Finding::error(format!("classical.{}", field_of(&e)), e.to_string()));
            } else if run.spec.r > 0.1 {
                out.push(Finding::warning(
                    "classical.r",
                    format!("r = {} is outside the small-coupling regime (r <= 0.1)", run.spec.r),
                ));
            }
            if run.detuning_points < 3 {
                out.push(Finding::error("classical.detuning_points", "need at least 3 points"));
            }
        }
    }

    if preset.uses_spectra {
        let f = &config.filter;
        if !(f.gamma.is_finite() && f.gamma > 0.0) {
            out.push(Finding::error("filter.gamma", format!("must be positive, got {}", f.gamma)));
        }
        if f.delta_k_points == 0 {
            out.push(Finding::error("filter.delta_k_points", "must be at least 1"));
        }
        if !(f.delta_k_min.is_finite() && f.delta_k_max.is_finite() && f.delta_k_min <= f.delta_k_max) {
            out.push(Finding::error("filter.delta_k_min", "range must be finite with min <= max"));
        }
        if f.sample_times.is_empty() {
            out.push(Finding::error("filter.sample_times", "need at least one time"));
        }
        if f.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            out.push(Finding::error("filter.sample_times", "must be strictly increasing"));
        }
        if time_ok {
            for &t in &f.sample_times {
                let k = t / time.dt;
                if t < 0.0 || t > time.t_end + 1e-9 * time.t_end || (k - k.round()).abs() > 1e-6 {
                    out.push(Finding::error(
                        "filter.sample_times",
                        format!("{t} is not a grid point of [0, {}] with step {}", time.t_end, time.dt),
                    ));
                }
            }
        }
    }

    if let Some(mc) = &config.monte_carlo {
        if mc.n_traj == 0 {
            out.push(Finding::error("monte_carlo.n_traj", "must be at least 1"));
        }
        if mc.bins == 0 {
            out.push(Finding::error("monte_carlo.bins", "must be at least 1"));
        }
    }
    out
}
