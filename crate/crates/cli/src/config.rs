//! JSON scenario configuration and the built-in presets.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hubkin::initial::{gaussian_window, nonthermal_field, perturbed, rotated_pauli};
use hubkin::{
    fermi_dirac, BrillouinGrid, CollisionKernelConfig, Dispersion, FermiDiracParams,
    HermitianMatrix2, SpinBasis, TimeStepConfig, WignerField, C64,
};

use crate::error::{CliError, Result};

/// Grid sum of a perturbation must vanish to this accuracy.
pub const PERTURBATION_MEAN_TOLERANCE: f64 = 1e-10;

/// Per-node trace of a perturbation must vanish to this accuracy.
pub const PERTURBATION_TRACE_TOLERANCE: f64 = 1e-12;

/// A complex number as `[re, im]`.
pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermiDiracSpec {
    pub beta: f64,
    pub mu_up: f64,
    pub mu_down: f64,
    /// `[up, down]`, each a vector of two complex numbers; canonical if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<[[ComplexPair; 2]; 2]>,
}

impl FermiDiracSpec {
    pub fn params(&self) -> Result<FermiDiracParams> {
        let basis = match &self.basis {
            None => SpinBasis::canonical(),
            Some([u, d]) => {
                let c = |p: &ComplexPair| C64::new(p[0], p[1]);
                SpinBasis::new([c(&u[0]), c(&u[1])], [c(&d[0]), c(&d[1])])
                    .map_err(|e| CliError::Config(format!("basis: {e}")))?
            }
        };
        Ok(FermiDiracParams {
            beta: self.beta,
            mu_up: self.mu_up,
            mu_down: self.mu_down,
            basis,
        })
    }
}

/// The unperturbed part of the initial field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseState {
    FermiDirac(FermiDiracSpec),
    /// The explicit non-thermal matrix function.
    Nonthermal,
}

/// Traceless, zero-mean perturbation added to the base state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    #[default]
    None,
    /// `¼ e^{−2πiτk} σ_z e^{2πiτk} − τ/18`, `τ = σ_x − σ_y + ½σ_z`.
    RotatedPauli,
    /// `σ_z` rotated about `x`, windowed by two periodic Gaussians.
    GaussianWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default = "default_eps")]
    pub eps_d: f64,
    #[serde(default = "default_eps")]
    pub eps_c: f64,
    #[serde(default = "default_true")]
    pub include_gamma2: bool,
    #[serde(default = "default_true")]
    pub include_diagonal: bool,
}

impl Default for KernelSpec {
    fn default() -> Self {
        let d = CollisionKernelConfig::default();
        KernelSpec {
            eps_d: d.eps_d,
            eps_c: d.eps_c,
            include_gamma2: true,
            include_diagonal: true,
        }
    }
}

impl From<KernelSpec> for CollisionKernelConfig {
    fn from(k: KernelSpec) -> Self {
        CollisionKernelConfig {
            eps_d: k.eps_d,
            eps_c: k.eps_c,
            include_gamma2: k.include_gamma2,
            include_diagonal: k.include_diagonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

impl From<TimeSpec> for TimeStepConfig {
    fn from(t: TimeSpec) -> Self {
        TimeStepConfig {
            dt: t.dt,
            t_end: t.t_end,
            snapshot_stride: t.snapshot_stride,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    /// Fixed incoming momentum `k₁`.
    #[serde(default = "default_k1")]
    pub k1: f64,
    /// Samples per axis of the `(k₃, k₄)` lattice.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

impl Default for ManifoldSpec {
    fn default() -> Self {
        ManifoldSpec {
            k1: default_k1(),
            resolution: default_resolution(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default = "default_bench_sizes")]
    pub sizes: Vec<usize>,
    /// Minimum wall time spent per size, in seconds.
    #[serde(default = "default_bench_budget")]
    pub seconds_per_size: f64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            sizes: default_bench_sizes(),
            seconds_per_size: default_bench_budget(),
        }
    }
}

/// One reproducible experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub grid: usize,
    pub base: BaseState,
    #[serde(default)]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub kernel: KernelSpec,
    pub time: TimeSpec,
    /// Times at which Bloch curves and field snapshots are written; each is
    /// rounded to the nearest step. Defaults to the initial and final time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    /// Trailing fraction of samples used for decay fits.
    #[serde(default = "default_fit_window")]
    pub fit_window: f64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub manifold: ManifoldSpec,
    #[serde(default)]
    pub bench: BenchSpec,
}

fn default_eps() -> f64 {
    hubkin::lattice::DEFAULT_EPSILON
}
fn default_true() -> bool {
    true
}
fn default_dt() -> f64 {
    1.0 / 16.0
}
fn default_stride() -> usize {
    1
}
fn default_k1() -> f64 {
    23.0 / 64.0
}
fn default_resolution() -> usize {
    256
}
fn default_bench_sizes() -> Vec<usize> {
    vec![16, 32, 64, 128]
}
fn default_bench_budget() -> f64 {
    1.0
}
fn default_fit_window() -> f64 {
    hubkin::observables::DEFAULT_FIT_WINDOW
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        BrillouinGrid::new(self.grid)?;
        CollisionKernelConfig::from(self.kernel).validate()?;
        TimeStepConfig::from(self.time).validate()?;
        if !(self.fit_window > 0.0 && self.fit_window <= 1.0) {
            return Err(CliError::Config(format!(
                "fit_window must lie in (0, 1], got {}",
                self.fit_window
            )));
        }
        if let Some(times) = &self.snapshot_times {
            if let Some(t) = times
                .iter()
                .find(|t| !(**t >= 0.0 && **t <= self.time.t_end))
            {
                return Err(CliError::Config(format!(
                    "snapshot time {t} outside [0, t_end]"
                )));
            }
        }
        if let BaseState::FermiDirac(fd) = &self.base {
            fd.params()?;
        }
        if matches!(self.base, BaseState::Nonthermal) && self.perturbation != Perturbation::None {
            return Err(CliError::Config(
                "the non-thermal base state takes no perturbation".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<BrillouinGrid> {
        Ok(BrillouinGrid::new(self.grid)?)
    }

    /// Step indices at which snapshot files are written.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let cfg = TimeStepConfig::from(self.time);
        let mut steps: Vec<usize> = match &self.snapshot_times {
            Some(times) => times
                .iter()
                .map(|t| (t / cfg.dt).round() as usize)
                .collect(),
            None => vec![0, cfg.steps()],
        };
        steps.sort_unstable();
        steps.dedup();
        steps
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// Parses a scenario, or the scenario echoed inside a run manifest.
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|source| CliError::Parse {
                path: path.into(),
                source,
            })?;
        let value = match value.get("config") {
            Some(inner) if value.get("code_version").is_some() => inner.clone(),
            _ => value,
        };
        let spec: ScenarioSpec =
            serde_json::from_value(value).map_err(|source| CliError::Parse {
                path: path.into(),
                source,
            })?;
        spec.validate()?;
        Ok(spec)
    }

    /// The initial field: base state plus perturbation, with the perturbation
    /// checked to be traceless and zero-mean on the grid and the result
    /// checked for the Fermi property.
    pub fn build_initial(&self) -> Result<WignerField> {
        let grid = self.grid()?;
        let base = match &self.base {
            BaseState::FermiDirac(fd) => {
                fermi_dirac(&fd.params()?, &grid, Dispersion::NearestNeighbor)
            }
            BaseState::Nonthermal => nonthermal_field(&grid),
        };
        let v: fn(f64) -> HermitianMatrix2 = match self.perturbation {
            Perturbation::None => return finish(base),
            Perturbation::RotatedPauli => rotated_pauli,
            Perturbation::GaussianWindow => gaussian_window,
        };
        check_perturbation(&grid, v)?;
        finish(perturbed(&base, v))
    }
}

/// Checks that `v` is traceless at every node and averages to zero on `grid`.
pub fn check_perturbation<F: Fn(f64) -> HermitianMatrix2>(
    grid: &BrillouinGrid,
    v: F,
) -> Result<()> {
    let mut mean = HermitianMatrix2::ZERO;
    for k in grid.momenta() {
        let vk = v(k);
        if vk.trace().abs() > PERTURBATION_TRACE_TOLERANCE {
            return Err(CliError::Config(format!(
                "perturbation is not traceless at k = {k}"
            )));
        }
        mean += vk;
    }
    let mean = mean.scale(grid.weight()).max_abs();
    if mean > PERTURBATION_MEAN_TOLERANCE {
        return Err(CliError::Config(format!(
            "perturbation does not average to zero on a grid of {} nodes (mean {mean:e})",
            grid.len()
        )));
    }
    Ok(())
}

fn finish(field: WignerField) -> Result<WignerField> {
    field.check_fermi(0.0)?;
    Ok(field)
}

/// Names of the built-in scenarios.
pub const PRESETS: [&str; 4] = ["high_t", "low_t", "degenerate_mu", "nonthermal"];

/// A built-in scenario on a 64-node grid, writing below `out/<name>`.
pub fn preset(name: &str) -> Option<ScenarioSpec> {
    let fd = |beta: f64, mu_up: f64, mu_down: f64| {
        BaseState::FermiDirac(FermiDiracSpec {
            beta,
            mu_up,
            mu_down,
            basis: None,
        })
    };
    let (base, perturbation, t_end) = match name {
        "high_t" => (fd(1e-4, 1e4, -1e4), Perturbation::RotatedPauli, 15.0),
        "low_t" => (
            fd(7.0, 17.0 / 16.0, 15.0 / 16.0),
            Perturbation::GaussianWindow,
            45.0,
        ),
        "degenerate_mu" => (fd(1.0, 1.0, 1.0), Perturbation::RotatedPauli, 15.0),
        "nonthermal" => (BaseState::Nonthermal, Perturbation::None, 30.0),
        _ => return None,
    };
    Some(ScenarioSpec {
        name: name.to_string(),
        grid: 64,
        base,
        perturbation,
        kernel: KernelSpec::default(),
        time: TimeSpec {
            dt: 1.0 / 16.0,
            t_end,
            snapshot_stride: 4,
        },
        snapshot_times: Some(vec![0.0, t_end / 3.0, t_end]),
        fit_window: default_fit_window(),
        output_dir: PathBuf::from("out").join(name),
        manifold: ManifoldSpec::default(),
        bench: BenchSpec::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build_valid_initial_fields() {
        for name in PRESETS {
            let spec = preset(name).unwrap();
            spec.validate().unwrap();
            let field = spec.build_initial().unwrap();
            assert_eq!(field.len(), 64);
        }
        assert!(preset("unknown").is_none());
    }

    #[test]
    fn unperturbed_initial_is_fermi_dirac() {
        let mut spec = preset("high_t").unwrap();
        spec.perturbation = Perturbation::None;
        let FermiDiracSpec {
            beta,
            mu_up,
            mu_down,
            ..
        } = match &spec.base {
            BaseState::FermiDirac(fd) => fd.clone(),
            _ => unreachable!(),
        };
        let params = FermiDiracParams {
            beta,
            mu_up,
            mu_down,
            basis: SpinBasis::canonical(),
        };
        let expected = fermi_dirac(&params, &spec.grid().unwrap(), Dispersion::NearestNeighbor);
        assert_eq!(spec.build_initial().unwrap(), expected);
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let spec = preset("nonthermal").unwrap();
        let text = serde_json::to_string_pretty(&spec).unwrap();
        assert_eq!(
            ScenarioSpec::from_json(&text, Path::new("x")).unwrap(),
            spec
        );
        let minimal = r#"{"name": "m", "grid": 16, "base": "nonthermal",
                          "time": {"t_end": 1.0}, "output_dir": "o"}"#;
        let spec = ScenarioSpec::from_json(minimal, Path::new("m")).unwrap();
        assert_eq!(spec.time.dt, 1.0 / 16.0);
        assert_eq!(spec.kernel, KernelSpec::default());
        assert_eq!(spec.snapshot_steps(), vec![0, 16]);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"name": "m", "grid": 18, "base": "nonthermal", "time": {"t_end": 1.0}, "output_dir": "o"}"#,
            r#"{"name": "m", "grid": 16, "base": "nonthermal", "time": {"t_end": -1.0}, "output_dir": "o"}"#,
            r#"{"name": "m", "grid": 16, "base": "nonthermal", "time": {"t_end": 1.0}, "output_dir": "o", "typo": 1}"#,
            r#"{"name": "m", "grid": 16, "base": "nonthermal", "perturbation": "rotated_pauli",
                "time": {"t_end": 1.0}, "output_dir": "o"}"#,
        ];
        for text in bad {
            assert!(
                ScenarioSpec::from_json(text, Path::new("b")).is_err(),
                "{text}"
            );
        }
    }

    #[test]
    fn perturbation_checks() {
        let grid = BrillouinGrid::new(16).unwrap();
        assert!(check_perturbation(&grid, rotated_pauli).is_ok());
        assert!(check_perturbation(&grid, gaussian_window).is_ok());
        let shifted = |k: f64| rotated_pauli(k) + HermitianMatrix2::pauli_x().scale(1e-6);
        assert!(matches!(
            check_perturbation(&grid, shifted),
            Err(CliError::Config(_))
        ));
        let traced = |k: f64| rotated_pauli(k) + HermitianMatrix2::diagonal(1e-3, 0.0);
        assert!(matches!(
            check_perturbation(&grid, traced),
            Err(CliError::Config(_))
        ));
    }
}
