//! Run orchestration: initial field, stationary prediction, evolution and
//! output files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use hubkin::integrator::SnapshotSink;
use hubkin::{
    build_stationary, evolve, fit_decay_rate, predict_stationary, CollisionKernel, Mat2,
    Prediction, RecordOptions, TimeStepConfig, WignerField,
};

use crate::config::ScenarioSpec;
use crate::error::{CliError, Result};
use crate::output::{self, FitEntry, StationaryFile};

pub const MANIFEST: &str = "manifest.json";
pub const TRAJECTORY: &str = "trajectory.csv";
pub const STATIONARY: &str = "stationary.json";
pub const DECAY: &str = "decay.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Complete,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryOutcome {
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_down: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

/// Record of a run, written at the start and rewritten at the end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub config: ScenarioSpec,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationaryOutcome>,
    pub steps_planned: usize,
    pub steps_taken: usize,
    /// Wall-clock seconds per step.
    pub step_seconds: Vec<f64>,
    pub total_seconds: f64,
    /// Emitted files, relative to the output directory.
    pub files: Vec<String>,
}

impl RunManifest {
    /// A run is successful only if it finished and the stationary prediction
    /// converged.
    pub fn failure(&self) -> Option<String> {
        if let Some(e) = &self.error {
            return Some(e.clone());
        }
        match &self.stationary {
            Some(StationaryOutcome {
                converged: false,
                error,
                ..
            }) => Some(format!(
                "stationary prediction failed: {}",
                error.as_deref().unwrap_or("unknown")
            )),
            _ => None,
        }
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })
}

struct Timing {
    last: Option<Instant>,
    seconds: Vec<f64>,
}

impl SnapshotSink for Timing {
    fn observe(&mut self, step: usize, _field: &WignerField) {
        let now = Instant::now();
        if step > 0 {
            if let Some(last) = self.last {
                self.seconds.push(now.duration_since(last).as_secs_f64());
            }
        }
        self.last = Some(now);
    }
}

struct Snapshots {
    steps: Vec<usize>,
    fields: Vec<WignerField>,
}

impl SnapshotSink for Snapshots {
    fn observe(&mut self, step: usize, field: &WignerField) {
        if self.steps.binary_search(&step).is_ok() {
            self.fields.push(field.clone());
        }
    }
}

/// The stationary field predicted from `initial`, with its prediction.
pub fn predicted_target(initial: &WignerField) -> hubkin::Result<(Prediction, WignerField)> {
    let pred = predict_stationary(initial)?;
    let field = build_stationary(&pred.state, initial.grid())?;
    Ok((pred, field))
}

/// Runs `spec`, writing all outputs below its output directory.
///
/// Configuration and I/O problems are returned as errors. Numerical failures
/// during the run are recorded in the returned manifest, whose
/// [`RunManifest::failure`] is then set.
pub fn run(spec: &ScenarioSpec) -> Result<RunManifest> {
    spec.validate()?;
    let dir = spec.output_dir.clone();
    let cfg = TimeStepConfig::from(spec.time);
    let mut manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: spec.clone(),
        status: RunStatus::Running,
        error: None,
        stationary: None,
        steps_planned: cfg.steps(),
        steps_taken: 0,
        step_seconds: Vec::new(),
        total_seconds: 0.0,
        files: Vec::new(),
    };
    let manifest_path = dir.join(MANIFEST);
    output::write_json(&manifest_path, &manifest)?;
    let started = Instant::now();

    let result = execute(spec, &dir, &cfg, &mut manifest);
    manifest.total_seconds = started.elapsed().as_secs_f64();
    match result {
        Ok(()) => manifest.status = RunStatus::Complete,
        Err(CliError::Numerics(e)) => {
            manifest.status = RunStatus::Failed;
            manifest.error = Some(e.to_string());
        }
        Err(e) => {
            manifest.status = RunStatus::Failed;
            manifest.error = Some(e.to_string());
            output::write_json(&manifest_path, &manifest)?;
            return Err(e);
        }
    }
    output::write_json(&manifest_path, &manifest)?;
    Ok(manifest)
}

fn execute(
    spec: &ScenarioSpec,
    dir: &Path,
    cfg: &TimeStepConfig,
    manifest: &mut RunManifest,
) -> Result<()> {
    let initial = spec.build_initial()?;
    let grid = *initial.grid();

    let (target, basis) = match predicted_target(&initial) {
        Ok((pred, field)) => {
            output::write_json(
                &dir.join(STATIONARY),
                &StationaryFile::from_prediction(&pred),
            )?;
            manifest.files.push(STATIONARY.into());
            manifest.stationary = Some(StationaryOutcome {
                converged: true,
                error: None,
                a_up: Some(pred.state.a_up),
                a_down: Some(pred.state.a_down),
                iterations: Some(pred.iterations),
            });
            (Some(field), pred.state.basis.unitary())
        }
        Err(e) => {
            manifest.stationary = Some(StationaryOutcome {
                converged: false,
                error: Some(e.to_string()),
                a_up: None,
                a_down: None,
                iterations: None,
            });
            (None, Mat2::IDENTITY)
        }
    };

    let kernel = CollisionKernel::new(grid, spec.kernel.into())?;
    let options = RecordOptions {
        target,
        basis,
        entropy_production: true,
        keep_snapshots: false,
    };
    let mut timing = Timing {
        last: None,
        seconds: Vec::new(),
    };
    let mut snaps = Snapshots {
        steps: spec.snapshot_steps(),
        fields: Vec::new(),
    };
    let evolution = evolve(
        &initial,
        cfg,
        &kernel,
        &options,
        &mut [&mut timing, &mut snaps],
    );
    manifest.steps_taken = evolution.steps_taken;
    manifest.step_seconds = timing.seconds;

    output::write_text(
        &dir.join(TRAJECTORY),
        &output::trajectory_csv(&evolution.record),
    )?;
    manifest.files.push(TRAJECTORY.into());
    for field in &snaps.fields {
        let stem = output::snapshot_stem(field.time);
        for (name, text) in [
            (format!("bloch_{stem}.csv"), output::bloch_csv(field)),
            (format!("field_{stem}.csv"), output::field_csv(field)),
        ] {
            output::write_text(&dir.join(&name), &text)?;
            manifest.files.push(name);
        }
    }

    if options.target.is_some() {
        let record = &evolution.record;
        let series = |f: fn(&hubkin::observables::Distances) -> f64| -> Vec<f64> {
            record.distances.iter().map(f).collect()
        };
        let fit = |values: Vec<f64>| {
            FitEntry::from(fit_decay_rate(&record.times, &values, spec.fit_window))
        };
        let summary = DecaySummary {
            target: "predicted_stationary".into(),
            fit_window: spec.fit_window,
            hs: fit(series(|d| d.all)),
            diagonal: fit(series(|d| d.diagonal)),
            off_diagonal: fit(series(|d| d.off_diagonal)),
            max_entry: fit(series(|d| d.max_entry)),
        };
        output::write_json(&dir.join(DECAY), &summary)?;
        manifest.files.push(DECAY.into());
    }

    match evolution.error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// Exponential fits of the distance to the target state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySummary {
    pub target: String,
    pub fit_window: f64,
    pub hs: FitEntry,
    pub diagonal: FitEntry,
    pub off_diagonal: FitEntry,
    pub max_entry: FitEntry,
}

/// Stationary prediction only; writes the state file and returns it.
pub fn predict(spec: &ScenarioSpec) -> Result<StationaryFile> {
    spec.validate()?;
    let initial = spec.build_initial()?;
    let pred = predict_stationary(&initial)?;
    let file = StationaryFile::from_prediction(&pred);
    output::write_json(&spec.output_dir.join(STATIONARY), &file)?;
    Ok(file)
}

/// Loads a scenario from a config file or a run manifest, optionally
/// redirecting its output.
pub fn load_spec(path: &Path, output_dir: Option<PathBuf>) -> Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::from_file(path)?;
    if let Some(dir) = output_dir {
        spec.output_dir = dir;
    }
    Ok(spec)
}
