//! Strang-split time stepping: half a step of unitary conjugation by
//! `H_eff`, a full explicit-midpoint step of the dissipative operator, and
//! another half conjugation with `H_eff` re-evaluated on the intermediate
//! state.

use alloc::vec::Vec;

use crate::collision::CollisionKernel;
use crate::error::{Error, Result};
use crate::field::WignerField;
use crate::observables::{charges, distances, entropy, entropy_production, TrajectoryRecord};
use crate::spin2::{conjugate_by_expi, HermitianMatrix2, Mat2};

/// Eigenvalues outside `[−AUDIT_TOLERANCE, 1 + AUDIT_TOLERANCE]` abort a run.
pub const AUDIT_TOLERANCE: f64 = 1e-6;

/// Fixed time step, final time and snapshot stride.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeStepConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record every `snapshot_stride`-th step (the initial state is always recorded).
    pub snapshot_stride: usize,
}

impl Default for TimeStepConfig {
    fn default() -> Self {
        TimeStepConfig {
            dt: 1.0 / 16.0,
            t_end: 15.0,
            snapshot_stride: 1,
        }
    }
}

impl TimeStepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: self.dt,
            });
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
            });
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "snapshot_stride",
                value: 0.0,
            });
        }
        Ok(())
    }

    /// `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }
}

/// Conjugates every node by its own `exp(−i h s)`.
fn conjugate_field(field: &WignerField, h: &[HermitianMatrix2], s: f64) -> WignerField {
    field.map(|j, w| conjugate_by_expi(w, &h[j], s))
}

/// One Strang step of size `dt`. The result carries time `field.time + dt`.
pub fn step(field: &WignerField, kernel: &CollisionKernel, dt: f64) -> Result<WignerField> {
    let h = kernel.effective_hamiltonian(field)?;
    let x = conjugate_field(field, &h, 0.5 * dt);
    let cx = kernel.dissipative(&x)?;
    let mid = x.add_scaled(0.5 * dt, &cx)?;
    let cm = kernel.dissipative(&mid)?;
    let mut y = x.add_scaled(dt, &cm)?;
    y.time = field.time + dt;
    y.check_fermi(AUDIT_TOLERANCE)?;
    let h = kernel.effective_hamiltonian(&y)?;
    let mut out = conjugate_field(&y, &h, 0.5 * dt);
    out.time = field.time + dt;
    out.check_fermi(AUDIT_TOLERANCE)?;
    Ok(out)
}

/// Receives the state after every accepted step (and the initial state as
/// step 0).
pub trait SnapshotSink {
    fn observe(&mut self, step: usize, field: &WignerField);
}

impl<F: FnMut(usize, &WignerField)> SnapshotSink for F {
    fn observe(&mut self, step: usize, field: &WignerField) {
        self(step, field)
    }
}

/// What [`evolve`] records at each snapshot.
#[derive(Clone, Debug)]
pub struct RecordOptions {
    /// State the distance series is measured against.
    pub target: Option<WignerField>,
    /// Basis (as unitary columns) for the diagonal/off-diagonal split.
    pub basis: Mat2,
    pub entropy_production: bool,
    pub keep_snapshots: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions {
            target: None,
            basis: Mat2::IDENTITY,
            entropy_production: true,
            keep_snapshots: false,
        }
    }
}

/// Outcome of [`evolve`]; on failure the record holds everything up to the
/// last accepted step.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub record: TrajectoryRecord,
    pub last: WignerField,
    pub steps_taken: usize,
    pub error: Option<Error>,
}

impl Evolution {
    pub fn into_result(self) -> Result<Self> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

fn sample(
    record: &mut TrajectoryRecord,
    field: &WignerField,
    kernel: &CollisionKernel,
    options: &RecordOptions,
) -> Result<()> {
    let sigma = if options.entropy_production {
        entropy_production(field, kernel)?
    } else {
        f64::NAN
    };
    let dist = match &options.target {
        Some(t) => Some(distances(field, t, &options.basis)?),
        None => None,
    };
    record.times.push(field.time);
    record.entropy.push(entropy(field));
    record.entropy_production.push(sigma);
    record.charges.push(charges(field));
    if let Some(d) = dist {
        record.distances.push(d);
    }
    if options.keep_snapshots {
        record.snapshots.push(field.clone());
    }
    Ok(())
}

/// Runs `round(t_end/dt)` steps from `initial`, sampling observables every
/// `snapshot_stride` steps and at the final step, and passing every state to
/// the sinks.
pub fn evolve(
    initial: &WignerField,
    cfg: &TimeStepConfig,
    kernel: &CollisionKernel,
    options: &RecordOptions,
    sinks: &mut [&mut dyn SnapshotSink],
) -> Evolution {
    let mut record = TrajectoryRecord::default();
    let mut current = initial.clone().with_time(0.0);
    let fail = |record, last, steps_taken, e| Evolution {
        record,
        last,
        steps_taken,
        error: Some(e),
    };
    if let Err(e) = cfg
        .validate()
        .and_then(|_| initial.ensure_same_grid(kernel.grid()))
    {
        return fail(record, current, 0, e);
    }
    let total = cfg.steps();
    let notify = |step: usize, field: &WignerField, sinks: &mut [&mut dyn SnapshotSink]| {
        for s in sinks.iter_mut() {
            s.observe(step, field);
        }
    };
    notify(0, &current, sinks);
    if let Err(e) = sample(&mut record, &current, kernel, options) {
        return fail(record, current, 0, e);
    }
    for i in 1..=total {
        match step(&current, kernel, cfg.dt) {
            Ok(next) => current = next.with_time(i as f64 * cfg.dt),
            Err(e) => return fail(record, current, i - 1, e),
        }
        notify(i, &current, sinks);
        if i % cfg.snapshot_stride == 0 || i == total {
            if let Err(e) = sample(&mut record, &current, kernel, options) {
                return fail(record, current, i, e);
            }
        }
    }
    Evolution {
        record,
        last: current,
        steps_taken: total,
        error: None,
    }
}

/// Advances `steps` steps without recording.
pub fn advance(
    initial: &WignerField,
    kernel: &CollisionKernel,
    dt: f64,
    steps: usize,
) -> Result<WignerField> {
    let mut current = initial.clone();
    let t0 = current.time;
    for i in 1..=steps {
        current = step(&current, kernel, dt)?.with_time(t0 + i as f64 * dt);
    }
    Ok(current)
}

/// Times at which [`evolve`] samples.
pub fn sample_times(cfg: &TimeStepConfig) -> Vec<f64> {
    let total = cfg.steps();
    (0..=total)
        .filter(|i| *i == 0 || i % cfg.snapshot_stride == 0 || *i == total)
        .map(|i| i as f64 * cfg.dt)
        .collect()
}
