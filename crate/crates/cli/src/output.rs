//! CSV and JSON emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hubkin::observables::DecayFit;
use hubkin::{
    bloch_curve, Prediction, SpinBasis, StationaryState, TrajectoryRecord, WignerField, C64,
};

use crate::config::ComplexPair;
use crate::error::{CliError, Result};

/// Round-trip formatting with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, cells: &[f64]) {
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&num(*c));
    }
    out.push('\n');
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    write_text(path, &text)
}

pub const TRAJECTORY_HEADER: &str =
    "t,entropy,sigma,energy,spin_up,spin_down,spin_off_re,spin_off_im,h_drift,\
dist_hs,dist_diag,dist_offdiag,dist_max_entry";

/// One row per sample. Distance columns are `NaN` when no target was set;
/// `h_drift` is the largest change of `h(k)` since the first sample.
pub fn trajectory_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    let h0 = record
        .charges
        .first()
        .map(|c| c.h_profile.clone())
        .unwrap_or_default();
    for i in 0..record.len() {
        let c = &record.charges[i];
        let h_drift = c
            .h_profile
            .iter()
            .zip(&h0)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        let d = record.distances.get(i);
        let dist = |f: fn(&hubkin::observables::Distances) -> f64| d.map_or(f64::NAN, f);
        row(
            &mut out,
            &[
                record.times[i],
                record.entropy[i],
                record.entropy_production[i],
                c.energy,
                c.spin.up,
                c.spin.down,
                c.spin.off.re,
                c.spin.off.im,
                h_drift,
                dist(|d| d.all),
                dist(|d| d.diagonal),
                dist(|d| d.off_diagonal),
                dist(|d| d.max_entry),
            ],
        );
    }
    out
}

/// Columns `k, r_x, r_y, r_z`.
pub fn bloch_csv(field: &WignerField) -> String {
    let mut out = String::from("k,r_x,r_y,r_z\n");
    for (k, r) in field.grid().momenta().zip(bloch_curve(field)) {
        row(&mut out, &[k, r.x, r.y, r.z]);
    }
    out
}

/// Matrix entries per node: `k, w_up, w_down, w_off_re, w_off_im`.
pub fn field_csv(field: &WignerField) -> String {
    let mut out = String::from("k,w_up,w_down,w_off_re,w_off_im\n");
    for (k, w) in field.grid().momenta().zip(field.values()) {
        row(&mut out, &[k, w.up, w.down, w.off.re, w.off.im]);
    }
    out
}

/// File stem for a snapshot at time `t`.
pub fn snapshot_stem(t: f64) -> String {
    format!("t{t:.4}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryDiagnostics {
    pub spin_eigenvalues: [f64; 2],
    pub iterations: usize,
    pub h_residual: f64,
    pub spin_residual: f64,
    pub min_pivot: f64,
}

/// Serialized [`StationaryState`]; the basis is `[up₀, up₁, down₀, down₁]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryFile {
    pub f: Vec<f64>,
    pub a_up: f64,
    pub a_down: f64,
    pub basis: [ComplexPair; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<StationaryDiagnostics>,
}

impl StationaryFile {
    pub fn from_state(state: &StationaryState) -> Self {
        let [u, d] = state.basis.vectors();
        let p = |z: C64| [z.re, z.im];
        StationaryFile {
            f: state.f().to_vec(),
            a_up: state.a_up,
            a_down: state.a_down,
            basis: [p(u[0]), p(u[1]), p(d[0]), p(d[1])],
            diagnostics: None,
        }
    }

    pub fn from_prediction(pred: &Prediction) -> Self {
        let mut file = Self::from_state(&pred.state);
        file.diagnostics = Some(StationaryDiagnostics {
            spin_eigenvalues: pred.spin_eigenvalues,
            iterations: pred.iterations,
            h_residual: pred.h_residual,
            spin_residual: pred.spin_residual,
            min_pivot: pred.min_pivot,
        });
        file
    }

    pub fn to_state(&self) -> Result<StationaryState> {
        let c = |p: ComplexPair| C64::new(p[0], p[1]);
        let b = self.basis;
        let basis = SpinBasis::new([c(b[0]), c(b[1])], [c(b[2]), c(b[3])])?;
        Ok(StationaryState::new(
            self.f.clone(),
            self.a_up,
            self.a_down,
            basis,
        )?)
    }
}

pub fn read_stationary(path: &Path) -> Result<StationaryState> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: StationaryFile = serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })?;
    file.to_state()
}

/// Fit summary for one distance series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitEntry {
    Fit {
        rate: f64,
        intercept: f64,
        residual: f64,
        r_squared: f64,
        samples: usize,
    },
    Skipped {
        skipped: String,
    },
}

impl From<hubkin::Result<DecayFit>> for FitEntry {
    fn from(r: hubkin::Result<DecayFit>) -> Self {
        match r {
            Ok(f) => FitEntry::Fit {
                rate: f.rate,
                intercept: f.intercept,
                residual: f.residual,
                r_squared: f.r_squared,
                samples: f.samples,
            },
            Err(e) => FitEntry::Skipped {
                skipped: e.to_string(),
            },
        }
    }
}

pub fn table(rows: &[&[f64]], header: &str) -> String {
    let mut out = String::with_capacity(rows.len() * 64);
    let _ = writeln!(out, "{header}");
    for r in rows {
        row(&mut out, r);
    }
    out
}
