//! Step timing across grid sizes.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use hubkin::{step, BrillouinGrid, CollisionKernel, WignerField};

use crate::config::ScenarioSpec;
use crate::error::Result;

/// Minimum number of timed steps per size.
pub const MIN_REPETITIONS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeTiming {
    pub n: usize,
    pub repetitions: usize,
    /// Fastest step, in seconds.
    pub min_seconds: f64,
    pub median_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub sizes: Vec<SizeTiming>,
    /// Least-squares slope of `log t_min` against `log n`.
    pub exponent: f64,
    /// `t(32)/t(16)` when both sizes were measured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_32_16: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_seconds_64: Option<f64>,
}

/// Times single steps of `field` until `budget` has elapsed (at least
/// [`MIN_REPETITIONS`] steps).
pub fn time_steps(
    field: &WignerField,
    kernel: &CollisionKernel,
    dt: f64,
    budget: Duration,
) -> Result<SizeTiming> {
    let mut samples = Vec::new();
    let start = Instant::now();
    let mut current = field.clone();
    while samples.len() < MIN_REPETITIONS || start.elapsed() < budget {
        let t = Instant::now();
        let next = step(&current, kernel, dt)?;
        samples.push(t.elapsed().as_secs_f64());
        current = next;
    }
    samples.sort_by(f64::total_cmp);
    Ok(SizeTiming {
        n: field.len(),
        repetitions: samples.len(),
        min_seconds: samples[0],
        median_seconds: samples[samples.len() / 2],
    })
}

/// Slope of the least-squares line through `(log x, log y)`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let xm = lx.iter().sum::<f64>() / m;
    let ym = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - xm) * (a - xm)).sum();
    sxy / sxx
}

/// Times the scenario's initial field rebuilt at each configured size.
pub fn bench(spec: &ScenarioSpec) -> Result<BenchReport> {
    spec.validate()?;
    let budget = Duration::from_secs_f64(spec.bench.seconds_per_size);
    let mut sizes = Vec::new();
    for &n in &spec.bench.sizes {
        let grid = BrillouinGrid::new(n)?;
        let sized = ScenarioSpec {
            grid: n,
            ..spec.clone()
        };
        let field = sized.build_initial()?;
        let kernel = CollisionKernel::new(grid, spec.kernel.into())?;
        sizes.push(time_steps(&field, &kernel, spec.time.dt, budget)?);
    }
    Ok(report(sizes))
}

pub fn report(sizes: Vec<SizeTiming>) -> BenchReport {
    let n: Vec<f64> = sizes.iter().map(|s| s.n as f64).collect();
    let t: Vec<f64> = sizes.iter().map(|s| s.min_seconds).collect();
    let exponent = if sizes.len() >= 2 {
        loglog_slope(&n, &t)
    } else {
        f64::NAN
    };
    let at = |n: usize| sizes.iter().find(|s| s.n == n).map(|s| s.min_seconds);
    let ratio_32_16 = at(32).zip(at(16)).map(|(a, b)| a / b);
    let step_seconds_64 = at(64);
    BenchReport {
        sizes,
        exponent,
        ratio_32_16,
        step_seconds_64,
    }
}
