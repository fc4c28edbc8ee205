//! Scenario configuration, run orchestration and file output for the
//! `hubkin` command-line tool.

pub mod bench;
pub mod config;
pub mod error;
pub mod manifold;
pub mod output;
pub mod run;

pub use config::{preset, ScenarioSpec, PRESETS};
pub use error::{CliError, Result};
pub use run::{run, RunManifest};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "HUBKIN_THREADS";

/// Sizes the global worker pool from [`THREADS_ENV`]. A no-op without the
/// `parallel` feature.
pub fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a non-negative integer, got {value:?}"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}
