//! Command-line front end of the `phimin` toolkit.
//!
//! A run reads one JSON configuration, executes the selected pipeline and
//! writes its artifacts atomically into an output directory together with
//! `audit.json` and a hashed `manifest.json`.

pub mod config;
pub mod export;
pub mod run;

pub use config::{parse_config, ConfigError, RunConfig};
pub use run::{run, RunError, RunManifest, RunOptions, RunOutcome};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PHIMIN_THREADS";

/// Exit code of a run whose gated assertions all hold.
pub const EXIT_PASS: i32 = 0;
/// Exit code of a run in which a hypothesis-gated assertion failed.
pub const EXIT_AUDIT_FAILURE: i32 = 1;
/// Exit code of a run that could not complete.
pub const EXIT_ERROR: i32 = 2;

/// Parses a thread cap as given in [`THREADS_ENV`].
pub fn parse_thread_cap(value: &str) -> Result<usize, String> {
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("{THREADS_ENV} must be a positive integer, got {value:?}")),
    }
}

/// Sizes the global worker pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<Option<usize>, String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n = parse_thread_cap(&value)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot size the thread pool: {e}"))?;
    Ok(Some(n))
}
