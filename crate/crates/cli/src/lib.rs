//! Experiment runner: named scenarios, flat configs, CSV outputs and a
//! manifest with checksums.

pub mod config;
pub mod manifest;
pub mod scenario;

use std::fs;
use std::io;
use std::path::Path;

use config::{Config, SyntaxError, ValidationError};
use scenario::{Kind, Output};

/// Exit statuses, following the BSD sysexits convention.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug)]
pub enum RunError {
    Syntax(SyntaxError),
    Usage(String),
    Invalid(ValidationError),
    Module(swarmshape_core::Error),
    Io(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Syntax(_) | RunError::Usage(_) => EXIT_USAGE,
            RunError::Invalid(_) => EXIT_DATA,
            RunError::Module(_) | RunError::Io(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Syntax(e) => write!(f, "config syntax: {e}"),
            RunError::Usage(e) => write!(f, "usage: {e}"),
            RunError::Invalid(e) => write!(f, "invalid parameters: {e}"),
            RunError::Module(e) => write!(f, "run failed: {e}"),
            RunError::Io(e) => write!(f, "output failed: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Builds the config from an optional file and command-line overrides.
pub fn load_config(path: Option<&Path>, overrides: &[String], seed: Option<u64>) -> Result<Config, RunError> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| RunError::Usage(format!("{}: {e}", p.display())))?;
            Config::parse(&p.display().to_string(), &text).map_err(RunError::Syntax)?
        }
        None => Config::default(),
    };
    cfg.apply_overrides(overrides).map_err(RunError::Syntax)?;
    if let Some(s) = seed {
        cfg.set("seed", s.to_string());
    }
    Ok(cfg)
}

/// Validates, runs, and writes the artifacts and manifest into `out_dir`.
/// Nothing is written unless the run succeeds.
pub fn run_scenario(kind: Kind, mut cfg: Config, out_dir: &Path) -> Result<Output, RunError> {
    let seed = cfg.get_or("seed", DEFAULT_SEED).map_err(RunError::Invalid)?;
    let prepared = scenario::prepare(kind, &mut cfg, seed).map_err(RunError::Invalid)?;
    let output = scenario::run(&prepared).map_err(RunError::Module)?;
    fs::create_dir_all(out_dir).map_err(RunError::Io)?;
    for a in &output.artifacts {
        fs::write(out_dir.join(&a.name), &a.bytes).map_err(RunError::Io)?;
    }
    let text = manifest::render(kind.name(), cfg.resolved(), &output.artifacts);
    fs::write(out_dir.join(manifest::MANIFEST_NAME), text).map_err(RunError::Io)?;
    Ok(output)
}
