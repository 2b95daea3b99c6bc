//! Experiment driver behind the `nonnormal` binary. Each command reads a
//! [`RunConfig`], writes CSV files into an output directory and leaves a
//! `metadata.json` and a resolved `config.json` next to them.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

pub use commands::{cmd_accept, cmd_compare, cmd_detequiv, cmd_pseudospec, cmd_predict, cmd_rigidity, cmd_simulate};
pub use config::{ModelKind, RunConfig, Scalar, TestPoints};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "NONNORMAL_OUT";
pub const DEFAULT_OUT: &str = "nonnormal-out";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: nonnormal::Error,
    },
    #[error(transparent)]
    Compute(#[from] nonnormal::Error),
    #[error("check failed: {0}")]
    Failed(String),
}

impl CliError {
    pub(crate) fn invalid(e: nonnormal::Error) -> Self {
        Self::Config(e.to_string())
    }

    /// 2 for usage and configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 2,
            _ => 1,
        }
    }
}

/// `explicit`, else the configured directory, else `$NONNORMAL_OUT`, else
/// `./nonnormal-out`.
pub fn output_dir(explicit: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.output.clone()))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Collects written files and the metadata sidecar of one run.
#[derive(Debug)]
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `config.json` (when given) and `metadata.json`.
    pub fn finish(
        mut self,
        command: &str,
        cfg: Option<&RunConfig>,
        extra: serde_json::Value,
        started: std::time::Instant,
    ) -> Result<Vec<String>, CliError> {
        if let Some(cfg) = cfg {
            let text = serde_json::to_string_pretty(cfg).expect("config serializes");
            self.write("config.json", &text)?;
        }
        let meta = serde_json::json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "files": self.files,
            "threads": rayon::current_num_threads(),
            "wall_time_seconds": started.elapsed().as_secs_f64(),
            "details": extra,
        });
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        self.write("metadata.json", &text)?;
        Ok(self.files)
    }
}
