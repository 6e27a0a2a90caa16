use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use gmtc_core::{Error, Result};
use serde::Serialize;

/// Provenance record written next to every run's artifacts.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
    pub wall_clock_s: f64,
    pub git_describe: String,
}

pub struct RunRecorder {
    started: Instant,
    manifest: RunManifest,
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

impl RunRecorder {
    pub fn start(command: &str, config: String, seed: Option<u64>) -> Self {
        let argv: Vec<String> = std::env::args().skip(1).collect();
        RunRecorder {
            started: Instant::now(),
            manifest: RunManifest {
                command: format!("{} {}", command, argv.join(" ")).trim().to_string(),
                config,
                seed,
                artifacts: Vec::new(),
                wall_clock_s: 0.0,
                git_describe: git_describe(),
            },
        }
    }

    pub fn artifact(&mut self, path: impl AsRef<Path>) {
        self.manifest.artifacts.push(path.as_ref().to_path_buf());
    }

    pub fn finish(mut self, path: &Path) -> Result<()> {
        self.manifest.wall_clock_s = self.started.elapsed().as_secs_f64();
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
