//! Run manifests: everything needed to repeat a command exactly.

use std::path::{Path, PathBuf};

use holobgs::imageio::{absolute, write_atomic};
use holobgs::profiles::SourceProfile;
use holobgs::{CompensationSign, IterationConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunManifest {
    Generate(GenerateManifest),
    Reconstruct(ReconstructManifest),
    Benchmark(BenchmarkManifest),
    Compare(CompareManifest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateManifest {
    pub target: PathBuf,
    pub iterations: IterationConfig,
    pub source: SourceProfile,
    /// Cyclic shift `[dx, dy]` applied to the target after loading.
    pub offset: [i64; 2],
    pub phase_map: Option<PathBuf>,
    /// `None` leaves the aberration uncompensated.
    pub compensation: Option<CompensationSign>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructManifest {
    pub pattern: PathBuf,
    pub source: SourceProfile,
    pub phase_map: Option<PathBuf>,
    /// Optional target used to build the metric mask.
    pub target: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub field_size: usize,
    pub square_sizes: Vec<usize>,
    pub max_iterations: usize,
    pub output_dir: PathBuf,
}

impl Default for BenchmarkManifest {
    fn default() -> Self {
        Self {
            field_size: 256,
            square_sizes: vec![17, 33],
            max_iterations: 30,
            output_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareManifest {
    pub targets_dir: PathBuf,
    pub iterations: usize,
    pub source: SourceProfile,
    pub output_dir: PathBuf,
}

fn resolve(path: &mut PathBuf) -> CliResult<()> {
    *path = absolute(path)?;
    Ok(())
}

impl RunManifest {
    /// Makes every path absolute so the manifest is independent of the
    /// working directory.
    pub fn resolve_paths(&mut self) -> CliResult<()> {
        match self {
            RunManifest::Generate(m) => {
                resolve(&mut m.target)?;
                if let Some(p) = &mut m.phase_map {
                    resolve(p)?;
                }
                resolve(&mut m.output_dir)
            }
            RunManifest::Reconstruct(m) => {
                resolve(&mut m.pattern)?;
                if let Some(p) = &mut m.phase_map {
                    resolve(p)?;
                }
                if let Some(p) = &mut m.target {
                    resolve(p)?;
                }
                resolve(&mut m.output_dir)
            }
            RunManifest::Benchmark(m) => resolve(&mut m.output_dir),
            RunManifest::Compare(m) => {
                resolve(&mut m.targets_dir)?;
                resolve(&mut m.output_dir)
            }
        }
    }

    pub fn output_dir(&self) -> &Path {
        match self {
            RunManifest::Generate(m) => &m.output_dir,
            RunManifest::Reconstruct(m) => &m.output_dir,
            RunManifest::Benchmark(m) => &m.output_dir,
            RunManifest::Compare(m) => &m.output_dir,
        }
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        match self {
            RunManifest::Generate(m) => m.output_dir = dir,
            RunManifest::Reconstruct(m) => m.output_dir = dir,
            RunManifest::Benchmark(m) => m.output_dir = dir,
            RunManifest::Compare(m) => m.output_dir = dir,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Writes `manifest.json` into the output directory.
    pub fn save(&self) -> CliResult<()> {
        write_atomic(
            &self.output_dir().join(MANIFEST_FILE),
            self.to_json().as_bytes(),
        )?;
        Ok(())
    }
}
