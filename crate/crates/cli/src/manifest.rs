use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use formspace::generator::{TopologySpec, SCHEMA_VERSION};
use formspace::pipeline::{CorpusStats, GenerateConfig};
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUN_SCHEMA: &str = "formspace-run/1";

/// Everything a run directory holds, as written by the stages so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub param_schema: String,
    pub topology: TopologySpec,
    pub seed: u64,
    pub deterministic: bool,
    pub counts: CorpusStats,
    pub acceptance_rate: f64,
    /// Configuration of each stage that ran, by stage name.
    pub stages: BTreeMap<String, serde_json::Value>,
    /// Artifact name to path relative to the run directory.
    pub artifacts: BTreeMap<String, String>,
    /// Wall-clock seconds per stage; the only field that varies between
    /// identical runs.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(generate: &GenerateConfig, counts: CorpusStats, deterministic: bool) -> Self {
        Self {
            schema: RUN_SCHEMA.into(),
            param_schema: SCHEMA_VERSION.into(),
            topology: generate.spec,
            seed: generate.seed,
            deterministic,
            acceptance_rate: counts.acceptance_rate(),
            counts,
            stages: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn load(run: &Path) -> Result<Self> {
        let path = run.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("missing artifact {}: run `generate` first", path.display()))?;
        let m: Self = serde_json::from_str(&text).with_context(|| format!("unreadable manifest {}", path.display()))?;
        if m.schema != RUN_SCHEMA || m.param_schema != SCHEMA_VERSION {
            bail!(
                "schema mismatch in {}: found {}/{}, expected {RUN_SCHEMA}/{SCHEMA_VERSION}",
                path.display(),
                m.schema,
                m.param_schema
            );
        }
        Ok(m)
    }

    pub fn save(&self, run: &Path) -> Result<()> {
        for (name, rel) in &self.artifacts {
            if !run.join(rel).exists() {
                bail!("artifact {name} ({rel}) is missing from {}", run.display());
            }
        }
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(run.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn record_stage<C: Serialize>(&mut self, stage: &str, config: &C, seconds: f64, artifacts: &[(&str, &str)]) {
        self.stages.insert(stage.into(), serde_json::to_value(config).expect("stage config serializes"));
        self.timings.insert(stage.into(), seconds);
        for (name, rel) in artifacts {
            self.artifacts.insert((*name).into(), (*rel).into());
        }
    }

    pub fn generate_config(&self) -> Result<GenerateConfig> {
        let v = self.stages.get("generate").context("manifest has no generate stage")?;
        Ok(serde_json::from_value(v.clone())?)
    }

    /// The manifest without timings, for comparing runs.
    pub fn without_timings(&self) -> Self {
        Self { timings: BTreeMap::new(), ..self.clone() }
    }
}
