use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use formspace::generator::{parse_override, ParamName, ParamOverride};

#[derive(Debug, Parser)]
#[command(name = "formspace", version, about = "Generate, filter and map equilibrium networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample, solve, filter and persist a corpus into a new run directory.
    Generate(GenerateArgs),
    /// Train the self-organizing map and build the form-map.
    TrainSom(TrainSomArgs),
    /// Compute the UMAP embedding of the accepted forms.
    TrainUmap(TrainUmapArgs),
    /// Cluster the embedding and classify the parameters.
    Analyze(AnalyzeArgs),
    /// Compare the run against a fresh corpus drawn under overrides.
    Sensitivity(SensitivityArgs),
    /// Serve the run's artifacts over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Single worker and a seed that must be given or defaults to 0.
    #[arg(long)]
    pub deterministic: bool,
}

impl Common {
    pub fn workers(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.workers.max(1)
        }
    }
}

/// `NAME=V` or `NAME=LO..HI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverrideArg(pub ParamName, pub ParamOverride);

impl FromStr for OverrideArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_override(s).map(|(n, o)| OverrideArg(n, o)).map_err(|e| e.to_string())
    }
}

/// `WxH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid(pub usize, pub usize);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid {s:?} is not WxH"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad grid size {t:?}"));
        Ok(Grid(parse(w)?, parse(h)?))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Corpus seed; sample i uses seed ^ i.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of samples to draw (the chunk size when --accepted is set).
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Keep drawing until this many forms are accepted; only accepted
    /// records are written.
    #[arg(long)]
    pub accepted: Option<usize>,
    /// Run directory to create or overwrite.
    #[arg(long)]
    pub out: PathBuf,
    /// Fix a parameter or restrict its range; repeatable.
    #[arg(long = "override", value_name = "NAME=V|NAME=LO..HI")]
    pub overrides: Vec<OverrideArg>,
    #[arg(long, default_value_t = 20)]
    pub trails: usize,
    #[arg(long, default_value_t = 20)]
    pub layers: usize,
    /// Scale features per form or by bounds shared across the corpus.
    #[arg(long, value_parser = ["per-form", "corpus"], default_value = "per-form")]
    pub normalization: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct TrainSomArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, default_value = "80x80")]
    pub grid: Grid,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct TrainUmapArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, default_value_t = 15)]
    pub k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub min_dist: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long = "override", value_name = "NAME=V|NAME=LO..HI", required = true)]
    pub overrides: Vec<OverrideArg>,
    /// Seed of the comparison corpus; derived from the run's seed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; defaults to `sensitivity.json` in the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    /// Pending resampling jobs accepted before answering 503.
    #[arg(long, default_value_t = 16)]
    pub queue: usize,
    #[command(flatten)]
    pub common: Common,
}
