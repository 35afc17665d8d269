use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use formspace::analysis::{
    analyze_embedding, plot_data_csv, sensitivity_experiment, AnalysisOutcome, ExperimentConfig,
};
use formspace::dataset::{read_dataset, write_dataset, FormRecord, Normalization};
use formspace::generator::{DesignParams, Overrides, TopologySpec, SCHEMA_VERSION};
use formspace::pipeline::{generate_corpus, GenerateConfig};
use formspace::som::{build_form_map, read_model, som_quality, train_som, write_model, FormMapGrid, SomConfig, SomQuality};
use formspace::umap::{embed, Embedding, EmbeddingFile, UmapConfig};
use formspace::Som;
use serde::{Deserialize, Serialize};

use crate::args::{AnalyzeArgs, Common, GenerateArgs, OverrideArg, SensitivityArgs, TrainSomArgs, TrainUmapArgs};
use crate::manifest::RunManifest;

pub const SOM_FILE: &str = "som.fsom";
pub const FORMMAP_FILE: &str = "formmap.json";
pub const EMBEDDING_FILE: &str = "embedding.json";
pub const ANALYSIS_FILE: &str = "analysis.json";
pub const PLOT_FILE: &str = "plot.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity.json";
pub const RESAMPLED_FILE: &str = "resampled.jsonl";

/// `formmap.json`: the grid plus how it was trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormMapFile {
    pub schema: String,
    pub config: SomConfig,
    pub quality: SomQuality,
    pub grid: FormMapGrid,
}

fn seed_for(explicit: Option<u64>, common: &Common) -> u64 {
    match explicit {
        Some(s) => s,
        None if common.deterministic => 0,
        None => std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0),
    }
}

fn overrides_of(args: &[OverrideArg]) -> Overrides {
    args.iter().map(|o| (o.0, o.1)).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    serde_json::to_writer_pretty(w, value)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, hint: &str) -> Result<T> {
    let f = File::open(path).with_context(|| format!("missing artifact {}: {hint}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("unreadable artifact {}", path.display()))
}

pub fn check_schema(found: &str, path: &Path) -> Result<()> {
    if found != SCHEMA_VERSION {
        bail!("schema mismatch in {}: found {found:?}, expected {SCHEMA_VERSION:?}", path.display());
    }
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<RunManifest> {
    let start = Instant::now();
    let cfg = GenerateConfig {
        spec: TopologySpec::new(args.trails, args.layers)?,
        seed: seed_for(args.seed, &args.common),
        count: args.count,
        accepted_target: args.accepted,
        overrides: overrides_of(&args.overrides),
        normalization: if args.normalization == "corpus" { Normalization::Corpus } else { Normalization::PerForm },
        workers: args.common.workers(),
        ..GenerateConfig::default()
    };
    let corpus = generate_corpus(&cfg)?;
    write_dataset(&args.out, &corpus.records)?;
    let mut manifest = RunManifest::new(&cfg, corpus.stats.clone(), args.common.deterministic);
    manifest.record_stage(
        "generate",
        &cfg,
        start.elapsed().as_secs_f64(),
        &[("records", formspace::dataset::RECORDS_FILE), ("features", formspace::dataset::FEATURES_FILE)],
    );
    manifest.save(&args.out)?;
    Ok(manifest)
}

pub fn train_som_stage(args: &TrainSomArgs) -> Result<FormMapFile> {
    let start = Instant::now();
    let mut manifest = RunManifest::load(&args.run)?;
    let (_, features) = read_dataset(&args.run)?;
    if features.ids.is_empty() {
        bail!("run {} has no accepted forms to train on", args.run.display());
    }
    let cfg = SomConfig {
        width: args.grid.0,
        height: args.grid.1,
        epochs: args.epochs,
        seed: args.seed.unwrap_or(manifest.seed),
        workers: args.common.workers(),
    };
    let model = train_som(&features.data, &cfg)?;
    let quality = som_quality(&model, &features.data, cfg.workers)?;
    let grid = build_form_map(&model, &features.ids, &features.data, cfg.workers)?;
    write_model(BufWriter::new(File::create(args.run.join(SOM_FILE))?), &model)?;
    let file = FormMapFile { schema: SCHEMA_VERSION.into(), config: cfg, quality, grid };
    write_json(&args.run.join(FORMMAP_FILE), &file)?;
    manifest.record_stage(
        "train-som",
        &serde_json::json!({ "config": cfg, "quality": quality }),
        start.elapsed().as_secs_f64(),
        &[("som", SOM_FILE), ("formmap", FORMMAP_FILE)],
    );
    manifest.save(&args.run)?;
    Ok(file)
}

pub fn train_umap_stage(args: &TrainUmapArgs) -> Result<EmbeddingFile> {
    let start = Instant::now();
    let mut manifest = RunManifest::load(&args.run)?;
    let (_, features) = read_dataset(&args.run)?;
    let cfg = UmapConfig {
        k: args.k,
        min_dist: args.min_dist,
        epochs: args.epochs,
        seed: args.seed.unwrap_or(manifest.seed),
        workers: args.common.workers(),
        ..UmapConfig::default()
    };
    let embedding = embed(&features.ids, &features.data, &cfg)?;
    let file = embedding.to_file(SCHEMA_VERSION);
    write_json(&args.run.join(EMBEDDING_FILE), &file)?;
    manifest.record_stage("train-umap", &cfg, start.elapsed().as_secs_f64(), &[("embedding", EMBEDDING_FILE)]);
    manifest.save(&args.run)?;
    Ok(file)
}

/// Records and the stored embedding of a run, analysed with default
/// clustering and classifier settings.
pub fn load_analysis(run: &Path, manifest: &RunManifest) -> Result<(Vec<FormRecord>, ExperimentConfig, AnalysisOutcome)> {
    let (records, _) = read_dataset(run)?;
    let path = run.join(EMBEDDING_FILE);
    let file: EmbeddingFile = read_json(&path, "run `train-umap` first")?;
    check_schema(&file.schema, &path)?;
    let by_id: std::collections::BTreeMap<u64, DesignParams> = records.iter().map(|r| (r.id, r.params)).collect();
    let params = file
        .points
        .iter()
        .map(|p| by_id.get(&p.id).copied().with_context(|| format!("embedded id {} has no record", p.id)))
        .collect::<Result<Vec<_>>>()?;
    let cfg = ExperimentConfig { generate: manifest.generate_config()?, umap: file.config, ..ExperimentConfig::default() };
    let outcome = analyze_embedding(Embedding::<f32>::from_file(&file), params, &cfg)?;
    Ok((records, cfg, outcome))
}

pub fn analyze_stage(args: &AnalyzeArgs) -> Result<formspace::analysis::AnalysisReport> {
    let start = Instant::now();
    let mut manifest = RunManifest::load(&args.run)?;
    let (_, cfg, outcome) = load_analysis(&args.run, &manifest)?;
    let report = outcome.report();
    write_json(&args.run.join(ANALYSIS_FILE), &report)?;
    std::fs::write(args.run.join(PLOT_FILE), plot_data_csv(&outcome))?;
    manifest.record_stage(
        "analyze",
        &serde_json::json!({ "clustering": cfg.clustering, "classifier": cfg.classifier }),
        start.elapsed().as_secs_f64(),
        &[("analysis", ANALYSIS_FILE), ("plot", PLOT_FILE)],
    );
    manifest.save(&args.run)?;
    Ok(report)
}

pub fn sensitivity_stage(args: &SensitivityArgs) -> Result<formspace::analysis::SensitivityReport> {
    let start = Instant::now();
    let mut manifest = RunManifest::load(&args.run)?;
    let (_, mut cfg, baseline) = load_analysis(&args.run, &manifest)?;
    cfg.generate.workers = args.common.workers();
    let (mut report, _, _) = sensitivity_experiment(&baseline, &cfg, &overrides_of(&args.overrides), args.seed)?;
    report.baseline_stats = Some(manifest.counts.clone());
    let out = args.out.clone().unwrap_or_else(|| args.run.join(SENSITIVITY_FILE));
    write_json(&out, &report)?;
    if let Ok(rel) = out.strip_prefix(&args.run) {
        let rel = rel.to_string_lossy().into_owned();
        manifest.record_stage(
            "sensitivity",
            &serde_json::json!({ "overrides": report.overrides, "seed": report.override_seed }),
            start.elapsed().as_secs_f64(),
            &[("sensitivity", rel.as_str())],
        );
        manifest.save(&args.run)?;
    }
    Ok(report)
}

pub fn load_som(run: &Path) -> Result<Option<Som>> {
    let path = run.join(SOM_FILE);
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(read_model(BufReader::new(File::open(&path)?))?))
}
