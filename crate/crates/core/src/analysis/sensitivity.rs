use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::classify::{classify_parameters, ClassifierConfig, ParamClass, ParameterClassReport};
use super::clusters::{detect_clusters, ClusterConfig, ClusterResult};
use crate::dataset::{FeatureMatrix, FormRecord};
use crate::error::{Error, Result};
use crate::generator::{DesignParams, Overrides, ParamName, SCHEMA_VERSION};
use crate::pipeline::{generate_corpus, Corpus, CorpusStats, GenerateConfig};
use crate::umap::{embed, Embedding, UmapConfig};

/// Everything a sensitivity study needs besides the override itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ExperimentConfig {
    pub generate: GenerateConfig,
    pub umap: UmapConfig,
    pub clustering: ClusterConfig,
    pub classifier: ClassifierConfig,
}

/// Embedding, clusters and parameter classes of one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutcome {
    pub embedding: Embedding<f32>,
    /// Parameters of each embedded record, aligned with `embedding.ids`.
    pub params: Vec<DesignParams>,
    pub clusters: ClusterResult,
    pub classes: ParameterClassReport,
}

/// Text summary of an [`AnalysisOutcome`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub points: usize,
    pub cluster_count: usize,
    pub eps: f64,
    pub noise: usize,
    /// Cluster sizes by label, largest first.
    pub cluster_sizes: Vec<(i64, usize)>,
    pub class_counts: BTreeMap<ParamClass, usize>,
    pub classes: ParameterClassReport,
}

impl AnalysisOutcome {
    pub fn cluster_count(&self) -> usize {
        self.clusters.cluster_count
    }

    pub fn report(&self) -> AnalysisReport {
        let mut sizes: Vec<(i64, usize)> =
            self.clusters.sizes().into_iter().filter(|&(l, _)| l >= 0).collect();
        sizes.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        AnalysisReport {
            schema: SCHEMA_VERSION.to_string(),
            points: self.params.len(),
            cluster_count: self.clusters.cluster_count,
            eps: self.clusters.eps,
            noise: self.clusters.labels.iter().filter(|&&l| l < 0).count(),
            cluster_sizes: sizes,
            class_counts: self.classes.class_counts(),
            classes: self.classes.clone(),
        }
    }
}

/// Embeds the accepted records' features, clusters the embedding and
/// classifies the parameters.
pub fn analyze_corpus(records: &[FormRecord], features: &FeatureMatrix, cfg: &ExperimentConfig) -> Result<AnalysisOutcome> {
    let by_id: BTreeMap<u64, &DesignParams> = records.iter().map(|r| (r.id, &r.params)).collect();
    let params = features
        .ids
        .iter()
        .map(|id| by_id.get(id).map(|p| **p).ok_or_else(|| Error::Input(format!("feature row {id} has no record"))))
        .collect::<Result<Vec<_>>>()?;
    let embedding = embed(&features.ids, &features.data, &cfg.umap)?;
    analyze_embedding(embedding, params, cfg)
}

/// Clusters and classifies an existing embedding.
pub fn analyze_embedding(
    embedding: Embedding<f32>,
    params: Vec<DesignParams>,
    cfg: &ExperimentConfig,
) -> Result<AnalysisOutcome> {
    if params.len() != embedding.ids.len() {
        return Err(Error::Argument("one parameter vector per embedded point required".into()));
    }
    let points = embedding.points_f64();
    let clusters = detect_clusters(&points, &cfg.clustering)?;
    let classes = classify_parameters(&params, &points, &clusters.labels, &cfg.classifier);
    Ok(AnalysisOutcome { embedding, params, clusters, classes })
}

/// Deterministic seed for a corpus that must not share samples with the
/// corpus drawn from `seed`.
pub fn fresh_seed(seed: u64) -> u64 {
    // splitmix64 finalizer; sample seeds are `seed ^ i` for small i, so the
    // high bits set here keep the two index ranges apart.
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) | (1 << 63)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassChange {
    pub name: String,
    pub baseline: ParamClass,
    pub with_override: ParamClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub schema: String,
    /// Overrides as `NAME -> "V"` or `"LO..HI"`.
    pub overrides: BTreeMap<String, String>,
    pub baseline_seed: u64,
    pub override_seed: u64,
    pub baseline_cluster_count: usize,
    pub override_cluster_count: usize,
    pub baseline_stats: Option<CorpusStats>,
    pub override_stats: CorpusStats,
    pub class_changes: Vec<ClassChange>,
    pub override_classes: ParameterClassReport,
}

/// Generates a corpus of the baseline size under `overrides`, analyses it
/// with the baseline's embedding and clustering settings, and compares.
/// Without an explicit `seed` the corpus is drawn from
/// `fresh_seed(cfg.generate.seed)`.
pub fn sensitivity_experiment(
    baseline: &AnalysisOutcome,
    cfg: &ExperimentConfig,
    overrides: &Overrides,
    seed: Option<u64>,
) -> Result<(SensitivityReport, Corpus, AnalysisOutcome)> {
    let mut gen = cfg.generate.clone();
    gen.seed = seed.unwrap_or_else(|| fresh_seed(cfg.generate.seed));
    for (k, v) in overrides {
        gen.overrides.insert(*k, *v);
    }
    let corpus = generate_corpus(&gen)?;
    let outcome = analyze_corpus(&corpus.records, &corpus.feature_matrix(), cfg)?;
    let class_changes = baseline
        .classes
        .scores
        .iter()
        .filter_map(|b| {
            let after = outcome.classes.class_of(&b.name)?;
            (after != b.class).then(|| ClassChange { name: b.name.clone(), baseline: b.class, with_override: after })
        })
        .collect();
    let report = SensitivityReport {
        schema: SCHEMA_VERSION.to_string(),
        overrides: gen
            .overrides
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    crate::generator::ParamOverride::Fixed(x) => x.to_string(),
                    crate::generator::ParamOverride::Range(lo, hi) => format!("{lo}..{hi}"),
                };
                (k.label().to_string(), text)
            })
            .collect(),
        baseline_seed: cfg.generate.seed,
        override_seed: gen.seed,
        baseline_cluster_count: baseline.cluster_count(),
        override_cluster_count: outcome.cluster_count(),
        baseline_stats: None,
        override_stats: corpus.stats.clone(),
        class_changes,
        override_classes: outcome.classes.clone(),
    };
    Ok((report, corpus, outcome))
}

/// CSV with one row per embedded record: id, coordinates, cluster label
/// and every parameter as a colour column.
pub fn plot_data_csv(outcome: &AnalysisOutcome) -> String {
    let mut s = String::from("id,x,y,cluster");
    for n in ParamName::ALL {
        s.push(',');
        s.push_str(n.label());
    }
    s.push('\n');
    for (i, &id) in outcome.embedding.ids.iter().enumerate() {
        let p = outcome.embedding.points[i];
        let _ = write!(s, "{id},{},{},{}", p[0], p[1], outcome.clusters.labels[i]);
        for v in outcome.params[i].values() {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}
