//! Cluster detection in the embedding, parameter classification and the
//! sensitivity experiments built on them.

mod classify;
mod clusters;
mod metrics;
mod sensitivity;

pub use classify::{classify_columns, classify_parameters, ClassifierConfig, ParamClass, ParamScore, ParameterClassReport};
pub use clusters::{detect_clusters, ClusterConfig, ClusterResult};
pub use metrics::{adjusted_rand_index, normalized_mutual_information, quantile_bins, spearman};
pub use sensitivity::{
    analyze_corpus, analyze_embedding, fresh_seed, plot_data_csv, sensitivity_experiment, AnalysisOutcome, AnalysisReport, ClassChange, ExperimentConfig,
    SensitivityReport,
};
