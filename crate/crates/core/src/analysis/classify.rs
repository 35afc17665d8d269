use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::metrics::{normalized_mutual_information, quantile_bins, spearman};
use crate::generator::{DesignParams, ParamName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamClass {
    /// Tells which cluster a form falls into.
    ClusterDefining,
    /// Steers a form to a region inside its cluster.
    RegionDirecting,
    /// Spread arbitrarily within each cluster.
    Inert,
}

impl ParamClass {
    pub fn label(self) -> &'static str {
        match self {
            ParamClass::ClusterDefining => "cluster-defining",
            ParamClass::RegionDirecting => "region-directing",
            ParamClass::Inert => "inert",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub nmi_threshold: f64,
    pub correlation_threshold: f64,
    pub bins: usize,
    /// Clusters smaller than this are left out of the within-cluster score.
    pub min_cluster_size: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { nmi_threshold: 0.3, correlation_threshold: 0.3, bins: 10, min_cluster_size: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamScore {
    pub name: String,
    pub class: ParamClass,
    /// Normalized mutual information between the binned column and the cluster labels.
    pub nmi: f64,
    /// Mean over scored clusters of the larger absolute rank correlation
    /// with the two embedding axes.
    pub within_cluster: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterClassReport {
    pub config: ClassifierConfig,
    /// Whether mutual information was used (needs at least two clusters).
    pub used_mutual_information: bool,
    /// Clusters large enough to enter the within-cluster score.
    pub scored_clusters: usize,
    pub scores: Vec<ParamScore>,
}

impl ParameterClassReport {
    pub fn score(&self, name: &str) -> Option<&ParamScore> {
        self.scores.iter().find(|s| s.name == name)
    }

    pub fn class_of(&self, name: &str) -> Option<ParamClass> {
        self.score(name).map(|s| s.class)
    }

    pub fn with_class(&self, class: ParamClass) -> impl Iterator<Item = &str> {
        self.scores.iter().filter(move |s| s.class == class).map(|s| s.name.as_str())
    }

    pub fn class_counts(&self) -> BTreeMap<ParamClass, usize> {
        let mut m = BTreeMap::new();
        for c in [ParamClass::ClusterDefining, ParamClass::RegionDirecting, ParamClass::Inert] {
            m.insert(c, self.with_class(c).count());
        }
        m
    }
}

/// Classifies arbitrary named columns against an embedding and its cluster
/// labels (`-1` = noise). Only ranks and quantile bins of each column are
/// used, so any strictly increasing transform of a column leaves its class
/// and scores unchanged.
pub fn classify_columns(
    columns: &[(String, Vec<f64>)],
    points: &[[f64; 2]],
    labels: &[i64],
    cfg: &ClassifierConfig,
) -> ParameterClassReport {
    assert_eq!(points.len(), labels.len(), "one label per point");
    let clustered: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] >= 0).collect();
    let cluster_labels: Vec<i64> = clustered.iter().map(|&i| labels[i]).collect();

    let mut members: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &i in &clustered {
        members.entry(labels[i]).or_default().push(i);
    }
    let use_mi = members.len() >= 2;
    let scored: Vec<&Vec<usize>> = members.values().filter(|m| m.len() >= cfg.min_cluster_size.max(2)).collect();
    let axes: Vec<(Vec<f64>, Vec<f64>)> = scored
        .iter()
        .map(|m| (m.iter().map(|&i| points[i][0]).collect(), m.iter().map(|&i| points[i][1]).collect()))
        .collect();

    let scores = columns
        .iter()
        .map(|(name, col)| {
            assert_eq!(col.len(), points.len(), "column {name} has wrong length");
            let nmi = if use_mi {
                let sub: Vec<f64> = clustered.iter().map(|&i| col[i]).collect();
                normalized_mutual_information(&quantile_bins(&sub, cfg.bins), &cluster_labels)
            } else {
                0.0
            };
            let within_cluster = if scored.is_empty() {
                0.0
            } else {
                let total: f64 = scored
                    .iter()
                    .zip(&axes)
                    .map(|(m, (xs, ys))| {
                        let v: Vec<f64> = m.iter().map(|&i| col[i]).collect();
                        spearman(&v, xs).abs().max(spearman(&v, ys).abs())
                    })
                    .sum();
                total / scored.len() as f64
            };
            let class = if nmi >= cfg.nmi_threshold {
                ParamClass::ClusterDefining
            } else if within_cluster >= cfg.correlation_threshold {
                ParamClass::RegionDirecting
            } else {
                ParamClass::Inert
            };
            ParamScore { name: name.clone(), class, nmi, within_cluster }
        })
        .collect();

    ParameterClassReport { config: *cfg, used_mutual_information: use_mi, scored_clusters: scored.len(), scores }
}

/// Classifies the nineteen design parameters, in schema order.
pub fn classify_parameters(
    params: &[DesignParams],
    points: &[[f64; 2]],
    labels: &[i64],
    cfg: &ClassifierConfig,
) -> ParameterClassReport {
    let columns: Vec<(String, Vec<f64>)> = ParamName::ALL
        .iter()
        .map(|&n| (n.label().to_string(), params.iter().map(|p| f64::from(p.get(n))).collect()))
        .collect();
    classify_columns(&columns, points, labels, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn three_clusters(rng: &mut ChaCha8Rng, n: usize) -> (Vec<[f64; 2]>, Vec<i64>) {
        let centers = [[0.0, 0.0], [50.0, 0.0], [0.0, 50.0]];
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let c = (i % 3) as i64;
            let cc = centers[c as usize];
            pts.push([cc[0] + rng.gen_range(-5.0..5.0), cc[1] + rng.gen_range(-5.0..5.0)]);
            labels.push(c);
        }
        (pts, labels)
    }

    #[test]
    fn three_column_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (pts, labels) = three_clusters(&mut rng, 600);
        let selector: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let noise: Vec<f64> = (0..600).map(|_| rng.gen()).collect();
        let centers = [0.0, 50.0, 0.0];
        let local: Vec<f64> = pts
            .iter()
            .zip(&labels)
            .map(|(p, &l)| p[0] - centers[l as usize] + rng.gen_range(-0.5..0.5))
            .collect();
        let cols = vec![("sel".into(), selector), ("noise".into(), noise), ("local".into(), local)];
        let r = classify_columns(&cols, &pts, &labels, &ClassifierConfig::default());
        assert_eq!(r.class_of("sel"), Some(ParamClass::ClusterDefining));
        assert!((r.score("sel").unwrap().nmi - 1.0).abs() < 1e-12);
        assert_eq!(r.class_of("noise"), Some(ParamClass::Inert));
        assert_eq!(r.class_of("local"), Some(ParamClass::RegionDirecting));
    }

    #[test]
    fn single_cluster_skips_mutual_information() {
        let pts: Vec<[f64; 2]> = (0..100).map(|i| [i as f64, 0.0]).collect();
        let labels = vec![0; 100];
        let col: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = classify_columns(&[("x".into(), col)], &pts, &labels, &ClassifierConfig::default());
        assert!(!r.used_mutual_information);
        assert_eq!(r.class_of("x"), Some(ParamClass::RegionDirecting));
    }

    #[test]
    fn every_parameter_reported_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (pts, labels) = three_clusters(&mut rng, 90);
        let params: Vec<DesignParams> =
            (0..90).map(|i| crate::generator::sample_params(i, &Default::default()).unwrap()).collect();
        let r = classify_parameters(&params, &pts, &labels, &ClassifierConfig::default());
        assert_eq!(r.scores.len(), 19);
        assert_eq!(r.class_counts().values().sum::<usize>(), 19);
        for s in &r.scores {
            assert!((0.0..=1.0).contains(&s.nmi) && (0.0..=1.0).contains(&s.within_cluster));
        }
    }
}
