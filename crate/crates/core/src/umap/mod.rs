//! UMAP embedding: exact kNN graph, fuzzy simplicial set, stochastic layout.

mod curve;
mod fuzzy;
mod knn;
mod layout;

use serde::{Deserialize, Serialize};

pub use curve::{affinity, fit_ab};
pub use fuzzy::{fuzzy_graph, smooth_knn_sigma, FuzzyGraph};
pub use knn::{knn_graph, KnnGraph};
pub use layout::layout;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{squared_distance, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmapConfig {
    pub k: usize,
    pub min_dist: f64,
    pub spread: f64,
    pub epochs: usize,
    pub negative_samples: usize,
    /// Standard deviation of the Gaussian initialization.
    pub init_scale: f64,
    pub seed: u64,
    /// Threads for the kNN search; the layout always runs on one thread.
    pub workers: usize,
}

impl Default for UmapConfig {
    fn default() -> Self {
        Self {
            k: 15,
            min_dist: 0.1,
            spread: 1.0,
            epochs: 200,
            negative_samples: 5,
            init_scale: 10.0,
            seed: 0,
            workers: 1,
        }
    }
}

/// Two-dimensional coordinates for a set of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<T> {
    pub ids: Vec<u64>,
    pub points: Vec<[T; 2]>,
    pub config: UmapConfig,
    pub edges: Vec<(usize, usize, T)>,
}

/// Text form of an embedding: config plus `(id, x, y)` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub schema: String,
    pub config: UmapConfig,
    pub points: Vec<EmbeddedPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

impl<T: Scalar> Embedding<T> {
    pub fn to_file(&self, schema: &str) -> EmbeddingFile {
        EmbeddingFile {
            schema: schema.to_string(),
            config: self.config,
            points: self
                .ids
                .iter()
                .zip(&self.points)
                .map(|(&id, p)| EmbeddedPoint { id, x: p[0].as_f64(), y: p[1].as_f64() })
                .collect(),
        }
    }

    pub fn from_file(file: &EmbeddingFile) -> Self {
        Self {
            ids: file.points.iter().map(|p| p.id).collect(),
            points: file.points.iter().map(|p| [T::lit(p.x), T::lit(p.y)]).collect(),
            config: file.config,
            edges: Vec::new(),
        }
    }

    pub fn points_f64(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p[0].as_f64(), p[1].as_f64()]).collect()
    }
}

/// Full pipeline: kNN graph, fuzzy graph, layout.
pub fn embed<T: Scalar>(ids: &[u64], data: &Matrix<T>, cfg: &UmapConfig) -> Result<Embedding<T>> {
    if ids.len() != data.rows() {
        return Err(Error::Argument(format!("{} ids for {} rows", ids.len(), data.rows())));
    }
    let knn = knn_graph(data, cfg.k, cfg.workers)?;
    let graph = fuzzy_graph(&knn);
    let points = layout(&graph, cfg);
    Ok(Embedding { ids: ids.to_vec(), points, config: *cfg, edges: graph.edges })
}

/// Places new rows into an existing embedding by inverse-distance weighting
/// of their `k` nearest embedded neighbours in feature space. A row that
/// coincides with an embedded row lands exactly on that row's point.
pub fn place_new_points<T: Scalar>(
    reference: &Matrix<T>,
    reference_points: &[[T; 2]],
    new_rows: &Matrix<T>,
    k: usize,
) -> Result<Vec<[T; 2]>> {
    if reference.rows() == 0 || reference.rows() != reference_points.len() {
        return Err(Error::Argument("reference embedding is empty or mismatched".into()));
    }
    if reference.cols() != new_rows.cols() {
        return Err(Error::Argument("dimension mismatch".into()));
    }
    let k = k.clamp(1, reference.rows());
    let mut out = Vec::with_capacity(new_rows.rows());
    for x in new_rows.iter_rows() {
        let mut d: Vec<(T, usize)> =
            reference.iter_rows().enumerate().map(|(i, r)| (squared_distance(x, r), i)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        if d[0].0 == T::zero() {
            out.push(reference_points[d[0].1]);
            continue;
        }
        let (mut sx, mut sy, mut sw) = (T::zero(), T::zero(), T::zero());
        for &(dist2, i) in &d[..k] {
            let w = T::one() / dist2.sqrt();
            sx = sx + w * reference_points[i][0];
            sy = sy + w * reference_points[i][1];
            sw = sw + w;
        }
        out.push([sx / sw, sy / sw]);
    }
    Ok(out)
}
