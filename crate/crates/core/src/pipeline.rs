//! Corpus generation: sample, expand, solve, filter, extract.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cem::{solve_equilibrium, FormDiagram, TopologyDiagram};
use crate::dataset::{normalize_corpus, FeatureMatrix, FormRecord, Normalization};
use crate::error::{Error, Result};
use crate::filter::{accept_form, AcceptanceVerdict, ProjectionAxis, RejectReason};
use crate::generator::{
    expand_params, sample_params, sample_seed, DesignParams, MappingConfig, Overrides, TopologySpec, SCHEMA_VERSION,
};
use crate::matrix::Matrix;
use crate::parallel::map_indexed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub spec: TopologySpec,
    pub mapping: MappingConfig,
    pub seed: u64,
    pub count: usize,
    /// When set, keep drawing past `count` until this many forms are
    /// accepted; only accepted records are kept.
    #[serde(default)]
    pub accepted_target: Option<usize>,
    pub overrides: Overrides,
    pub axis: ProjectionAxis,
    pub normalization: Normalization,
    /// Id of the first record; later records count up from it.
    pub first_id: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            spec: TopologySpec::default(),
            mapping: MappingConfig::default(),
            seed: 0,
            count: 1000,
            accepted_target: None,
            overrides: Overrides::new(),
            axis: ProjectionAxis::Z,
            normalization: Normalization::PerForm,
            first_id: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub generated: usize,
    pub accepted: usize,
    /// Rejection counts keyed by reason.
    pub rejected: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.generated == 0 {
            0.0
        } else {
            self.accepted as f64 / self.generated as f64
        }
    }

    fn add(&mut self, verdict: &AcceptanceVerdict) {
        self.generated += 1;
        match verdict.reason {
            None => self.accepted += 1,
            Some(r) => *self.rejected.entry(r.key().to_string()).or_default() += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub records: Vec<FormRecord>,
    pub stats: CorpusStats,
}

impl Corpus {
    /// Feature rows of the accepted records, in id order.
    pub fn feature_matrix(&self) -> FeatureMatrix {
        features_of(&self.records)
    }

    pub fn accepted(&self) -> impl Iterator<Item = &FormRecord> {
        self.records.iter().filter(|r| r.verdict.accepted)
    }
}

pub fn features_of(records: &[FormRecord]) -> FeatureMatrix {
    let mut sorted: Vec<&FormRecord> = records.iter().filter(|r| r.features.is_some()).collect();
    sorted.sort_by_key(|r| r.id);
    let dim = sorted.first().map_or(0, |r| r.features.as_ref().unwrap().len());
    let mut data = Matrix::zeros(0, dim);
    for r in &sorted {
        data.push_row(r.features.as_ref().unwrap()).expect("uniform feature width");
    }
    FeatureMatrix::new(SCHEMA_VERSION, sorted.iter().map(|r| r.id).collect(), data).expect("ids match rows")
}

/// Shared state for evaluating many parameter vectors on one topology.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub spec: TopologySpec,
    pub mapping: MappingConfig,
    pub axis: ProjectionAxis,
    topology: TopologyDiagram<f64>,
}

impl Evaluator {
    pub fn new(spec: TopologySpec, mapping: MappingConfig, axis: ProjectionAxis) -> Result<Self> {
        Ok(Self { spec, mapping, axis, topology: spec.build_topology()? })
    }

    pub fn topology(&self) -> &TopologyDiagram<f64> {
        &self.topology
    }

    pub fn solve(&self, params: &DesignParams) -> Result<FormDiagram<f64>> {
        let inputs = expand_params(params, &self.spec, &self.mapping)?;
        let mut form = solve_equilibrium(&self.topology, &inputs)?;
        form.source = Some(*params);
        Ok(form)
    }

    /// Solve and filter one parameter vector. Features are extracted per
    /// form; corpus-wide normalization is applied afterwards.
    pub fn evaluate(&self, id: u64, params: DesignParams) -> FormRecord {
        match self.solve(&params) {
            Err(_) => FormRecord::new(id, params, AcceptanceVerdict::rejected(RejectReason::DegenerateSolve)),
            Ok(form) => {
                let verdict = accept_form(&form, &self.topology, self.axis);
                let mut rec = FormRecord::new(id, params, verdict);
                rec.positions = form.positions.iter().map(|p| p.to_array()).collect();
                rec.forces = form.member_forces.clone();
                if verdict.accepted {
                    rec.features = Some(
                        crate::dataset::extract_features(&form.positions).iter().map(|&v| v as f32).collect(),
                    );
                }
                rec
            }
        }
    }
}

/// Draws `count` parameter vectors and evaluates them. Sample `i` uses
/// seed `seed ^ i` and gets id `first_id + i`; the output does not depend
/// on the worker count.
///
/// With `accepted_target` set, drawing stops at the sample that brings the
/// accepted count to the target, and rejected records are only counted.
pub fn generate_corpus(cfg: &GenerateConfig) -> Result<Corpus> {
    let eval = Evaluator::new(cfg.spec, cfg.mapping, cfg.axis)?;
    let mut stats = CorpusStats::default();
    let mut records = match cfg.accepted_target {
        None => {
            let params = draw_params(cfg, 0, cfg.count)?;
            let records = map_indexed(cfg.count, cfg.workers, |i| eval.evaluate(cfg.first_id + i as u64, params[i]));
            for r in &records {
                stats.add(&r.verdict);
            }
            records
        }
        Some(target) => {
            if target == 0 {
                return Err(Error::Argument("accepted target must be positive".into()));
            }
            let mut kept = Vec::with_capacity(target);
            let mut start = 0;
            while kept.len() < target {
                let chunk = cfg.count.max(1);
                let params = draw_params(cfg, start, chunk)?;
                let batch =
                    map_indexed(chunk, cfg.workers, |i| eval.evaluate(cfg.first_id + (start + i) as u64, params[i]));
                for r in batch {
                    if kept.len() == target {
                        break;
                    }
                    stats.add(&r.verdict);
                    if r.verdict.accepted {
                        kept.push(r);
                    }
                }
                start += chunk;
            }
            kept
        }
    };
    if cfg.normalization == Normalization::Corpus {
        apply_corpus_normalization(&mut records);
    }
    Ok(Corpus { records, stats })
}

fn draw_params(cfg: &GenerateConfig, start: usize, count: usize) -> Result<Vec<DesignParams>> {
    (start..start + count).map(|i| sample_params(sample_seed(cfg.seed, i as u64), &cfg.overrides)).collect()
}

fn apply_corpus_normalization(records: &mut [FormRecord]) {
    let accepted: Vec<usize> = (0..records.len()).filter(|&i| records[i].verdict.accepted).collect();
    let positions: Vec<Vec<crate::vector::Vec3<f64>>> = accepted
        .iter()
        .map(|&i| records[i].positions.iter().map(|p| crate::vector::Vec3::new(p[0], p[1], p[2])).collect())
        .collect();
    let views: Vec<&[crate::vector::Vec3<f64>]> = positions.iter().map(Vec::as_slice).collect();
    let features = normalize_corpus(&views, Normalization::Corpus);
    for (&i, f) in accepted.iter().zip(features) {
        records[i].features = Some(f.iter().map(|&v| v as f32).collect());
    }
}
