//! Read endpoints over a run directory plus a bounded resampling queue.
//!
//! [`Service::handle`] maps a method, a request target and a body to a
//! [`Response`] without touching the network, so it is tested directly;
//! [`serve`] only adapts it to HTTP.

use std::collections::{BTreeMap, VecDeque};
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Condvar, Mutex, RwLock};

use anyhow::{Context, Result};
use formspace::cem::MemberClass;
use formspace::dataset::{read_dataset, read_records, write_records, FeatureMatrix, FormRecord};
use formspace::generator::{DesignParams, ParamName, PARAM_COUNT, SCHEMA_VERSION};
use formspace::matrix::Matrix;
use formspace::pipeline::Evaluator;
use formspace::umap::{place_new_points, EmbeddingFile};
use formspace::Som;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{load_som, read_json, FormMapFile, EMBEDDING_FILE, FORMMAP_FILE, RESAMPLED_FILE};
use crate::manifest::RunManifest;

pub const DEFAULT_DELTA: u8 = 5;
const MAX_RESAMPLE: usize = 1000;
const PLACEMENT_NEIGHBOURS: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<u32>,
}

impl Response {
    fn json(status: u16, value: serde_json::Value) -> Self {
        Self { status, body: value.to_string(), retry_after: None }
    }

    fn ok(value: serde_json::Value) -> Self {
        Self::json(200, value)
    }

    fn error(status: u16, message: impl Into<String>) -> Self {
        Self::json(status, json!({ "schema": SCHEMA_VERSION, "error": message.into() }))
    }

    pub fn value(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).unwrap_or(serde_json::Value::Null)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

/// One form produced by a resampling job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewForm {
    pub id: u64,
    pub accepted: bool,
    /// Form-map node of an accepted form, when a map is loaded.
    pub node: Option<usize>,
    /// Embedding position of an accepted form, when an embedding is loaded.
    pub position: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub job: u64,
    pub record: u64,
    pub n: usize,
    pub delta: u8,
    pub status: JobStatus,
    pub forms: Vec<NewForm>,
    pub error: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResampleRequest {
    id: u64,
    n: usize,
    delta: Option<u8>,
}

struct State {
    records: BTreeMap<u64, FormRecord>,
    next_id: u64,
}

#[derive(Default)]
struct Queue {
    pending: VecDeque<u64>,
    jobs: BTreeMap<u64, Job>,
    next_job: u64,
}

pub struct Service {
    run: PathBuf,
    evaluator: Evaluator,
    features: FeatureMatrix,
    formmap: Option<FormMapFile>,
    embedding: Option<EmbeddingFile>,
    som: Option<Som>,
    state: RwLock<State>,
    queue: Mutex<Queue>,
    wake: Condvar,
    capacity: usize,
}

impl Service {
    /// Loads a run directory. The form-map and embedding are optional;
    /// their endpoints answer 404 until the stages have run.
    pub fn load(run: &Path, capacity: usize) -> Result<Self> {
        let manifest = RunManifest::load(run)?;
        let generate = manifest.generate_config()?;
        let (records, features) = read_dataset(run)?;
        let mut by_id: BTreeMap<u64, FormRecord> = records.into_iter().map(|r| (r.id, r)).collect();
        let appended = run.join(RESAMPLED_FILE);
        if appended.exists() {
            for r in read_records(std::fs::File::open(&appended)?)? {
                by_id.insert(r.id, r);
            }
        }
        let formmap = match run.join(FORMMAP_FILE) {
            p if p.exists() => Some(read_json::<FormMapFile>(&p, "")?),
            _ => None,
        };
        let embedding = match run.join(EMBEDDING_FILE) {
            p if p.exists() => Some(read_json::<EmbeddingFile>(&p, "")?),
            _ => None,
        };
        let next_id = by_id.keys().next_back().map_or(0, |k| k + 1);
        Ok(Self {
            run: run.to_path_buf(),
            evaluator: Evaluator::new(generate.spec, generate.mapping, generate.axis)?,
            features,
            formmap,
            embedding,
            som: load_som(run)?,
            state: RwLock::new(State { records: by_id, next_id }),
            queue: Mutex::new(Queue::default()),
            wake: Condvar::new(),
            capacity,
        })
    }

    pub fn handle(&self, method: &str, target: &str, body: &[u8]) -> Response {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        let parts: Vec<&str> = path.trim_matches('/').split('/').filter(|s| !s.is_empty()).collect();
        match (method, parts.as_slice()) {
            ("GET", ["formmap"]) => self.formmap(),
            ("GET", ["forms", id]) => match id.parse() {
                Ok(id) => self.form(id),
                Err(_) => Response::error(400, format!("bad form id {id:?}")),
            },
            ("GET", ["embedding"]) => self.embedding(query),
            ("GET", ["cells", node, "family"]) => match node.parse() {
                Ok(node) => self.family(node),
                Err(_) => Response::error(400, format!("bad cell {node:?}")),
            },
            ("POST", ["resample"]) => self.resample(body),
            ("GET", ["jobs", id]) => match id.parse() {
                Ok(id) => self.job(id),
                Err(_) => Response::error(400, format!("bad job id {id:?}")),
            },
            (_, ["formmap"] | ["forms", _] | ["embedding"] | ["cells", _, "family"] | ["resample"] | ["jobs", _]) => {
                Response::error(405, format!("method {method} not allowed on {path}"))
            }
            _ => Response::error(404, format!("no endpoint {path}")),
        }
    }

    fn formmap(&self) -> Response {
        let Some(map) = &self.formmap else {
            return Response::error(404, "no form-map in this run; run train-som");
        };
        let cells: Vec<_> = map
            .grid
            .cells
            .iter()
            .map(|c| json!({ "node": c.node, "row": c.row, "col": c.col, "count": c.members.len(), "representative": c.representative }))
            .collect();
        Response::ok(json!({
            "schema": SCHEMA_VERSION,
            "width": map.grid.width,
            "height": map.grid.height,
            "occupied": map.grid.occupied(),
            "gaps": map.grid.gaps(),
            "quality": map.quality,
            "cells": cells,
        }))
    }

    fn form(&self, id: u64) -> Response {
        let state = self.state.read().unwrap();
        let Some(r) = state.records.get(&id) else {
            return Response::error(404, format!("no form {id}"));
        };
        let members: Vec<_> = if r.forces.is_empty() {
            Vec::new()
        } else {
            self.evaluator
                .topology()
                .members()
                .iter()
                .zip(&r.forces)
                .enumerate()
                .map(|(i, (m, f))| {
                    let kind = if m.class == MemberClass::Trail { "trail" } else { "deviation" };
                    json!({ "id": i, "a": m.a, "b": m.b, "kind": kind, "state": f.state, "magnitude": f.magnitude })
                })
                .collect()
        };
        Response::ok(json!({
            "schema": SCHEMA_VERSION,
            "id": r.id,
            "params": r.params,
            "verdict": r.verdict,
            "nodes": r.positions,
            "members": members,
        }))
    }

    fn embedding(&self, query: &str) -> Response {
        let Some(file) = &self.embedding else {
            return Response::error(404, "no embedding in this run; run train-umap");
        };
        let mut color = None;
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            match pair.split_once('=') {
                Some(("color", name)) => match name.parse::<ParamName>() {
                    Ok(p) => color = Some(p),
                    Err(_) => return Response::error(400, format!("unknown color parameter {name:?}")),
                },
                _ => return Response::error(400, format!("unknown query {pair:?}")),
            }
        }
        let state = self.state.read().unwrap();
        let points: Vec<_> = file
            .points
            .iter()
            .map(|p| {
                let value = color.and_then(|c| state.records.get(&p.id).map(|r| r.params.get(c)));
                json!({ "id": p.id, "x": p.x, "y": p.y, "value": value })
            })
            .collect();
        Response::ok(json!({
            "schema": SCHEMA_VERSION,
            "color": color.map(|c| c.label()),
            "points": points,
        }))
    }

    fn family(&self, node: usize) -> Response {
        let Some(map) = &self.formmap else {
            return Response::error(404, "no form-map in this run; run train-som");
        };
        let Some(cell) = map.grid.cells.get(node) else {
            return Response::error(404, format!("no cell {node}"));
        };
        let state = self.state.read().unwrap();
        let members: Vec<_> = cell
            .members
            .iter()
            .map(|id| json!({ "id": id, "params": state.records.get(id).map(|r| r.params) }))
            .collect();
        Response::ok(json!({
            "schema": SCHEMA_VERSION,
            "node": cell.node,
            "row": cell.row,
            "col": cell.col,
            "representative": cell.representative,
            "members": members,
        }))
    }

    fn resample(&self, body: &[u8]) -> Response {
        let req: ResampleRequest = match serde_json::from_slice(body) {
            Ok(r) => r,
            Err(e) => return Response::error(400, format!("bad resample request: {e}")),
        };
        let delta = req.delta.unwrap_or(DEFAULT_DELTA);
        if req.n == 0 || req.n > MAX_RESAMPLE || delta > DesignParams::MAX {
            return Response::error(400, format!("need 1 <= n <= {MAX_RESAMPLE} and delta <= 100"));
        }
        if !self.state.read().unwrap().records.contains_key(&req.id) {
            return Response::error(404, format!("no form {}", req.id));
        }
        let mut q = self.queue.lock().unwrap();
        if q.pending.len() >= self.capacity {
            let mut r = Response::error(503, "resampling queue is full; retry later");
            r.retry_after = Some(1);
            return r;
        }
        let job = q.next_job;
        q.next_job += 1;
        q.jobs.insert(
            job,
            Job { job, record: req.id, n: req.n, delta, status: JobStatus::Queued, forms: vec![], error: None },
        );
        q.pending.push_back(job);
        drop(q);
        self.wake.notify_one();
        Response::json(202, json!({ "schema": SCHEMA_VERSION, "job": job, "status": JobStatus::Queued }))
    }

    fn job(&self, id: u64) -> Response {
        match self.queue.lock().unwrap().jobs.get(&id) {
            Some(job) => Response::ok(json!({ "schema": SCHEMA_VERSION, "job": job })),
            None => Response::error(404, format!("no job {id}")),
        }
    }

    /// Runs queued jobs until the queue is empty; returns how many ran.
    pub fn run_pending(&self) -> usize {
        let mut ran = 0;
        loop {
            let next = self.queue.lock().unwrap().pending.pop_front();
            let Some(job) = next else { break };
            self.run_job(job);
            ran += 1;
        }
        ran
    }

    /// Blocks on the queue and runs jobs forever: the single consumer.
    pub fn worker_loop(&self) {
        loop {
            let job = {
                let mut q = self.queue.lock().unwrap();
                loop {
                    if let Some(j) = q.pending.pop_front() {
                        break j;
                    }
                    q = self.wake.wait(q).unwrap();
                }
            };
            self.run_job(job);
        }
    }

    fn set_job(&self, id: u64, f: impl FnOnce(&mut Job)) {
        if let Some(job) = self.queue.lock().unwrap().jobs.get_mut(&id) {
            f(job);
        }
    }

    fn run_job(&self, id: u64) {
        let Some(spec) = self.queue.lock().unwrap().jobs.get(&id).cloned() else { return };
        self.set_job(id, |j| j.status = JobStatus::Running);
        match self.resample_near(&spec) {
            Ok(forms) => self.set_job(id, |j| {
                j.status = JobStatus::Done;
                j.forms = forms;
            }),
            Err(e) => self.set_job(id, |j| {
                j.status = JobStatus::Failed;
                j.error = Some(format!("{e:#}"));
            }),
        }
    }

    fn resample_near(&self, job: &Job) -> Result<Vec<NewForm>> {
        let base = self.state.read().unwrap().records.get(&job.record).map(|r| r.params).context("record vanished")?;
        let mut rng = ChaCha8Rng::seed_from_u64(job.record.rotate_left(32) ^ job.job);
        let delta = i16::from(job.delta);
        let drafts: Vec<DesignParams> = (0..job.n)
            .map(|_| {
                let mut values = [0u8; PARAM_COUNT];
                for (v, b) in values.iter_mut().zip(base.values()) {
                    let step = if delta == 0 { 0 } else { rng.gen_range(-delta..=delta) };
                    *v = (i16::from(*b) + step).clamp(0, i16::from(DesignParams::MAX)) as u8;
                }
                DesignParams::new(values, rng.gen())
            })
            .collect::<formspace::Result<_>>()?;

        let first = {
            let mut state = self.state.write().unwrap();
            let first = state.next_id;
            state.next_id += job.n as u64;
            first
        };
        let records: Vec<FormRecord> =
            drafts.into_iter().enumerate().map(|(i, p)| self.evaluator.evaluate(first + i as u64, p)).collect();

        let mut out = OpenOptions::new().create(true).append(true).open(self.run.join(RESAMPLED_FILE))?;
        let mut buf = Vec::new();
        write_records(&mut buf, &records)?;
        out.write_all(&buf)?;

        let forms = records.iter().map(|r| self.place(r)).collect::<Result<Vec<_>>>()?;
        let mut state = self.state.write().unwrap();
        for r in records {
            state.records.insert(r.id, r);
        }
        Ok(forms)
    }

    fn place(&self, r: &FormRecord) -> Result<NewForm> {
        let mut form = NewForm { id: r.id, accepted: r.verdict.accepted, node: None, position: None };
        let Some(f) = &r.features else { return Ok(form) };
        if let Some(som) = &self.som {
            if som.dim() == f.len() {
                form.node = Some(som.best_matching_unit(f).0);
            }
        }
        if let Some(file) = &self.embedding {
            if self.features.data.cols() == f.len() && !self.features.ids.is_empty() {
                let by_id: BTreeMap<u64, [f32; 2]> =
                    file.points.iter().map(|p| (p.id, [p.x as f32, p.y as f32])).collect();
                let reference: Option<Vec<[f32; 2]>> = self.features.ids.iter().map(|id| by_id.get(id).copied()).collect();
                if let Some(reference) = reference {
                    let row = Matrix::from_vec(1, f.len(), f.clone())?;
                    let p = place_new_points(&self.features.data, &reference, &row, PLACEMENT_NEIGHBOURS)?[0];
                    form.position = Some([f64::from(p[0]), f64::from(p[1])]);
                }
            }
        }
        Ok(form)
    }
}

/// Serves until the process is stopped.
pub fn serve(service: Arc<Service>, addr: &str, threads: usize) -> Result<()> {
    let server = Arc::new(tiny_http::Server::http(addr).map_err(|e| anyhow::anyhow!("cannot listen on {addr}: {e}"))?);
    eprintln!("listening on http://{}", server.server_addr());
    let worker = Arc::clone(&service);
    std::thread::spawn(move || worker.worker_loop());
    let handles: Vec<_> = (0..threads.max(1))
        .map(|_| {
            let (server, service) = (Arc::clone(&server), Arc::clone(&service));
            std::thread::spawn(move || {
                for mut req in server.incoming_requests() {
                    let mut body = Vec::new();
                    let read = std::io::Read::read_to_end(&mut std::io::Read::take(req.as_reader(), 1 << 16), &mut body);
                    let resp = match read {
                        Ok(_) => service.handle(req.method().as_str(), req.url(), &body),
                        Err(e) => Response::error(400, format!("unreadable body: {e}")),
                    };
                    let mut out = tiny_http::Response::from_string(resp.body)
                        .with_status_code(resp.status)
                        .with_header(tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap());
                    if let Some(s) = resp.retry_after {
                        out.add_header(tiny_http::Header::from_bytes("Retry-After", s.to_string()).unwrap());
                    }
                    let _ = req.respond(out);
                }
            })
        })
        .collect();
    for h in handles {
        let _ = h.join();
    }
    Ok(())
}

/// Lines in the append-only resample log, for tests and tooling.
pub fn appended_count(run: &Path) -> usize {
    std::fs::File::open(run.join(RESAMPLED_FILE))
        .map(|f| BufReader::new(f).lines().count())
        .unwrap_or(0)
}
