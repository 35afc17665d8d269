use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix_file::{read_matrix, write_matrix, FeatureMatrix};
use crate::cem::MemberForce;
use crate::error::{Error, Result};
use crate::filter::AcceptanceVerdict;
use crate::generator::{DesignParams, SCHEMA_VERSION};
use crate::matrix::Matrix;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const FEATURES_FILE: &str = "features.fsm";

/// One generated form: its parameters, verdict and solved geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub schema: String,
    pub id: u64,
    pub params: DesignParams,
    pub verdict: AcceptanceVerdict,
    /// Node positions in canonical vertex order; empty when the solve failed.
    pub positions: Vec<[f64; 3]>,
    pub forces: Vec<MemberForce<f64>>,
    /// Present iff the form was accepted. Stored in the feature matrix,
    /// not in the text file.
    #[serde(skip)]
    pub features: Option<Vec<f32>>,
}

impl FormRecord {
    pub fn new(id: u64, params: DesignParams, verdict: AcceptanceVerdict) -> Self {
        Self {
            schema: SCHEMA_VERSION.to_string(),
            id,
            params,
            verdict,
            positions: Vec::new(),
            forces: Vec::new(),
            features: None,
        }
    }
}

/// One JSON object per line, in the given order.
pub fn write_records<W: Write>(w: W, records: &[FormRecord]) -> Result<()> {
    let mut w = BufWriter::new(w);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: std::io::Read>(r: R) -> Result<Vec<FormRecord>> {
    let mut out = Vec::new();
    let mut offset = 0u64;
    for line in BufReader::new(r).lines() {
        let line = line?;
        let len = line.len() as u64 + 1;
        if !line.trim().is_empty() {
            let rec: FormRecord = serde_json::from_str(&line)
                .map_err(|e| Error::Format { offset, message: format!("bad record: {e}") })?;
            if rec.schema != SCHEMA_VERSION {
                return Err(Error::Format {
                    offset,
                    message: format!("schema {:?} does not match {SCHEMA_VERSION:?}", rec.schema),
                });
            }
            out.push(rec);
        }
        offset += len;
    }
    Ok(out)
}

/// Writes `records.jsonl` and `features.fsm` into `dir`.
pub fn write_dataset(dir: &Path, records: &[FormRecord]) -> Result<FeatureMatrix> {
    std::fs::create_dir_all(dir)?;
    let dim = records.iter().find_map(|r| r.features.as_ref().map(Vec::len)).unwrap_or(0);
    let mut sorted: Vec<&FormRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.id);
    let mut ids = Vec::new();
    let mut data = Matrix::zeros(0, dim);
    for r in sorted {
        if r.verdict.accepted != r.features.is_some() {
            return Err(Error::Argument(format!("record {}: features present iff accepted", r.id)));
        }
        if let Some(f) = &r.features {
            ids.push(r.id);
            data.push_row(f)?;
        }
    }
    let matrix = FeatureMatrix::new(SCHEMA_VERSION, ids, data)?;
    write_records(File::create(dir.join(RECORDS_FILE))?, records)?;
    write_matrix(BufWriter::new(File::create(dir.join(FEATURES_FILE))?), &matrix)?;
    Ok(matrix)
}

/// Reads both artifacts back and reattaches feature rows to their records.
pub fn read_dataset(dir: &Path) -> Result<(Vec<FormRecord>, FeatureMatrix)> {
    let mut records = read_records(File::open(dir.join(RECORDS_FILE))?)?;
    let matrix = read_matrix(BufReader::new(File::open(dir.join(FEATURES_FILE))?), None)?;
    if matrix.schema != SCHEMA_VERSION {
        return Err(Error::Format { offset: 8, message: format!("schema {:?} mismatch", matrix.schema) });
    }
    for r in &mut records {
        if let Some(row) = matrix.row_of(r.id) {
            r.features = Some(matrix.data.row(row).to_vec());
        }
    }
    Ok((records, matrix))
}
