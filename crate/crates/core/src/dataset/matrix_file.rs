use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MATRIX_MAGIC: [u8; 4] = *b"FSFM";
pub const MATRIX_VERSION: u32 = 1;

/// Packed `f32` feature rows keyed by record id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub schema: String,
    pub ids: Vec<u64>,
    pub data: Matrix<f32>,
}

impl FeatureMatrix {
    pub fn new(schema: impl Into<String>, ids: Vec<u64>, data: Matrix<f32>) -> Result<Self> {
        if ids.len() != data.rows() {
            return Err(Error::Argument(format!("{} ids for {} rows", ids.len(), data.rows())));
        }
        Ok(Self { schema: schema.into(), ids, data })
    }

    pub fn row_of(&self, id: u64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
}

/// Layout, all integers little-endian:
///
/// ```text
/// magic "FSFM" | version u32 | schema length u32 | schema bytes
/// | rows u64 | dim u32 | rows x (id u64, dim x f32)
/// ```
pub fn write_matrix<W: Write>(mut w: W, m: &FeatureMatrix) -> Result<()> {
    let mut order: Vec<usize> = (0..m.ids.len()).collect();
    order.sort_by_key(|&i| m.ids[i]);
    if order.windows(2).any(|p| m.ids[p[0]] == m.ids[p[1]]) {
        return Err(Error::Argument("duplicate record id in feature matrix".into()));
    }
    let mut buf = Vec::with_capacity(32 + m.schema.len() + m.data.rows() * (8 + 4 * m.data.cols()));
    buf.extend_from_slice(&MATRIX_MAGIC);
    buf.extend_from_slice(&MATRIX_VERSION.to_le_bytes());
    buf.extend_from_slice(&(m.schema.len() as u32).to_le_bytes());
    buf.extend_from_slice(m.schema.as_bytes());
    buf.extend_from_slice(&(m.data.rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.data.cols() as u32).to_le_bytes());
    for i in order {
        buf.extend_from_slice(&m.ids[i].to_le_bytes());
        for v in m.data.row(i) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Format {
                offset: self.pos as u64,
                message: format!("truncated file while reading {what}"),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Reads a feature matrix; `expected_dim` rejects files of another width.
pub fn read_matrix<R: Read>(mut r: R, expected_dim: Option<usize>) -> Result<FeatureMatrix> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    if c.take(4, "magic")? != MATRIX_MAGIC {
        return Err(Error::Format { offset: 0, message: "bad magic, not a feature matrix".into() });
    }
    let version = c.u32("version")?;
    if version != MATRIX_VERSION {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {version}") });
    }
    let schema_len = c.u32("schema length")? as usize;
    let schema_at = c.pos;
    let schema = std::str::from_utf8(c.take(schema_len, "schema")?)
        .map_err(|_| Error::Format { offset: schema_at as u64, message: "schema is not utf-8".into() })?
        .to_string();
    let rows = c.u64("row count")? as usize;
    let dim_at = c.pos;
    let dim = c.u32("dimension")? as usize;
    if let Some(want) = expected_dim {
        if want != dim {
            return Err(Error::Format {
                offset: dim_at as u64,
                message: format!("dimension {dim} does not match expected {want}"),
            });
        }
    }
    let row_bytes = 8 + 4 * dim;
    let remaining = bytes.len() - c.pos;
    if remaining != rows.saturating_mul(row_bytes) {
        let offset = if remaining < rows.saturating_mul(row_bytes) {
            bytes.len()
        } else {
            c.pos + rows * row_bytes
        };
        return Err(Error::Format {
            offset: offset as u64,
            message: format!("payload of {remaining} bytes does not hold {rows} rows of dimension {dim}"),
        });
    }
    let mut ids = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows * dim);
    for _ in 0..rows {
        let id_at = c.pos;
        let id = c.u64("row id")?;
        if ids.last().is_some_and(|&prev| prev >= id) {
            return Err(Error::Format { offset: id_at as u64, message: "row ids not strictly increasing".into() });
        }
        ids.push(id);
        for chunk in c.take(4 * dim, "row values")?.chunks_exact(4) {
            data.push(f32::from_le_bytes(chunk.try_into().unwrap()));
        }
    }
    FeatureMatrix::new(schema, ids, Matrix::from_vec(rows, dim, data)?)
}
