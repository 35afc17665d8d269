use std::io::{Read, Write};

use super::model::SomModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const MODEL_MAGIC: [u8; 4] = *b"FSOM";
pub const MODEL_VERSION: u32 = 1;

/// `magic | version u32 | width u32 | height u32 | dim u32 | weights f32...`,
/// little-endian, weights in node order.
pub fn write_model<T: Scalar, W: Write>(mut w: W, model: &SomModel<T>) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 4 * model.node_count() * model.dim());
    buf.extend_from_slice(&MODEL_MAGIC);
    for v in [MODEL_VERSION, model.width() as u32, model.height() as u32, model.dim() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in model.weights().as_slice() {
        buf.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_model<T: Scalar, R: Read>(mut r: R) -> Result<SomModel<T>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 20 {
        return Err(Error::Format { offset: bytes.len() as u64, message: "truncated model header".into() });
    }
    if bytes[0..4] != MODEL_MAGIC {
        return Err(Error::Format { offset: 0, message: "bad magic, not a SOM model".into() });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap()) as usize;
    if word(1) != MODEL_VERSION as usize {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {}", word(1)) });
    }
    let (width, height, dim) = (word(2), word(3), word(4));
    let expected = 20 + 4 * width * height * dim;
    if bytes.len() != expected {
        return Err(Error::Format {
            offset: bytes.len().min(expected) as u64,
            message: format!("expected {expected} bytes for a {width}x{height}x{dim} model, found {}", bytes.len()),
        });
    }
    let data = bytes[20..]
        .chunks_exact(4)
        .map(|c| T::lit(f64::from(f32::from_le_bytes(c.try_into().unwrap()))))
        .collect();
    SomModel::from_weights(width, height, Matrix::from_vec(width * height, dim, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let w = Matrix::from_vec(6, 2, (0..12).map(|i| i as f32 * 0.25).collect()).unwrap();
        let m = SomModel::from_weights(3, 2, w).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &m).unwrap();
        let back: SomModel<f32> = read_model(&buf[..]).unwrap();
        assert_eq!(back.weights(), m.weights());
        assert_eq!((back.width(), back.height()), (3, 2));
        assert!(matches!(read_model::<f32, _>(&buf[..buf.len() - 1]), Err(Error::Format { .. })));
    }
}
