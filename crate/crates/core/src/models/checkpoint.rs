//! Binary checkpoint format.
//!
//! Layout (all integers little-endian):
//!
//! | field            | bytes |
//! |------------------|-------|
//! | magic `HDLCKPT\0`| 8     |
//! | format version   | 4     |
//! | schema hash      | 8     |
//! | model kind       | 1     |
//! | reserved (zero)  | 3     |
//! | seed             | 8     |
//! | input dim        | 4     |
//! | hidden dim A     | 4     |
//! | hidden dim B     | 4     |
//! | tensor count     | 4     |
//!
//! followed by every parameter tensor as f32 in declaration order. Hidden dim
//! A is the head width for EmbedMlp and the global width for HDLN; B is the
//! HDLN local width (0 for EmbedMlp).

use std::io::{Read, Write};
use std::path::Path;

use super::{Classifier, EmbedMlpModel, HdlnModel, Model};
use crate::error::{Error, Result};
use crate::schema::LabelSchema;

const MAGIC: &[u8; 8] = b"HDLCKPT\0";
pub const CHECKPOINT_VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub seed: u64,
}

fn kind_code(model: &Model) -> u8 {
    match model {
        Model::EmbedMlp(_) => 1,
        Model::Hdln(_) => 2,
    }
}

fn dims(model: &Model) -> (u32, u32, u32) {
    match model {
        Model::EmbedMlp(m) => (m.input_dim() as u32, m.hidden_dim() as u32, 0),
        Model::Hdln(m) => (
            m.input_dim() as u32,
            m.global_hidden() as u32,
            m.local_hidden() as u32,
        ),
    }
}

pub fn write_checkpoint<W: Write>(mut w: W, ckpt: &Checkpoint) -> Result<()> {
    let tensors = ckpt.model.tensors();
    let (input, a, b) = dims(&ckpt.model);
    let mut buf = Vec::with_capacity(HEADER_LEN);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&LabelSchema::standard().fingerprint().to_le_bytes());
    buf.push(kind_code(&ckpt.model));
    buf.extend_from_slice(&[0; 3]);
    buf.extend_from_slice(&ckpt.seed.to_le_bytes());
    for v in [input, a, b, tensors.len() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(buf.len(), HEADER_LEN);
    for t in tensors {
        for v in t {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)
        .map_err(|e| Error::Checkpoint(format!("write failed: {e}")))
}

fn u32_at(bytes: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(bytes[off..off + 4].try_into().expect("4-byte slice"))
}

fn u64_at(bytes: &[u8], off: usize) -> u64 {
    u64::from_le_bytes(bytes[off..off + 8].try_into().expect("8-byte slice"))
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::Checkpoint(format!("read failed: {e}")))?;
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::Checkpoint("not a checkpoint file".into()));
    }
    let version = u32_at(&bytes, 8);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "format version {version}, this build reads {CHECKPOINT_VERSION}"
        )));
    }
    if u64_at(&bytes, 12) != LabelSchema::standard().fingerprint() {
        return Err(Error::Checkpoint(
            "label schema differs from this build".into(),
        ));
    }
    let kind = bytes[20];
    let seed = u64_at(&bytes, 24);
    let input = u32_at(&bytes, 32) as usize;
    let a = u32_at(&bytes, 36) as usize;
    let b = u32_at(&bytes, 40) as usize;
    let count = u32_at(&bytes, 44) as usize;
    if input == 0 || a == 0 {
        return Err(Error::Checkpoint("zero dimension in header".into()));
    }
    let mut model = match kind {
        1 => Model::EmbedMlp(EmbedMlpModel::zeros(input, a)),
        2 if b > 0 => Model::Hdln(HdlnModel::zeros(input, a, b)),
        other => {
            return Err(Error::Checkpoint(format!(
                "unknown model kind code {other}"
            )))
        }
    };
    let shapes = match &model {
        Model::EmbedMlp(m) => m.tensor_shapes(),
        Model::Hdln(m) => m.tensor_shapes(),
    };
    if shapes.len() != count {
        return Err(Error::Checkpoint(format!(
            "header lists {count} tensors, model has {}",
            shapes.len()
        )));
    }
    let expected = HEADER_LEN + 4 * shapes.iter().sum::<usize>();
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "payload is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut off = HEADER_LEN;
    let values: Vec<Vec<f32>> = shapes
        .iter()
        .map(|&n| {
            let t = bytes[off..off + 4 * n]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
                .collect();
            off += 4 * n;
            t
        })
        .collect();
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Checkpoint("non-finite parameter".into()));
    }
    match &mut model {
        Model::EmbedMlp(m) => m.load_tensors(&values)?,
        Model::Hdln(m) => m.load_tensors(&values)?,
    }
    Ok(Checkpoint { model, seed })
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_checkpoint(&mut w, ckpt)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(file))
}
