//! Model container file.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  "HDCMODEL"
//! version    u32
//! header_len u64
//! header     header_len bytes of JSON (ModelHeader)
//! per class  count: u64, then dim x i64 accumulator sums
//! ```

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AssociativeMemory;
use crate::encoder::ArchConfig;
use crate::hv::{Accumulator, Metric, Regime};
use crate::{HdcError, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"HDCMODEL";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub arch: ArchConfig,
    pub master_seed: u64,
    /// Vocabulary sidecar, relative to the model file's directory.
    pub vocabulary: String,
    pub vocab_size: usize,
    pub class_names: Vec<String>,
    pub metric: Metric,
    pub regime: Regime,
    pub classes: usize,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub header: ModelHeader,
    pub memory: AssociativeMemory,
}

impl ModelFile {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&self.header)?;
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for acc in self.memory.accumulators() {
            w.write_all(&acc.count().to_le_bytes())?;
            let mut buf = Vec::with_capacity(acc.dim() * 8);
            for s in acc.sums() {
                buf.extend_from_slice(&s.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(HdcError::Format("not a model file".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut r)?);
        if version != FORMAT_VERSION {
            return Err(HdcError::Format(format!("unsupported model version {version}")));
        }
        let len = u64::from_le_bytes(read_array(&mut r)?) as usize;
        let mut header = vec![0u8; len];
        r.read_exact(&mut header)?;
        let header: ModelHeader = serde_json::from_slice(&header)?;
        if header.classes < 2 || header.dim == 0 {
            return Err(HdcError::Format("bad class count or dimension".into()));
        }
        let mut accs = Vec::with_capacity(header.classes);
        let mut buf = vec![0u8; header.dim * 8];
        for _ in 0..header.classes {
            let count = u64::from_le_bytes(read_array(&mut r)?);
            r.read_exact(&mut buf)?;
            let sums = buf
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            accs.push(Accumulator::from_parts(sums, count)?);
        }
        let memory =
            AssociativeMemory::from_accumulators(accs, header.arch.resultant_dtype, header.regime);
        Ok(Self { header, memory })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}
