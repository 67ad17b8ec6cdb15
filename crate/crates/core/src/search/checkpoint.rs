//! Controller checkpoint file.
//!
//! ```text
//! magic      8 bytes  "HDCCTRL\0"
//! version    u32
//! header_len u64
//! header     JSON (config, arities, baseline, counters, sampler RNG state)
//! params     little-endian f64 values
//! ```

use std::io::{Read, Write};
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{Controller, ControllerConfig};
use crate::{HdcError, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"HDCCTRL\0";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    config: ControllerConfig,
    arities: Vec<usize>,
    baseline: f64,
    updates: u64,
    next_episode: usize,
    rng_seed: [u8; 32],
    rng_stream: u64,
    // u128 does not round-trip through JSON numbers.
    rng_word_pos: String,
    params: usize,
}

/// Write the controller, the sampler RNG and the index of the next episode.
pub fn save_checkpoint(path: &Path, ctrl: &Controller, rng: &ChaCha8Rng, next_episode: usize) -> Result<()> {
    let header = serde_json::to_vec(&Header {
        config: *ctrl.config(),
        arities: ctrl.arities().to_vec(),
        baseline: ctrl.baseline(),
        updates: ctrl.updates(),
        next_episode,
        rng_seed: rng.get_seed(),
        rng_stream: rng.get_stream(),
        rng_word_pos: rng.get_word_pos().to_string(),
        params: ctrl.params().len(),
    })?;
    let mut buf = Vec::with_capacity(24 + header.len() + ctrl.params().len() * 8);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(header.len() as u64).to_le_bytes());
    buf.extend_from_slice(&header);
    for p in ctrl.params() {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    std::fs::File::create(&tmp)?.write_all(&buf)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Controller, ChaCha8Rng, usize)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(HdcError::Format("not a controller checkpoint".into()));
    }
    let mut u32b = [0u8; 4];
    r.read_exact(&mut u32b)?;
    let version = u32::from_le_bytes(u32b);
    if version != CHECKPOINT_VERSION {
        return Err(HdcError::Format(format!("unsupported checkpoint version {version}")));
    }
    let mut u64b = [0u8; 8];
    r.read_exact(&mut u64b)?;
    let mut header = vec![0u8; u64::from_le_bytes(u64b) as usize];
    r.read_exact(&mut header)?;
    let h: Header = serde_json::from_slice(&header)?;
    let mut params = Vec::with_capacity(h.params);
    for _ in 0..h.params {
        r.read_exact(&mut u64b)?;
        params.push(f64::from_le_bytes(u64b));
    }
    let ctrl = Controller::from_parts(h.config, h.arities, params, h.baseline, h.updates)?;
    let mut rng = ChaCha8Rng::from_seed(h.rng_seed);
    rng.set_stream(h.rng_stream);
    let pos = h
        .rng_word_pos
        .parse()
        .map_err(|_| HdcError::Format(format!("bad RNG position {:?}", h.rng_word_pos)))?;
    rng.set_word_pos(pos);
    Ok((ctrl, rng, h.next_episode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn round_trip_resumes_the_same_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ctrl = Controller::new(ControllerConfig::default(), &[3, 4], &mut rng).unwrap();
        let path_sample = ctrl.sample(&mut rng);
        ctrl.update(&path_sample, 0.8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ctrl.ckpt");
        save_checkpoint(&path, &ctrl, &rng, 7).unwrap();

        let (back, mut rng2, next) = load_checkpoint(&path).unwrap();
        assert_eq!(next, 7);
        assert_eq!(back, ctrl);
        assert_eq!(rng2.next_u64(), rng.next_u64());

        std::fs::write(&path, b"garbage!garbage").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
