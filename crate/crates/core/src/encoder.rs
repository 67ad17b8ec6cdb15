//! Token sequences to encoded hypervectors.
//!
//! Each window of `N'` consecutive tokens is bound into one hypervector by
//! rotating the base hypervector at 1-based window position `i` left by
//! `(N' - i) * shift` and folding the rotated vectors left to right with the
//! configured operator. Window results are bundled and cast to the encoded
//! datatype.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hv::{
    generate_base_hv, Accumulator, ElementType, EwiseOp, Hypervector, Regime,
};
use crate::hv::ops_kernels::{bind_rotated_into, copy_rotated_into};
use crate::{HdcError, Result};

/// Selectable values for each architecture decision in the default search
/// space.
pub mod menus {
    use crate::hv::{ElementType, EwiseOp};

    pub const DIMS: [usize; 20] = [
        1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000, 11000, 12000, 13000,
        14000, 15000, 16000, 17000, 18000, 19000, 20000,
    ];
    pub const SPARSITIES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    pub const GRAM_SIZES: [usize; 6] = [1, 2, 3, 4, 5, 6];
    pub const BASE_DTYPES: [ElementType; 2] = ElementType::BASE;
    pub const DTYPES: [ElementType; 6] = ElementType::ALL;
    pub const SHIFTS: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];
    pub const OPS: [EwiseOp; 4] = EwiseOp::ALL;

    pub fn sparsity_on_grid(p: f64) -> bool {
        SPARSITIES.iter().any(|g| (g - p).abs() < 1e-9)
    }
}

/// One point of the architecture search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchConfig {
    pub dim: usize,
    pub sparsity: f64,
    pub gram_size: usize,
    pub base_dtype: ElementType,
    pub encoded_dtype: ElementType,
    pub resultant_dtype: ElementType,
    pub shift: usize,
    pub ewise_op: EwiseOp,
}

impl Default for ArchConfig {
    fn default() -> Self {
        Self {
            dim: 10_000,
            sparsity: 0.5,
            gram_size: 3,
            base_dtype: ElementType::Bipolar,
            encoded_dtype: ElementType::Int32,
            resultant_dtype: ElementType::Int64,
            shift: 1,
            ewise_op: EwiseOp::Mult,
        }
    }
}

impl ArchConfig {
    /// Check every field. `strict` requires the default search-space menus;
    /// otherwise any positive dimension/gram size, any sparsity in (0, 1)
    /// and any shift are accepted.
    pub fn validate(&self, strict: bool) -> Result<()> {
        let bad = |field, reason: String| Err(HdcError::InvalidConfig { field, reason });
        if self.dim == 0 {
            return bad("dim", "must be positive".into());
        }
        if !(self.sparsity > 0.0 && self.sparsity < 1.0) {
            return bad("sparsity", format!("{} is outside (0, 1)", self.sparsity));
        }
        if self.gram_size == 0 {
            return bad("gram_size", "must be positive".into());
        }
        if !self.base_dtype.is_base() {
            return bad("base_dtype", format!("{} is not binary or bipolar", self.base_dtype));
        }
        if strict {
            if !menus::DIMS.contains(&self.dim) {
                return bad("dim", format!("{} is not in 1000..=20000 step 1000", self.dim));
            }
            if !menus::sparsity_on_grid(self.sparsity) {
                return bad("sparsity", format!("{} is not in 0.1..=0.9 step 0.1", self.sparsity));
            }
            if !menus::GRAM_SIZES.contains(&self.gram_size) {
                return bad("gram_size", format!("{} is not in 1..=6", self.gram_size));
            }
            if !menus::SHIFTS.contains(&self.shift) {
                return bad("shift", format!("{} is not in 0..=7", self.shift));
            }
        }
        Ok(())
    }

    /// Threshold regime for casting encoded hypervectors.
    pub fn encoding_regime(&self) -> Regime {
        Regime::of(self.base_dtype)
    }

    /// Threshold regime for casting class accumulators.
    pub fn resultant_regime(&self) -> Regime {
        Regime::of_encoded(self.encoded_dtype, self.base_dtype)
    }
}

impl fmt::Display for ArchConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dim={} sparsity={:.1} gram={} base={} encoded={} resultant={} shift={} op={}",
            self.dim,
            self.sparsity,
            self.gram_size,
            self.base_dtype,
            self.encoded_dtype,
            self.resultant_dtype,
            self.shift,
            self.ewise_op
        )
    }
}

/// Base hypervectors, one per token id (including the unknown id).
#[derive(Debug, Clone)]
pub struct ItemMemory {
    seed: Option<u64>,
    dim: usize,
    dtype: ElementType,
    entries: Vec<Hypervector>,
}

impl ItemMemory {
    /// Entry `k` is `generate_base_hv(seed, k, dim, sparsity, base_dtype)`.
    pub fn generate(seed: u64, size: usize, cfg: &ArchConfig) -> Result<Self> {
        if size == 0 {
            return Err(HdcError::EmptyCorpus);
        }
        let entries = (0..size as u64)
            .into_par_iter()
            .map(|k| generate_base_hv(seed, k, cfg.dim, cfg.sparsity, cfg.base_dtype))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            seed: Some(seed),
            dim: cfg.dim,
            dtype: cfg.base_dtype,
            entries,
        })
    }

    /// Item memory from explicit base hypervectors, which must share a
    /// dimension and a Binary/Bipolar dtype.
    pub fn from_entries(entries: Vec<Hypervector>) -> Result<Self> {
        let first = entries.first().ok_or(HdcError::EmptyCorpus)?;
        let (dim, dtype) = (first.dim(), first.dtype());
        if !dtype.is_base() {
            return Err(HdcError::NotBinaryOrBipolar(dtype));
        }
        for e in &entries {
            if e.dtype() != dtype {
                return Err(HdcError::DtypeMismatch { left: dtype, right: e.dtype() });
            }
            if e.dim() != dim {
                return Err(HdcError::DimensionMismatch { left: dim, right: e.dim() });
            }
        }
        Ok(Self {
            seed: None,
            dim,
            dtype,
            entries,
        })
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dtype(&self) -> ElementType {
        self.dtype
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Hypervector> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> &[Hypervector] {
        &self.entries
    }
}

/// `min(gram_size, len)`.
pub fn effective_gram(gram_size: usize, len: usize) -> Result<usize> {
    if len == 0 {
        return Err(HdcError::EmptySequence);
    }
    Ok(gram_size.min(len))
}

/// Number of stride-1 windows for a sequence of length `len`.
pub fn window_count(gram_size: usize, len: usize) -> Result<usize> {
    Ok(len - effective_gram(gram_size, len)? + 1)
}

/// Sum of all bound windows of `seq`, before casting.
pub fn encode_accumulator(
    cfg: &ArchConfig,
    im: &ItemMemory,
    seq: &[u32],
) -> Result<Accumulator> {
    if im.dim() != cfg.dim {
        return Err(HdcError::DimensionMismatch { left: cfg.dim, right: im.dim() });
    }
    if im.dtype() != cfg.base_dtype {
        return Err(HdcError::DtypeMismatch { left: cfg.base_dtype, right: im.dtype() });
    }
    let gram = effective_gram(cfg.gram_size, seq.len())?;
    let bases = seq
        .iter()
        .map(|&id| {
            im.get(id as usize)
                .and_then(|h| h.as_i8())
                .ok_or(HdcError::TokenOutOfRange { id: id as usize, size: im.len() })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut acc = Accumulator::new(cfg.dim)?;
    let mut window = vec![0i8; cfg.dim];
    for start in 0..=seq.len() - gram {
        for pos in 0..gram {
            let rot = (gram - 1 - pos) * cfg.shift;
            let src = bases[start + pos];
            if pos == 0 {
                copy_rotated_into(&mut window, src, rot);
            } else {
                bind_rotated_into(cfg.ewise_op, cfg.base_dtype, &mut window, src, rot);
            }
        }
        acc.add_i8(&window);
    }
    Ok(acc)
}

/// Encode a token sequence into one hypervector of `cfg.encoded_dtype`.
pub fn encode(cfg: &ArchConfig, im: &ItemMemory, seq: &[u32]) -> Result<Hypervector> {
    let acc = encode_accumulator(cfg, im, seq)?;
    Ok(acc.cast(cfg.encoded_dtype, cfg.encoding_regime()))
}

/// Encode many sequences in parallel, preserving order.
pub fn encode_all(cfg: &ArchConfig, im: &ItemMemory, seqs: &[Vec<u32>]) -> Result<Vec<Hypervector>> {
    seqs.par_iter().map(|s| encode(cfg, im, s)).collect()
}
