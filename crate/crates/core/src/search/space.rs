use serde::{Deserialize, Serialize};

use crate::encoder::{menus, ArchConfig};
use crate::hv::{ElementType, EwiseOp};
use crate::{HdcError, Result};

/// The eight architecture decisions, in sampling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Dim,
    Sparsity,
    GramSize,
    BaseDtype,
    EncodedDtype,
    ResultantDtype,
    Shift,
    EwiseOp,
}

impl Decision {
    pub const ORDER: [Decision; 8] = [
        Decision::Dim,
        Decision::Sparsity,
        Decision::GramSize,
        Decision::BaseDtype,
        Decision::EncodedDtype,
        Decision::ResultantDtype,
        Decision::Shift,
        Decision::EwiseOp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Decision::Dim => "dim",
            Decision::Sparsity => "sparsity",
            Decision::GramSize => "gram_size",
            Decision::BaseDtype => "base_dtype",
            Decision::EncodedDtype => "encoded_dtype",
            Decision::ResultantDtype => "resultant_dtype",
            Decision::Shift => "shift",
            Decision::EwiseOp => "ewise_op",
        }
    }
}

/// Candidate values per decision. The default is the full menu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<usize>,
    pub sparsities: Vec<f64>,
    pub gram_sizes: Vec<usize>,
    pub base_dtypes: Vec<ElementType>,
    pub encoded_dtypes: Vec<ElementType>,
    pub resultant_dtypes: Vec<ElementType>,
    pub shifts: Vec<usize>,
    pub ops: Vec<EwiseOp>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            dims: menus::DIMS.to_vec(),
            sparsities: menus::SPARSITIES.to_vec(),
            gram_sizes: menus::GRAM_SIZES.to_vec(),
            base_dtypes: menus::BASE_DTYPES.to_vec(),
            encoded_dtypes: menus::DTYPES.to_vec(),
            resultant_dtypes: menus::DTYPES.to_vec(),
            shifts: menus::SHIFTS.to_vec(),
            ops: menus::OPS.to_vec(),
        }
    }
}

impl SearchSpace {
    pub fn arity(&self, d: Decision) -> usize {
        match d {
            Decision::Dim => self.dims.len(),
            Decision::Sparsity => self.sparsities.len(),
            Decision::GramSize => self.gram_sizes.len(),
            Decision::BaseDtype => self.base_dtypes.len(),
            Decision::EncodedDtype => self.encoded_dtypes.len(),
            Decision::ResultantDtype => self.resultant_dtypes.len(),
            Decision::Shift => self.shifts.len(),
            Decision::EwiseOp => self.ops.len(),
        }
    }

    pub fn arities(&self) -> Vec<usize> {
        Decision::ORDER.iter().map(|&d| self.arity(d)).collect()
    }

    /// Number of distinct architectures.
    pub fn cardinality(&self) -> u64 {
        self.arities().iter().map(|&a| a as u64).product()
    }

    /// Every option must be a legal architecture value; `strict` also
    /// requires the default menus.
    pub fn validate(&self, strict: bool) -> Result<()> {
        let empty = |field: &'static str| HdcError::InvalidConfig { field, reason: "no options".into() };
        for d in Decision::ORDER {
            if self.arity(d) == 0 {
                return Err(empty(match d {
                    Decision::Dim => "space_dims",
                    Decision::Sparsity => "space_sparsities",
                    Decision::GramSize => "space_gram_sizes",
                    Decision::BaseDtype => "space_base_dtypes",
                    Decision::EncodedDtype => "space_encoded_dtypes",
                    Decision::ResultantDtype => "space_resultant_dtypes",
                    Decision::Shift => "space_shifts",
                    Decision::EwiseOp => "space_ops",
                }));
            }
        }
        let bad = |field, reason: String| Err(HdcError::InvalidConfig { field, reason });
        for &d in &self.dims {
            if d == 0 || (strict && !menus::DIMS.contains(&d)) {
                return bad("space_dims", format!("{d} is not an allowed dimension"));
            }
        }
        for &p in &self.sparsities {
            if !(p > 0.0 && p < 1.0) || (strict && !menus::sparsity_on_grid(p)) {
                return bad("space_sparsities", format!("{p} is not an allowed sparsity"));
            }
        }
        for &g in &self.gram_sizes {
            if g == 0 || (strict && !menus::GRAM_SIZES.contains(&g)) {
                return bad("space_gram_sizes", format!("{g} is not an allowed gram size"));
            }
        }
        for &t in &self.base_dtypes {
            if !t.is_base() {
                return bad("space_base_dtypes", format!("{t} is not binary or bipolar"));
            }
        }
        for &s in &self.shifts {
            if strict && !menus::SHIFTS.contains(&s) {
                return bad("space_shifts", format!("{s} is not an allowed shift"));
            }
        }
        Ok(())
    }

    /// Architecture for one choice index per decision.
    pub fn decode(&self, choices: &[usize]) -> Result<ArchConfig> {
        if choices.len() != Decision::ORDER.len() {
            return Err(HdcError::InvalidConfig {
                field: "choices",
                reason: format!("expected 8 decisions, got {}", choices.len()),
            });
        }
        for (&c, d) in choices.iter().zip(Decision::ORDER) {
            if c >= self.arity(d) {
                return Err(HdcError::InvalidConfig {
                    field: d.name(),
                    reason: format!("choice {c} is outside 0..{}", self.arity(d)),
                });
            }
        }
        Ok(ArchConfig {
            dim: self.dims[choices[0]],
            sparsity: self.sparsities[choices[1]],
            gram_size: self.gram_sizes[choices[2]],
            base_dtype: self.base_dtypes[choices[3]],
            encoded_dtype: self.encoded_dtypes[choices[4]],
            resultant_dtype: self.resultant_dtypes[choices[5]],
            shift: self.shifts[choices[6]],
            ewise_op: self.ops[choices[7]],
        })
    }

    pub fn contains(&self, cfg: &ArchConfig) -> bool {
        self.dims.contains(&cfg.dim)
            && self.sparsities.iter().any(|&p| (p - cfg.sparsity).abs() < 1e-12)
            && self.gram_sizes.contains(&cfg.gram_size)
            && self.base_dtypes.contains(&cfg.base_dtype)
            && self.encoded_dtypes.contains(&cfg.encoded_dtype)
            && self.resultant_dtypes.contains(&cfg.resultant_dtype)
            && self.shifts.contains(&cfg.shift)
            && self.ops.contains(&cfg.ewise_op)
    }
}
