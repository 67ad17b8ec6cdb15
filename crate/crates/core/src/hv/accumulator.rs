use serde::{Deserialize, Serialize};

use super::{ElementType, Elements, Hypervector};
use crate::{HdcError, Result};

/// Value set of the hypervectors that were summed into an accumulator; it
/// decides the threshold used when casting to Binary or Bipolar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Non-negative summands: threshold at half the summand count.
    Binary,
    /// Zero-centred summands: threshold at zero.
    Bipolar,
}

impl Regime {
    /// Regime for sums of hypervectors drawn from `base`'s value set.
    pub fn of(base: ElementType) -> Self {
        match base {
            ElementType::Binary => Regime::Binary,
            _ => Regime::Bipolar,
        }
    }

    /// Regime for sums of encoded hypervectors of type `encoded` that were
    /// produced from `base` hypervectors.
    pub fn of_encoded(encoded: ElementType, base: ElementType) -> Self {
        match encoded {
            ElementType::Binary => Regime::Binary,
            ElementType::Bipolar => Regime::Bipolar,
            _ => Regime::of(base),
        }
    }
}

/// Exact element-wise sums of hypervectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accumulator {
    sums: Vec<i64>,
    count: u64,
}

impl Accumulator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        Ok(Self {
            sums: vec![0; dim],
            count: 0,
        })
    }

    pub fn from_parts(sums: Vec<i64>, count: u64) -> Result<Self> {
        if sums.is_empty() {
            return Err(HdcError::ZeroDimension);
        }
        Ok(Self { sums, count })
    }

    pub fn dim(&self) -> usize {
        self.sums.len()
    }

    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn check(&self, hv: &Hypervector) -> Result<()> {
        if hv.dim() != self.dim() {
            return Err(HdcError::DimensionMismatch {
                left: self.dim(),
                right: hv.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&mut self, hv: &Hypervector) -> Result<()> {
        self.check(hv)?;
        crate::with_elements!(hv.elements(), s => {
            for (acc, &v) in self.sums.iter_mut().zip(s.iter()) {
                *acc += v as i64;
            }
        });
        self.count += 1;
        Ok(())
    }

    /// Subtract `hv`; the count floors at zero.
    pub fn sub(&mut self, hv: &Hypervector) -> Result<()> {
        self.check(hv)?;
        crate::with_elements!(hv.elements(), s => {
            for (acc, &v) in self.sums.iter_mut().zip(s.iter()) {
                *acc -= v as i64;
            }
        });
        self.count = self.count.saturating_sub(1);
        Ok(())
    }

    pub(crate) fn add_i8(&mut self, v: &[i8]) {
        debug_assert_eq!(v.len(), self.sums.len());
        for (acc, &x) in self.sums.iter_mut().zip(v) {
            *acc += x as i64;
        }
        self.count += 1;
    }

    pub fn cast(&self, target: ElementType, regime: Regime) -> Hypervector {
        cast(self, target, regime)
    }
}

/// Quantize an accumulator into a hypervector of type `target`.
///
/// With `W = max(count, 1)` and threshold `t` (`W/2` in the Binary regime,
/// `0` in the Bipolar regime): Binary gives `1` iff `s > t`, Bipolar gives
/// `+1` iff `s >= t`, integer types saturate into their range.
pub fn cast(acc: &Accumulator, target: ElementType, regime: Regime) -> Hypervector {
    let w = acc.count.max(1) as i128;
    // Compare 2s against 2t to stay in integers.
    let twice_t: i128 = match regime {
        Regime::Binary => w,
        Regime::Bipolar => 0,
    };
    let sums = &acc.sums;
    let elements = match target {
        ElementType::Binary => {
            Elements::I8(sums.iter().map(|&s| (2 * s as i128 > twice_t) as i8).collect())
        }
        ElementType::Bipolar => Elements::I8(
            sums.iter()
                .map(|&s| if 2 * s as i128 >= twice_t { 1 } else { -1 })
                .collect(),
        ),
        ElementType::Int8 => Elements::I8(
            sums.iter()
                .map(|&s| s.clamp(i8::MIN as i64, i8::MAX as i64) as i8)
                .collect(),
        ),
        ElementType::Int16 => Elements::I16(
            sums.iter()
                .map(|&s| s.clamp(i16::MIN as i64, i16::MAX as i64) as i16)
                .collect(),
        ),
        ElementType::Int32 => Elements::I32(
            sums.iter()
                .map(|&s| s.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
                .collect(),
        ),
        ElementType::Int64 => Elements::I64(sums.clone()),
    };
    Hypervector::from_parts_unchecked(target, elements)
}
