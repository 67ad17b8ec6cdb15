use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{HdcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementType {
    Binary,
    Bipolar,
    Int8,
    Int16,
    Int32,
    Int64,
}

impl ElementType {
    pub const ALL: [ElementType; 6] = [
        ElementType::Binary,
        ElementType::Bipolar,
        ElementType::Int8,
        ElementType::Int16,
        ElementType::Int32,
        ElementType::Int64,
    ];

    pub const BASE: [ElementType; 2] = [ElementType::Binary, ElementType::Bipolar];

    /// Inclusive value range. For Bipolar only the endpoints are legal.
    pub fn range(self) -> (i64, i64) {
        match self {
            ElementType::Binary => (0, 1),
            ElementType::Bipolar => (-1, 1),
            ElementType::Int8 => (i8::MIN as i64, i8::MAX as i64),
            ElementType::Int16 => (i16::MIN as i64, i16::MAX as i64),
            ElementType::Int32 => (i32::MIN as i64, i32::MAX as i64),
            ElementType::Int64 => (i64::MIN, i64::MAX),
        }
    }

    pub fn is_legal(self, v: i64) -> bool {
        match self {
            ElementType::Bipolar => v == 1 || v == -1,
            _ => {
                let (lo, hi) = self.range();
                (lo..=hi).contains(&v)
            }
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, ElementType::Binary | ElementType::Bipolar)
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementType::Binary => "binary",
            ElementType::Bipolar => "bipolar",
            ElementType::Int8 => "int8",
            ElementType::Int16 => "int16",
            ElementType::Int32 => "int32",
            ElementType::Int64 => "int64",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Element storage, sized to the narrowest integer that holds the dtype.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elements {
    I8(Vec<i8>),
    I16(Vec<i16>),
    I32(Vec<i32>),
    I64(Vec<i64>),
}

impl Elements {
    pub fn len(&self) -> usize {
        crate::with_elements!(self, s => s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> i64 {
        crate::with_elements!(self, s => s[i] as i64)
    }

    fn zeros(dtype: ElementType, dim: usize) -> Self {
        match dtype {
            ElementType::Binary | ElementType::Bipolar | ElementType::Int8 => {
                Elements::I8(vec![0; dim])
            }
            ElementType::Int16 => Elements::I16(vec![0; dim]),
            ElementType::Int32 => Elements::I32(vec![0; dim]),
            ElementType::Int64 => Elements::I64(vec![0; dim]),
        }
    }
}

/// A fixed-length element sequence tagged with its element type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypervector {
    dtype: ElementType,
    elements: Elements,
}

impl Hypervector {
    /// Build from wide values, checking each against `dtype`.
    pub fn from_values(dtype: ElementType, values: &[i64]) -> Result<Self> {
        if values.is_empty() {
            return Err(HdcError::ZeroDimension);
        }
        if let Some(&bad) = values.iter().find(|&&v| !dtype.is_legal(v)) {
            return Err(HdcError::IllegalElement { value: bad, dtype });
        }
        let mut elements = Elements::zeros(dtype, values.len());
        crate::with_elements!(&mut elements, s => {
            for (dst, &v) in s.iter_mut().zip(values) {
                *dst = v as _;
            }
        });
        Ok(Self { dtype, elements })
    }

    /// Binary/Bipolar/Int8 hypervector from narrow storage. Values are
    /// checked.
    pub fn from_i8(dtype: ElementType, values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(HdcError::ZeroDimension);
        }
        if !matches!(
            dtype,
            ElementType::Binary | ElementType::Bipolar | ElementType::Int8
        ) {
            return Err(HdcError::InvalidConfig {
                field: "dtype",
                reason: format!("{dtype} is not stored as 8-bit"),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| !dtype.is_legal(v as i64)) {
            return Err(HdcError::IllegalElement {
                value: bad as i64,
                dtype,
            });
        }
        Ok(Self {
            dtype,
            elements: Elements::I8(values),
        })
    }

    /// Caller guarantees legality and matching storage width.
    pub(crate) fn from_parts_unchecked(dtype: ElementType, elements: Elements) -> Self {
        debug_assert!(!elements.is_empty());
        Self { dtype, elements }
    }

    pub fn dtype(&self) -> ElementType {
        self.dtype
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &Elements {
        &self.elements
    }

    /// Narrow storage view; `Some` for Binary, Bipolar and Int8.
    pub fn as_i8(&self) -> Option<&[i8]> {
        match &self.elements {
            Elements::I8(v) => Some(v),
            _ => None,
        }
    }

    pub fn get(&self, i: usize) -> i64 {
        self.elements.get(i)
    }

    pub fn to_vec(&self) -> Vec<i64> {
        crate::with_elements!(&self.elements, s => s.iter().map(|&v| v as i64).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        crate::with_elements!(&self.elements, s => s.iter().map(|&v| v as f64).collect())
    }

    pub fn count_ones(&self) -> usize {
        crate::with_elements!(&self.elements, s => s.iter().filter(|&&v| v == 1).count())
    }

    /// Element-wise negation of a Bipolar hypervector.
    pub fn negate(&self) -> Result<Self> {
        let v = self
            .as_i8()
            .filter(|_| self.dtype == ElementType::Bipolar)
            .ok_or(HdcError::NotBinaryOrBipolar(self.dtype))?;
        Ok(Self {
            dtype: self.dtype,
            elements: Elements::I8(v.iter().map(|&x| -x).collect()),
        })
    }
}
