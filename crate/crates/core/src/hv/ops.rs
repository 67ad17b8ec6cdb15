use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementType, Elements, Hypervector};
use crate::{HdcError, Result};

/// Circular left rotation: output index `k` takes input index
/// `(k + amount) mod dim`.
pub fn rotate(hv: &Hypervector, amount: usize) -> Hypervector {
    let shift = amount % hv.dim();
    let mut elements = hv.elements().clone();
    crate::with_elements!(&mut elements, s => s.rotate_left(shift));
    Hypervector::from_parts_unchecked(hv.dtype(), elements)
}

/// Rotation applied to the token at 1-based `position` of an n-gram window
/// of length `gram` with permutation shift `shift`.
pub fn rotation_amount(gram: usize, position: usize, shift: usize) -> Result<usize> {
    if position == 0 || position > gram {
        return Err(HdcError::PositionOutOfRange { position, gram });
    }
    Ok((gram - position) * shift)
}

/// Binding operators. Their truth tables for the two base datatypes:
///
/// | op   | binary         | bipolar         |
/// |------|----------------|-----------------|
/// | Mult | `a & b`        | `a * b`         |
/// | Xor  | `a ^ b`        | `-(a * b)`      |
/// | And  | `min(a, b)`    | `min(a, b)`     |
/// | Or   | `max(a, b)`    | `max(a, b)`     |
///
/// Binary Mult and And coincide; bipolar Mult is ordinary multiplication and
/// therefore the negation of bipolar Xor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EwiseOp {
    Mult,
    Xor,
    And,
    Or,
}

impl EwiseOp {
    pub const ALL: [EwiseOp; 4] = [EwiseOp::Mult, EwiseOp::Xor, EwiseOp::And, EwiseOp::Or];

    pub fn name(self) -> &'static str {
        match self {
            EwiseOp::Mult => "mult",
            EwiseOp::Xor => "xor",
            EwiseOp::And => "and",
            EwiseOp::Or => "or",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mult" | "*" | "mul" => Some(EwiseOp::Mult),
            "xor" => Some(EwiseOp::Xor),
            "and" => Some(EwiseOp::And),
            "or" => Some(EwiseOp::Or),
            _ => None,
        }
    }

    /// Scalar truth table. `dtype` must be Binary or Bipolar.
    pub fn apply(self, dtype: ElementType, a: i8, b: i8) -> i8 {
        match (self, dtype) {
            (EwiseOp::Mult, ElementType::Binary) => a & b,
            (EwiseOp::Mult, _) => a * b,
            (EwiseOp::Xor, ElementType::Binary) => a ^ b,
            (EwiseOp::Xor, _) => -(a * b),
            (EwiseOp::And, _) => a.min(b),
            (EwiseOp::Or, _) => a.max(b),
        }
    }
}

impl fmt::Display for EwiseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// In-place `dst[k] = op(dst[k], src[(k + shift) mod d])`.
pub(crate) fn bind_rotated_into(
    op: EwiseOp,
    dtype: ElementType,
    dst: &mut [i8],
    src: &[i8],
    shift: usize,
) {
    let d = dst.len();
    let shift = shift % d;
    let (dst_head, dst_tail) = dst.split_at_mut(d - shift);
    bind_slice(op, dtype, dst_head, &src[shift..]);
    bind_slice(op, dtype, dst_tail, &src[..shift]);
}

/// `dst[k] = src[(k + shift) mod d]`.
pub(crate) fn copy_rotated_into(dst: &mut [i8], src: &[i8], shift: usize) {
    let d = dst.len();
    let shift = shift % d;
    dst[..d - shift].copy_from_slice(&src[shift..]);
    dst[d - shift..].copy_from_slice(&src[..shift]);
}

#[inline]
fn bind_slice(op: EwiseOp, dtype: ElementType, dst: &mut [i8], src: &[i8]) {
    let pairs = dst.iter_mut().zip(src);
    match (op, dtype) {
        (EwiseOp::Mult, ElementType::Binary) | (EwiseOp::And, ElementType::Binary) => {
            pairs.for_each(|(a, &b)| *a &= b)
        }
        (EwiseOp::Xor, ElementType::Binary) => pairs.for_each(|(a, &b)| *a ^= b),
        (EwiseOp::Or, ElementType::Binary) => pairs.for_each(|(a, &b)| *a |= b),
        (EwiseOp::Mult, _) => pairs.for_each(|(a, &b)| *a *= b),
        (EwiseOp::Xor, _) => pairs.for_each(|(a, &b)| *a = -(*a * b)),
        (EwiseOp::And, _) => pairs.for_each(|(a, &b)| *a = (*a).min(b)),
        (EwiseOp::Or, _) => pairs.for_each(|(a, &b)| *a = (*a).max(b)),
    }
}

pub(crate) fn check_base_pair(a: &Hypervector, b: &Hypervector) -> Result<()> {
    if a.dtype() != b.dtype() {
        return Err(HdcError::DtypeMismatch {
            left: a.dtype(),
            right: b.dtype(),
        });
    }
    if !a.dtype().is_base() {
        return Err(HdcError::NotBinaryOrBipolar(a.dtype()));
    }
    if a.dim() != b.dim() {
        return Err(HdcError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub fn ewise(op: EwiseOp, a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
    check_base_pair(a, b)?;
    let (av, bv) = (a.as_i8().unwrap(), b.as_i8().unwrap());
    let mut out = av.to_vec();
    bind_slice(op, a.dtype(), &mut out, bv);
    Ok(Hypervector::from_parts_unchecked(a.dtype(), Elements::I8(out)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Cosine,
    Hamming,
}

impl Metric {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine" => Some(Metric::Cosine),
            "hamming" => Some(Metric::Hamming),
            _ => None,
        }
    }
}

pub(crate) fn dot_f64(q: &Elements, r: &[f64]) -> f64 {
    crate::with_elements!(q, s => s.iter().zip(r).map(|(&a, &b)| a as f64 * b).sum())
}

pub(crate) fn norm_f64(q: &Elements) -> f64 {
    crate::with_elements!(q, s => s.iter().map(|&a| (a as f64) * (a as f64)).sum::<f64>()).sqrt()
}

pub(crate) fn matching_fraction(a: &[i8], b: &[i8]) -> f64 {
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    same as f64 / a.len() as f64
}

/// Cosine or normalized Hamming similarity.
pub fn similarity(q: &Hypervector, r: &Hypervector, metric: Metric) -> Result<f64> {
    if q.dim() != r.dim() {
        return Err(HdcError::DimensionMismatch {
            left: q.dim(),
            right: r.dim(),
        });
    }
    match metric {
        Metric::Cosine => {
            let (nq, nr) = (norm_f64(q.elements()), norm_f64(r.elements()));
            if nq == 0.0 || nr == 0.0 {
                return Ok(0.0);
            }
            let rv = r.to_f64();
            Ok((dot_f64(q.elements(), &rv) / (nq * nr)).clamp(-1.0, 1.0))
        }
        Metric::Hamming => {
            check_base_pair(q, r)?;
            Ok(matching_fraction(q.as_i8().unwrap(), r.as_i8().unwrap()))
        }
    }
}
