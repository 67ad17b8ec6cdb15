use rand::seq::index;

use super::{ElementType, Elements, Hypervector};
use crate::{rng, HdcError, Result};

/// Number of "on" elements for a sparsity: `round(sparsity * dim)`.
pub fn on_count(dim: usize, sparsity: f64) -> usize {
    ((sparsity * dim as f64).round() as usize).min(dim)
}

/// Seeded base hypervector for `token_id`.
///
/// Exactly `round(sparsity * dim)` positions, chosen uniformly by a stream
/// keyed on `(seed, token_id)`, hold 1 (Binary) or +1 (Bipolar); the rest
/// hold 0 or -1.
pub fn generate_base_hv(
    seed: u64,
    token_id: u64,
    dim: usize,
    sparsity: f64,
    dtype: ElementType,
) -> Result<Hypervector> {
    if dim == 0 {
        return Err(HdcError::ZeroDimension);
    }
    if !(sparsity > 0.0 && sparsity < 1.0) {
        return Err(HdcError::InvalidSparsity(sparsity));
    }
    let off: i8 = match dtype {
        ElementType::Binary => 0,
        ElementType::Bipolar => -1,
        other => return Err(HdcError::NotBinaryOrBipolar(other)),
    };
    let mut rng = rng::keyed(seed, token_id);
    let mut v = vec![off; dim];
    for i in index::sample(&mut rng, dim, on_count(dim, sparsity)) {
        v[i] = 1;
    }
    Ok(Hypervector::from_parts_unchecked(dtype, Elements::I8(v)))
}
