//! Hypervectors: representation, seeded generation, rotation, the
//! element-wise binding operators, bundling accumulators and similarity.

mod accumulator;
mod generate;
mod ops;
pub(crate) mod ops_kernels {
    pub(crate) use super::ops::{bind_rotated_into, copy_rotated_into, dot_f64, matching_fraction, norm_f64};
}
mod types;

pub use accumulator::{cast, Accumulator, Regime};
pub use generate::{generate_base_hv, on_count};
pub use ops::{ewise, rotate, rotation_amount, similarity, EwiseOp, Metric};
pub use types::{ElementType, Elements, Hypervector};

/// Dispatch over the storage variants of [`Elements`], binding the inner
/// slice to `$s`.
#[macro_export]
#[doc(hidden)]
macro_rules! with_elements {
    ($elems:expr, $s:ident => $body:expr) => {
        match $elems {
            $crate::hv::Elements::I8($s) => $body,
            $crate::hv::Elements::I16($s) => $body,
            $crate::hv::Elements::I32($s) => $body,
            $crate::hv::Elements::I64($s) => $body,
        }
    };
}
