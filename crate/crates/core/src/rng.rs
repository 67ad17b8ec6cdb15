//! Seed derivation.
//!
//! Every random stream in the crate is keyed on a master seed plus a domain
//! tag (and optionally an index), so streams are independent of the order in
//! which they are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains. The discriminants are part of the reproducibility contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    ItemMemory = 1,
    EvalSeeds = 2,
    Controller = 3,
    ControllerInit = 4,
    Shuffle = 5,
    Split = 6,
    Synthetic = 7,
    RandomSearch = 8,
    Subsample = 9,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `(master, domain, index)`.
pub fn derive_seed(master: u64, domain: Domain, index: u64) -> u64 {
    let a = splitmix64(master ^ splitmix64(domain as u64));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn stream(master: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, domain, index))
}

/// A ChaCha stream keyed on `(seed, stream)` directly, used for item memory
/// so that entry `k` depends only on the master seed and `k`.
pub fn keyed(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, Domain::ItemMemory, 0));
    rng.set_stream(stream_id);
    rng
}
