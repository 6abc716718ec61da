//! Seed derivation for parallel replicas.
//!
//! All samplers in this crate are pure functions of `(parameters, seed)`.
//! Batches use per-replica seeds derived from a base seed and a replica
//! index, so results do not depend on thread count or scheduling.

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed for replica `index` of a run keyed by
/// `base`. Distinct `(base, index)` pairs map to well-separated seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix(mix(base) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
