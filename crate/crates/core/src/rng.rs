//! Per-trial seed derivation.
//!
//! Trial `k` of a run with master seed `s` is seeded with a SplitMix64
//! finalisation of `s + (k + 1) * GOLDEN`. The mapping is a pure function of
//! `(s, k)`, so results do not depend on how trials are scheduled.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}
