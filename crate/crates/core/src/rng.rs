//! The pinned random number generator for every randomized routine.
//!
//! All sampling in this crate flows through [`SolverRng`], a ChaCha stream
//! cipher generator with 8 rounds. The generator is named and versioned on
//! purpose: identical seeds produce identical constraint draws, identical
//! random instances, and therefore identical solver trajectories across
//! runs, platforms, and thread counts. Do not swap it for a faster
//! unspecified generator; reproducibility of experiment output depends on
//! the exact stream.

use rand::SeedableRng;

/// ChaCha (8 rounds), seeded explicitly. The single generator type used by
/// solvers, generators, and the sweep harness.
pub type SolverRng = rand_chacha::ChaCha8Rng;

/// Builds the pinned generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SolverRng {
    SolverRng::seed_from_u64(seed)
}
