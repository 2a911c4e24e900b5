//! Deterministic random streams.
//!
//! Every sampled quantity is drawn from a ChaCha8 stream selected by a
//! `(seed, index)` pair, so results never depend on evaluation order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive an independent child seed, e.g. one per repeat.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // stream 0 is left for direct use of `seed`
    substream(seed, index.wrapping_add(1) | 1 << 63).next_u64()
}

/// Draw multinomial counts by sequential conditional binomials.
///
/// `probs` must be non-negative and sum to one (up to rounding).
pub fn multinomial<R: RngCore>(rng: &mut R, trials: u64, probs: &[f64]) -> alloc::vec::Vec<u64> {
    let mut counts = alloc::vec![0u64; probs.len()];
    let mut left = trials;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(left, q).map(|b| b.sample(rng)).unwrap_or(0);
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts
}
