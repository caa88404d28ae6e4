//! All randomness flows from one 64-bit seed. Each consumer gets its own
//! ChaCha stream, so adding draws in one place never shifts another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SET_STREAM: u64 = 1;
pub const WEIGHT_STREAM: u64 = 2;
pub const ADVERSARY_STREAM: u64 = 3;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A child seed for `(id, index)`.
pub fn child(seed: u64, id: u64, index: u64) -> u64 {
    let mut rng = stream(seed, id);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_are_stable_and_distinct() {
        assert_eq!(child(7, WEIGHT_STREAM, 3), child(7, WEIGHT_STREAM, 3));
        assert_ne!(child(7, WEIGHT_STREAM, 3), child(7, WEIGHT_STREAM, 4));
        assert_ne!(child(7, WEIGHT_STREAM, 3), child(7, ADVERSARY_STREAM, 3));
        assert_ne!(child(7, WEIGHT_STREAM, 3), child(8, WEIGHT_STREAM, 3));
    }
}
