//! Seedable, stream-splittable random source.
//!
//! Every random decision in a run draws from a stream derived from the master
//! seed and a purpose tag path (e.g. `[MUTATE, generation, child]`), so results
//! never depend on evaluation order or thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Purpose tags used when deriving streams.
pub mod tags {
    pub const INIT: u64 = 1;
    pub const MUTATE: u64 = 2;
    pub const SELECT: u64 = 3;
    pub const AGE: u64 = 4;
    pub const EPISODE: u64 = 5;
    pub const REEVAL: u64 = 6;
    pub const HOLDOUT: u64 = 7;
    pub const REPLAY: u64 = 8;
}

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl PartialEq for RandomSource {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed && self.stream == other.stream && self.cursor() == other.cursor()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds a tag path into one stream id.
pub fn stream_id(path: &[u64]) -> u64 {
    path.iter().fold(0x6A09_E667_F3BC_C908u64, |acc, &t| {
        splitmix64(acc ^ splitmix64(t))
    })
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn derive(seed: u64, path: &[u64]) -> Self {
        Self::new(seed, stream_id(path))
    }

    /// Child stream of this source's seed; does not advance `self`.
    pub fn fork(&self, path: &[u64]) -> Self {
        let mut full = Vec::with_capacity(path.len() + 1);
        full.push(self.stream);
        full.extend_from_slice(path);
        Self::derive(self.seed, &full)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position in the stream, in 32-bit words.
    pub fn cursor(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn restore(seed: u64, stream: u64, cursor: u128) -> Self {
        let mut src = Self::new(seed, stream);
        src.rng.set_word_pos(cursor);
        src
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in the closed interval `[lo, hi]`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn int_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_stream_replays() {
        let mut a = RandomSource::new(7, 3);
        let mut b = RandomSource::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RandomSource::new(7, 3);
        let mut b = RandomSource::new(7, 4);
        let xs: Vec<_> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<_> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn cursor_restore_resumes_exactly() {
        let mut a = RandomSource::derive(11, &[tags::MUTATE, 4, 2]);
        for _ in 0..13 {
            a.normal();
        }
        let mut b = RandomSource::restore(a.seed(), a.stream(), a.cursor());
        for _ in 0..50 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derived_paths_are_order_sensitive() {
        assert_ne!(stream_id(&[1, 2]), stream_id(&[2, 1]));
        assert_ne!(stream_id(&[1]), stream_id(&[1, 0]));
    }

    #[test]
    fn int_inclusive_hits_both_ends() {
        let mut r = RandomSource::new(1, 1);
        let mut seen = [false; 21];
        for _ in 0..5000 {
            seen[r.int_inclusive(0, 20) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
