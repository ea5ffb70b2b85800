//! Seeded random stream shared by every stochastic operator.
//!
//! All draws go through [`RngStream`] so that a run is a pure function of its
//! seed. The generator is ChaCha8, seeded with `seed_from_u64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Normal};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// U[0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// `lo + u * (hi - lo)` with `u ~ U[0, 1)`. Returns `lo` when the interval is empty.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        lo + u * (hi - lo)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        Normal::new(mean, std_dev)
            .expect("standard deviation must be finite and non-negative")
            .sample(&mut self.inner)
    }

    pub fn cauchy(&mut self, location: f64, scale: f64) -> f64 {
        Cauchy::new(location, scale)
            .expect("scale must be positive")
            .sample(&mut self.inner)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random::<u64>()
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-run seed for `(master_seed, config_id, function, run_index)`.
///
/// FNV-1a over the UTF-8 bytes of both strings (each terminated by a 0xFF
/// byte, which never appears in UTF-8) followed by the little-endian run
/// index, then xor-ed with the master seed and passed through [`mix64`].
/// The value does not depend on platform, thread count, or execution order.
pub fn derive_seed(master_seed: u64, config_id: &str, function: &str, run_index: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |b: u8| {
        h ^= u64::from(b);
        h = h.wrapping_mul(PRIME);
    };
    for b in config_id.bytes() {
        feed(b);
    }
    feed(0xFF);
    for b in function.bytes() {
        feed(b);
    }
    feed(0xFF);
    for b in run_index.to_le_bytes() {
        feed(b);
    }
    mix64(h ^ mix64(master_seed))
}
