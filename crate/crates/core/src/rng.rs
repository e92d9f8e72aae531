//! Keyed random streams.
//!
//! Every random decision in the crate draws from a [`Stream`] keyed by a base
//! seed and a short tuple of integers (row index, plant index, image index, a
//! category tag, ...). Streams never share state, so the order in which work
//! items are evaluated cannot change any sample.
//!
//! Keys are folded into a 64-bit seed with the SplitMix64 finaliser, which
//! then seeds a PCG64 generator:
//!
//! ```text
//! h0 = seed
//! h_{i+1} = mix(h_i ^ mix(key_i + GAMMA))
//! mix(z): z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//!         z = (z ^ z>>27) * 0x94D049BB133111EB
//!         z ^ z>>31
//! ```

use rand::seq::SliceRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_distr::{Distribution, Poisson};
use rand_pcg::Pcg64;

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// Stream tags that keep independent uses of the same key tuple apart.
pub mod tag {
    pub const PLANT: u64 = 0x504C_414E_54;
    pub const DISCONTINUITY: u64 = 0x4341_545F_43;
    pub const WEED: u64 = 0x5745_4544;
    pub const VARIATION: u64 = 0x5641_52;
    pub const IMAGE: u64 = 0x494D_47;
    pub const MIX: u64 = 0x4D49_58;
    pub const SPLIT: u64 = 0x5350_4C;
    pub const SOIL: u64 = 0x534F_494C;
    pub const NOISE: u64 = 0x4E4F_4953;
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// Derive a 64-bit seed from a base seed and a key path.
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(seed, |h, &k| mix64(h ^ mix64(k.wrapping_add(GAMMA))))
}

/// Stateless hash of integer lattice coordinates to `[0, 1)`.
#[inline]
pub fn lattice_unit(seed: u64, x: i64, y: i64) -> f64 {
    to_unit(derive(seed, &[x as u64, y as u64]))
}

#[inline]
fn to_unit(v: u64) -> f64 {
    (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct Stream {
    rng: Pcg64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            rng: Pcg64::seed_from_u64(seed),
        }
    }

    pub fn keyed(seed: u64, keys: &[u64]) -> Self {
        Stream::new(derive(seed, keys))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform on `[lo, hi]`; returns `lo` when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            lo
        } else {
            self.rng.random_range(lo..=hi)
        }
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        self.rng.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random_bool(p.clamp(0.0, 1.0))
    }

    pub fn poisson(&mut self, mean: f64) -> u64 {
        match Poisson::new(mean) {
            Ok(d) => d.sample(&mut self.rng) as u64,
            Err(_) => 0,
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }
}
