//! Seeded pseudo-random numbers without any OS entropy.
//!
//! SplitMix64 is enough here: streams are short, consumers only need
//! reproducibility per seed, and independent substreams are derived by
//! scrambling (seed, stream index) so parallel sweeps stay deterministic.

/// SplitMix64 generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Deterministic substream for `(seed, index)` pairs.
    pub(crate) fn stream(seed: u64, index: u64) -> Self {
        let mut warm = SplitMix64::new(seed ^ index.wrapping_mul(GOLDEN_GAMMA));
        warm.next_u64();
        warm.next_u64();
        warm
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of mantissa.
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box–Muller (one value per uniform pair).
    pub(crate) fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    }
}

/// Inverse-CDF draw from a finite distribution given by `weights`.
///
/// Scans the row accumulating mass; numerical tail mass lands on the last
/// index so the draw is always valid.
pub(crate) fn sample_index(rng: &mut SplitMix64, weights: &[f64]) -> usize {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}
