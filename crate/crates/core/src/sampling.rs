//! Seeded low-discrepancy samples on the unit cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Samples are rounded down to multiples of `2^-QUANTUM_BITS`, so sums of a
/// sample coordinate and a coarse dyadic (such as a witness step) are exact.
pub const QUANTUM_BITS: i32 = 20;

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * scale;
        i /= b;
        scale *= inv;
    }
    out
}

/// Halton sequence with a Cranley–Patterson rotation drawn from `seed`.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "at most {} dimensions supported", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton { shift: (0..dim).map(|_| rng.gen::<f64>()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// The `i`-th point, each coordinate a multiple of `2^-QUANTUM_BITS` in
    /// `[0, 1)`.
    pub fn point(&self, i: u64) -> Vec<f64> {
        let q = (QUANTUM_BITS as f64).exp2();
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, base)| {
                let u = (radical_inverse(i + 1, base) + s).fract();
                (u * q).floor() / q
            })
            .collect()
    }
}
