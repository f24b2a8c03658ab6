//! Seeded random mean-zero fields with power-law spectral decay.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::{abs_k, SpectralField};
use crate::grid::GridSpec;

/// Deterministic generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex Gaussian coefficients scaled by `|k|^{-gamma}` on
/// `max(|k₁|, |k₂|) ≤ support`, made Hermitian and mean-zero.
pub fn random_field(grid: GridSpec, rng: &mut ChaCha8Rng, gamma: f64, support: usize) -> SpectralField {
    let c = support.min(grid.dealias_cut()) as i64;
    let mut f = SpectralField::zeros(grid);
    for k1 in 0..=c {
        for k2 in -c..=c {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let amp = abs_k(k1, k2).powf(-gamma);
            f.set_mode(k1, k2, Complex64::new(re, im) * amp).expect("mode within grid");
        }
    }
    f
}
