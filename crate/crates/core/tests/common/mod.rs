#![allow(dead_code)]

pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use privsamp_core::encode::empirical_stats;
use privsamp_core::rng::{stream_rng, Stream};
use privsamp_core::sampler::{draw_reduced_space, ReducedSpace};
use privsamp_core::walsh::{empirical_coeffs, enumerate_indices, LowFreqCoefficients};
use privsamp_core::{CubePoint, DataMatrix};

/// Correlated, biased data: a latent bit shifts every coordinate's bias.
pub fn skewed_data(rng: &mut impl Rng, p: usize, n: usize) -> DataMatrix {
    let bias: Vec<f64> = (0..p).map(|_| rng.gen_range(0.1..0.9)).collect();
    let pts = (0..n)
        .map(|_| {
            let z: bool = rng.gen_bool(0.3);
            let coords = bias
                .iter()
                .map(|&b| {
                    let q = if z { 1.0 - b } else { b };
                    if rng.gen_bool(q) { 1 } else { -1 }
                })
                .collect();
            CubePoint::new(coords).unwrap()
        })
        .collect();
    DataMatrix::new(p, pts).unwrap()
}

pub struct Instance {
    pub p: usize,
    pub d: usize,
    pub n: usize,
    pub delta: f64,
    pub cap: f64,
    pub data: DataMatrix,
    pub space: ReducedSpace,
    pub coeffs: LowFreqCoefficients,
}

/// Random instance with `p <= 6`, `d <= 2`, `m <= 200`.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(3..=6);
    let d = rng.gen_range(1..=2);
    let set = enumerate_indices(p, d).unwrap();
    let m = rng.gen_range((set.len() + 10).max(40)..=200);
    let n = rng.gen_range(200..=1000);
    let data = skewed_data(&mut rng, p, n);
    let delta = rng.gen_range(0.02..0.2);
    let stats = empirical_stats(&data).unwrap();
    let cap = (2f64.powi(p as i32) * stats.max_density).max(1.0 + 2.0 * delta);
    let space = draw_reduced_space(&set, m, &mut stream_rng(seed, Stream::ReducedSpace)).unwrap();
    let coeffs = empirical_coeffs(data.points(), &set).unwrap();
    Instance { p, d, n, delta, cap, data, space, coeffs }
}
