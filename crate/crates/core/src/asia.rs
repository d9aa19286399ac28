//! Seeded draws from the eight-variable Asia chest-clinic Bayesian network.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;

use crate::encode::CategoricalTable;
use crate::Result;

pub const COLUMNS: [&str; 8] = ["asia", "smoke", "tub", "lung", "bronc", "either", "xray", "dysp"];

/// One row as booleans in [`COLUMNS`] order.
pub fn draw_row<R: Rng + ?Sized>(rng: &mut R) -> [bool; 8] {
    let mut flip = |p: f64| rng.gen::<f64>() < p;
    let asia = flip(0.01);
    let smoke = flip(0.5);
    let tub = flip(if asia { 0.05 } else { 0.01 });
    let lung = flip(if smoke { 0.1 } else { 0.01 });
    let bronc = flip(if smoke { 0.6 } else { 0.3 });
    let either = tub || lung;
    let xray = flip(if either { 0.98 } else { 0.05 });
    let dysp = flip(match (either, bronc) {
        (true, true) => 0.9,
        (true, false) => 0.7,
        (false, true) => 0.8,
        (false, false) => 0.1,
    });
    [asia, smoke, tub, lung, bronc, either, xray, dysp]
}

/// `n` rows labelled `yes`/`no`.
pub fn asia_table(n: usize, seed: u64) -> Result<CategoricalTable> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| draw_row(&mut rng).iter().map(|&b| if b { "yes" } else { "no" }.to_string()).collect())
        .collect();
    CategoricalTable::from_rows(COLUMNS.iter().map(|c| String::from(*c)).collect::<Vec<_>>(), rows)
}

/// Probability of the all-`no` row.
pub fn all_no_probability() -> f64 {
    0.99 * 0.5 * 0.99 * 0.99 * 0.7 * 0.95 * 0.9
}
