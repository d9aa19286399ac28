//! Timing of random dense QPs and power-law extrapolation of the solve time.

use std::time::Instant;

use privsamp_core::bounds::{qp_time_extrapolation, TimeExtrapolation};
use privsamp_core::linalg::DenseMatrix;
use privsamp_core::qp::dense::{solve_dense_qp, DenseQp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Strictly convex instance of size `n`: Hessian `M'M/n + I`, `max(1, n/100)` equality rows
/// satisfied by an interior point, box `[-1, 1]^n`.
pub fn random_dense_qp(n: usize, seed: u64) -> DenseQp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut hessian = m.transpose().matmul(&m);
    for i in 0..n {
        for j in 0..n {
            hessian[(i, j)] /= n as f64;
        }
        hessian[(i, i)] += 1.0;
    }
    let linear = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let rows = (n / 100).max(1);
    let eq = DenseMatrix::from_fn(rows, n, |_, _| rng.gen_range(-1.0..1.0));
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let eq_rhs = eq.mul_vec(&x0);
    DenseQp {
        hessian,
        linear,
        eq,
        eq_rhs,
        ineq: DenseMatrix::zeros(0, n),
        ineq_rhs: Vec::new(),
        lower: Some(vec![-1.0; n]),
        upper: Some(vec![1.0; n]),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeTiming {
    pub size: usize,
    pub seconds: Vec<f64>,
    pub median_seconds: f64,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median solve time over `repeats` random instances of each size.
pub fn time_sizes(sizes: &[usize], repeats: usize, seed: u64) -> anyhow::Result<Vec<SizeTiming>> {
    sizes
        .iter()
        .map(|&size| {
            let mut seconds = Vec::with_capacity(repeats);
            for r in 0..repeats {
                let qp = random_dense_qp(size, seed ^ ((size as u64) << 20) ^ r as u64);
                let start = Instant::now();
                let sol = solve_dense_qp(&qp)?;
                seconds.push(start.elapsed().as_secs_f64());
                if let Err(e) = sol {
                    anyhow::bail!("benchmark instance of size {size} failed: {e:?}");
                }
            }
            let median_seconds = median(&mut seconds.clone());
            Ok(SizeTiming { size, seconds, median_seconds })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub timings: Vec<SizeTiming>,
    pub extrapolation: TimeExtrapolation,
}

pub fn bench(sizes: &[usize], repeats: usize, target: f64, assume_exponent: Option<f64>, seed: u64) -> anyhow::Result<BenchReport> {
    if sizes.iter().any(|&s| s < 2) || repeats == 0 {
        anyhow::bail!("sizes must be at least 2 and repeats at least 1");
    }
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 && assume_exponent.is_none() {
        anyhow::bail!("need two distinct sizes or --assume-exponent");
    }
    let timings = time_sizes(sizes, repeats, seed)?;
    let points: Vec<(f64, f64)> = timings.iter().map(|t| (t.size as f64, t.median_seconds.max(1e-9))).collect();
    let extrapolation = qp_time_extrapolation(&points, target, assume_exponent)?;
    Ok(BenchReport { timings, extrapolation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_solve() {
        let t = time_sizes(&[20, 40], 3, 1).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|s| s.seconds.len() == 3 && s.median_seconds >= 0.0));
        assert!(bench(&[20], 1, 1e4, None, 1).is_err());
        assert!(bench(&[20], 1, 1e4, Some(2.0), 1).unwrap().extrapolation.predicted_seconds > 0.0);
    }
}
