mod common;

use common::oracles::brute_force_marginal;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use privsamp_core::linalg::{smallest_singular_value, DenseMatrix};
use privsamp_core::rng::{stream_rng, Stream};
use privsamp_core::sampler::{condition_check, draw_reduced_space};
use privsamp_core::walsh::{
    build_walsh_matrix, count_up_to_degree, empirical_coeffs, enumerate_indices, marginal_probability, walsh_eval,
    WalshIndex,
};
use privsamp_core::{CubePoint, DataMatrix};

fn random_points(rng: &mut impl Rng, p: usize, n: usize) -> Vec<CubePoint> {
    (0..n).map(|_| CubePoint::from_bits(rng.gen::<u64>(), p)).collect()
}

#[test]
fn full_cube_walsh_rows_are_orthogonal() {
    for p in 1..=4 {
        let set = enumerate_indices(p, p).unwrap();
        let w = build_walsh_matrix(DataMatrix::full_cube(p).points(), &set).unwrap();
        for a in 0..w.rows() {
            for b in 0..w.rows() {
                let ip: i64 = w.row(a).iter().zip(w.row(b)).map(|(&x, &y)| (x * y) as i64).sum();
                assert_eq!(ip, if a == b { 1 << p } else { 0 }, "p={p} rows {a},{b}");
            }
        }
    }
}

#[test]
fn index_counts_match_binomial_sums() {
    for p in 1..=9usize {
        for d in 1..=p {
            let expect: u128 = (0..=d).map(|i| binom(p as u128, i as u128)).sum();
            assert_eq!(enumerate_indices(p, d).unwrap().len() as u128, expect);
            assert_eq!(count_up_to_degree(p as u64, d as u64), Some(expect));
        }
    }
}

fn binom(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn marginals_match_counting(seed in any::<u64>(), p in 2usize..=8, n in 1usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, p, n);
        let set = enumerate_indices(p, 2).unwrap();
        let coeffs = empirical_coeffs(&pts, &set).unwrap();
        for j in set.iter() {
            for pattern in 0..1u32 << j.degree() {
                let signs: Vec<i8> = (0..j.degree()).map(|b| if pattern >> b & 1 == 1 { -1 } else { 1 }).collect();
                let got = marginal_probability(&coeffs, j, &signs).unwrap();
                let want = brute_force_marginal(&pts, j.members(), &signs);
                prop_assert!((got - want).abs() <= 1e-12, "J={} signs={:?}: {} vs {}", j, signs, got, want);
            }
        }
    }

    #[test]
    fn walsh_is_a_character(seed in any::<u64>(), p in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(&mut rng, p, 1).remove(0);
        let a: Vec<usize> = (0..p).filter(|_| rng.gen()).collect();
        let b: Vec<usize> = (0..p).filter(|_| rng.gen()).collect();
        let sym: Vec<usize> = (0..p).filter(|i| a.contains(i) != b.contains(i)).collect();
        let w = |s: &Vec<usize>| walsh_eval(&WalshIndex::new(s.clone()).unwrap(), &x).unwrap();
        prop_assert_eq!(w(&a) * w(&b), w(&sym));
    }

    #[test]
    fn sigma_min_matches_gram_eigenvalues(seed in any::<u64>(), p in 3usize..=7, extra in 0usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = enumerate_indices(p, 2).unwrap();
        let m = set.len() + extra;
        let w = build_walsh_matrix(&random_points(&mut rng, p, m), &set).unwrap();
        let dense = DMatrix::from_fn(w.rows(), w.cols(), |r, c| w.get(r, c) as f64);
        let got = w.smallest_singular_value().unwrap();
        let svd_min = dense.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((got - svd_min).abs() <= 1e-8 * (1.0 + got), "{} vs {}", got, svd_min);
        // squared singular values are the Gram eigenvalues
        let gram = &dense * dense.transpose();
        let lam_min = gram.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!((got * got - lam_min).abs() <= 1e-8 * gram.norm(), "{} vs {}", got * got, lam_min);
        let t = w.to_dense().transpose();
        let gt = smallest_singular_value(&t).unwrap();
        prop_assert!((gt - got).abs() <= 1e-8 * (1.0 + got));
    }
}

#[test]
fn generic_sigma_min_is_transpose_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DenseMatrix::from_fn(5, 9, |_, _| rng.gen_range(-1.0..1.0));
    let s1 = smallest_singular_value(&a).unwrap();
    let s2 = smallest_singular_value(&a.transpose()).unwrap();
    assert!((s1 - s2).abs() < 1e-12);
}

#[test]
fn reduced_space_draw_is_deterministic_and_fair() {
    let set = enumerate_indices(8, 2).unwrap();
    let a = draw_reduced_space(&set, 300, &mut stream_rng(9, Stream::ReducedSpace)).unwrap();
    let b = draw_reduced_space(&set, 300, &mut stream_rng(9, Stream::ReducedSpace)).unwrap();
    assert_eq!(a.points(), b.points());

    let m = 10_000;
    let big = draw_reduced_space(&set, m, &mut stream_rng(1, Stream::ReducedSpace)).unwrap();
    for j in 0..8 {
        let mean: f64 = big.points().iter().map(|x| x.coords()[j] as f64).sum::<f64>() / m as f64;
        assert!(mean.abs() <= 4.0 / (m as f64).sqrt(), "coordinate {j}: mean {mean}");
    }
}

#[test]
fn conditioning_pass_rate_at_m_500() {
    let set = enumerate_indices(8, 2).unwrap();
    let passes = (0..20u64)
        .filter(|&seed| condition_check(&draw_reduced_space(&set, 500, &mut stream_rng(seed, Stream::ReducedSpace)).unwrap()).passed)
        .count();
    assert!(passes >= 18, "{passes}/20");
}
