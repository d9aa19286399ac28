mod common;

use nalgebra::DMatrix;

use common::oracles::{bisection_lambda, oracle_feasible};
use common::random_instance;
use privsamp_core::asia::asia_table;
use privsamp_core::encode::{one_hot_encode, BinaryEncoding};
use privsamp_core::kkt::{kkt_residuals, BoxEqualityProgram, SolveStatus};
use privsamp_core::lp::{build_lambda_lp, lambda_feasible, solve_lp, DEFAULT_TOL};
use privsamp_core::qp::{build_proximal_qp, solve_qp};
use privsamp_core::rng::{stream_rng, Stream};
use privsamp_core::sampler::{draw_reduced_space, fit_lambda, ReducedSpace};
use privsamp_core::walsh::{build_walsh_matrix, empirical_coeffs, enumerate_indices};
use privsamp_core::DataMatrix;

#[test]
fn lambda_matches_bisection_oracle() {
    let mut positive = 0;
    for seed in 0..24u64 {
        let inst = random_instance(seed);
        let lp = build_lambda_lp(inst.space.walsh(), &inst.coeffs, inst.space.m(), inst.n, inst.delta, inst.cap).unwrap();
        let out = solve_lp(&lp, DEFAULT_TOL).unwrap();
        match bisection_lambda(&lp) {
            Some(want) => {
                assert_eq!(out.status, SolveStatus::Optimal, "seed {seed}: {:?}", out.residuals);
                let got = out.solution[0];
                assert!((got - want).abs() <= 1e-5, "seed {seed}: lambda {got} vs oracle {want}");
                if want > 1e-3 {
                    positive += 1;
                }
            }
            None => assert_eq!(out.status, SolveStatus::Infeasible, "seed {seed}"),
        }
    }
    assert!(positive >= 5, "only {positive} instances needed shrinkage");
}

#[test]
fn lambda_is_minimal() {
    for seed in 100..110u64 {
        let inst = random_instance(seed);
        let lp = build_lambda_lp(inst.space.walsh(), &inst.coeffs, inst.space.m(), inst.n, inst.delta, inst.cap).unwrap();
        let out = solve_lp(&lp, DEFAULT_TOL).unwrap();
        if out.status != SolveStatus::Optimal || out.solution[0] <= 1e-3 {
            continue;
        }
        let below = out.solution[0] - 1e-3;
        assert!(!lambda_feasible(&lp, below).unwrap(), "seed {seed}");
        assert!(!oracle_feasible(&lp, below), "seed {seed}");
    }
}

#[test]
fn constraint_matrix_matches_explicit_selectors() {
    let enc = one_hot_encode(&asia_table(2000, 5).unwrap(), &[], BinaryEncoding::SingleCoordinate).unwrap();
    let x = enc.data;
    let (p, d, m, n) = (8, 2, 500, x.len());
    let set = enumerate_indices(p, d).unwrap();
    let space = draw_reduced_space(&set, m, &mut stream_rng(4, Stream::ReducedSpace)).unwrap();
    let coeffs = empirical_coeffs(x.points(), &set).unwrap();
    let lp = build_lambda_lp(space.walsh(), &coeffs, m, n, 0.1, 80.0).unwrap();

    let ws = DMatrix::from_fn(set.len(), m, |r, c| space.walsh().get(r, c) as f64);
    let wx_i8 = build_walsh_matrix(x.points(), &set).unwrap();
    let wx = DMatrix::from_fn(set.len(), n, |r, c| wx_i8.get(r, c) as f64);
    // Kronecker-delta selectors: A has ones in column 0, B shifts by one column
    let a_m = DMatrix::from_fn(m, m + 1, |_, j| if j == 0 { 1.0 } else { 0.0 });
    let a_n = DMatrix::from_fn(n, m + 1, |_, j| if j == 0 { 1.0 } else { 0.0 });
    let b = DMatrix::from_fn(m, m + 1, |i, j| if j == i + 1 { 1.0 } else { 0.0 });
    let e = &ws * &b - (&ws * &a_m) / m as f64 + (&wx * &a_n) / n as f64;
    let rhs = (&wx * DMatrix::from_element(n, 1, 1.0)) / n as f64;

    let got = &lp.as_bounded_lp().a;
    for r in 0..set.len() {
        for c in 0..=m {
            assert!((got[(r, c)] - e[(r, c)]).abs() <= 1e-12, "E[{r},{c}]");
        }
        assert!((lp.as_bounded_lp().b[r] - rhs[(r, 0)]).abs() <= 1e-12);
    }
    // empty-index row: sum h = 1
    assert_eq!(got[(0, 0)], 0.0);
    assert!(got.row(0)[1..].iter().all(|&v| v == 1.0));
    assert_eq!(lp.as_bounded_lp().b[0], 1.0);
}

#[test]
fn symmetric_full_cube_case() {
    let set = enumerate_indices(2, 1).unwrap();
    let cube = DataMatrix::full_cube(2);
    let space = ReducedSpace::from_points(cube.points().to_vec(), &set).unwrap();
    let coeffs = empirical_coeffs(cube.points(), &set).unwrap();
    let lp = build_lambda_lp(space.walsh(), &coeffs, 4, 4, 0.1, 2.0).unwrap();
    assert_eq!(lp.as_bounded_lp().b, vec![1.0, 0.0, 0.0]);
    assert!(lp.as_bounded_lp().a.column(0).iter().all(|&v| v == 0.0));
}

#[test]
fn witness_at_lambda_one() {
    for seed in 200..210u64 {
        let inst = random_instance(seed);
        let (delta, cap) = (0.5f64.min(inst.delta), 1.0 + inst.delta + 0.5);
        let lp = build_lambda_lp(inst.space.walsh(), &inst.coeffs, inst.space.m(), inst.n, delta, cap).unwrap();
        let m = inst.space.m();
        let mut w = vec![1.0 / m as f64; m + 1];
        w[0] = 1.0;
        let r = kkt_residuals(&lp, &w, None).unwrap().residuals;
        assert!(r.primal_equality <= 1e-12 && r.bound_violation == 0.0, "{r:?}");
        let out = solve_lp(&lp, DEFAULT_TOL).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!(out.solution[0] <= 1.0);
    }
}

#[test]
fn lp_to_qp_handoff_and_normalization() {
    for seed in 300..320u64 {
        let inst = random_instance(seed);
        let lp = build_lambda_lp(inst.space.walsh(), &inst.coeffs, inst.space.m(), inst.n, inst.delta, inst.cap).unwrap();
        let out = solve_lp(&lp, DEFAULT_TOL).unwrap();
        if out.status != SolveStatus::Optimal {
            continue;
        }
        let qp = build_proximal_qp(inst.space.walsh(), &inst.coeffs, out.solution[0], inst.space.m(), inst.delta, inst.cap).unwrap();
        let sol = solve_qp(&qp, DEFAULT_TOL).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}: {:?}", sol.residuals);
        assert!((sol.solution.iter().sum::<f64>() - 1.0).abs() <= 1e-8);
        assert!(sol.residuals.within(1e-8));
    }
}

#[test]
fn lambda_does_not_increase_with_cap() {
    for seed in 400..406u64 {
        let inst = random_instance(seed);
        let mut last = f64::INFINITY;
        for factor in [1.0, 1.5, 2.0, 4.0, 8.0] {
            let lam = fit_lambda(&inst.space, &inst.coeffs, inst.n, inst.delta, inst.cap * factor, DEFAULT_TOL)
                .map(|f| f.lambda)
                .unwrap_or(f64::INFINITY);
            assert!(lam <= last + 1e-9, "seed {seed}: {lam} after {last}");
            last = lam;
        }
    }
}

#[test]
fn data_on_reduced_space_needs_no_shrinkage() {
    let set = enumerate_indices(6, 2).unwrap();
    let space = draw_reduced_space(&set, 150, &mut stream_rng(2, Stream::ReducedSpace)).unwrap();
    let coeffs = empirical_coeffs(space.points(), &set).unwrap();
    let fit = fit_lambda(&space, &coeffs, 150, 1e-6, 2.0, DEFAULT_TOL).unwrap();
    assert!(fit.lambda.abs() <= 1e-4, "{}", fit.lambda);
}

#[test]
fn lp_residuals_certify_optimality() {
    let inst = random_instance(7);
    let lp = build_lambda_lp(inst.space.walsh(), &inst.coeffs, inst.space.m(), inst.n, inst.delta, inst.cap).unwrap();
    let out = solve_lp(&lp, DEFAULT_TOL).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    let again = kkt_residuals(&lp, &out.solution, out.multipliers.as_ref()).unwrap().residuals;
    assert!(again.within(1e-8), "{again:?}");
    assert_eq!(lp.num_vars(), inst.space.m() + 1);
}
