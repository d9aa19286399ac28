use privsamp_core::asia::asia_table;
use privsamp_core::encode::{one_hot_encode, BinaryEncoding};
use privsamp_core::kkt::SolveStatus;
use privsamp_core::sampler::{run, verify_marginals, RunStatus, SamplingConfig, Shrinkage};

#[test]
fn asia_desk_scale_run() {
    let enc = one_hot_encode(&asia_table(20000, 11).unwrap(), &[], BinaryEncoding::SingleCoordinate).unwrap();
    let cfg = SamplingConfig::new(8, 2, 2000, 100_000, 0.1, 80.0, 7);
    let r = run(&cfg, &enc.data).unwrap();
    assert_eq!(r.status, RunStatus::Success);
    assert_eq!(r.attempts.len(), 1);
    assert!(r.attempts[0].sigma_min >= r.attempts[0].threshold);

    let d = r.density.as_ref().unwrap();
    assert!((0.0..=1.0).contains(&d.lambda));
    let lp = d.lp.as_ref().unwrap();
    assert_eq!(lp.status, SolveStatus::Optimal);
    assert_eq!(d.qp.status, SolveStatus::Optimal);
    assert!(lp.residuals.within(1e-8) && d.qp.residuals.within(1e-8));
    let sum: f64 = d.probabilities.iter().sum();
    assert!((sum - 1.0).abs() <= 1e-8);
    assert!(d.probabilities.iter().all(|&h| (0.1 / 2000.0 - 1e-12..=80.0 / 2000.0 + 1e-12).contains(&h)));

    assert_eq!(r.synthetic.len(), 100_000);
    let u = r.reduced_space.uniform_coeffs();
    let report = verify_marginals(
        &r.data_coeffs,
        &r.synthetic_matrix(),
        Some(Shrinkage { lambda: d.lambda, toward: &u }),
        0.4,
    )
    .unwrap();
    assert!(report.passed, "{}", report.max_deviation);
}
