use std::f64::consts::{E, SQRT_2};

use proptest::prelude::*;

use privsamp_core::bounds::{
    accuracy_requirements, exact_relaxed_k_constant, exact_relaxed_m_constant, feasibility_report, figure1_data,
    ideal_case_bounds, min_p_for_k, privacy_k_coefficient, privacy_k_max, relaxed_bounds_with, table3, BoundInputs,
    Log10, RelaxedConstants,
};

fn binom_up_to(p: u32, d: u32) -> f64 {
    (0..=d).map(|i| (0..i).fold(1.0, |acc, j| acc * (p - j) as f64 / (j + 1) as f64)).sum()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn inputs() -> impl Strategy<Value = BoundInputs> {
    (1u32..=300, 1u32..=3, 1.0f64..1e6, 0.01f64..1.0, 0.05f64..20.0, 0.01f64..0.5, 0.01f64..0.9).prop_map(
        |(p, d, n, fmax, eps, delta, gamma)| {
            BoundInputs::new(p, n, fmax)
                .with_degree(d.min(p))
                .with_epsilon(eps)
                .with_delta(delta)
                .with_gamma(gamma)
        },
    )
}

proptest! {
    #[test]
    fn privacy_cap_monotonicity(i in inputs(), m in 1.0f64..1e12, f in 1.01f64..10.0) {
        let base = privacy_k_max(&i, Log10::of(m)).0;
        prop_assert!(privacy_k_max(&i.clone().with_epsilon(i.epsilon * f), Log10::of(m)).0 >= base);
        let mut more_n = i.clone();
        more_n.n = Log10(i.n.0 + f.log10());
        prop_assert!(privacy_k_max(&more_n, Log10::of(m)).0 >= base);
        prop_assert!(privacy_k_max(&i, Log10::of(m * f)).0 <= base);
        if i.d < i.p {
            prop_assert!(privacy_k_max(&i.clone().with_degree(i.d + 1), Log10::of(m)).0 <= base);
        }
        let wider = i.clone().with_cap(i.cap().value() * f);
        prop_assert!(privacy_k_max(&wider, Log10::of(m)).0 <= base);
    }

    #[test]
    fn log_space_matches_direct_arithmetic(i in inputs(), m in 1.0f64..1e12) {
        let l = binom_up_to(i.p, i.d);
        let cap = 2f64.powi(i.p as i32) * i.max_density.value();
        let n = i.n.value();
        let k = i.epsilon * (i.delta / cap).powf(1.5) * (-(i.d as f64) / 2.0).exp() * l.powf(-0.25) * n.sqrt()
            / (4.0 * SQRT_2 * m.powf(0.75));
        prop_assert!(rel(privacy_k_max(&i, Log10::of(m)).value(), k) <= 1e-10);
        let base = 16.0 / (i.delta * i.delta * i.gamma) * (2.0 * i.d as f64).exp() * l;
        let a = accuracy_requirements(&i);
        prop_assert!(rel(a.n_min.value(), base) <= 1e-10);
        prop_assert!(rel(a.m_min.value(), base * cap * cap) <= 1e-10);
        prop_assert!(rel(a.m_max.value(), 2f64.powf(i.p as f64 / 4.0)) <= 1e-10);
        let kmin = 4.0 / (i.delta * i.delta) * ((2.0 / i.gamma).ln() + l.ln());
        prop_assert!(rel(a.k_min.value(), kmin) <= 1e-10);
    }

    #[test]
    fn report_verdicts_are_consistent(i in inputs()) {
        prop_assume!(i.validate().is_ok());
        let r = feasibility_report(&i).unwrap();
        prop_assert_eq!(r.jointly_feasible, r.m_window_nonempty && r.k_window_nonempty);
        prop_assert!(r.k_coefficient.0.is_finite() && r.accuracy.m_min.0.is_finite());
    }
}

#[test]
fn relaxed_system_agrees_with_exact_bounds() {
    for (p, n, fmax) in [(8u32, 20000.0, 0.29), (119, 8124.0, 1.2e-4), (25, 1727.0, 5.8e-4), (62, 32561.0, 1.8e-2)] {
        let i = BoundInputs::new(p, n, fmax);
        let row = relaxed_bounds_with(p, i.n, i.max_density, 1.0, RelaxedConstants::ROUNDED);
        assert!(rel(row.m_lower.value(), accuracy_requirements(&i).m_min.value()) <= 0.03, "p = {p}");
        assert!(rel(row.k_coefficient.value(), privacy_k_coefficient(&i).value()) <= 0.03, "p = {p}");
        let exact = relaxed_bounds_with(p, i.n, i.max_density, 1.0, RelaxedConstants::exact(0.25, 0.125));
        assert!(rel(exact.m_lower.value(), row.m_lower.value()) <= 0.01);
    }
    assert!(rel(exact_relaxed_m_constant(0.25, 0.125), 2048.0 * E.powi(4) / 2.0) < 1e-14);
    assert!(rel(exact_relaxed_k_constant(0.25), 0.125 * E.recip() * 2f64.powf(0.25) / (4.0 * SQRT_2)) < 1e-14);
}

#[test]
fn ideal_case_closed_form_agrees() {
    for p in [20u32, 46, 68, 100, 200] {
        let b = ideal_case_bounds(p, 10.0, None);
        assert!(rel(b.k_max.value(), b.k_max_closed_form.value()) <= 0.03, "p = {p}");
        assert!(rel(b.m_min.value(), 5.6e4 * (p * (p + 1)) as f64) <= 1e-12);
    }
    // p = 46 at eps = 10 is far below one synthetic point
    let b = ideal_case_bounds(46, 10.0, None);
    assert!(b.k_max.value() > 0.095 && b.k_max.value() < 0.115);
}

#[test]
fn crossings_are_stable_and_minimal() {
    for k in [1.0, 100.0, 1000.0, 10000.0] {
        let p = min_p_for_k(k, 10.0, 400).unwrap();
        for q in p..p + 3 {
            assert!(ideal_case_bounds(q, 10.0, None).k_max.value() >= k);
        }
        assert!(ideal_case_bounds(p - 1, 10.0, None).k_max.value() < k);
    }
    let rows = table3(10.0, &[1, 100], 400).unwrap();
    assert!(rows[0].discrepancy && !rows[1].discrepancy);
}

#[test]
fn figure_curves_are_offset_and_reproducible() {
    let a = figure1_data(10..=100, &[0.1, 1.0, 10.0], &[1.0, 100.0]).unwrap();
    let b = figure1_data(10..=100, &[0.1, 1.0, 10.0], &[1.0, 100.0]).unwrap();
    assert_eq!(a, b);
    let per = 91;
    for i in 0..per {
        let (x, y, z) = (a.curves[i], a.curves[per + i], a.curves[2 * per + i]);
        assert_eq!(x.p, z.p);
        assert!((y.log10_k_upper - x.log10_k_upper - 1.0).abs() < 1e-12);
        assert!((z.log10_k_upper - y.log10_k_upper - 1.0).abs() < 1e-12);
    }
    assert_eq!(a.thresholds[1], (100.0, 2.0));
}
