//! Independent reference implementations used by the oracle tests.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use privsamp_core::kkt::BoxEqualityProgram;
use privsamp_core::lp::LambdaLp;
use privsamp_core::qp::ProximalQp;
use privsamp_core::CubePoint;

/// Feasibility of the shrinkage constraints at fixed `lambda`, decided by an external LP solver.
pub fn oracle_feasible(lp: &LambdaLp, lambda: f64) -> bool {
    let b = lp.as_bounded_lp();
    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let h: Vec<_> = (1..b.cost.len()).map(|j| prob.add_var(0.0, (b.lower[j], b.upper[j]))).collect();
    for r in 0..b.a.rows() {
        let row = b.a.row(r);
        let terms: Vec<_> = h.iter().enumerate().map(|(j, &v)| (v, row[j + 1])).collect();
        prob.add_constraint(terms.as_slice(), ComparisonOp::Eq, b.b[r] - row[0] * lambda);
    }
    prob.solve().is_ok()
}

/// Smallest feasible `lambda` by bisection to `1e-6`; `None` if `lambda = 1` is infeasible.
pub fn bisection_lambda(lp: &LambdaLp) -> Option<f64> {
    if !oracle_feasible(lp, 1.0) {
        return None;
    }
    if oracle_feasible(lp, 0.0) {
        return Some(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if oracle_feasible(lp, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Euclidean projection of `target` onto `{W h = b} ∩ [lo, hi]` by Dykstra's alternating
/// projections, which is exactly the proximal point.
pub fn dykstra(qp: &ProximalQp, target: &[f64]) -> Vec<f64> {
    let a = qp.eq_matrix();
    let w = DMatrix::from_fn(a.rows(), a.cols(), |r, c| a[(r, c)]);
    let b = DVector::from_column_slice(qp.eq_rhs());
    let pinv = (&w * w.transpose()).pseudo_inverse(1e-10).unwrap();
    let affine = |x: &DVector<f64>| x - w.transpose() * (&pinv * (&w * x - &b));
    let (lo, hi) = (qp.lower(), qp.upper());
    let boxed = |x: &DVector<f64>| DVector::from_iterator(x.len(), x.iter().enumerate().map(|(i, v)| v.clamp(lo[i], hi[i])));

    let mut x = DVector::from_column_slice(target);
    let mut p = DVector::zeros(x.len());
    let mut q = DVector::zeros(x.len());
    for _ in 0..2_000_000 {
        let y = affine(&(&x + &p));
        p = &x + &p - &y;
        let next = boxed(&(&y + &q));
        q = &y + &q - &next;
        let change = (&next - &x).amax();
        x = next;
        if change < 1e-14 {
            break;
        }
    }
    x.iter().copied().collect()
}

/// Share of points matching `signs` on `subset`, by counting.
pub fn brute_force_marginal(points: &[CubePoint], subset: &[usize], signs: &[i8]) -> f64 {
    let hits = points.iter().filter(|x| subset.iter().zip(signs).all(|(&j, &s)| x.coords()[j] == s)).count();
    hits as f64 / points.len() as f64
}
