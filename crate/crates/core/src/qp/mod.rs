//! The proximal-point quadratic program and its solver.
//!
//! ```text
//!     minimize   h^T h - 2 u^T h
//!     subject to W h = rhs,   lo <= h <= hi
//! ```
//!
//! With the objective Hessian equal to `2 I`, the minimizer for fixed equality multipliers
//! `nu` is the box projection `h(nu) = clip(u + W^T nu / 2, lo, hi)`. The dual function is
//! concave and piecewise quadratic, and is maximized by a damped semismooth Newton method
//! over `nu` (one unknown per Walsh function). Feasibility is settled beforehand by a
//! phase-one simplex, so a failed Newton run can only mean a numerical problem.
//!
//! [`dense`] holds a general dense convex QP solver used for cross-checks and benchmarks.

pub mod dense;

use alloc::vec::Vec;

use crate::kkt::{BoxEqualityProgram, Multipliers, SolveOutcome, SolveStatus};
use crate::linalg::{self, DenseMatrix};
use crate::lp::{self, BoundedLp, SimplexOptions};
use crate::walsh::{LowFreqCoefficients, WalshMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProximalQp {
    eq: DenseMatrix,
    rhs: Vec<f64>,
    target: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ProximalQp {
    /// General instance: equality system `eq h = rhs`, box `[lower, upper]`, and the point
    /// `target` the objective pulls toward.
    pub fn new(eq: DenseMatrix, rhs: Vec<f64>, target: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = eq.cols();
        if rhs.len() != eq.rows() {
            return Err(Error::DimensionMismatch { expected: eq.rows(), found: rhs.len() });
        }
        for v in [&target, &lower, &upper] {
            if v.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: v.len() });
            }
        }
        Ok(ProximalQp { eq, rhs, target, lower, upper })
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// `||h - u||^2`, the objective shifted by the constant `u^T u`.
    pub fn distance_sq(&self, h: &[f64]) -> f64 {
        h.iter().zip(&self.target).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    fn project(&self, nu: &[f64]) -> Vec<f64> {
        let shift = self.eq.mul_transpose_vec(nu);
        (0..self.target.len())
            .map(|j| (self.target[j] + 0.5 * shift[j]).clamp(self.lower[j], self.upper[j]))
            .collect()
    }

    fn dual_value(&self, nu: &[f64], h: &[f64]) -> f64 {
        let wh = self.eq.mul_vec(h);
        let pen: f64 = nu.iter().zip(wh.iter().zip(&self.rhs)).map(|(v, (a, b))| v * (a - b)).sum();
        self.objective(h) - pen
    }
}

impl BoxEqualityProgram for ProximalQp {
    fn eq_matrix(&self) -> &DenseMatrix {
        &self.eq
    }
    fn eq_rhs(&self) -> &[f64] {
        &self.rhs
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn objective(&self, h: &[f64]) -> f64 {
        h.iter().zip(&self.target).map(|(x, u)| x * x - 2.0 * u * x).sum()
    }
    fn gradient(&self, h: &[f64]) -> Vec<f64> {
        h.iter().zip(&self.target).map(|(x, u)| 2.0 * (x - u)).collect()
    }
}

/// Builds the proximal QP for a fitted shrinkage weight `lambda`: equality right-hand side
/// `(1 - lambda) f_X + lambda u_S`, target the uniform density `1/m`, box `[delta/m, Delta/m]`.
pub fn build_proximal_qp(
    ws: &WalshMatrix,
    data_coeffs: &LowFreqCoefficients,
    lambda: f64,
    m: usize,
    delta: f64,
    cap: f64,
) -> Result<ProximalQp> {
    lp::check_box_params(delta, cap)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(alloc::format!("lambda = {lambda} is outside [0, 1]")));
    }
    if ws.cols() != m || m == 0 {
        return Err(Error::DimensionMismatch { expected: m, found: ws.cols() });
    }
    if data_coeffs.values().len() != ws.rows() {
        return Err(Error::DimensionMismatch { expected: ws.rows(), found: data_coeffs.values().len() });
    }
    let mf = m as f64;
    let rhs = data_coeffs
        .values()
        .iter()
        .zip(ws.row_sums())
        .map(|(f, s)| (1.0 - lambda) * f + lambda * s / mf)
        .collect();
    ProximalQp::new(
        ws.to_dense(),
        rhs,
        alloc::vec![1.0 / mf; m],
        alloc::vec![delta / mf; m],
        alloc::vec![cap / mf; m],
    )
}

/// Solves the proximal QP. `Optimal` is only reported with every residual `<= tol`.
pub fn solve_qp(problem: &ProximalQp, tol: f64) -> Result<SolveOutcome> {
    let m = problem.target.len();
    if problem.lower.iter().zip(&problem.upper).any(|(l, u)| l > u) {
        return Ok(SolveOutcome::failed(SolveStatus::Infeasible, m, 0));
    }
    let feasibility = BoundedLp {
        cost: alloc::vec![0.0; m],
        a: problem.eq.clone(),
        b: problem.rhs.clone(),
        lower: problem.lower.clone(),
        upper: problem.upper.clone(),
    };
    let phase1 = lp::solve_bounded_lp(&feasibility, &SimplexOptions::default())?;
    match phase1.status {
        SolveStatus::Optimal => {}
        status => return Ok(SolveOutcome::failed(status, m, phase1.iterations)),
    }

    let (nu, iterations) = dual_newton(problem, tol);
    let h = problem.project(&nu);
    let shift = problem.eq.mul_transpose_vec(&nu);
    let mut lower = alloc::vec![0.0; m];
    let mut upper = alloc::vec![0.0; m];
    for j in 0..m {
        let z = 2.0 * (h[j] - problem.target[j]) - shift[j];
        if h[j] <= problem.lower[j] {
            lower[j] = z;
        } else if h[j] >= problem.upper[j] {
            upper[j] = -z;
        }
    }
    let out = SolveOutcome {
        status: SolveStatus::Optimal,
        objective: problem.objective(&h),
        solution: h,
        residuals: Default::default(),
        multipliers: Some(Multipliers { equality: nu, lower, upper }),
        iterations,
    };
    lp::finish(problem, out, tol)
}

/// Damped semismooth Newton ascent on the dual. Returns the multipliers and iteration count.
fn dual_newton(problem: &ProximalQp, tol: f64) -> (Vec<f64>, usize) {
    let rows = problem.eq.rows();
    let m = problem.target.len();
    let mut nu = alloc::vec![0.0; rows];
    let target_res = (tol * 1e-4).max(1e-15);
    const MAX_ITER: usize = 200;

    let mut h = problem.project(&nu);
    let mut value = problem.dual_value(&nu, &h);
    for it in 0..MAX_ITER {
        let wh = problem.eq.mul_vec(&h);
        let grad: Vec<f64> = problem.rhs.iter().zip(&wh).map(|(b, a)| b - a).collect();
        let gnorm = linalg::norm_inf(&grad);
        if gnorm <= target_res {
            return (nu, it);
        }
        let shift = problem.eq.mul_transpose_vec(&nu);
        let free: Vec<usize> = (0..m)
            .filter(|&j| {
                let v = problem.target[j] + 0.5 * shift[j];
                v > problem.lower[j] && v < problem.upper[j]
            })
            .collect();
        // generalized Hessian (1/2) W_F W_F^T
        let mut hess = DenseMatrix::zeros(rows, rows);
        for r in 0..rows {
            let wr = problem.eq.row(r);
            for s in r..rows {
                let ws = problem.eq.row(s);
                let v: f64 = free.iter().map(|&j| wr[j] * ws[j]).sum::<f64>() * 0.5;
                hess[(r, s)] = v;
                hess[(s, r)] = v;
            }
        }
        let diag = (0..rows).map(|r| hess[(r, r)]).fold(0.0, f64::max).max(1.0);
        let mu = 1e-12 * diag + 1e-3 * gnorm.min(1.0);
        let Ok(step) = linalg::solve_regularized_normal(&hess, &grad, mu) else {
            return (nu, it);
        };
        let slope = linalg::dot(&grad, &step);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = nu.iter().zip(&step).map(|(v, s)| v + alpha * s).collect();
            let th = problem.project(&trial);
            let tv = problem.dual_value(&trial, &th);
            let trial_grad = {
                let wh = problem.eq.mul_vec(&th);
                linalg::norm_inf(&problem.rhs.iter().zip(&wh).map(|(b, a)| b - a).collect::<Vec<_>>())
            };
            // near the optimum the dual value stops resolving; fall back on the residual
            if tv >= value + 1e-4 * alpha * slope || (alpha == 1.0 && trial_grad < 0.5 * gnorm) {
                nu = trial;
                h = th;
                value = tv;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return (nu, it);
        }
    }
    (nu, MAX_ITER)
}
