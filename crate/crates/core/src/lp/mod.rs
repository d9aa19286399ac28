//! The shrinkage linear program and a bounded-variable simplex solver for it.
//!
//! Decision vector `(lambda, h_1, ..., h_m)`. Mixing the marginal-matching set toward the
//! uniform density on the reduced space gives, after clearing the `1 - lambda`
//! denominator, the equality system
//!
//! ```text
//!     lambda * (f_X - u_S) + W_S h = f_X
//! ```
//!
//! where `f_X = (1/n) W_X 1` and `u_S = (1/m) W_S 1` are low-frequency coefficient vectors.
//! The `lambda` column is what the column-selector matrices of the textbook formulation
//! reduce to; they are never built.

mod simplex;

use alloc::vec::Vec;

pub use simplex::{solve_bounded_lp, BoundedLp, SimplexOptions};

use crate::kkt::{kkt_residuals, BoxEqualityProgram, SolveOutcome, SolveStatus};
use crate::linalg::DenseMatrix;
use crate::walsh::{LowFreqCoefficients, WalshMatrix};
use crate::{Error, Result};

/// Default residual tolerance for both programs.
pub const DEFAULT_TOL: f64 = 1e-8;

/// `min lambda` subject to the shrinkage equalities and the box
/// `(0, 2 delta/m, ...) <= (lambda, h) <= (1, (Delta - delta)/m, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaLp {
    m: usize,
    n: usize,
    delta: f64,
    cap: f64,
    lp: BoundedLp,
}

impl LambdaLp {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The density cap `Delta`.
    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn objective_vector(&self) -> &[f64] {
        &self.lp.cost
    }

    pub fn as_bounded_lp(&self) -> &BoundedLp {
        &self.lp
    }

    /// Same constraints with `lambda` pinned and a zero objective.
    pub fn feasibility_at(&self, lambda: f64) -> BoundedLp {
        let mut lp = self.lp.clone();
        lp.cost.iter_mut().for_each(|c| *c = 0.0);
        lp.lower[0] = lambda;
        lp.upper[0] = lambda;
        lp
    }
}

impl BoxEqualityProgram for LambdaLp {
    fn eq_matrix(&self) -> &DenseMatrix {
        &self.lp.a
    }
    fn eq_rhs(&self) -> &[f64] {
        &self.lp.b
    }
    fn lower(&self) -> &[f64] {
        &self.lp.lower
    }
    fn upper(&self) -> &[f64] {
        &self.lp.upper
    }
    fn objective(&self, x: &[f64]) -> f64 {
        self.lp.objective(x)
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.lp.cost.clone()
    }
}

pub(crate) fn check_box_params(delta: f64, cap: f64) -> Result<()> {
    if !(delta > 0.0 && delta < cap && cap.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "need 0 < delta < Delta, got delta = {delta}, Delta = {cap}"
        )));
    }
    Ok(())
}

/// Builds the shrinkage LP from the reduced-space Walsh matrix and the empirical
/// coefficients `f_X`.
pub fn build_lambda_lp(
    ws: &WalshMatrix,
    data_coeffs: &LowFreqCoefficients,
    m: usize,
    n: usize,
    delta: f64,
    cap: f64,
) -> Result<LambdaLp> {
    check_box_params(delta, cap)?;
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument("m and n must be at least 1".into()));
    }
    if ws.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: ws.cols() });
    }
    let l = ws.rows();
    if data_coeffs.values().len() != l {
        return Err(Error::DimensionMismatch { expected: l, found: data_coeffs.values().len() });
    }
    let fx = data_coeffs.values();
    let us: Vec<f64> = ws.row_sums().into_iter().map(|s| s / m as f64).collect();
    let a = DenseMatrix::from_fn(l, m + 1, |r, c| {
        if c == 0 {
            fx[r] - us[r]
        } else {
            ws.get(r, c - 1) as f64
        }
    });
    let mf = m as f64;
    let mut lower = alloc::vec![2.0 * delta / mf; m + 1];
    let mut upper = alloc::vec![(cap - delta) / mf; m + 1];
    lower[0] = 0.0;
    upper[0] = 1.0;
    let mut cost = alloc::vec![0.0; m + 1];
    cost[0] = 1.0;
    Ok(LambdaLp { m, n, delta, cap, lp: BoundedLp { cost, a, b: fx.to_vec(), lower, upper } })
}

/// Solves the shrinkage LP. `Optimal` is only reported with every residual `<= tol`.
pub fn solve_lp(problem: &LambdaLp, tol: f64) -> Result<SolveOutcome> {
    let raw = solve_bounded_lp(&problem.lp, &SimplexOptions::default())?;
    finish(problem, raw, tol)
}

pub(crate) fn finish<P: BoxEqualityProgram>(problem: &P, mut raw: SolveOutcome, tol: f64) -> Result<SolveOutcome> {
    if raw.status != SolveStatus::Optimal {
        return Ok(raw);
    }
    let report = kkt_residuals(problem, &raw.solution, raw.multipliers.as_ref())?;
    raw.residuals = report.residuals;
    raw.objective = problem.objective(&raw.solution);
    if !report.residuals.within(tol) {
        raw.status = SolveStatus::NumericalFailure;
    }
    Ok(raw)
}

/// Whether some `h` satisfies the shrinkage constraints with `lambda` fixed.
pub fn lambda_feasible(problem: &LambdaLp, lambda: f64) -> Result<bool> {
    let lp = problem.feasibility_at(lambda);
    let out = solve_bounded_lp(&lp, &SimplexOptions::default())?;
    match out.status {
        SolveStatus::Optimal => Ok(true),
        SolveStatus::Infeasible => Ok(false),
        SolveStatus::NumericalFailure => Err(Error::NumericalFailure("feasibility LP failed".into())),
    }
}
