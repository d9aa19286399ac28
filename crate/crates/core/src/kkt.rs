//! Solver outcomes and optimality residuals for box- and equality-constrained programs
//!
//! ```text
//!     minimize  f(x)   subject to   A x = b,   lo <= x <= hi
//! ```
//!
//! Sign convention for multipliers: `grad f(x) - A^T y - z_lo + z_hi = 0` with
//! `z_lo, z_hi >= 0`.

use alloc::vec::Vec;

use crate::linalg::{self, DenseMatrix};
use crate::{Error, Result};

/// Common view over the shrinkage LP and the proximal QP.
pub trait BoxEqualityProgram {
    fn eq_matrix(&self) -> &DenseMatrix;
    fn eq_rhs(&self) -> &[f64];
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn objective(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    fn num_vars(&self) -> usize {
        self.eq_matrix().cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Multipliers {
    pub equality: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Max-norm optimality residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal_equality: f64,
    pub bound_violation: f64,
    pub complementarity: f64,
    /// Magnitude of any negative bound multiplier.
    pub dual_sign: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        [self.stationarity, self.primal_equality, self.bound_violation, self.complementarity, self.dual_sign]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Vec<f64>,
    pub objective: f64,
    pub residuals: KktResiduals,
    pub multipliers: Option<Multipliers>,
    pub iterations: usize,
}

impl SolveOutcome {
    pub(crate) fn failed(status: SolveStatus, n: usize, iterations: usize) -> Self {
        SolveOutcome {
            status,
            solution: alloc::vec![f64::NAN; n],
            objective: f64::NAN,
            residuals: KktResiduals {
                stationarity: f64::INFINITY,
                primal_equality: f64::INFINITY,
                bound_violation: f64::INFINITY,
                complementarity: f64::INFINITY,
                dual_sign: f64::INFINITY,
            },
            multipliers: None,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub residuals: KktResiduals,
    /// The multipliers the residuals were evaluated with (given or recovered).
    pub multipliers: Multipliers,
}

/// Evaluates optimality residuals of `x` for `problem`.
///
/// Without multipliers, equality multipliers are recovered by least squares on the
/// variables strictly inside their bounds, and bound multipliers from the remaining
/// gradient.
pub fn kkt_residuals<P: BoxEqualityProgram + ?Sized>(
    problem: &P,
    x: &[f64],
    multipliers: Option<&Multipliers>,
) -> Result<KktReport> {
    let a = problem.eq_matrix();
    let n = a.cols();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let (lo, hi) = (problem.lower(), problem.upper());
    let grad = problem.gradient(x);

    let mult = match multipliers {
        Some(m) => {
            if m.equality.len() != a.rows() {
                return Err(Error::DimensionMismatch { expected: a.rows(), found: m.equality.len() });
            }
            if m.lower.len() != n || m.upper.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.lower.len().min(m.upper.len()) });
            }
            m.clone()
        }
        None => recover_multipliers(a, &grad, x, lo, hi)?,
    };

    let aty = a.mul_transpose_vec(&mult.equality);
    let mut res = KktResiduals::default();
    for j in 0..n {
        let s = grad[j] - aty[j] - mult.lower[j] + mult.upper[j];
        res.stationarity = res.stationarity.max(libm::fabs(s));
        res.bound_violation = res.bound_violation.max(lo[j] - x[j]).max(x[j] - hi[j]);
        res.dual_sign = res.dual_sign.max(-mult.lower[j]).max(-mult.upper[j]);
        let c_lo = if lo[j].is_finite() { mult.lower[j] * libm::fabs(x[j] - lo[j]) } else { libm::fabs(mult.lower[j]) };
        let c_hi = if hi[j].is_finite() { mult.upper[j] * libm::fabs(hi[j] - x[j]) } else { libm::fabs(mult.upper[j]) };
        res.complementarity = res.complementarity.max(libm::fabs(c_lo)).max(libm::fabs(c_hi));
    }
    let ax = a.mul_vec(x);
    res.primal_equality = linalg::norm_inf(
        &ax.iter().zip(problem.eq_rhs()).map(|(l, r)| l - r).collect::<Vec<_>>(),
    );
    Ok(KktReport { residuals: res, multipliers: mult })
}

fn recover_multipliers(a: &DenseMatrix, grad: &[f64], x: &[f64], lo: &[f64], hi: &[f64]) -> Result<Multipliers> {
    let n = a.cols();
    let rows = a.rows();
    let at_lower = |j: usize| x[j] - lo[j] <= 1e-9 * (1.0 + libm::fabs(lo[j]));
    let at_upper = |j: usize| hi[j] - x[j] <= 1e-9 * (1.0 + libm::fabs(hi[j]));
    let free: Vec<usize> = (0..n).filter(|&j| !at_lower(j) && !at_upper(j)).collect();

    let mut gram = DenseMatrix::zeros(rows, rows);
    let mut rhs = alloc::vec![0.0; rows];
    for r in 0..rows {
        for s in r..rows {
            let v: f64 = free.iter().map(|&j| a[(r, j)] * a[(s, j)]).sum();
            gram[(r, s)] = v;
            gram[(s, r)] = v;
        }
        rhs[r] = free.iter().map(|&j| a[(r, j)] * grad[j]).sum();
    }
    let scale = (0..rows).map(|r| gram[(r, r)]).fold(1.0, f64::max);
    let equality = linalg::solve_regularized_normal(&gram, &rhs, 1e-12 * scale)?;

    let aty = a.mul_transpose_vec(&equality);
    let mut lower = alloc::vec![0.0; n];
    let mut upper = alloc::vec![0.0; n];
    for j in 0..n {
        let r = grad[j] - aty[j];
        let (l, u) = (at_lower(j), at_upper(j));
        if l && u {
            lower[j] = r.max(0.0);
            upper[j] = (-r).max(0.0);
        } else if l {
            lower[j] = r;
        } else if u {
            upper[j] = -r;
        }
    }
    Ok(Multipliers { equality, lower, upper })
}
