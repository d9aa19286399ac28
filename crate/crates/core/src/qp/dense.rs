//! Dense strictly convex QP by the Goldfarb-Idnani dual active-set method.
//!
//! ```text
//!     minimize    1/2 x^T G x + c^T x
//!     subject to  E x  = e
//!                 C x >= f
//!                 lo <= x <= hi
//! ```
//!
//! Starting from the unconstrained minimizer, the most violated constraint is added at
//! each step while dual feasibility is maintained. The factorization keeps
//! `J = L^{-T} Q^T` (with `G = L L^T`) and the upper triangle `R` of `J^T N` for the active
//! normals `N`, updated by Givens rotations. Cost per step is `O(n^2)`.

use alloc::vec::Vec;

use crate::linalg::{self, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseQp {
    pub hessian: DenseMatrix,
    pub linear: Vec<f64>,
    pub eq: DenseMatrix,
    pub eq_rhs: Vec<f64>,
    pub ineq: DenseMatrix,
    pub ineq_rhs: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseQpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Active constraints at the solution, in the order they were added.
    pub active: Vec<Constraint>,
    /// Multipliers of `active`, aligned with it (oriented so that `G x + c = N u`).
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

/// Identifies one constraint of a [`DenseQp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Equality row, with the orientation it was added in (`true` means negated).
    Equality(usize, bool),
    Inequality(usize),
    Lower(usize),
    Upper(usize),
}

impl Constraint {
    fn is_equality(self) -> bool {
        matches!(self, Constraint::Equality(..))
    }
}

impl DenseQp {
    pub fn unconstrained(hessian: DenseMatrix, linear: Vec<f64>) -> Self {
        let n = linear.len();
        DenseQp {
            hessian,
            linear,
            eq: DenseMatrix::zeros(0, n),
            eq_rhs: Vec::new(),
            ineq: DenseMatrix::zeros(0, n),
            ineq_rhs: Vec::new(),
            lower: None,
            upper: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, &self.hessian.mul_vec(x)) + linalg::dot(&self.linear, x)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.hessian.rows() != n || self.hessian.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.hessian.rows() });
        }
        if self.eq.cols() != n || self.eq.rows() != self.eq_rhs.len() {
            return Err(Error::DimensionMismatch { expected: self.eq.rows(), found: self.eq_rhs.len() });
        }
        if self.ineq.cols() != n || self.ineq.rows() != self.ineq_rhs.len() {
            return Err(Error::DimensionMismatch { expected: self.ineq.rows(), found: self.ineq_rhs.len() });
        }
        for b in [&self.lower, &self.upper].into_iter().flatten() {
            if b.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.len() });
            }
        }
        Ok(())
    }

    /// Constraint value `n^T x - b`, nonnegative when satisfied, with `n` oriented per `c`.
    fn slack(&self, c: Constraint, x: &[f64]) -> f64 {
        match c {
            Constraint::Equality(i, neg) => {
                let v = linalg::dot(self.eq.row(i), x) - self.eq_rhs[i];
                if neg {
                    -v
                } else {
                    v
                }
            }
            Constraint::Inequality(i) => linalg::dot(self.ineq.row(i), x) - self.ineq_rhs[i],
            Constraint::Lower(j) => x[j] - self.lower.as_ref().unwrap()[j],
            Constraint::Upper(j) => self.upper.as_ref().unwrap()[j] - x[j],
        }
    }

    /// `J^T n` for the constraint normal `n`.
    fn project_normal(&self, c: Constraint, j_mat: &DenseMatrix) -> Vec<f64> {
        match c {
            Constraint::Equality(i, neg) => {
                let mut d = j_mat.mul_transpose_vec(self.eq.row(i));
                if neg {
                    d.iter_mut().for_each(|v| *v = -*v);
                }
                d
            }
            Constraint::Inequality(i) => j_mat.mul_transpose_vec(self.ineq.row(i)),
            Constraint::Lower(k) => j_mat.row(k).to_vec(),
            Constraint::Upper(k) => j_mat.row(k).iter().map(|v| -v).collect(),
        }
    }

    /// `n^T z`
    fn normal_dot(&self, c: Constraint, z: &[f64]) -> f64 {
        match c {
            Constraint::Equality(i, neg) => {
                let v = linalg::dot(self.eq.row(i), z);
                if neg {
                    -v
                } else {
                    v
                }
            }
            Constraint::Inequality(i) => linalg::dot(self.ineq.row(i), z),
            Constraint::Lower(k) => z[k],
            Constraint::Upper(k) => -z[k],
        }
    }

    fn normal_scale(&self, c: Constraint) -> f64 {
        match c {
            Constraint::Equality(i, _) => linalg::norm2(self.eq.row(i)).max(1e-300),
            Constraint::Inequality(i) => linalg::norm2(self.ineq.row(i)).max(1e-300),
            Constraint::Lower(_) | Constraint::Upper(_) => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenseQpError {
    Infeasible,
    NotConvex,
}

/// Solves `qp`; `Ok(Err(..))` distinguishes infeasible or non-convex input from misuse.
pub fn solve_dense_qp(qp: &DenseQp) -> Result<core::result::Result<DenseQpSolution, DenseQpError>> {
    qp.validate()?;
    let n = qp.dim();
    let l = match linalg::cholesky(&qp.hessian) {
        Ok(l) => l,
        Err(_) => return Ok(Err(DenseQpError::NotConvex)),
    };
    // J = L^{-T}: solve L^T J = I column by column (upper triangular result)
    let mut j_mat = DenseMatrix::zeros(n, n);
    for col in 0..n {
        for i in (0..=col).rev() {
            let mut v = if i == col { 1.0 } else { 0.0 };
            for k in i + 1..=col {
                v -= l[(k, i)] * j_mat[(k, col)];
            }
            j_mat[(i, col)] = v / l[(i, i)];
        }
    }
    let neg_c: Vec<f64> = qp.linear.iter().map(|v| -v).collect();
    let mut x = linalg::cholesky_solve(&l, &neg_c);

    // R stored column-major in an n x n buffer: r[(row, col)] with col < q
    let mut r = DenseMatrix::zeros(n, n);
    let mut active: Vec<Constraint> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut iterations = 0usize;
    let max_iter = 10 * (n + qp.eq.rows() + qp.ineq.rows()) + 100;
    let eps = 1e-12;

    let mut pending_eq: Vec<usize> = (0..qp.eq.rows()).collect();
    loop {
        // choose the constraint to add: equalities first, then the most violated
        let mut pick: Option<Constraint> = None;
        if let Some(i) = pending_eq.pop() {
            let v = linalg::dot(qp.eq.row(i), &x) - qp.eq_rhs[i];
            pick = Some(Constraint::Equality(i, v > 0.0));
        } else {
            let mut worst = 0.0;
            let mut consider = |c: Constraint, worst: &mut f64| {
                let s = qp.slack(c, &x) / qp.normal_scale(c);
                if s < *worst && !active.contains(&c) {
                    *worst = s;
                    pick = Some(c);
                }
            };
            for i in 0..qp.ineq.rows() {
                consider(Constraint::Inequality(i), &mut worst);
            }
            if let Some(lo) = &qp.lower {
                for j in 0..n {
                    if lo[j].is_finite() {
                        consider(Constraint::Lower(j), &mut worst);
                    }
                }
            }
            if let Some(hi) = &qp.upper {
                for j in 0..n {
                    if hi[j].is_finite() {
                        consider(Constraint::Upper(j), &mut worst);
                    }
                }
            }
            let scale = 1.0 + linalg::norm_inf(&x);
            if worst > -eps * scale {
                pick = None;
            }
        }
        let Some(p) = pick else {
            let objective = qp.objective(&x);
            return Ok(Ok(DenseQpSolution { x, objective, active, multipliers: u, iterations }));
        };

        let mut u_new = 0.0;
        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::NumericalFailure("dense QP iteration limit".into()));
            }
            let q = active.len();
            let d = qp.project_normal(p, &j_mat);
            // primal direction z = J2 d2
            let mut z = alloc::vec![0.0; n];
            for k in q..n {
                if d[k] != 0.0 {
                    for i in 0..n {
                        z[i] += j_mat[(i, k)] * d[k];
                    }
                }
            }
            // dual direction: R rvec = d1
            let mut rvec = d[..q].to_vec();
            for i in (0..q).rev() {
                for k in i + 1..q {
                    rvec[i] -= r[(i, k)] * rvec[k];
                }
                rvec[i] /= r[(i, i)];
            }
            let mut t1 = f64::INFINITY;
            let mut drop_at = None;
            for k in 0..q {
                if !active[k].is_equality() && rvec[k] > eps {
                    let ratio = u[k] / rvec[k];
                    if ratio < t1 {
                        t1 = ratio;
                        drop_at = Some(k);
                    }
                }
            }
            let zn = qp.normal_dot(p, &z);
            let znorm = linalg::norm_inf(&z);
            let t2 = if znorm > eps * (1.0 + linalg::norm_inf(&d)) && zn > 0.0 {
                -qp.slack(p, &x) / zn
            } else {
                f64::INFINITY
            };
            let t = t1.min(t2);
            if !t.is_finite() {
                return Ok(Err(DenseQpError::Infeasible));
            }
            if t2.is_infinite() {
                // dual step only
                for k in 0..q {
                    u[k] -= t * rvec[k];
                }
                u_new += t;
                drop_constraint(drop_at.unwrap(), &mut active, &mut u, &mut r, &mut j_mat);
                continue;
            }
            linalg::axpy(t, &z, &mut x);
            for k in 0..q {
                u[k] -= t * rvec[k];
            }
            u_new += t;
            if t2 <= t1 {
                add_constraint(p, d, &mut active, &mut u, u_new, &mut r, &mut j_mat);
                break;
            }
            drop_constraint(drop_at.unwrap(), &mut active, &mut u, &mut r, &mut j_mat);
        }
    }
}

fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    let h = libm::hypot(a, b);
    if h == 0.0 {
        (1.0, 0.0, 0.0)
    } else {
        (a / h, b / h, h)
    }
}

fn rotate_columns(j_mat: &mut DenseMatrix, a: usize, b: usize, c: f64, s: f64) {
    for i in 0..j_mat.rows() {
        let x = j_mat[(i, a)];
        let y = j_mat[(i, b)];
        j_mat[(i, a)] = c * x + s * y;
        j_mat[(i, b)] = -s * x + c * y;
    }
}

fn add_constraint(
    p: Constraint,
    mut d: Vec<f64>,
    active: &mut Vec<Constraint>,
    u: &mut Vec<f64>,
    u_new: f64,
    r: &mut DenseMatrix,
    j_mat: &mut DenseMatrix,
) {
    let q = active.len();
    let n = d.len();
    for i in (q + 1..n).rev() {
        if d[i] == 0.0 {
            continue;
        }
        let (c, s, h) = givens(d[i - 1], d[i]);
        d[i - 1] = h;
        d[i] = 0.0;
        rotate_columns(j_mat, i - 1, i, c, s);
    }
    for i in 0..=q {
        r[(i, q)] = d[i];
    }
    active.push(p);
    u.push(u_new);
}

fn drop_constraint(
    k: usize,
    active: &mut Vec<Constraint>,
    u: &mut Vec<f64>,
    r: &mut DenseMatrix,
    j_mat: &mut DenseMatrix,
) {
    let q = active.len();
    // shift columns k+1.. left
    for col in k..q - 1 {
        for row in 0..q {
            r[(row, col)] = r[(row, col + 1)];
        }
    }
    for row in 0..q {
        r[(row, q - 1)] = 0.0;
    }
    // restore triangularity with rotations on rows (col, col+1)
    for col in k..q - 1 {
        let (c, s, h) = givens(r[(col, col)], r[(col + 1, col)]);
        r[(col, col)] = h;
        r[(col + 1, col)] = 0.0;
        for cc in col + 1..q - 1 {
            let a = r[(col, cc)];
            let b = r[(col + 1, cc)];
            r[(col, cc)] = c * a + s * b;
            r[(col + 1, cc)] = -s * a + c * b;
        }
        rotate_columns(j_mat, col, col + 1, c, s);
    }
    active.remove(k);
    u.remove(k);
}
