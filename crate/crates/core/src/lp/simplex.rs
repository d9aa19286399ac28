//! Dense revised simplex for `min c^T x, A x = b, lo <= x <= hi` with finite bounds.
//!
//! Two phases with one artificial per row, Dantzig pricing with a Bland fallback when the
//! objective stalls, and a Harris two-pass ratio test. The basis inverse is kept
//! explicitly and rebuilt from scratch periodically; the row count is the number of
//! Walsh functions, so it stays small.

use alloc::vec::Vec;

use crate::kkt::{kkt_residuals, BoxEqualityProgram, Multipliers, SolveOutcome, SolveStatus};
use crate::linalg::{self, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedLp {
    pub cost: Vec<f64>,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundedLp {
    pub fn objective(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.cost, x)
    }

    fn validate(&self) -> Result<()> {
        let n = self.a.cols();
        for (what, len) in [("cost", self.cost.len()), ("lower", self.lower.len()), ("upper", self.upper.len())] {
            if len != n {
                return Err(Error::InvalidArgument(alloc::format!("{what} has length {len}, expected {n}")));
            }
        }
        if self.b.len() != self.a.rows() {
            return Err(Error::DimensionMismatch { expected: self.a.rows(), found: self.b.len() });
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.cost) || !finite(&self.b) || !finite(self.a.as_slice()) {
            return Err(Error::InvalidArgument("non-finite problem data".into()));
        }
        if !finite(&self.lower) || !finite(&self.upper) {
            return Err(Error::InvalidArgument("simplex requires finite bounds".into()));
        }
        Ok(())
    }
}

impl BoxEqualityProgram for BoundedLp {
    fn eq_matrix(&self) -> &DenseMatrix {
        &self.a
    }
    fn eq_rhs(&self) -> &[f64] {
        &self.b
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn objective(&self, x: &[f64]) -> f64 {
        BoundedLp::objective(self, x)
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.cost.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    pub refactor_every: usize,
    pub max_iter: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { feas_tol: 1e-9, opt_tol: 1e-11, pivot_tol: 1e-9, refactor_every: 40, max_iter: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

enum PhaseEnd {
    Optimal,
    IterationLimit,
    Unbounded,
}

struct Simplex<'a> {
    lp: &'a BoundedLp,
    opts: SimplexOptions,
    rows: usize,
    nstruct: usize,
    art_sign: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: DenseMatrix,
    iterations: usize,
    max_iter: usize,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a BoundedLp, opts: SimplexOptions) -> Self {
        let rows = lp.a.rows();
        let nstruct = lp.a.cols();
        let ntotal = nstruct + rows;
        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        lo.extend(core::iter::repeat_n(0.0, rows));
        hi.extend(core::iter::repeat_n(f64::INFINITY, rows));
        let mut x = alloc::vec![0.0; ntotal];
        x[..nstruct].copy_from_slice(&lp.lower);
        let mut state = alloc::vec![VarState::AtLower; ntotal];
        let ax = lp.a.mul_vec(&x[..nstruct]);
        let mut art_sign = alloc::vec![1.0; rows];
        let mut binv = DenseMatrix::zeros(rows, rows);
        let mut basis = Vec::with_capacity(rows);
        for i in 0..rows {
            let r = lp.b[i] - ax[i];
            art_sign[i] = if r < 0.0 { -1.0 } else { 1.0 };
            x[nstruct + i] = libm::fabs(r);
            state[nstruct + i] = VarState::Basic;
            binv[(i, i)] = art_sign[i];
            basis.push(nstruct + i);
        }
        let max_iter = opts.max_iter.unwrap_or(50 * (rows + ntotal) + 1000);
        Simplex { lp, opts, rows, nstruct, art_sign, lo, hi, x, state, basis, binv, iterations: 0, max_iter }
    }

    fn ntotal(&self) -> usize {
        self.nstruct + self.rows
    }

    /// `B^{-1} A_j`
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut w = alloc::vec![0.0; self.rows];
        if j < self.nstruct {
            for k in 0..self.rows {
                let akj = self.lp.a[(k, j)];
                if akj != 0.0 {
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi += self.binv[(i, k)] * akj;
                    }
                }
            }
        } else {
            let k = j - self.nstruct;
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = self.binv[(i, k)] * self.art_sign[k];
            }
        }
        w
    }

    fn column_entry(&self, k: usize, j: usize) -> f64 {
        if j < self.nstruct {
            self.lp.a[(k, j)]
        } else if j - self.nstruct == k {
            self.art_sign[k]
        } else {
            0.0
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let b = DenseMatrix::from_fn(self.rows, self.rows, |k, i| self.column_entry(k, self.basis[i]));
        self.binv = linalg::invert(&b)?;
        let mut rhs = self.lp.b.clone();
        for j in 0..self.ntotal() {
            if self.state[j] == VarState::Basic || self.x[j] == 0.0 {
                continue;
            }
            for (k, r) in rhs.iter_mut().enumerate() {
                *r -= self.column_entry(k, j) * self.x[j];
            }
        }
        let xb = self.binv.mul_vec(&rhs);
        for (i, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[i];
        }
        Ok(())
    }

    /// Simplex multipliers `y = B^{-T} c_B` and reduced costs for all variables.
    fn prices(&self, cost: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        let y = self.binv.mul_transpose_vec(&cb);
        let aty = self.lp.a.mul_transpose_vec(&y);
        let mut d = Vec::with_capacity(self.ntotal());
        for j in 0..self.nstruct {
            d.push(cost[j] - aty[j]);
        }
        for k in 0..self.rows {
            d.push(cost[self.nstruct + k] - y[k] * self.art_sign[k]);
        }
        (y, d)
    }

    fn run_phase(&mut self, cost: &[f64]) -> Result<PhaseEnd> {
        let mut best = linalg::dot(cost, &self.x);
        let mut stall = 0usize;
        let mut bland = false;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.max_iter {
                return Ok(PhaseEnd::IterationLimit);
            }
            if since_refactor >= self.opts.refactor_every {
                self.refactor()?;
                since_refactor = 0;
            }
            let (_, d) = self.prices(cost);

            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.ntotal() {
                if self.hi[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let score = match self.state[j] {
                    VarState::Basic => continue,
                    VarState::AtLower if d[j] < -self.opts.opt_tol => -d[j],
                    VarState::AtUpper if d[j] > self.opts.opt_tol => d[j],
                    _ => continue,
                };
                match entering {
                    None => entering = Some((j, score)),
                    Some((_, best_score)) if !bland && score > best_score => entering = Some((j, score)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let dir = if self.state[q] == VarState::AtLower { 1.0 } else { -1.0 };
            let w = self.ftran(q);

            // Harris pass 1: largest step with bounds relaxed by the feasibility tolerance
            let tol = self.opts.feas_tol;
            let mut t_max = self.hi[q] - self.lo[q];
            for (i, &wi) in w.iter().enumerate() {
                let delta = -dir * wi;
                let j = self.basis[i];
                if delta < -self.opts.pivot_tol {
                    t_max = t_max.min((self.x[j] - self.lo[j] + tol) / -delta);
                } else if delta > self.opts.pivot_tol && self.hi[j].is_finite() {
                    t_max = t_max.min((self.hi[j] - self.x[j] + tol) / delta);
                }
            }
            if !t_max.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }
            // pass 2: among blocking rows within t_max, the largest pivot
            let mut leave: Option<(usize, f64, f64)> = None;
            for (i, &wi) in w.iter().enumerate() {
                let delta = -dir * wi;
                let j = self.basis[i];
                let ratio = if delta < -self.opts.pivot_tol {
                    ((self.x[j] - self.lo[j]) / -delta).max(0.0)
                } else if delta > self.opts.pivot_tol && self.hi[j].is_finite() {
                    ((self.hi[j] - self.x[j]) / delta).max(0.0)
                } else {
                    continue;
                };
                if ratio <= t_max && leave.is_none_or(|(_, _, best)| libm::fabs(delta) > best) {
                    leave = Some((i, ratio, libm::fabs(delta)));
                }
            }
            let flip = self.hi[q] - self.lo[q];
            self.iterations += 1;
            since_refactor += 1;
            match leave {
                Some((i, t, _)) if t < flip => {
                    self.x[q] += dir * t;
                    for (k, &wk) in w.iter().enumerate() {
                        let j = self.basis[k];
                        self.x[j] -= dir * wk * t;
                    }
                    let r = self.basis[i];
                    let hit_lower = -dir * w[i] < 0.0;
                    self.x[r] = if hit_lower { self.lo[r] } else { self.hi[r] };
                    self.state[r] = if hit_lower { VarState::AtLower } else { VarState::AtUpper };
                    self.basis[i] = q;
                    self.state[q] = VarState::Basic;
                    self.pivot(i, &w);
                }
                _ => {
                    // bound flip
                    for (k, &wk) in w.iter().enumerate() {
                        let j = self.basis[k];
                        self.x[j] -= dir * wk * flip;
                    }
                    if dir > 0.0 {
                        self.x[q] = self.hi[q];
                        self.state[q] = VarState::AtUpper;
                    } else {
                        self.x[q] = self.lo[q];
                        self.state[q] = VarState::AtLower;
                    }
                }
            }

            let obj = linalg::dot(cost, &self.x);
            if obj < best - 1e-12 * (1.0 + libm::fabs(best)) {
                best = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall > 30 {
                    bland = true;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, w: &[f64]) {
        let n = self.rows;
        let pr = w[r];
        for c in 0..n {
            self.binv[(r, c)] /= pr;
        }
        for i in 0..n {
            if i == r || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            for c in 0..n {
                let v = self.binv[(r, c)];
                self.binv[(i, c)] -= f * v;
            }
        }
    }
}

/// Solves a bounded LP. Infeasibility is a status, not an error.
pub fn solve_bounded_lp(lp: &BoundedLp, opts: &SimplexOptions) -> Result<SolveOutcome> {
    lp.validate()?;
    let n = lp.a.cols();
    if lp.lower.iter().zip(&lp.upper).any(|(l, u)| l > u) {
        return Ok(SolveOutcome::failed(SolveStatus::Infeasible, n, 0));
    }
    let mut s = Simplex::new(lp, *opts);
    let ntotal = s.ntotal();

    let mut phase1 = alloc::vec![0.0; ntotal];
    phase1[n..].iter_mut().for_each(|c| *c = 1.0);
    match s.run_phase(&phase1)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::IterationLimit | PhaseEnd::Unbounded => {
            return Ok(SolveOutcome::failed(SolveStatus::NumericalFailure, n, s.iterations))
        }
    }
    s.refactor()?;
    let scale = 1.0 + linalg::norm_inf(&lp.b);
    let infeasibility: f64 = s.x[n..].iter().map(|v| libm::fabs(*v)).sum();
    if infeasibility > opts.feas_tol * scale {
        return Ok(SolveOutcome::failed(SolveStatus::Infeasible, n, s.iterations));
    }
    for k in 0..s.rows {
        s.hi[n + k] = 0.0;
        if s.state[n + k] != VarState::Basic {
            s.x[n + k] = 0.0;
            s.state[n + k] = VarState::AtLower;
        }
    }

    let mut phase2 = lp.cost.clone();
    phase2.extend(core::iter::repeat_n(0.0, s.rows));
    match s.run_phase(&phase2)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::IterationLimit | PhaseEnd::Unbounded => {
            return Ok(SolveOutcome::failed(SolveStatus::NumericalFailure, n, s.iterations))
        }
    }
    s.refactor()?;

    let (y, d) = s.prices(&phase2);
    let solution = s.x[..n].to_vec();
    let multipliers = Multipliers {
        equality: y,
        lower: d[..n].iter().map(|v| v.max(0.0)).collect(),
        upper: d[..n].iter().map(|v| (-v).max(0.0)).collect(),
    };
    let report = kkt_residuals(lp, &solution, Some(&multipliers))?;
    Ok(SolveOutcome {
        status: SolveStatus::Optimal,
        objective: lp.objective(&solution),
        solution,
        residuals: report.residuals,
        multipliers: Some(multipliers),
        iterations: s.iterations,
    })
}
