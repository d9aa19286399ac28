//! The private sampling pipeline.
//!
//! 1. Draw `m` uniform cube points (the reduced space `S`, kept as a sequence).
//! 2. Require the smallest singular value of its Walsh matrix to be at least
//!    `sqrt(m) / (2 e^d)`.
//! 3. Fit the smallest shrinkage weight `lambda` toward the uniform density on `S` for which
//!    a marginal-matching density fits in `[2 delta/m, (Delta - delta)/m]`.
//! 4. Project the uniform density onto the shrunk set intersected with
//!    `[delta/m, Delta/m]` to get `h*`.
//! 5. Draw `k` independent points of `S` from `h*`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::cube::{CubePoint, DataMatrix};
use crate::kkt::{KktResiduals, SolveOutcome, SolveStatus};
use crate::lp::{build_lambda_lp, solve_lp, DEFAULT_TOL};
use crate::qp::{build_proximal_qp, solve_qp};
use crate::rng::{stream_rng, Stream};
use crate::walsh::{
    build_walsh_matrix, empirical_coeffs, enumerate_indices, low_freq_coeffs, marginal_probability,
    LowFreqCoefficients, WalshIndex, WalshIndexSet, WalshMatrix,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplingConfig {
    pub p: usize,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub delta: f64,
    /// The density cap `Delta`.
    pub cap: f64,
    pub seed: u64,
    pub condition_check: bool,
    pub retries: u32,
    pub tol: f64,
}

impl SamplingConfig {
    pub fn new(p: usize, d: usize, m: usize, k: usize, delta: f64, cap: f64, seed: u64) -> Self {
        SamplingConfig { p, d, m, k, delta, cap, seed, condition_check: true, retries: 0, tol: DEFAULT_TOL }
    }

    pub fn validate(&self) -> Result<()> {
        crate::lp::check_box_params(self.delta, self.cap)?;
        if self.d < 1 || self.d > self.p || self.m < 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "need 1 <= d <= p and m >= 1, got p = {}, d = {}, m = {}",
                self.p,
                self.d,
                self.m
            )));
        }
        Ok(())
    }
}

/// `sqrt(m) / (2 e^d)`
pub fn condition_threshold(m: usize, d: usize) -> f64 {
    libm::sqrt(m as f64) / (2.0 * libm::exp(d as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpace {
    points: Vec<CubePoint>,
    walsh: WalshMatrix,
    index_set: WalshIndexSet,
    sigma_min: f64,
    threshold: f64,
}

impl ReducedSpace {
    /// Builds the reduced space from given points (the draw is done by
    /// [`draw_reduced_space`]; this entry point allows injected sequences).
    pub fn from_points(points: Vec<CubePoint>, index_set: &WalshIndexSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("reduced space"));
        }
        let walsh = build_walsh_matrix(&points, index_set)?;
        let sigma_min = walsh.smallest_singular_value()?;
        let threshold = condition_threshold(points.len(), index_set.degree());
        Ok(ReducedSpace { points, walsh, index_set: index_set.clone(), sigma_min, threshold })
    }

    pub fn points(&self) -> &[CubePoint] {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn walsh(&self) -> &WalshMatrix {
        &self.walsh
    }

    pub fn index_set(&self) -> &WalshIndexSet {
        &self.index_set
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn well_conditioned(&self) -> bool {
        self.sigma_min >= self.threshold
    }

    /// Coefficients of the uniform density on the sequence, `(1/m) W_S 1`.
    pub fn uniform_coeffs(&self) -> LowFreqCoefficients {
        let m = self.m() as f64;
        let values = self.walsh.row_sums().into_iter().map(|s| s / m).collect();
        LowFreqCoefficients::new(self.index_set.clone(), values).expect("lengths agree")
    }
}

/// Draws `m` points with independent fair coordinates and builds their Walsh matrix.
pub fn draw_reduced_space<R: Rng + ?Sized>(index_set: &WalshIndexSet, m: usize, rng: &mut R) -> Result<ReducedSpace> {
    let p = index_set.p();
    if m < 1 || p < 1 {
        return Err(Error::InvalidArgument("m and p must be at least 1".into()));
    }
    let points = (0..m)
        .map(|_| CubePoint::new((0..p).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()))
        .collect::<Result<Vec<_>>>()?;
    ReducedSpace::from_points(points, index_set)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionDiagnostics {
    pub sigma_min: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn condition_check(space: &ReducedSpace) -> ConditionDiagnostics {
    ConditionDiagnostics {
        sigma_min: space.sigma_min,
        threshold: space.threshold,
        passed: space.well_conditioned(),
    }
}

/// Solver summary kept with a fitted density.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverDiagnostics {
    pub status: SolveStatus,
    pub objective: f64,
    pub residuals: KktResiduals,
    pub iterations: usize,
}

impl From<&SolveOutcome> for SolverDiagnostics {
    fn from(o: &SolveOutcome) -> Self {
        SolverDiagnostics { status: o.status, objective: o.objective, residuals: o.residuals, iterations: o.iterations }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFit {
    pub lambda: f64,
    pub outcome: SolveOutcome,
}

/// Smallest shrinkage weight, from the shrinkage LP.
pub fn fit_lambda(
    space: &ReducedSpace,
    data_coeffs: &LowFreqCoefficients,
    n: usize,
    delta: f64,
    cap: f64,
    tol: f64,
) -> Result<LambdaFit> {
    let lp = build_lambda_lp(&space.walsh, data_coeffs, space.m(), n, delta, cap)?;
    let outcome = solve_lp(&lp, tol)?;
    match outcome.status {
        SolveStatus::Optimal => Ok(LambdaFit { lambda: outcome.solution[0].clamp(0.0, 1.0), outcome }),
        SolveStatus::Infeasible => Err(Error::ShrinkageInfeasible),
        SolveStatus::NumericalFailure => Err(Error::NumericalFailure(alloc::format!(
            "shrinkage LP residuals {:?}",
            outcome.residuals
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittedDensity {
    pub lambda: f64,
    /// Probability of each position of the reduced-space sequence.
    pub probabilities: Vec<f64>,
    pub lp: Option<SolverDiagnostics>,
    pub qp: SolverDiagnostics,
}

/// The proximal point `h*` for a fitted `lambda`.
pub fn fit_density(
    space: &ReducedSpace,
    data_coeffs: &LowFreqCoefficients,
    lambda: f64,
    delta: f64,
    cap: f64,
    tol: f64,
) -> Result<FittedDensity> {
    let qp = build_proximal_qp(&space.walsh, data_coeffs, lambda, space.m(), delta, cap)?;
    let outcome = solve_qp(&qp, tol)?;
    match outcome.status {
        SolveStatus::Optimal => Ok(FittedDensity {
            lambda,
            qp: SolverDiagnostics::from(&outcome),
            probabilities: outcome.solution,
            lp: None,
        }),
        SolveStatus::Infeasible => Err(Error::Inconsistent(alloc::format!(
            "proximal QP infeasible at lambda = {lambda} although the shrinkage LP was feasible"
        ))),
        SolveStatus::NumericalFailure => Err(Error::NumericalFailure(alloc::format!(
            "proximal QP residuals {:?}",
            outcome.residuals
        ))),
    }
}

/// Coefficients of a density given by per-position probabilities on the reduced space.
pub fn density_coeffs(space: &ReducedSpace, probabilities: &[f64]) -> Result<LowFreqCoefficients> {
    let total: f64 = probabilities.iter().sum();
    let normalized: Vec<f64> = probabilities.iter().map(|p| p / total).collect();
    let coeffs = low_freq_coeffs(&space.points, &normalized, &space.index_set)?;
    let values = coeffs.values().iter().map(|v| v * total).collect();
    LowFreqCoefficients::new(space.index_set.clone(), values)
}

/// Draws `k` positions independently from `probabilities`.
pub fn sample_indices<R: Rng + ?Sized>(probabilities: &[f64], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if probabilities.is_empty() {
        return Err(Error::Empty("probability vector"));
    }
    if probabilities.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("non-finite probability".into()));
    }
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::InvalidArgument("probabilities sum to zero".into()));
    }
    let last = probabilities.len() - 1;
    Ok((0..k)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect())
}

/// Draws `k` points of the reduced space from a fitted density.
pub fn sample<R: Rng + ?Sized>(density: &FittedDensity, space: &ReducedSpace, k: usize, rng: &mut R) -> Result<Vec<CubePoint>> {
    if density.probabilities.len() != space.m() {
        return Err(Error::DimensionMismatch { expected: space.m(), found: density.probabilities.len() });
    }
    Ok(sample_indices(&density.probabilities, k, rng)?
        .into_iter()
        .map(|i| space.points[i].clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RunStatus {
    Success,
    ConditionFailure,
    ShrinkageInfeasible,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StreamSeeds {
    pub root: u64,
    /// Stream identifier of the reduced-space draw that was used.
    pub reduced_space: Stream,
    pub sampling: Stream,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateSamplingResult {
    pub status: RunStatus,
    /// Conditioning outcome of every reduced-space draw, in order.
    pub attempts: Vec<ConditionDiagnostics>,
    pub reduced_space: ReducedSpace,
    pub data_coeffs: LowFreqCoefficients,
    pub density: Option<FittedDensity>,
    /// Positions in the reduced space of the synthetic points.
    pub sample_indices: Vec<usize>,
    pub synthetic: Vec<CubePoint>,
    pub seeds: StreamSeeds,
}

impl PrivateSamplingResult {
    pub fn synthetic_matrix(&self) -> DataMatrix {
        DataMatrix::new(self.reduced_space.index_set.p(), self.synthetic.clone()).expect("dimensions agree")
    }
}

/// Pipeline stages, in order, as reported to [`run_observed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Stage {
    Coefficients,
    ReducedSpace,
    Shrinkage,
    Projection,
    Sampling,
    Done,
}

/// Runs the whole pipeline on `data`.
///
/// Conditioning failure and an infeasible shrinkage program are reported through
/// [`RunStatus`]; errors are reserved for invalid input and solver breakdowns.
pub fn run(config: &SamplingConfig, data: &DataMatrix) -> Result<PrivateSamplingResult> {
    run_observed(config, data, &mut |_| {})
}

/// [`run`], calling `on_stage` as each stage starts and once more with [`Stage::Done`].
pub fn run_observed(
    config: &SamplingConfig,
    data: &DataMatrix,
    on_stage: &mut dyn FnMut(Stage),
) -> Result<PrivateSamplingResult> {
    let result = run_inner(config, data, on_stage);
    on_stage(Stage::Done);
    result
}

fn run_inner(config: &SamplingConfig, data: &DataMatrix, on_stage: &mut dyn FnMut(Stage)) -> Result<PrivateSamplingResult> {
    config.validate()?;
    if data.dim() != config.p {
        return Err(Error::DimensionMismatch { expected: config.p, found: data.dim() });
    }
    on_stage(Stage::Coefficients);
    let index_set = enumerate_indices(config.p, config.d)?;
    let data_coeffs = empirical_coeffs(data.points(), &index_set)?;

    on_stage(Stage::ReducedSpace);
    let mut attempts = Vec::new();
    let mut attempt = 0u32;
    let (space, stream) = loop {
        let stream = Stream::reduced_space_attempt(attempt);
        let mut rng = stream_rng(config.seed, stream);
        let space = draw_reduced_space(&index_set, config.m, &mut rng)?;
        let diag = condition_check(&space);
        attempts.push(diag);
        if diag.passed || !config.condition_check || attempt >= config.retries {
            break (space, stream);
        }
        attempt += 1;
    };
    let seeds = StreamSeeds { root: config.seed, reduced_space: stream, sampling: Stream::Sampling };
    let mut result = PrivateSamplingResult {
        status: RunStatus::ConditionFailure,
        attempts,
        reduced_space: space,
        data_coeffs,
        density: None,
        sample_indices: Vec::new(),
        synthetic: Vec::new(),
        seeds,
    };
    if config.condition_check && !result.reduced_space.well_conditioned() {
        return Ok(result);
    }

    let space = &result.reduced_space;
    on_stage(Stage::Shrinkage);
    let fit = match fit_lambda(space, &result.data_coeffs, data.len(), config.delta, config.cap, config.tol) {
        Ok(fit) => fit,
        Err(Error::ShrinkageInfeasible) => {
            result.status = RunStatus::ShrinkageInfeasible;
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    on_stage(Stage::Projection);
    let mut density = fit_density(space, &result.data_coeffs, fit.lambda, config.delta, config.cap, config.tol)?;
    density.lp = Some(SolverDiagnostics::from(&fit.outcome));

    on_stage(Stage::Sampling);
    let mut rng = stream_rng(config.seed, Stream::Sampling);
    let indices = sample_indices(&density.probabilities, config.k, &mut rng)?;
    result.synthetic = indices.iter().map(|&i| space.points[i].clone()).collect();
    result.sample_indices = indices;
    result.density = Some(density);
    result.status = RunStatus::Success;
    Ok(result)
}

/// Marginal of one subset and sign pattern.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarginalCell {
    /// 0-based coordinates.
    pub subset: Vec<usize>,
    pub signs: Vec<i8>,
    /// Marginal of the comparison target (the shrinkage mixture by default).
    pub reference: f64,
    /// Marginal of the unshrunk reference density.
    pub raw_reference: f64,
    pub synthetic: f64,
}

impl MarginalCell {
    pub fn deviation(&self) -> f64 {
        libm::fabs(self.synthetic - self.reference)
    }

    pub fn raw_deviation(&self) -> f64 {
        libm::fabs(self.synthetic - self.raw_reference)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarginalReport {
    pub degree: usize,
    pub lambda: f64,
    pub bound: f64,
    /// Largest deviation from the comparison target over all cells.
    pub max_deviation: f64,
    /// Largest deviation per subset size `0..=degree`.
    pub max_deviation_by_degree: Vec<f64>,
    /// Largest deviation from the unshrunk reference.
    pub max_raw_deviation: f64,
    pub passed: bool,
    pub cells: Vec<MarginalCell>,
    pub note: String,
}

/// What the reference is mixed with before comparison.
#[derive(Debug, Clone, Copy)]
pub struct Shrinkage<'a> {
    pub lambda: f64,
    /// Coefficients of the uniform density on the reduced space.
    pub toward: &'a LowFreqCoefficients,
}

/// Compares every marginal of dimension `<= d` of `synthetic` against the reference
/// coefficients, mixed as `(1 - lambda) ref + lambda toward` when `shrinkage` is given.
pub fn verify_marginals_coeffs(
    reference: &LowFreqCoefficients,
    synthetic: &LowFreqCoefficients,
    shrinkage: Option<Shrinkage<'_>>,
    bound: f64,
) -> Result<MarginalReport> {
    if reference.index_set() != synthetic.index_set() {
        return Err(Error::InvalidArgument("reference and synthetic index sets differ".into()));
    }
    let (target, lambda) = match shrinkage {
        Some(s) => {
            if !(0.0..=1.0).contains(&s.lambda) {
                return Err(Error::InvalidArgument(alloc::format!("lambda = {} is outside [0, 1]", s.lambda)));
            }
            (reference.mix(s.toward, s.lambda)?, s.lambda)
        }
        None => (reference.clone(), 0.0),
    };
    let d = reference.index_set().degree();
    let mut cells = Vec::new();
    let mut by_degree = alloc::vec![0.0f64; d + 1];
    let mut max_dev = 0.0f64;
    let mut max_raw = 0.0f64;
    for j in reference.index_set().iter() {
        for pattern in 0u32..1 << j.degree() {
            let signs: Vec<i8> = (0..j.degree()).map(|b| if pattern >> b & 1 == 1 { -1 } else { 1 }).collect();
            let cell = MarginalCell {
                subset: j.members().to_vec(),
                reference: marginal_probability(&target, j, &signs)?,
                raw_reference: marginal_probability(reference, j, &signs)?,
                synthetic: marginal_probability(synthetic, j, &signs)?,
                signs,
            };
            by_degree[j.degree()] = by_degree[j.degree()].max(cell.deviation());
            max_dev = max_dev.max(cell.deviation());
            max_raw = max_raw.max(cell.raw_deviation());
            cells.push(cell);
        }
    }
    let note = if shrinkage.is_some() {
        "deviations are measured against the shrinkage mixture; raw deviations against the reference data".into()
    } else {
        "deviations are measured against the reference data".into()
    };
    Ok(MarginalReport {
        degree: d,
        lambda,
        bound,
        max_deviation: max_dev,
        max_deviation_by_degree: by_degree,
        max_raw_deviation: max_raw,
        passed: max_dev <= bound,
        cells,
        note,
    })
}

/// [`verify_marginals_coeffs`] for a synthetic data set.
pub fn verify_marginals(
    reference: &LowFreqCoefficients,
    synthetic: &DataMatrix,
    shrinkage: Option<Shrinkage<'_>>,
    bound: f64,
) -> Result<MarginalReport> {
    if synthetic.dim() != reference.index_set().p() {
        return Err(Error::DimensionMismatch { expected: reference.index_set().p(), found: synthetic.dim() });
    }
    let syn = empirical_coeffs(synthetic.points(), reference.index_set())?;
    verify_marginals_coeffs(reference, &syn, shrinkage, bound)
}

/// Convenience for a raw subset/sign query used in tests and reports.
pub fn marginal_of(data: &DataMatrix, subset: &[usize], signs: &[i8]) -> Result<f64> {
    let j = WalshIndex::new(subset.to_vec())?;
    let d = j.degree().max(1).min(data.dim());
    let set = enumerate_indices(data.dim(), d)?;
    marginal_probability(&empirical_coeffs(data.points(), &set)?, &j, signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn threshold_value() {
        assert!((condition_threshold(500, 2) - 22.360679774997898 / (2.0 * 7.38905609893065)).abs() < 1e-12);
    }

    #[test]
    fn single_point_fails_condition() {
        let set = enumerate_indices(4, 2).unwrap();
        let s = ReducedSpace::from_points(vec![CubePoint::ones(4)], &set).unwrap();
        assert_eq!(s.sigma_min(), 0.0);
        assert!(!condition_check(&s).passed);
        let p = CubePoint::new(vec![1, -1, 1, -1]).unwrap();
        let s = ReducedSpace::from_points(vec![p.clone(), p], &set).unwrap();
        assert!(!condition_check(&s).passed);
    }

    #[test]
    fn full_cube_injection_matches_orthogonality() {
        let set = enumerate_indices(2, 2).unwrap();
        // the full cube repeated four times: W W^T = 16 I
        let pts: Vec<CubePoint> = (0..16).map(|i| CubePoint::from_bits(i % 4, 2)).collect();
        let s = ReducedSpace::from_points(pts, &set).unwrap();
        assert!((s.sigma_min() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_edge_cases() {
        let mut rng = stream_rng(1, Stream::Sampling);
        assert!(sample_indices(&[0.5, 0.5], 0, &mut rng).unwrap().is_empty());
        let draws = sample_indices(&[1.0, 0.0, 0.0], 500, &mut rng).unwrap();
        assert!(draws.iter().all(|&i| i == 0));
        assert!(sample_indices(&[], 3, &mut rng).is_err());
    }

    #[test]
    fn condition_failure_is_a_status() {
        let data = DataMatrix::full_cube(4);
        let cfg = SamplingConfig::new(4, 2, 1, 10, 0.1, 2.0, 3);
        let r = run(&cfg, &data).unwrap();
        assert_eq!(r.status, RunStatus::ConditionFailure);
        assert!(r.synthetic.is_empty());
    }

    #[test]
    fn run_rejects_dimension_mismatch() {
        let data = DataMatrix::full_cube(3);
        let cfg = SamplingConfig::new(4, 2, 50, 10, 0.1, 2.0, 3);
        assert!(matches!(run(&cfg, &data), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identical_data_verifies_exactly() {
        let data = DataMatrix::full_cube(3);
        let set = enumerate_indices(3, 2).unwrap();
        let reference = empirical_coeffs(data.points(), &set).unwrap();
        let report = verify_marginals(&reference, &data, None, 0.0).unwrap();
        assert_eq!(report.max_deviation, 0.0);
        assert!(report.passed);
        assert_eq!(report.cells.len(), 1 + 2 * 3 + 4 * 3);
    }
}
