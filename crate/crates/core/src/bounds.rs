//! Privacy and accuracy bounds, evaluated in log10 space.
//!
//! The privacy condition caps the number of synthetic points:
//! `k <= eps (delta/Delta)^{3/2} e^{-d/2} l^{-1/4} sqrt(n) / (4 sqrt 2 m^{3/4})`
//! with `l = binom(p, <= d)`. The accuracy conditions are
//! `n >= 16 delta^-2 gamma^-1 e^{2d} l`,
//! `16 delta^-2 gamma^-1 Delta^2 e^{2d} l <= m <= 2^{p/4}` and
//! `k >= 4 delta^-2 (ln(2/gamma) + ln l)`, holding with probability `1 - 4 gamma - 2^{-p/2}`.
//!
//! The relaxed forms fix `d = 2`, `delta = 1/4`, `gamma = 1/8`, `Delta = 2^p max f_n` and
//! replace `l` by `p(p+1)/2`, which folds all constants into [`RELAXED_M_CONSTANT`] and
//! [`RELAXED_K_CONSTANT`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{LN_10, LOG10_2, LOG10_E};
use core::fmt;

use crate::encode::DatasetStats;
use crate::walsh::count_up_to_degree;
use crate::{Error, Result};

pub const RELAXED_M_CONSTANT: f64 = 5.6e4;
pub const RELAXED_K_CONSTANT: f64 = 9.7e-3;
/// Closed-form ideal-case constant: `k <= 2.7e-6 2^{p/2} / (p(p+1)) eps`.
pub const IDEAL_CLOSED_FORM_CONSTANT: f64 = 2.7e-6;

/// A positive quantity stored as its base-10 logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Log10(pub f64);

impl Log10 {
    pub fn of(value: f64) -> Self {
        Log10(libm::log10(value))
    }

    pub fn log10(self) -> f64 {
        self.0
    }

    /// The linear value; `inf` or `0` when out of `f64` range.
    pub fn value(self) -> f64 {
        libm::pow(10.0, self.0)
    }

    /// Mantissa in `[1, 10)` and exponent, rounded to two significant figures.
    pub fn mantissa_exponent(self) -> (f64, i64) {
        let mut e = libm::floor(self.0);
        let mut mant = libm::round(libm::pow(10.0, self.0 - e) * 10.0) / 10.0;
        if mant >= 10.0 {
            mant /= 10.0;
            e += 1.0;
        }
        (mant, e as i64)
    }

    /// Two-significant-figure scientific notation such as `7.3e-4`.
    pub fn sci(self) -> String {
        if !self.0.is_finite() {
            return if self.0 > 0.0 { "inf".into() } else if self.0 < 0.0 { "0".into() } else { "nan".into() };
        }
        let (m, e) = self.mantissa_exponent();
        format!("{m:.1}e{e}")
    }
}

impl fmt::Display for Log10 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sci())
    }
}

impl core::ops::Add for Log10 {
    type Output = Log10;
    fn add(self, rhs: Log10) -> Log10 {
        Log10(self.0 + rhs.0)
    }
}

impl core::ops::Sub for Log10 {
    type Output = Log10;
    fn sub(self, rhs: Log10) -> Log10 {
        Log10(self.0 - rhs.0)
    }
}

/// `log10 binom(p, <= d)`, exact while the count fits in `u128`.
pub fn log10_binom_up_to(p: u32, d: u32) -> f64 {
    if let Some(c) = count_up_to_degree(p as u64, d as u64) {
        return libm::log10(c as f64);
    }
    // log-sum-exp over the terms
    let lc = |i: u32| {
        (libm::lgamma(p as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((p - i) as f64 + 1.0)) * LOG10_E
    };
    let top = (0..=d.min(p)).map(lc).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = (0..=d.min(p)).map(|i| libm::pow(10.0, lc(i) - top)).sum();
    top + libm::log10(sum)
}

/// `log10 2^x`
fn pow2(x: f64) -> f64 {
    x * LOG10_2
}

/// Parameters of the two bounds. Counts that can exceed `f64` range are held in log10.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundInputs {
    pub p: u32,
    pub d: u32,
    pub n: Log10,
    pub max_density: Log10,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    /// `Delta`; defaults to `2^p max f_n`.
    pub cap: Option<Log10>,
    pub m: Option<Log10>,
    pub k: Option<f64>,
}

impl BoundInputs {
    /// Inputs with the defaults `eps = 1`, `delta = 1/4`, `gamma = 1/8`, `d = 2`.
    pub fn new(p: u32, n: f64, max_density: f64) -> Self {
        BoundInputs {
            p,
            d: 2,
            n: Log10::of(n),
            max_density: Log10::of(max_density),
            epsilon: 1.0,
            delta: 0.25,
            gamma: 0.125,
            cap: None,
            m: None,
            k: None,
        }
    }

    pub fn from_stats(stats: &DatasetStats) -> Self {
        Self::new(stats.p, stats.n as f64, stats.max_density)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_degree(mut self, d: u32) -> Self {
        self.d = d;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = Some(Log10::of(cap));
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = Some(Log10::of(m));
        self
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn cap(&self) -> Log10 {
        self.cap.unwrap_or(Log10(pow2(self.p as f64) + self.max_density.0))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.into()));
        if self.p < 1 {
            return bad("p must be at least 1");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.cap().0 >= libm::log10(self.delta)) {
            return bad("Delta must be at least delta");
        }
        if !self.n.0.is_finite() || !self.max_density.0.is_finite() || self.m.is_some_and(|m| !m.0.is_finite()) {
            return bad("n, max density and m must be positive and finite");
        }
        Ok(())
    }

    fn log10_l(&self) -> f64 {
        log10_binom_up_to(self.p, self.d)
    }
}

/// Coefficient `C` of the privacy cap `k <= C / m^{3/4}`.
pub fn privacy_k_coefficient(inputs: &BoundInputs) -> Log10 {
    Log10(
        libm::log10(inputs.epsilon) - libm::log10(4.0 * core::f64::consts::SQRT_2)
            + 1.5 * (libm::log10(inputs.delta) - inputs.cap().0)
            - inputs.d as f64 / 2.0 * LOG10_E
            - inputs.log10_l() / 4.0
            + inputs.n.0 / 2.0,
    )
}

/// The privacy cap on `k` at a reduced-space size `m`.
pub fn privacy_k_max(inputs: &BoundInputs, m: Log10) -> Log10 {
    Log10(privacy_k_coefficient(inputs).0 - 0.75 * m.0)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AccuracyRequirements {
    pub n_min: Log10,
    pub m_min: Log10,
    /// `2^{p/4}`
    pub m_max: Log10,
    /// Uses the natural logarithm.
    pub k_min: Log10,
    /// `1 - 4 gamma - 2^{-p/2}`; not clamped at zero.
    pub success_probability: f64,
}

pub fn accuracy_requirements(inputs: &BoundInputs) -> AccuracyRequirements {
    let base = libm::log10(16.0) - 2.0 * libm::log10(inputs.delta) - libm::log10(inputs.gamma)
        + 2.0 * inputs.d as f64 * LOG10_E
        + inputs.log10_l();
    let ln_l = inputs.log10_l() * LN_10;
    let k_min = 4.0 / (inputs.delta * inputs.delta) * (libm::log(2.0 / inputs.gamma) + ln_l);
    AccuracyRequirements {
        n_min: Log10(base),
        m_min: Log10(base + 2.0 * inputs.cap().0),
        m_max: Log10(pow2(inputs.p as f64 / 4.0)),
        k_min: Log10::of(k_min),
        success_probability: 1.0 - 4.0 * inputs.gamma - libm::pow(2.0, -(inputs.p as f64) / 2.0),
    }
}

/// The relaxed `m` constant `16 delta^-2 gamma^-1 e^4 / 2` (the `/2` comes from `l ~ p(p+1)/2`).
pub fn exact_relaxed_m_constant(delta: f64, gamma: f64) -> f64 {
    16.0 / (delta * delta * gamma) * libm::exp(4.0) / 2.0
}

/// The relaxed `k` constant `delta^{3/2} e^{-1} 2^{1/4} / (4 sqrt 2)`.
pub fn exact_relaxed_k_constant(delta: f64) -> f64 {
    libm::pow(delta, 1.5) * libm::exp(-1.0) * libm::pow(2.0, 0.25) / (4.0 * core::f64::consts::SQRT_2)
}

/// Constants used by the relaxed systems.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelaxedConstants {
    pub m: f64,
    pub k: f64,
}

impl RelaxedConstants {
    /// The rounded constants `5.6e4` and `9.7e-3`.
    pub const ROUNDED: RelaxedConstants = RelaxedConstants { m: RELAXED_M_CONSTANT, k: RELAXED_K_CONSTANT };

    pub fn exact(delta: f64, gamma: f64) -> Self {
        RelaxedConstants { m: exact_relaxed_m_constant(delta, gamma), k: exact_relaxed_k_constant(delta) }
    }
}

/// One line of the per-dataset table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelaxedRow {
    pub p: u32,
    pub n: Log10,
    pub max_density: Log10,
    pub epsilon: f64,
    /// Coefficient of `1 / m^{3/4}` in the cap on `k`.
    pub k_coefficient: Log10,
    pub m_lower: Log10,
    /// `2^{p/4}`
    pub m_upper: Log10,
}

/// `m >= C_m f^2 p(p+1) 2^{2p}` and `k <= C_k eps sqrt(n) / (2^{3p/2} f^{3/2} (p(p+1))^{1/4} m^{3/4})`.
pub fn relaxed_bounds_with(p: u32, n: Log10, max_density: Log10, epsilon: f64, c: RelaxedConstants) -> RelaxedRow {
    let pf = p as f64;
    let lpp = libm::log10(pf * (pf + 1.0));
    let m_lower = libm::log10(c.m) + 2.0 * max_density.0 + lpp + pow2(2.0 * pf);
    let k_coefficient = libm::log10(c.k) + libm::log10(epsilon) + n.0 / 2.0
        - pow2(1.5 * pf)
        - 1.5 * max_density.0
        - lpp / 4.0;
    RelaxedRow {
        p,
        n,
        max_density,
        epsilon,
        k_coefficient: Log10(k_coefficient),
        m_lower: Log10(m_lower),
        m_upper: Log10(pow2(pf / 4.0)),
    }
}

pub fn relaxed_bounds(stats: &DatasetStats, epsilon: f64) -> RelaxedRow {
    relaxed_bounds_with(
        stats.p,
        Log10::of(stats.n as f64),
        Log10::of(stats.max_density),
        epsilon,
        RelaxedConstants::ROUNDED,
    )
}

/// Bounds for a data set covering the cube evenly (`max f_n = 2^-p`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdealCaseBounds {
    pub p: u32,
    pub epsilon: f64,
    pub n: Log10,
    /// `C_m p(p+1)`
    pub m_min: Log10,
    /// `2^{p/4}`
    pub m_max: Log10,
    /// The relaxed `k` cap evaluated at `m = m_min`.
    pub k_max: Log10,
    /// `2.7e-6 2^{p/2} / (p(p+1)) eps`, meaningful when `n = 2^p`.
    pub k_max_closed_form: Log10,
}

/// Ideal-case bounds; `n` defaults to `2^p`.
pub fn ideal_case_bounds(p: u32, epsilon: f64, n: Option<Log10>) -> IdealCaseBounds {
    let pf = p as f64;
    let n = n.unwrap_or(Log10(pow2(pf)));
    let lpp = libm::log10(pf * (pf + 1.0));
    let m_min = libm::log10(RELAXED_M_CONSTANT) + lpp;
    let k_max = libm::log10(RELAXED_K_CONSTANT) + libm::log10(epsilon) + n.0 / 2.0 - lpp / 4.0 - 0.75 * m_min;
    IdealCaseBounds {
        p,
        epsilon,
        n,
        m_min: Log10(m_min),
        m_max: Log10(pow2(pf / 4.0)),
        k_max: Log10(k_max),
        k_max_closed_form: Log10(
            libm::log10(IDEAL_CLOSED_FORM_CONSTANT) + pow2(pf / 2.0) - lpp + libm::log10(epsilon),
        ),
    }
}

/// Consecutive values of `p` that must stay above the target after a crossing.
pub const CROSSING_STABILITY: u32 = 3;

/// Smallest `p <= p_max` from which the ideal-case cap stays at or above `k_target`.
pub fn min_p_for_k(k_target: f64, epsilon: f64, p_max: u32) -> Result<u32> {
    if !(k_target >= 1.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("need k >= 1 and epsilon > 0".into()));
    }
    let target = libm::log10(k_target);
    let mut run = 0;
    for p in 1..=p_max {
        if ideal_case_bounds(p, epsilon, None).k_max.0 >= target {
            run += 1;
            if run == CROSSING_STABILITY || p == p_max {
                return Ok(p + 1 - run);
            }
        } else {
            run = 0;
        }
    }
    Err(Error::InvalidArgument(format!("no crossing of k = {k_target} for p <= {p_max}")))
}

/// Reference crossings at `eps = 10`, compared against in [`table3`].
pub const TABLE3_REFERENCE: [(u64, u32); 4] = [(1, 46), (100, 68), (1000, 75), (10000, 83)];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Table3Row {
    pub k: u64,
    pub epsilon: f64,
    pub p: u32,
    pub reference_p: Option<u32>,
    /// Set when the computed crossing differs from the reference by more than one.
    pub discrepancy: bool,
    pub m_lower: Log10,
    pub two_pow_p_quarter: Log10,
    pub two_pow_p: Log10,
}

pub fn table3(epsilon: f64, ks: &[u64], p_max: u32) -> Result<Vec<Table3Row>> {
    ks.iter()
        .map(|&k| {
            let p = min_p_for_k(k as f64, epsilon, p_max)?;
            let b = ideal_case_bounds(p, epsilon, None);
            let reference_p = if epsilon == 10.0 {
                TABLE3_REFERENCE.iter().find(|(rk, _)| *rk == k).map(|&(_, rp)| rp)
            } else {
                None
            };
            Ok(Table3Row {
                k,
                epsilon,
                p,
                reference_p,
                discrepancy: reference_p.is_some_and(|rp| p.abs_diff(rp) > 1),
                m_lower: b.m_min,
                two_pow_p_quarter: b.m_max,
                two_pow_p: Log10(pow2(p as f64)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub p: u32,
    pub epsilon: f64,
    pub log10_k_upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Figure1Data {
    pub curves: Vec<CurvePoint>,
    /// `(k, log10 k)` horizontal lines.
    pub thresholds: Vec<(f64, f64)>,
}

/// Ideal-case `log10 k_max` over `p_range` for each `eps`.
pub fn figure1_data(p_range: core::ops::RangeInclusive<u32>, epsilons: &[f64], thresholds: &[f64]) -> Result<Figure1Data> {
    if p_range.is_empty() || epsilons.is_empty() {
        return Err(Error::Empty("figure range"));
    }
    let mut curves = Vec::new();
    for &epsilon in epsilons {
        for p in p_range.clone() {
            curves.push(CurvePoint { p, epsilon, log10_k_upper: ideal_case_bounds(p, epsilon, None).k_max.0 });
        }
    }
    Ok(Figure1Data { curves, thresholds: thresholds.iter().map(|&k| (k, libm::log10(k))).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeExtrapolation {
    pub exponent: f64,
    /// `c` in `t = c size^a`.
    pub coefficient: f64,
    pub target: f64,
    pub predicted_seconds: f64,
    /// Whether the exponent was fitted rather than assumed.
    pub fitted: bool,
}

/// Fits `t = c size^a` by least squares in log-log space and predicts the time at `target`.
///
/// With `assumed_exponent`, only `c` is fitted. A single measurement requires an assumed
/// exponent; `None` then means `2`.
pub fn qp_time_extrapolation(measured: &[(f64, f64)], target: f64, assumed_exponent: Option<f64>) -> Result<TimeExtrapolation> {
    if measured.is_empty() {
        return Err(Error::Empty("timing measurements"));
    }
    if measured.iter().any(|&(s, t)| !(s > 0.0 && t > 0.0)) || !(target > 0.0) {
        return Err(Error::InvalidArgument("sizes, times and the target must be positive".into()));
    }
    let xs: Vec<f64> = measured.iter().map(|m| libm::log(m.0)).collect();
    let ys: Vec<f64> = measured.iter().map(|m| libm::log(m.1)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let (exponent, fitted) = match assumed_exponent {
        Some(a) => (a, false),
        None if measured.len() == 1 => (2.0, false),
        None => {
            if sxx <= 0.0 {
                return Err(Error::InvalidArgument("need at least two distinct sizes".into()));
            }
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            (sxy / sxx, true)
        }
    };
    let log_c = my - exponent * mx;
    Ok(TimeExtrapolation {
        exponent,
        coefficient: libm::exp(log_c),
        target,
        predicted_seconds: libm::exp(log_c + exponent * libm::log(target)),
        fitted,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibilityReport {
    pub inputs: BoundInputs,
    pub cap: Log10,
    pub k_coefficient: Log10,
    /// Privacy cap at `m = m_min`.
    pub k_max_at_m_min: Log10,
    /// Privacy cap at the requested `m`, if any.
    pub k_max_at_m: Option<Log10>,
    pub accuracy: AccuracyRequirements,
    pub m_window_nonempty: bool,
    pub k_window_nonempty: bool,
    pub jointly_feasible: bool,
    pub log_base_k_min: String,
    pub verdict: String,
    pub warnings: Vec<String>,
}

pub fn feasibility_report(inputs: &BoundInputs) -> Result<FeasibilityReport> {
    inputs.validate()?;
    let accuracy = accuracy_requirements(inputs);
    let k_coefficient = privacy_k_coefficient(inputs);
    let k_max_at_m_min = privacy_k_max(inputs, accuracy.m_min);
    let m_window_nonempty = accuracy.m_min.0 <= accuracy.m_max.0;
    let k_window_nonempty = k_max_at_m_min.0 >= accuracy.k_min.0;
    let jointly_feasible = m_window_nonempty && k_window_nonempty;
    let mut warnings = Vec::new();
    if accuracy.success_probability <= 0.0 {
        warnings.push(format!(
            "degenerate parameters: success probability {:.4} <= 0 (gamma = {})",
            accuracy.success_probability, inputs.gamma
        ));
    }
    if inputs.cap().0 < inputs.max_density.0 + pow2(inputs.p as f64) - 1e-12 {
        warnings.push("Delta is below 2^p max f_n; the accuracy precondition fails".into());
    }
    if inputs.n.0 < accuracy.n_min.0 {
        warnings.push(format!("n = {} is below the required {}", inputs.n, accuracy.n_min));
    }
    let verdict = if jointly_feasible {
        format!(
            "feasible: m in [{}, {}] and k in [{}, {}]",
            accuracy.m_min, accuracy.m_max, accuracy.k_min, k_max_at_m_min
        )
    } else if !m_window_nonempty {
        format!("infeasible: m must be at least {} but at most {}", accuracy.m_min, accuracy.m_max)
    } else {
        format!(
            "infeasible: k must be at least {} but privacy allows at most {}",
            accuracy.k_min, k_max_at_m_min
        )
    };
    Ok(FeasibilityReport {
        cap: inputs.cap(),
        k_coefficient,
        k_max_at_m_min,
        k_max_at_m: inputs.m.map(|m| privacy_k_max(inputs, m)),
        accuracy,
        m_window_nonempty,
        k_window_nonempty,
        jointly_feasible,
        log_base_k_min: "natural".into(),
        verdict,
        warnings,
        inputs: inputs.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(Log10::of(7.36e-4).sci(), "7.4e-4");
        assert_eq!(Log10::of(4.0).sci(), "4.0e0");
        assert_eq!(Log10::of(9.97e8).sci(), "1.0e9");
        assert_eq!(Log10(f64::INFINITY).sci(), "inf");
    }

    #[test]
    fn binomial_counts() {
        assert!((log10_binom_up_to(8, 2) - libm::log10(37.0)).abs() < 1e-15);
        // beyond u128 the lgamma path agrees with the exact path at the seam
        let exact = log10_binom_up_to(60, 30);
        let lg = {
            let lc = |i: u32| {
                (libm::lgamma(61.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((60 - i) as f64 + 1.0)) * LOG10_E
            };
            let s: f64 = (0..=30).map(|i| libm::pow(10.0, lc(i))).sum();
            libm::log10(s)
        };
        assert!((exact - lg).abs() < 1e-10);
        assert!(log10_binom_up_to(400, 200).is_finite());
    }

    #[test]
    fn privacy_plug_in_ones() {
        let mut i = BoundInputs::new(1, 7.0, 0.5).with_degree(0).with_cap(0.3).with_delta(0.3);
        i.epsilon = 2.0;
        let m = 7.0;
        // binom(1, <= 0) = 1
        let direct = 2.0 / (4.0 * core::f64::consts::SQRT_2) * libm::pow(m, -0.25);
        assert!(close(privacy_k_max(&i, Log10::of(m)).value(), direct, 1e-12));
        let doubled = privacy_k_max(&i.clone().with_epsilon(4.0), Log10::of(m));
        assert!(close(doubled.value(), 2.0 * direct, 1e-12));
    }

    #[test]
    fn accuracy_example() {
        let i = BoundInputs::new(8, 20000.0, 0.29).with_cap(1.0);
        let a = accuracy_requirements(&i);
        let expect = 16.0 * 16.0 * 8.0 * libm::exp(4.0) * 37.0;
        assert!(close(a.n_min.value(), expect, 1e-12));
        assert!(close(a.m_min.value(), expect, 1e-12));
        assert!(close(a.m_max.value(), 4.0, 1e-12));
        assert!((a.success_probability - 0.4375).abs() < 1e-15);
        assert!(close(a.k_min.value(), 64.0 * (libm::log(16.0) + libm::log(37.0)), 1e-12));
        let r = feasibility_report(&i).unwrap();
        assert!(!r.m_window_nonempty && !r.jointly_feasible);
    }

    #[test]
    fn extrapolation_cases() {
        let e = qp_time_extrapolation(&[(1000.0, 0.1)], 1000.0, Some(2.0)).unwrap();
        assert!(close(e.predicted_seconds, 0.1, 1e-12));
        let e = qp_time_extrapolation(&[(100.0, 0.001), (1000.0, 0.1)], 1e4, None).unwrap();
        assert!((e.exponent - 2.0).abs() < 1e-12 && e.fitted);
        assert!(qp_time_extrapolation(&[(1000.0, 0.1), (1000.0, 0.2)], 1e4, None).is_err());
        assert!(qp_time_extrapolation(&[(0.0, 0.1)], 1e4, Some(2.0)).is_err());
    }

    #[test]
    fn gamma_warning() {
        let r = feasibility_report(&BoundInputs::new(8, 20000.0, 0.29).with_gamma(0.3)).unwrap();
        assert!(r.accuracy.success_probability <= 0.0);
        assert!(r.warnings.iter().any(|w| w.contains("degenerate")));
    }

    #[test]
    fn no_crossing_is_an_error() {
        assert!(min_p_for_k(100.0, 10.0, 20).is_err());
    }
}
