//! Fourier analysis on the Boolean cube.
//!
//! Walsh functions `w_J(x) = prod_{j in J} x_j` form an orthogonal basis of real functions
//! on `{-1, 1}^p`. Everything here is restricted to degree `|J| <= d`, the part of a
//! density that determines all of its marginals of dimension at most `d`.
//!
//! Coordinates are 0-based throughout the API; `Display` prints them 1-based.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::cube::CubePoint;
use crate::linalg::{self, DenseMatrix};
use crate::{Error, Result};

/// A subset `J` of coordinate positions, kept strictly increasing.
///
/// The ordering is graded lexicographic: smaller subsets first, then lexicographic on
/// members. Index sets, matrices and coefficient vectors all use this order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalshIndex {
    members: Vec<usize>,
}

impl WalshIndex {
    pub fn empty() -> Self {
        WalshIndex { members: Vec::new() }
    }

    /// Builds an index from arbitrary positions; they are sorted and must be distinct.
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated coordinate in Walsh index".into()));
        }
        Ok(WalshIndex { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn degree(&self) -> usize {
        self.members.len()
    }

    pub fn is_subset_of(&self, other: &WalshIndex) -> bool {
        self.members.iter().all(|m| other.members.binary_search(m).is_ok())
    }

    /// All subsets of `self`, each as a bitmask over `self.members()` paired with the index.
    fn subsets(&self) -> impl Iterator<Item = (u32, WalshIndex)> + '_ {
        let k = self.members.len();
        (0u32..1 << k).map(move |mask| {
            let members = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| self.members[b]).collect();
            (mask, WalshIndex { members })
        })
    }
}

impl Ord for WalshIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .len()
            .cmp(&other.members.len())
            .then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for WalshIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for WalshIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for WalshIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("}")
    }
}

/// `sum_{i <= d} C(p, i)`, the number of Walsh functions of degree at most `d`.
/// Returns `None` on `u128` overflow.
pub fn count_up_to_degree(p: u64, d: u64) -> Option<u128> {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=d.min(p) {
        if i > 0 {
            term = term.checked_mul((p - i + 1) as u128)? / i as u128;
        }
        total = total.checked_add(term)?;
    }
    Some(total)
}

/// The Walsh functions of degree at most `d` on `{-1, 1}^p`, in graded lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalshIndexSet {
    p: usize,
    d: usize,
    indices: Vec<WalshIndex>,
}

impl WalshIndexSet {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[WalshIndex] {
        &self.indices
    }

    pub fn iter(&self) -> core::slice::Iter<'_, WalshIndex> {
        self.indices.iter()
    }

    /// Position of `j` in the graded order, if it belongs to the set.
    pub fn position(&self, j: &WalshIndex) -> Option<usize> {
        self.indices.binary_search(j).ok()
    }
}

/// Enumerates every `J` with `|J| <= d`, empty set first, in graded lexicographic order.
pub fn enumerate_indices(p: usize, d: usize) -> Result<WalshIndexSet> {
    if p < 1 || d < 1 || d > p {
        return Err(Error::InvalidArgument(alloc::format!(
            "need 1 <= d <= p, got p = {p}, d = {d}"
        )));
    }
    let mut indices = Vec::new();
    for degree in 0..=d {
        // lexicographic k-combinations of 0..p
        let mut comb: Vec<usize> = (0..degree).collect();
        loop {
            indices.push(WalshIndex { members: comb.clone() });
            let mut i = degree;
            while i > 0 && comb[i - 1] == p - degree + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for t in i..degree {
                comb[t] = comb[t - 1] + 1;
            }
        }
    }
    Ok(WalshIndexSet { p, d, indices })
}

/// `w_J(x)`: the product of the coordinates of `x` selected by `J`, 1 for the empty set.
pub fn walsh_eval(j: &WalshIndex, x: &CubePoint) -> Result<i8> {
    let coords = x.coords();
    let mut sign = 1i8;
    for &m in j.members() {
        match coords.get(m) {
            Some(&c) => sign *= c,
            None => return Err(Error::IndexOutOfRange { index: m, dim: coords.len() }),
        }
    }
    Ok(sign)
}

#[inline]
fn eval_unchecked(j: &WalshIndex, coords: &[i8]) -> i8 {
    j.members().iter().fold(1i8, |s, &m| s * coords[m])
}

/// Walsh matrix with one row per index `J` and one column per point: entry `(J, i)` is
/// `w_J(points[i])`.
///
/// The row-per-function orientation matches the constraint matrices of the shrinkage and
/// proximal programs; the conditioning matrix with one row per point is its transpose.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalshMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl WalshMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Row sums, i.e. `W 1`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&v| v as i64).sum::<i64>() as f64)
            .collect()
    }

    /// `W v` for a vector over the columns.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&w, &x)| w as f64 * x).sum())
            .collect()
    }

    /// `W^T y` for a vector over the rows.
    pub fn mul_transpose_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = alloc::vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            for (o, &w) in out.iter_mut().zip(self.row(r)) {
                *o += w as f64 * yr;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) as f64)
    }

    /// Smallest singular value of the map from coefficient space to point values, i.e. the
    /// `rows()`-th singular value. It is 0 when there are fewer points than functions.
    pub fn smallest_singular_value(&self) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Empty("Walsh matrix"));
        }
        if self.cols < self.rows {
            return Ok(0.0);
        }
        linalg::smallest_singular_value(&self.to_dense())
    }
}

/// Builds the Walsh matrix of `points` over `index_set`.
pub fn build_walsh_matrix(points: &[CubePoint], index_set: &WalshIndexSet) -> Result<WalshMatrix> {
    for pt in points {
        if pt.dim() != index_set.p() {
            return Err(Error::DimensionMismatch { expected: index_set.p(), found: pt.dim() });
        }
    }
    let rows = index_set.len();
    let cols = points.len();
    let mut data = alloc::vec![0i8; rows * cols];
    for (c, pt) in points.iter().enumerate() {
        let coords = pt.coords();
        for (r, j) in index_set.iter().enumerate() {
            data[r * cols + c] = eval_unchecked(j, coords);
        }
    }
    Ok(WalshMatrix { rows, cols, data })
}

/// Degree-`<= d` Walsh coefficients of a density, `coefficient(J) = sum_x f(x) w_J(x)`.
#[derive(Clone, PartialEq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LowFreqCoefficients {
    index_set: WalshIndexSet,
    values: Vec<f64>,
}

impl LowFreqCoefficients {
    pub fn new(index_set: WalshIndexSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != index_set.len() {
            return Err(Error::DimensionMismatch { expected: index_set.len(), found: values.len() });
        }
        Ok(LowFreqCoefficients { index_set, values })
    }

    /// Coefficients of the uniform density on the whole cube: 1 at the empty set, 0 elsewhere.
    pub fn uniform_cube(index_set: WalshIndexSet) -> Self {
        let mut values = alloc::vec![0.0; index_set.len()];
        values[0] = 1.0;
        LowFreqCoefficients { index_set, values }
    }

    pub fn index_set(&self) -> &WalshIndexSet {
        &self.index_set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: &WalshIndex) -> Option<f64> {
        self.index_set.position(j).map(|i| self.values[i])
    }

    /// `(1 - lambda) * self + lambda * other`, over the same index set.
    pub fn mix(&self, other: &LowFreqCoefficients, lambda: f64) -> Result<LowFreqCoefficients> {
        if self.index_set != other.index_set {
            return Err(Error::InvalidArgument("coefficient index sets differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect();
        Ok(LowFreqCoefficients { index_set: self.index_set.clone(), values })
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &LowFreqCoefficients) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |acc, (a, b)| f64::max(acc, libm::fabs(a - b)))
    }
}

/// Coefficients of the weighted point density `sum_i weights[i] 1_{points[i]}`.
pub fn low_freq_coeffs(
    points: &[CubePoint],
    weights: &[f64],
    index_set: &WalshIndexSet,
) -> Result<LowFreqCoefficients> {
    if weights.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
    }
    let total: f64 = weights.iter().sum();
    if !(libm::fabs(total - 1.0) <= 1e-9) {
        return Err(Error::WeightNormalization(total));
    }
    let mut values = alloc::vec![0.0; index_set.len()];
    for (pt, &w) in points.iter().zip(weights) {
        if pt.dim() != index_set.p() {
            return Err(Error::DimensionMismatch { expected: index_set.p(), found: pt.dim() });
        }
        let coords = pt.coords();
        for (v, j) in values.iter_mut().zip(index_set.iter()) {
            *v += w * eval_unchecked(j, coords) as f64;
        }
    }
    LowFreqCoefficients::new(index_set.clone(), values)
}

/// Coefficients of the empirical density, `(1/n) W 1_n`. Signs are accumulated as
/// integers so the result is exact up to the final division.
pub fn empirical_coeffs(points: &[CubePoint], index_set: &WalshIndexSet) -> Result<LowFreqCoefficients> {
    if points.is_empty() {
        return Err(Error::Empty("point sequence"));
    }
    let mut sums = alloc::vec![0i64; index_set.len()];
    for pt in points {
        if pt.dim() != index_set.p() {
            return Err(Error::DimensionMismatch { expected: index_set.p(), found: pt.dim() });
        }
        let coords = pt.coords();
        for (s, j) in sums.iter_mut().zip(index_set.iter()) {
            *s += eval_unchecked(j, coords) as i64;
        }
    }
    let n = points.len() as f64;
    LowFreqCoefficients::new(index_set.clone(), sums.into_iter().map(|s| s as f64 / n).collect())
}

/// Probability that the coordinates in `j` take the values `signs` (aligned with
/// `j.members()`), recovered from low-frequency coefficients alone:
///
/// `P = 2^{-|J|} sum_{J' subset J} (prod_{i in J'} signs_i) coefficient(J')`.
pub fn marginal_probability(coeffs: &LowFreqCoefficients, j: &WalshIndex, signs: &[i8]) -> Result<f64> {
    let max = coeffs.index_set().degree();
    if j.degree() > max {
        return Err(Error::DegreeTooHigh { degree: j.degree(), max });
    }
    if signs.len() != j.degree() {
        return Err(Error::DimensionMismatch { expected: j.degree(), found: signs.len() });
    }
    if let Some(&s) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidArgument(alloc::format!("sign {s} is not -1 or +1")));
    }
    if let Some(&m) = j.members().iter().find(|&&m| m >= coeffs.index_set().p()) {
        return Err(Error::IndexOutOfRange { index: m, dim: coeffs.index_set().p() });
    }
    let mut acc = 0.0;
    for (mask, sub) in j.subsets() {
        let sign = (0..signs.len()).filter(|b| mask >> b & 1 == 1).fold(1i8, |s, b| s * signs[b]);
        let c = coeffs
            .get(&sub)
            .ok_or_else(|| Error::Inconsistent("subset missing from index set".into()))?;
        acc += sign as f64 * c;
    }
    Ok(acc / (1u64 << j.degree()) as f64)
}
