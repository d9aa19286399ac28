//! Points of the Boolean cube and sequences of them.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A point of `{-1, 1}^p`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<i8>", into = "Vec<i8>"))]
pub struct CubePoint(Vec<i8>);

impl CubePoint {
    pub fn new(coords: Vec<i8>) -> Result<Self> {
        if let Some(bad) = coords.iter().position(|&c| c != 1 && c != -1) {
            return Err(Error::InvalidArgument(alloc::format!(
                "coordinate {} is {}, expected -1 or +1",
                bad,
                coords[bad]
            )));
        }
        Ok(CubePoint(coords))
    }

    /// The all-ones point.
    pub fn ones(p: usize) -> Self {
        CubePoint(alloc::vec![1; p])
    }

    /// Point whose coordinate `i` is `-1` iff bit `i` of `bits` is set.
    pub fn from_bits(bits: u64, p: usize) -> Self {
        debug_assert!(p <= 64);
        CubePoint((0..p).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<i8> {
        self.0.get(i).copied()
    }
}

impl TryFrom<Vec<i8>> for CubePoint {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        CubePoint::new(v)
    }
}

impl From<CubePoint> for Vec<i8> {
    fn from(p: CubePoint) -> Vec<i8> {
        p.0
    }
}

impl fmt::Debug for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *c > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// A sequence of cube points sharing one dimension. Duplicates are kept: the sequence
/// is the object of interest, not the set.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DataMatrix {
    dim: usize,
    points: Vec<CubePoint>,
}

impl DataMatrix {
    pub fn new(dim: usize, points: Vec<CubePoint>) -> Result<Self> {
        for pt in &points {
            if pt.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: pt.dim() });
            }
        }
        Ok(DataMatrix { dim, points })
    }

    /// Every point of `{-1, 1}^p`, in binary counting order.
    pub fn full_cube(p: usize) -> Self {
        assert!(p < 32, "full cube enumeration is limited to small p");
        let points = (0..1u64 << p).map(|b| CubePoint::from_bits(b, p)).collect();
        DataMatrix { dim: p, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CubePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<CubePoint> {
        self.points
    }
}
