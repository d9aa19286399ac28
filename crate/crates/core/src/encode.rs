//! Categorical tables, one-hot encoding into the cube, and empirical density statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cube::{CubePoint, DataMatrix};
use crate::{Error, Result};

/// A table of categorical labels. Vocabularies are sorted and deduplicated; cells are
/// stored as positions in their column's vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalTable {
    columns: Vec<String>,
    vocabularies: Vec<Vec<String>>,
    rows: Vec<Vec<u32>>,
}

impl CategoricalTable {
    /// Infers vocabularies from raw label rows. Empty cells are treated as missing values
    /// and rejected.
    pub fn from_rows(columns: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("table has no rows"));
        }
        let width = columns.len();
        if width == 0 {
            return Err(Error::Empty("table has no columns"));
        }
        let mut missing = 0usize;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidArgument(alloc::format!(
                    "row {} has {} cells, expected {}",
                    i + 1,
                    row.len(),
                    width
                )));
            }
            missing += row.iter().filter(|c| c.trim().is_empty()).count();
        }
        if missing > 0 {
            return Err(Error::InvalidArgument(alloc::format!("{missing} empty cells (missing values)")));
        }
        let mut vocabularies: Vec<Vec<String>> = (0..width)
            .map(|c| {
                let mut v: Vec<String> = rows.iter().map(|r| r[c].clone()).collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        vocabularies.iter_mut().for_each(|v| v.shrink_to_fit());
        let coded = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(c, label)| vocabularies[c].binary_search(label).unwrap() as u32)
                    .collect()
            })
            .collect();
        Ok(CategoricalTable { columns, vocabularies, rows: coded })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn vocabularies(&self) -> &[Vec<String>] {
        &self.vocabularies
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn label(&self, row: usize, col: usize) -> &str {
        &self.vocabularies[col][self.rows[row][col] as usize]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// How two-category columns are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BinaryEncoding {
    /// Two coordinates, like every other column.
    #[default]
    OneHot,
    /// One coordinate: `+1` for the second category in sorted order, `-1` for the first.
    SingleCoordinate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnBlock {
    pub column: String,
    /// First coordinate of the block.
    pub start: usize,
    pub categories: Vec<String>,
    /// The block is a single `-1/+1` coordinate for a two-category column.
    pub single: bool,
}

impl ColumnBlock {
    pub fn width(&self) -> usize {
        if self.single {
            1
        } else {
            self.categories.len()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedTable {
    pub data: DataMatrix,
    pub blocks: Vec<ColumnBlock>,
    pub warnings: Vec<String>,
}

impl EncodedTable {
    /// Recovers the labels of one encoded row.
    pub fn decode(&self, point: &CubePoint) -> Result<Vec<String>> {
        if point.dim() != self.data.dim() {
            return Err(Error::DimensionMismatch { expected: self.data.dim(), found: point.dim() });
        }
        let coords = point.coords();
        self.blocks
            .iter()
            .map(|b| {
                if b.single {
                    let i = if coords[b.start] > 0 { 1 } else { 0 };
                    return Ok(b.categories[i].clone());
                }
                let block = &coords[b.start..b.start + b.categories.len()];
                let hot: Vec<usize> = (0..block.len()).filter(|&i| block[i] > 0).collect();
                match hot.as_slice() {
                    [i] => Ok(b.categories[*i].clone()),
                    _ => Err(Error::InvalidArgument(alloc::format!(
                        "column `{}` block has {} active coordinates",
                        b.column,
                        hot.len()
                    ))),
                }
            })
            .collect()
    }
}

/// One-hot encodes every column not in `drop_columns`: the active category maps to `+1`,
/// the rest of its block to `-1`.
pub fn one_hot_encode(table: &CategoricalTable, drop_columns: &[&str], binary: BinaryEncoding) -> Result<EncodedTable> {
    for name in drop_columns {
        if table.column_index(name).is_none() {
            return Err(Error::UnknownColumn((*name).into()));
        }
    }
    let mut blocks = Vec::new();
    let mut warnings = Vec::new();
    let mut p = 0usize;
    let mut kept = Vec::new();
    for (c, name) in table.columns.iter().enumerate() {
        if drop_columns.contains(&name.as_str()) {
            continue;
        }
        let vocab = &table.vocabularies[c];
        if vocab.len() == 1 {
            warnings.push(alloc::format!("column `{name}` has a single category; it adds one constant coordinate"));
        }
        let single = binary == BinaryEncoding::SingleCoordinate && vocab.len() == 2;
        let block = ColumnBlock { column: name.clone(), start: p, categories: vocab.clone(), single };
        p += block.width();
        blocks.push(block);
        kept.push(c);
    }
    if p == 0 {
        return Err(Error::Empty("no columns left to encode"));
    }
    let points = table
        .rows
        .iter()
        .map(|row| {
            let mut coords = alloc::vec![-1i8; p];
            for (block, &c) in blocks.iter().zip(&kept) {
                let code = row[c] as usize;
                if block.single {
                    coords[block.start] = if code == 1 { 1 } else { -1 };
                } else {
                    coords[block.start + code] = 1;
                }
            }
            CubePoint::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EncodedTable { data: DataMatrix::new(p, points)?, blocks, warnings })
}

/// Row count, dimension and the largest mass the empirical density puts on one point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetStats {
    pub n: u64,
    pub p: u32,
    /// `log10(2^p)`
    pub log10_cube_size: f64,
    /// `max_x f_n(x)`: largest row multiplicity divided by `n`.
    pub max_density: f64,
}

pub fn empirical_stats(data: &DataMatrix) -> Result<DatasetStats> {
    if data.is_empty() {
        return Err(Error::Empty("data matrix"));
    }
    let mut counts: BTreeMap<&[i8], u64> = BTreeMap::new();
    for pt in data.points() {
        *counts.entry(pt.coords()).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    let n = data.len() as u64;
    Ok(DatasetStats {
        n,
        p: data.dim() as u32,
        log10_cube_size: data.dim() as f64 * core::f64::consts::LOG10_2,
        max_density: max as f64 / n as f64,
    })
}
