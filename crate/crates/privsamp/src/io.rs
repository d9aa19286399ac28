//! Files: categorical CSV, `+-1` matrix CSV, JSON and atomic writes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use privsamp_core::encode::{one_hot_encode, BinaryEncoding, CategoricalTable, EncodedTable};
use privsamp_core::{CubePoint, DataMatrix};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Environment variable naming the directory for temporary files.
pub const TMPDIR_ENV: &str = "PRIVSAMP_TMPDIR";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] privsamp_core::Error),
}

pub type Result<T> = std::result::Result<T, IoError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

fn parse_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Parse { path: path.to_path_buf(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub has_header: bool,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { has_header: true, delimiter: b',' }
    }
}

/// Reads delimited text into a categorical table. Without a header, columns are named
/// `c0, c1, ...`.
pub fn load_csv<R: Read>(source: R, opts: CsvOptions, origin: &Path) -> Result<CategoricalTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_reader(source);
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(origin, format!("line {}: {e}", i + 1)))?;
        records.push(rec.iter().map(|s| s.trim().to_string()).collect::<Vec<_>>());
    }
    if records.is_empty() {
        return Err(parse_err(origin, "empty input"));
    }
    let columns = if opts.has_header {
        records.remove(0)
    } else {
        (0..records[0].len()).map(|i| format!("c{i}")).collect()
    };
    CategoricalTable::from_rows(columns, records).map_err(|e| parse_err(origin, e.to_string()))
}

pub fn load_csv_file(path: &Path, opts: CsvOptions) -> Result<CategoricalTable> {
    load_csv(File::open(path).map_err(io_err(path))?, opts, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    /// `+-1` matrix if every data cell is `1`, `+1` or `-1`, categorical otherwise.
    #[default]
    Auto,
    Categorical,
    Cube,
}

fn is_sign(s: &str) -> bool {
    matches!(s, "1" | "+1" | "-1")
}

fn table_to_cube(table: &CategoricalTable, origin: &Path) -> Result<DataMatrix> {
    let p = table.columns().len();
    let points = (0..table.num_rows())
        .map(|r| {
            let coords = (0..p)
                .map(|c| match table.label(r, c) {
                    "1" | "+1" => Ok(1),
                    "-1" => Ok(-1),
                    other => Err(parse_err(origin, format!("row {}: `{other}` is not +-1", r + 1))),
                })
                .collect::<Result<Vec<i8>>>()?;
            Ok(CubePoint::new(coords)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DataMatrix::new(p, points)?)
}

/// Options for turning a file into cube points.
#[derive(Debug, Clone, Default)]
pub struct EncodeOptions {
    pub format: InputFormat,
    pub csv: CsvOptions,
    pub drop_columns: Vec<String>,
    pub binary: BinaryEncoding,
}

/// Loaded data and, for categorical input, the encoding.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub data: DataMatrix,
    pub encoding: Option<EncodedTable>,
}

/// Loads a data file as cube points, one-hot encoding categorical input.
pub fn load_data(path: &Path, opts: &EncodeOptions) -> Result<LoadedData> {
    let table = load_csv_file(path, opts.csv)?;
    let cube = match opts.format {
        InputFormat::Cube => true,
        InputFormat::Categorical => false,
        InputFormat::Auto => (0..table.num_rows()).all(|r| (0..table.columns().len()).all(|c| is_sign(table.label(r, c)))),
    };
    if cube {
        if !opts.drop_columns.is_empty() {
            return Err(parse_err(path, "--drop applies to categorical input only"));
        }
        return Ok(LoadedData { data: table_to_cube(&table, path)?, encoding: None });
    }
    let drops: Vec<&str> = opts.drop_columns.iter().map(String::as_str).collect();
    let enc = one_hot_encode(&table, &drops, opts.binary)?;
    for w in &enc.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(LoadedData { data: enc.data.clone(), encoding: Some(enc) })
}

/// Reads a `+-1` matrix CSV; a header row is detected and skipped.
pub fn read_cube_csv(path: &Path) -> Result<DataMatrix> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| parse_err(path, "empty input"))?;
    let has_header = !first.split(',').all(|c| is_sign(c.trim()));
    let table = load_csv(text.as_bytes(), CsvOptions { has_header, delimiter: b',' }, path)?;
    table_to_cube(&table, path)
}

/// `+-1` matrix CSV with header `x1..xp`.
pub fn cube_csv_bytes(data: &DataMatrix) -> Vec<u8> {
    let mut out = String::new();
    let header: Vec<String> = (1..=data.dim()).map(|i| format!("x{i}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for pt in data.points() {
        let row: Vec<&str> = pt.coords().iter().map(|&v| if v > 0 { "1" } else { "-1" }).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf()
}

fn write_temp(dir: &Path, bytes: &[u8]) -> Result<tempfile::NamedTempFile> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(dir))?;
    tmp.as_file().sync_all().map_err(io_err(dir))?;
    Ok(tmp)
}

/// Writes through a temporary file and renames it into place, so readers never see a
/// partial file. The temporary file goes to `$PRIVSAMP_TMPDIR` when set.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = parent_dir(path);
    let dir = match std::env::var_os(TMPDIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => parent.clone(),
    };
    let persist = |tmp: tempfile::NamedTempFile| {
        tmp.persist(path).map(|_| ()).map_err(|e| IoError::Io { path: path.to_path_buf(), source: e.error })
    };
    match persist(write_temp(&dir, bytes)?) {
        // rename fails across file systems; retry next to the target
        Err(_) if dir != parent => persist(write_temp(&parent, bytes)?),
        other => other,
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| parse_err(path, e.to_string()))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

/// Hex SHA-256 of a file.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(io_err(path))?;
    let mut hasher = Sha256::new();
    std::io::copy(&mut file, &mut hasher).map_err(io_err(path))?;
    Ok(hex::encode(hasher.finalize()))
}

/// Writes CSV rows through [`atomic_write`].
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| parse_err(path, e.to_string());
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref())).map_err(|e| parse_err(path, e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(path, e.to_string()))?;
    atomic_write(path, &bytes)
}

/// Writes a categorical table as CSV with a header row.
pub fn write_table_csv(path: &Path, table: &CategoricalTable) -> Result<()> {
    let header: Vec<&str> = table.columns().iter().map(String::as_str).collect();
    let rows: Vec<Vec<&str>> = (0..table.num_rows())
        .map(|r| (0..header.len()).map(|c| table.label(r, c)).collect())
        .collect();
    write_csv(path, &header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabularies_from_small_csv() {
        let t = load_csv("a,b\nx,u\ny,u\nx,u\n".as_bytes(), CsvOptions::default(), Path::new("t")).unwrap();
        assert_eq!(t.vocabularies(), &[vec!["x".to_string(), "y".into()], vec!["u".to_string()]]);
        let one = load_csv("a\nx\n".as_bytes(), CsvOptions::default(), Path::new("t")).unwrap();
        assert_eq!(one.num_rows(), 1);
        assert!(load_csv("".as_bytes(), CsvOptions::default(), Path::new("t")).is_err());
        assert!(load_csv("a,b\nx\n".as_bytes(), CsvOptions::default(), Path::new("t")).is_err());
        assert!(load_csv(&[0xff, 0xfe, b'\n'][..], CsvOptions::default(), Path::new("t")).is_err());
    }

    #[test]
    fn tab_separated_without_header() {
        let opts = CsvOptions { has_header: false, delimiter: b'\t' };
        let t = load_csv("x\tu\ny\tv\n".as_bytes(), opts, Path::new("t")).unwrap();
        assert_eq!(t.columns(), &["c0".to_string(), "c1".into()]);
    }

    #[test]
    fn cube_round_trip_and_atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.csv");
        let data = DataMatrix::full_cube(3);
        atomic_write(&path, &cube_csv_bytes(&data)).unwrap();
        assert_eq!(read_cube_csv(&path).unwrap(), data);
        let loaded = load_data(&path, &EncodeOptions::default()).unwrap();
        assert!(loaded.encoding.is_none());
        assert_eq!(loaded.data, data);
        assert_eq!(sha256_file(&path).unwrap().len(), 64);
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(names.len(), 1);
    }
}
