#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use privsamp::io::write_table_csv;
use privsamp_core::asia::asia_table;

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

pub fn privsamp<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_privsamp")).args(args).output().expect("spawn privsamp");
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        elapsed: start.elapsed(),
    }
}

/// Seeded Asia draw written as a `yes`/`no` CSV.
pub fn asia_csv(dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let path = dir.join(format!("asia-{rows}-{seed}.csv"));
    write_table_csv(&path, &asia_table(rows, seed).unwrap()).unwrap();
    path
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Parses a `+-1` CSV with a header row.
pub fn read_cube(path: &Path) -> Vec<Vec<i8>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}
