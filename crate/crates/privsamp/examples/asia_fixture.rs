//! Writes a seeded draw from the Asia network as a `yes`/`no` CSV.
//!
//! `cargo run -p privsamp --example asia_fixture -- asia.csv [rows] [seed]`

use std::path::PathBuf;

use anyhow::Context;
use privsamp::io::write_table_csv;
use privsamp_core::asia::asia_table;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().context("usage: asia_fixture OUT.csv [rows] [seed]")?);
    let rows: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20_000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(11);
    write_table_csv(&path, &asia_table(rows, seed)?)?;
    println!("wrote {rows} rows to {}", path.display());
    Ok(())
}
