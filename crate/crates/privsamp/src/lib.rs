//! File formats, run manifests and the command line for `privsamp-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod dump;
pub mod io;
pub mod manifest;
