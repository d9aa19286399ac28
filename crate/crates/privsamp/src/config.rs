//! Generation settings: command-line flags override the config file, which overrides
//! the defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::io::InputFormat;

/// Settings as read from a TOML config file or given on the command line; every field
/// is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenerateSettings {
    pub input: Option<PathBuf>,
    pub p: Option<usize>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    #[serde(rename = "Delta")]
    pub cap: Option<f64>,
    pub seed: Option<u64>,
    pub retries: Option<u32>,
    pub condition_check: Option<bool>,
    pub tol: Option<f64>,
    pub format: Option<InputFormat>,
    pub drop: Option<Vec<String>>,
    pub binary_single: Option<bool>,
    pub delimiter: Option<String>,
    pub no_header: Option<bool>,
}

impl GenerateSettings {
    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: GenerateSettings) -> GenerateSettings {
        GenerateSettings {
            input: self.input.or(lower.input),
            p: self.p.or(lower.p),
            d: self.d.or(lower.d),
            m: self.m.or(lower.m),
            k: self.k.or(lower.k),
            delta: self.delta.or(lower.delta),
            cap: self.cap.or(lower.cap),
            seed: self.seed.or(lower.seed),
            retries: self.retries.or(lower.retries),
            condition_check: self.condition_check.or(lower.condition_check),
            tol: self.tol.or(lower.tol),
            format: self.format.or(lower.format),
            drop: self.drop.or(lower.drop),
            binary_single: self.binary_single.or(lower.binary_single),
            delimiter: self.delimiter.or(lower.delimiter),
            no_header: self.no_header.or(lower.no_header),
        }
    }

    pub fn from_toml_file(path: &Path) -> anyhow::Result<GenerateSettings> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }
}

/// Fully resolved settings, echoed into the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ResolvedGenerate {
    pub input: PathBuf,
    pub p: usize,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub delta: f64,
    /// Resolved `Delta`; `2^p max f_n` unless given.
    #[serde(rename = "Delta")]
    pub cap: f64,
    pub cap_defaulted: bool,
    pub seed: u64,
    pub retries: u32,
    pub condition_check: bool,
    pub tol: f64,
    pub format: InputFormat,
    pub drop: Vec<String>,
    pub binary_single: bool,
    pub delimiter: String,
    pub no_header: bool,
}

impl ResolvedGenerate {
    /// Back to settings, for replaying a manifest.
    pub fn to_settings(&self) -> GenerateSettings {
        GenerateSettings {
            input: Some(self.input.clone()),
            p: Some(self.p),
            d: Some(self.d),
            m: Some(self.m),
            k: Some(self.k),
            delta: Some(self.delta),
            cap: Some(self.cap),
            seed: Some(self.seed),
            retries: Some(self.retries),
            condition_check: Some(self.condition_check),
            tol: Some(self.tol),
            format: Some(self.format),
            drop: Some(self.drop.clone()),
            binary_single: Some(self.binary_single),
            delimiter: Some(self.delimiter.clone()),
            no_header: Some(self.no_header),
        }
    }
}
