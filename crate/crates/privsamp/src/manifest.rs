//! JSON artifacts written by `generate`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use privsamp_core::rng::Stream;
use privsamp_core::sampler::{
    ConditionDiagnostics, MarginalReport, PrivateSamplingResult, RunStatus, SolverDiagnostics,
};
use serde::{Deserialize, Serialize};

use crate::config::ResolvedGenerate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSeed {
    pub name: String,
    /// ChaCha20 stream identifier under the root seed.
    pub stream_id: u64,
}

impl From<Stream> for StreamSeed {
    fn from(s: Stream) -> Self {
        let name = match s {
            Stream::ReducedSpace => "reduced-space".to_string(),
            Stream::Sampling => "sampling".to_string(),
            Stream::Retry(i) => format!("retry-{i}"),
        };
        StreamSeed { name, stream_id: s.id() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ResolvedGenerate,
    pub root_seed: u64,
    /// Streams used, in order: every reduced-space attempt, then sampling.
    pub streams: Vec<StreamSeed>,
    pub inputs: Vec<InputDigest>,
    /// Wall time per stage in seconds.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<PathBuf>,
    pub status: RunStatus,
    pub lambda: Option<f64>,
    pub sigma_min: f64,
    pub condition_threshold: f64,
    pub lp: Option<SolverDiagnostics>,
    pub qp: Option<SolverDiagnostics>,
    /// Synthetic marginals against the shrinkage mixture, with bound `4 delta`.
    pub marginals: Option<MarginalReport>,
}

/// Everything needed to inspect or re-verify the fitted density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityArtifact {
    pub status: RunStatus,
    pub p: usize,
    pub d: usize,
    pub lambda: Option<f64>,
    pub sigma_min: f64,
    pub condition_threshold: f64,
    pub attempts: Vec<ConditionDiagnostics>,
    pub lp: Option<SolverDiagnostics>,
    pub qp: Option<SolverDiagnostics>,
    /// The reduced-space sequence, one `+-1` row per atom.
    pub reduced_space: Vec<Vec<i8>>,
    /// `h*` over the reduced-space sequence.
    pub probabilities: Vec<f64>,
}

impl DensityArtifact {
    pub fn from_result(r: &PrivateSamplingResult, d: usize) -> Self {
        let space = &r.reduced_space;
        DensityArtifact {
            status: r.status,
            p: space.index_set().p(),
            d,
            lambda: r.density.as_ref().map(|x| x.lambda),
            sigma_min: space.sigma_min(),
            condition_threshold: space.threshold(),
            attempts: r.attempts.clone(),
            lp: r.density.as_ref().and_then(|x| x.lp.clone()),
            qp: r.density.as_ref().map(|x| x.qp.clone()),
            reduced_space: space.points().iter().map(|x| x.coords().to_vec()).collect(),
            probabilities: r.density.as_ref().map(|x| x.probabilities.clone()).unwrap_or_default(),
        }
    }
}
