//! Seeded Monte Carlo campaigns: configuration, presets, parallel trial
//! execution, aggregation and result files.
//!
//! Trial `k` of a campaign uses seed `base + k` for a ChaCha8 stream, so a
//! configuration and base seed determine every output byte regardless of
//! how many worker threads run the trials.

pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

pub use config::{ExperimentKind, ExperimentSpec};
pub use presets::{preset, PRESET_NAMES};
pub use report::{emit_results, head_bounds, summary_json, AggregateReport, HeadBounds, Histogram, Summary};
pub use runner::{run_experiment, sched_dump_jsonl, sync_trace_jsonl, ExperimentOutput, FrameRecord, RunRecord, SpectralSummary, TrialGroup};

use thiserror::Error;

use crate::sched::SchedError;
use crate::spectral::SpectralError;
use crate::sync::SyncError;
use crate::topology::TopologyError;

/// Identifier of the random generator recorded in every output.
pub const RNG_ID: &str = "chacha8";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error(transparent)]
    Sched(#[from] SchedError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
