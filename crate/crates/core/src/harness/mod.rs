//! Rollouts, evaluation, run configuration, logging, checkpoints and the
//! experiment driver.

mod agent;
mod archive;
mod checkpoint;
mod config;
mod evaluate;
mod log;
mod run;
mod wire;

pub use agent::{agent_step, rollout, AgentState, StepTrace, WorldModel};
pub use archive::{EliteArchive, EliteEntry, ARCHIVE_FORMAT_VERSION};
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT_VERSION};
pub use config::{Precision, RunConfig};
pub use evaluate::{episode_seeds, evaluate, reevaluate_elites, RolloutEvaluator};
pub use log::{
    AgeBucket, ComponentCounts, GenerationRecord, RunLog, TimingRecord, LOG_SCHEMA_VERSION,
};
pub use run::{
    run_experiment, run_experiment_with, Experiment, RunControl, RunOutcome, ARCHIVE_FILE,
    BEST_FILE, CHECKPOINT_FILE, CONFIG_FILE, LOG_FILE, TIMING_FILE,
};
