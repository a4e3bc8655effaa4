//! Interpretability and run analysis: perturbation saliency, LSTM activation
//! variance, weight-distance trajectories, reward-by-age statistics and
//! per-step vector export.

mod activation;
mod dump;
mod saliency;
mod stats;
mod trajectory;

pub use activation::{activation_variance, ActivationTrace};
pub use dump::{dump_vectors, VectorDump, VectorRecord};
pub use saliency::{
    gaussian_blur, perturb_patch, policy_output, saliency_map, SaliencyConfig, SaliencyMap,
};
pub use stats::{average_ranks, spearman};
pub use trajectory::{
    distance_table_tsv, distance_trajectory, reward_age_stats, reward_age_tsv, AgeStat, DistanceRow,
};
