use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::envs::{EnvConfig, EnvKind};
use crate::error::{DipError, Result};
use crate::genome::ArchitectureConfig;
use crate::moea::ProtectionPolicy;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

fn d_population() -> usize {
    200
}
fn d_generations() -> u64 {
    200
}
fn d_sigma() -> f64 {
    0.03
}
fn d_one() -> usize {
    1
}
fn d_elites() -> usize {
    3
}
fn d_checkpoint_every() -> u64 {
    1
}

/// Experiment definition. Serialized as TOML; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default = "d_population")]
    pub population: usize,
    #[serde(default = "d_generations")]
    pub generations: u64,
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    /// Episodes averaged per evaluation.
    #[serde(default = "d_one")]
    pub rollouts: usize,
    /// Top individuals re-evaluated once per generation.
    #[serde(default = "d_elites")]
    pub elite_reevaluations: usize,
    /// Evaluation threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "d_checkpoint_every")]
    pub checkpoint_every: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub precision: Precision,
    pub policy: ProtectionPolicy,
    pub arch: ArchitectureConfig,
    pub env: EnvConfig,
}

impl RunConfig {
    /// 16px, 300-step episodes, small networks; population and generation
    /// counts keep their full defaults.
    pub fn desk(kind: EnvKind) -> Self {
        let env = match kind {
            EnvKind::Dodge => EnvConfig::dodge_desk(),
            EnvKind::Track => EnvConfig::track_desk(),
        };
        Self {
            seed: 0,
            population: d_population(),
            generations: d_generations(),
            sigma: d_sigma(),
            rollouts: 1,
            elite_reevaluations: 3,
            workers: 0,
            checkpoint_every: 1,
            output_dir: None,
            precision: Precision::F64,
            policy: ProtectionPolicy::default(),
            arch: ArchitectureConfig::desk_scale(kind.action_dim()),
            env,
        }
    }

    /// 64px observations and the full-size world model.
    pub fn full(kind: EnvKind) -> Self {
        let env = match kind {
            EnvKind::Dodge => EnvConfig::dodge_full(),
            EnvKind::Track => EnvConfig::track_full(),
        };
        Self {
            arch: ArchitectureConfig::full_scale(kind.action_dim()),
            env,
            ..Self::desk(kind)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.arch.validate()?;
        self.env.validate()?;
        if self.population == 0 {
            return Err(DipError::config("population must be >= 1"));
        }
        if self.rollouts == 0 {
            return Err(DipError::config("rollouts must be >= 1"));
        }
        if self.checkpoint_every == 0 {
            return Err(DipError::config("checkpoint_every must be >= 1"));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(DipError::config(format!(
                "sigma must be a positive number, got {}",
                self.sigma
            )));
        }
        let [lo, hi] = self.policy.random_age_range;
        if lo > hi {
            return Err(DipError::config(
                "policy random_age_range must be [low, high] with low <= high",
            ));
        }
        if self.arch.image_size != self.env.image_size {
            return Err(DipError::config(format!(
                "arch image_size {} differs from env image_size {}",
                self.arch.image_size, self.env.image_size
            )));
        }
        if self.arch.action_dim != self.env.kind.action_dim() {
            return Err(DipError::config(format!(
                "arch action_dim {} but the {:?} environment takes {}",
                self.arch.action_dim,
                self.env.kind,
                self.env.kind.action_dim()
            )));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| DipError::Usage(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config is always representable as TOML")
    }

    /// TOML of the settings that determine results: `workers` and
    /// `output_dir` are reset to their defaults.
    pub fn canonical_toml(&self) -> String {
        Self {
            workers: 0,
            output_dir: None,
            ..self.clone()
        }
        .to_toml()
    }
}
