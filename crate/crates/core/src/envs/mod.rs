//! Built-in pixel environments behind one episode interface.
//!
//! * [`dodge`]: stay alive by strafing away from falling projectiles; `+1`
//!   per surviving frame.
//! * [`track`]: drive a point car over a procedurally generated tile track;
//!   `-0.1` per frame and `+100/N` for each newly visited tile.

pub mod dodge;
pub mod golden;
pub mod track;

use serde::{Deserialize, Serialize};

use crate::error::{DipError, Result};
use crate::nn::{Tensor, TensorShape};
use crate::scalar::Scalar;

pub use dodge::{DodgeParams, DodgeState, Projectile};
pub use track::{TrackParams, TrackState};

/// RGB frame, channel-major `[3][size][size]`, values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    size: usize,
    pixels: Vec<f64>,
}

pub type Rgb = [f64; 3];

impl Observation {
    pub fn filled(size: usize, color: Rgb) -> Self {
        let mut pixels = vec![0.0; 3 * size * size];
        for (c, &v) in color.iter().enumerate() {
            pixels[c * size * size..(c + 1) * size * size].fill(v);
        }
        Self { size, pixels }
    }

    pub fn from_pixels(size: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != 3 * size * size {
            return Err(DipError::shape(
                "observation",
                3 * size * size,
                pixels.len(),
            ));
        }
        Ok(Self {
            size,
            pixels: pixels.into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, channel: usize, y: usize, x: usize) -> f64 {
        self.pixels[(channel * self.size + y) * self.size + x]
    }

    pub fn color_at(&self, y: usize, x: usize) -> Rgb {
        [self.get(0, y, x), self.get(1, y, x), self.get(2, y, x)]
    }

    pub fn set(&mut self, y: usize, x: usize, color: Rgb) {
        let s = self.size;
        for (c, &v) in color.iter().enumerate() {
            self.pixels[(c * s + y) * s + x] = v.clamp(0.0, 1.0);
        }
    }

    pub fn to_tensor<T: Scalar>(&self) -> Tensor<T> {
        let shape = TensorShape::image(3, self.size, self.size).expect("positive size");
        Tensor::new(shape, self.pixels.iter().map(|&p| T::lit(p)).collect())
            .expect("matching length")
    }

    /// CRC-32 over the frame quantized to 8 bits per channel.
    pub fn checksum(&self) -> u32 {
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .map(|&p| (p * 255.0).round() as u8)
            .collect();
        crc32fast::hash(&bytes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    Dodge,
    Track,
}

impl EnvKind {
    pub fn action_dim(self) -> usize {
        match self {
            EnvKind::Dodge => 1,
            EnvKind::Track => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub image_size: usize,
    pub max_steps: u32,
    /// Mean score a policy must exceed to count as solved; defaults to
    /// `0.357 · max_steps` for dodge and `90` for track.
    #[serde(default)]
    pub solved_threshold: Option<f64>,
    /// Number of rollouts averaged by the solved check.
    #[serde(default = "default_solve_rollouts")]
    pub solve_rollouts: usize,
    #[serde(default)]
    pub dodge: DodgeParams,
    #[serde(default)]
    pub track: TrackParams,
}

fn default_solve_rollouts() -> usize {
    20
}

impl EnvConfig {
    pub fn dodge_desk() -> Self {
        Self {
            kind: EnvKind::Dodge,
            image_size: 16,
            max_steps: 300,
            solved_threshold: None,
            solve_rollouts: 20,
            dodge: DodgeParams::default(),
            track: TrackParams::default(),
        }
    }

    pub fn dodge_full() -> Self {
        Self {
            image_size: 64,
            max_steps: 2100,
            solved_threshold: Some(750.0),
            solve_rollouts: 100,
            dodge: DodgeParams {
                cell_px: 4,
                ..DodgeParams::default()
            },
            ..Self::dodge_desk()
        }
    }

    pub fn track_desk() -> Self {
        Self {
            kind: EnvKind::Track,
            image_size: 16,
            max_steps: 300,
            solved_threshold: None,
            solve_rollouts: 20,
            dodge: DodgeParams::default(),
            track: TrackParams::default(),
        }
    }

    pub fn track_full() -> Self {
        Self {
            image_size: 64,
            max_steps: 1000,
            solve_rollouts: 100,
            track: TrackParams {
                tile_px: 4,
                tiles: 60,
                ..TrackParams::default()
            },
            ..Self::track_desk()
        }
    }

    pub fn solved_threshold(&self) -> f64 {
        self.solved_threshold.unwrap_or(match self.kind {
            EnvKind::Dodge => 0.357 * self.max_steps as f64,
            EnvKind::Track => 90.0,
        })
    }

    /// Lowest total reward an episode can produce.
    pub fn min_reward(&self) -> f64 {
        match self.kind {
            EnvKind::Dodge => 0.0,
            EnvKind::Track => -0.1 * self.max_steps as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(DipError::config("env max_steps must be >= 1"));
        }
        if self.image_size == 0 {
            return Err(DipError::config("env image_size must be >= 1"));
        }
        if self.solve_rollouts == 0 {
            return Err(DipError::config("env solve_rollouts must be >= 1"));
        }
        match self.kind {
            EnvKind::Dodge => self.dodge.validate(self.image_size),
            EnvKind::Track => self.track.validate(self.image_size),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnvState {
    Dodge(DodgeState),
    Track(TrackState),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub total_reward: f64,
    pub steps_survived: u32,
    pub terminated_early: bool,
}

pub fn env_reset(cfg: &EnvConfig, episode_seed: u64) -> Result<(EnvState, Observation)> {
    cfg.validate()?;
    let state = match cfg.kind {
        EnvKind::Dodge => EnvState::Dodge(DodgeState::reset(cfg, episode_seed)),
        EnvKind::Track => EnvState::Track(TrackState::reset(cfg, episode_seed)?),
    };
    let obs = render(&state);
    Ok((state, obs))
}

/// Advance one frame. Stepping a finished episode is a logic error.
pub fn env_step(state: &mut EnvState, action: &[f64]) -> Result<StepOutcome> {
    let (reward, done) = match state {
        EnvState::Dodge(s) => s.step(action)?,
        EnvState::Track(s) => s.step(action)?,
    };
    Ok(StepOutcome {
        observation: render(state),
        reward,
        done,
    })
}

pub fn render(state: &EnvState) -> Observation {
    match state {
        EnvState::Dodge(s) => s.render(),
        EnvState::Track(s) => s.render(),
    }
}

impl EnvState {
    pub fn is_done(&self) -> bool {
        match self {
            EnvState::Dodge(s) => s.done,
            EnvState::Track(s) => s.done,
        }
    }

    pub fn steps(&self) -> u32 {
        match self {
            EnvState::Dodge(s) => s.t,
            EnvState::Track(s) => s.t,
        }
    }
}

/// True when the mean of `scores` exceeds the configured threshold.
pub fn solved_check(scores: &[f64], cfg: &EnvConfig) -> Result<bool> {
    if scores.len() != cfg.solve_rollouts {
        return Err(DipError::logic(format!(
            "solved check expects {} rollout scores, got {}",
            cfg.solve_rollouts,
            scores.len()
        )));
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok(mean > cfg.solved_threshold())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solved_full_scale() {
        let cfg = EnvConfig::dodge_full();
        assert!(solved_check(&[800.0; 100], &cfg).unwrap());
        assert!(!solved_check(&[0.0; 100], &cfg).unwrap());
        assert!(!solved_check(&[750.0; 100], &cfg).unwrap());
    }

    #[test]
    fn solved_desk_threshold() {
        let cfg = EnvConfig::dodge_desk();
        assert!((cfg.solved_threshold() - 107.1).abs() < 1e-9);
        assert!(solved_check(&[108.0; 20], &cfg).unwrap());
        assert!(!solved_check(&[107.0; 20], &cfg).unwrap());
    }

    #[test]
    fn solved_wrong_count() {
        assert!(solved_check(&[1.0; 3], &EnvConfig::dodge_desk()).is_err());
    }

    #[test]
    fn observation_clamps() {
        let o = Observation::from_pixels(1, vec![-1.0, 0.5, 2.0]).unwrap();
        assert_eq!(o.pixels(), &[0.0, 0.5, 1.0]);
    }
}
