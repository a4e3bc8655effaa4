//! Strafe-to-survive task on a coarse grid.
//!
//! The agent sits on the bottom row between two wall columns. Projectiles
//! appear on the top row, fall one cell per frame and, when homing, drift one
//! column per frame toward the agent's column at the moment they spawned.

use serde::{Deserialize, Serialize};

use super::{EnvConfig, Observation, Rgb};
use crate::error::{DipError, Result};
use crate::rng::RandomSource;

pub const BACKGROUND: Rgb = [0.08, 0.08, 0.12];
pub const WALL: Rgb = [0.5, 0.5, 0.5];
pub const AGENT: Rgb = [0.1, 0.9, 0.2];
pub const PROJECTILE: Rgb = [1.0, 0.45, 0.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DodgeParams {
    /// Pixels per grid cell along each axis.
    pub cell_px: usize,
    /// Per-frame probability that a projectile spawns.
    pub spawn_prob: f64,
    pub homing: bool,
    /// `a < -threshold` strafes left, `a > threshold` strafes right.
    pub action_threshold: f64,
}

impl Default for DodgeParams {
    fn default() -> Self {
        Self {
            cell_px: 1,
            spawn_prob: 0.25,
            homing: true,
            action_threshold: 0.3,
        }
    }
}

impl DodgeParams {
    pub fn validate(&self, image_size: usize) -> Result<()> {
        if self.cell_px == 0 || !image_size.is_multiple_of(self.cell_px) {
            return Err(DipError::config(format!(
                "dodge cell_px {} must divide image_size {image_size}",
                self.cell_px
            )));
        }
        if image_size / self.cell_px < 4 {
            return Err(DipError::config(
                "dodge grid needs at least 4 cells per side",
            ));
        }
        if !(0.0..=1.0).contains(&self.spawn_prob) {
            return Err(DipError::config("dodge spawn_prob must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Projectile {
    pub x: usize,
    pub y: usize,
    pub target_x: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DodgeState {
    pub params: DodgeParams,
    pub image_size: usize,
    pub grid: usize,
    pub max_steps: u32,
    pub agent_x: usize,
    pub projectiles: Vec<Projectile>,
    pub t: u32,
    pub done: bool,
    rng: RandomSource,
}

/// Discrete strafe decision from a continuous action.
pub fn strafe(action: f64, threshold: f64) -> i32 {
    if action < -threshold {
        -1
    } else if action > threshold {
        1
    } else {
        0
    }
}

impl DodgeState {
    pub fn reset(cfg: &EnvConfig, episode_seed: u64) -> Self {
        let grid = cfg.image_size / cfg.dodge.cell_px;
        Self {
            params: cfg.dodge.clone(),
            image_size: cfg.image_size,
            grid,
            max_steps: cfg.max_steps,
            agent_x: grid / 2,
            projectiles: Vec::new(),
            t: 0,
            done: false,
            rng: RandomSource::new(episode_seed, 0xD0D6E),
        }
    }

    /// Leftmost and rightmost columns the agent and projectiles may occupy.
    pub fn lane_bounds(&self) -> (usize, usize) {
        (1, self.grid - 2)
    }

    pub fn step(&mut self, action: &[f64]) -> Result<(f64, bool)> {
        if self.done {
            return Err(DipError::logic("step called on a finished dodge episode"));
        }
        let &[a] = action else {
            return Err(DipError::shape("dodge", "1 action value", action.len()));
        };
        let (lo, hi) = self.lane_bounds();
        let dx = strafe(a, self.params.action_threshold);
        self.agent_x = (self.agent_x as i64 + dx as i64).clamp(lo as i64, hi as i64) as usize;

        let bottom = self.grid - 1;
        for p in &mut self.projectiles {
            p.y += 1;
            if self.params.homing {
                if p.x < p.target_x {
                    p.x += 1;
                } else if p.x > p.target_x {
                    p.x -= 1;
                }
            }
        }
        self.projectiles.retain(|p| p.y <= bottom);
        let hit = self
            .projectiles
            .iter()
            .any(|p| p.y == bottom && p.x == self.agent_x);

        if self.rng.bernoulli(self.params.spawn_prob) {
            let x = lo + self.rng.below(hi - lo + 1);
            self.projectiles.push(Projectile {
                x,
                y: 0,
                target_x: self.agent_x,
            });
        }

        self.t += 1;
        if hit {
            self.done = true;
            return Ok((0.0, true));
        }
        self.done = self.t >= self.max_steps;
        Ok((1.0, self.done))
    }

    fn fill_cell(&self, obs: &mut Observation, gy: usize, gx: usize, color: Rgb) {
        let c = self.params.cell_px;
        for y in gy * c..(gy + 1) * c {
            for x in gx * c..(gx + 1) * c {
                obs.set(y, x, color);
            }
        }
    }

    pub fn render(&self) -> Observation {
        let mut obs = Observation::filled(self.image_size, BACKGROUND);
        for gy in 0..self.grid {
            self.fill_cell(&mut obs, gy, 0, WALL);
            self.fill_cell(&mut obs, gy, self.grid - 1, WALL);
        }
        for p in &self.projectiles {
            self.fill_cell(&mut obs, p.y, p.x, PROJECTILE);
        }
        self.fill_cell(&mut obs, self.grid - 1, self.agent_x, AGENT);
        obs
    }
}
