//! Point-car driving over a seeded tile track.
//!
//! The track is a self-avoiding chain of 4-connected tiles on a coarse grid.
//! The car has a heading and a speed; steering turns it, throttle and brake
//! change speed, and linear drag bleeds speed every frame.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{EnvConfig, Observation, Rgb};
use crate::error::{DipError, Result};
use crate::rng::RandomSource;

pub const GRASS: Rgb = [0.25, 0.65, 0.25];
pub const ROAD: Rgb = [0.42, 0.42, 0.42];
pub const CAR: Rgb = [0.9, 0.05, 0.05];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackParams {
    /// Pixels per tile along each axis.
    pub tile_px: usize,
    /// Tiles in the track (`N`).
    pub tiles: usize,
    /// Fixed layout seed; when unset every episode seed draws a new track.
    pub layout_seed: Option<u64>,
    /// Radians per frame at full steering.
    pub steer_rate: f64,
    /// Tiles/frame² at full throttle.
    pub accel: f64,
    /// Tiles/frame² at full brake.
    pub brake: f64,
    /// Fraction of speed lost per frame.
    pub drag: f64,
    pub max_speed: f64,
}

impl Default for TrackParams {
    fn default() -> Self {
        Self {
            tile_px: 2,
            tiles: 16,
            layout_seed: None,
            steer_rate: 0.3,
            accel: 0.04,
            brake: 0.08,
            drag: 0.02,
            max_speed: 0.4,
        }
    }
}

impl TrackParams {
    pub fn validate(&self, image_size: usize) -> Result<()> {
        if self.tile_px == 0 || !image_size.is_multiple_of(self.tile_px) {
            return Err(DipError::config(format!(
                "track tile_px {} must divide image_size {image_size}",
                self.tile_px
            )));
        }
        let grid = image_size / self.tile_px;
        if self.tiles < 2 || self.tiles > grid * grid / 2 {
            return Err(DipError::config(format!(
                "track tiles must lie in [2, {}] for a {grid}x{grid} grid",
                grid * grid / 2
            )));
        }
        if self.max_speed <= 0.0 || self.max_speed >= 1.0 {
            return Err(DipError::config(
                "track max_speed must lie in (0, 1) tiles per frame",
            ));
        }
        Ok(())
    }
}

/// Self-avoiding random walk of `n` tiles, restarting from a fresh start
/// cell whenever the walk paints itself into a corner.
pub fn generate_layout(grid: usize, n: usize, rng: &mut RandomSource) -> Vec<(usize, usize)> {
    const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    loop {
        let start = (rng.below(grid), rng.below(grid));
        let mut used = vec![false; grid * grid];
        used[start.1 * grid + start.0] = true;
        let mut path = vec![start];
        // Per path position, the neighbour directions not yet tried.
        let mut pending: Vec<Vec<usize>> = vec![shuffled_dirs(rng)];
        let mut budget = 50 * n * n;
        while path.len() < n && !path.is_empty() && budget > 0 {
            budget -= 1;
            let &(x, y) = path.last().unwrap();
            match pending.last_mut().unwrap().pop() {
                Some(d) => {
                    let (nx, ny) = (x as i64 + DIRS[d].0, y as i64 + DIRS[d].1);
                    if nx < 0 || ny < 0 || nx >= grid as i64 || ny >= grid as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if used[ny * grid + nx] {
                        continue;
                    }
                    used[ny * grid + nx] = true;
                    path.push((nx, ny));
                    pending.push(shuffled_dirs(rng));
                }
                None => {
                    let (px, py) = path.pop().unwrap();
                    used[py * grid + px] = false;
                    pending.pop();
                }
            }
        }
        if path.len() == n {
            return path;
        }
    }
}

fn shuffled_dirs(rng: &mut RandomSource) -> Vec<usize> {
    let mut d = vec![0, 1, 2, 3];
    for i in (1..4).rev() {
        let j = rng.below(i + 1);
        d.swap(i, j);
    }
    d
}

pub fn layout_checksum(layout: &[(usize, usize)]) -> u32 {
    let bytes: Vec<u8> = layout
        .iter()
        .flat_map(|&(x, y)| [(x as u32).to_le_bytes(), (y as u32).to_le_bytes()].concat())
        .collect();
    crc32fast::hash(&bytes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackState {
    pub params: TrackParams,
    pub image_size: usize,
    pub grid: usize,
    pub max_steps: u32,
    pub layout: Vec<(usize, usize)>,
    /// Track index per grid cell.
    tile_index: Vec<Option<usize>>,
    pub visited: Vec<bool>,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub t: u32,
    pub done: bool,
}

impl TrackState {
    pub fn reset(cfg: &EnvConfig, episode_seed: u64) -> Result<Self> {
        let grid = cfg.image_size / cfg.track.tile_px;
        let seed = cfg.track.layout_seed.unwrap_or(episode_seed);
        let layout = generate_layout(grid, cfg.track.tiles, &mut RandomSource::new(seed, 0x7AC));
        Self::with_layout(cfg, layout)
    }

    /// Episode on a caller-supplied tile chain (must be 4-connected and distinct).
    pub fn with_layout(cfg: &EnvConfig, layout: Vec<(usize, usize)>) -> Result<Self> {
        let grid = cfg.image_size / cfg.track.tile_px;
        if layout.len() < 2 {
            return Err(DipError::config("track layout needs at least two tiles"));
        }
        let mut tile_index = vec![None; grid * grid];
        for (i, &(x, y)) in layout.iter().enumerate() {
            if x >= grid || y >= grid || tile_index[y * grid + x].is_some() {
                return Err(DipError::config(format!(
                    "track tile {i} at ({x},{y}) is off-grid or repeated"
                )));
            }
            if i > 0 {
                let (px, py) = layout[i - 1];
                if px.abs_diff(x) + py.abs_diff(y) != 1 {
                    return Err(DipError::config(format!(
                        "track tiles {} and {i} are not adjacent",
                        i - 1
                    )));
                }
            }
            tile_index[y * grid + x] = Some(i);
        }
        let (x0, y0) = layout[0];
        let (x1, y1) = layout[1];
        let heading = (y1 as f64 - y0 as f64).atan2(x1 as f64 - x0 as f64);
        Ok(Self {
            params: cfg.track.clone(),
            image_size: cfg.image_size,
            grid,
            max_steps: cfg.max_steps,
            visited: vec![false; layout.len()],
            layout,
            tile_index,
            x: x0 as f64 + 0.5,
            y: y0 as f64 + 0.5,
            heading,
            speed: 0.0,
            t: 0,
            done: false,
        })
    }

    pub fn tiles_visited(&self) -> usize {
        self.visited.iter().filter(|&&v| v).count()
    }

    pub fn step(&mut self, action: &[f64]) -> Result<(f64, bool)> {
        if self.done {
            return Err(DipError::logic("step called on a finished track episode"));
        }
        if action.len() != 3 {
            return Err(DipError::shape("track", "3 action values", action.len()));
        }
        let steer = action[0].clamp(-1.0, 1.0);
        let gas = action[1].clamp(0.0, 1.0);
        let brake = action[2].clamp(0.0, 1.0);
        let p = &self.params;

        self.heading = (self.heading + p.steer_rate * steer).rem_euclid(2.0 * PI);
        self.speed = ((self.speed + p.accel * gas - p.brake * brake) * (1.0 - p.drag))
            .clamp(0.0, p.max_speed);
        let limit = self.grid as f64 - 1e-9;
        self.x = (self.x + self.speed * self.heading.cos()).clamp(0.0, limit);
        self.y = (self.y + self.speed * self.heading.sin()).clamp(0.0, limit);

        let mut reward = -0.1;
        let cell = self.y as usize * self.grid + self.x as usize;
        if let Some(i) = self.tile_index[cell] {
            if !self.visited[i] {
                self.visited[i] = true;
                reward += 100.0 / self.layout.len() as f64;
            }
        }
        self.t += 1;
        self.done = self.t >= self.max_steps || self.visited.iter().all(|&v| v);
        Ok((reward, self.done))
    }

    pub fn render(&self) -> Observation {
        let mut obs = Observation::filled(self.image_size, GRASS);
        let c = self.params.tile_px;
        for &(tx, ty) in &self.layout {
            for y in ty * c..(ty + 1) * c {
                for x in tx * c..(tx + 1) * c {
                    obs.set(y, x, ROAD);
                }
            }
        }
        let px = ((self.x * c as f64) as usize).min(self.image_size - 1);
        let py = ((self.y * c as f64) as usize).min(self.image_size - 1);
        obs.set(py, px, CAR);
        obs
    }
}
