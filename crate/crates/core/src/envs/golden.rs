//! Scripted episodes whose frame checksums are pinned as test fixtures.

use super::{env_reset, env_step, EnvConfig, EnvKind};
use crate::error::{DipError, Result};

/// Fixed open-loop action for frame `t`.
pub fn scripted_action(kind: EnvKind, t: u32) -> Vec<f64> {
    let t = t as f64;
    match kind {
        EnvKind::Dodge => vec![0.9 * (0.37 * t).sin()],
        EnvKind::Track => vec![
            0.6 * (0.2 * t).sin(),
            0.7,
            if (t as u32) % 25 < 3 { 0.5 } else { 0.0 },
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenEpisode {
    pub kind: EnvKind,
    pub seed: u64,
    /// Frames rendered, including the reset frame.
    pub frames: u32,
    /// CRC-32 over the little-endian per-frame checksums.
    pub digest: u32,
}

impl GoldenEpisode {
    pub fn to_line(&self) -> String {
        let kind = match self.kind {
            EnvKind::Dodge => "dodge",
            EnvKind::Track => "track",
        };
        format!("{kind} {} {} {:08x}", self.seed, self.frames, self.digest)
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let bad = || DipError::config(format!("malformed golden line `{line}`"));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let kind = match f[0] {
            "dodge" => EnvKind::Dodge,
            "track" => EnvKind::Track,
            _ => return Err(bad()),
        };
        Ok(Self {
            kind,
            seed: f[1].parse().map_err(|_| bad())?,
            frames: f[2].parse().map_err(|_| bad())?,
            digest: u32::from_str_radix(f[3], 16).map_err(|_| bad())?,
        })
    }
}

pub fn golden_config(kind: EnvKind) -> EnvConfig {
    match kind {
        EnvKind::Dodge => EnvConfig::dodge_desk(),
        EnvKind::Track => EnvConfig::track_desk(),
    }
}

pub fn run_golden_episode(kind: EnvKind, seed: u64) -> Result<GoldenEpisode> {
    let cfg = golden_config(kind);
    let (mut state, obs) = env_reset(&cfg, seed)?;
    let mut sums = obs.checksum().to_le_bytes().to_vec();
    let mut frames = 1;
    let mut t = 0;
    loop {
        let out = env_step(&mut state, &scripted_action(kind, t))?;
        sums.extend_from_slice(&out.observation.checksum().to_le_bytes());
        frames += 1;
        t += 1;
        if out.done {
            break;
        }
    }
    Ok(GoldenEpisode {
        kind,
        seed,
        frames,
        digest: crc32fast::hash(&sums),
    })
}

/// Episodes covered by the fixture file.
pub const GOLDEN_CASES: [(EnvKind, u64); 6] = [
    (EnvKind::Dodge, 1),
    (EnvKind::Dodge, 2),
    (EnvKind::Dodge, 3),
    (EnvKind::Track, 1),
    (EnvKind::Track, 2),
    (EnvKind::Track, 3),
];
