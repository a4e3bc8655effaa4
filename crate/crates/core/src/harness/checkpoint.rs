//! Resumable run checkpoint.
//!
//! ```text
//! "DIPCKPT\0" | version u32 | section count u32
//! per section: tag u8 | length u64 | crc32(payload) | payload
//! ```
//!
//! Sections: run config (TOML), population state, run log (JSONL), timings
//! (JSONL) and the elite archive. Every derived random stream is keyed by
//! `(seed, generation, ...)`, so the generation counter is the only RNG
//! state a resumed run needs.

use std::fs;
use std::path::Path;

use super::archive::EliteArchive;
use super::config::RunConfig;
use super::log::{RunLog, TimingRecord};
use super::wire::{Reader, Writer};
use crate::error::{DipError, Result};
use crate::genome::{deserialize_genome, serialize_genome, Component};
use crate::moea::{Individual, Population};
use crate::scalar::Scalar;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"DIPCKPT\0";

const SECTIONS: [(u8, &str); 5] = [
    (1, "config"),
    (2, "state"),
    (3, "log"),
    (4, "timing"),
    (5, "archive"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T> {
    pub config: RunConfig,
    pub population: Population<T>,
    pub best_so_far: f64,
    pub log: RunLog,
    pub timing: Vec<TimingRecord>,
    pub archive: EliteArchive<T>,
}

fn corrupt(msg: String) -> DipError {
    DipError::CorruptCheckpoint(msg)
}

fn encode_state<T: Scalar>(pop: &Population<T>, best_so_far: f64) -> Vec<u8> {
    let mut w = Writer::default();
    w.u64(pop.generation);
    w.u64(pop.next_id);
    w.f64(best_so_far);
    w.u64(pop.members.len() as u64);
    for m in &pop.members {
        w.u64(m.id);
        w.opt_u64(m.parent_id);
        w.u32(m.age);
        w.opt_f64(m.reward);
        w.opt_u64(m.rank.map(|r| r as u64));
        w.opt_f64(m.crowding);
        w.opt_u64(m.birth.map(|c| c.index() as u64));
        w.bytes(&serialize_genome(&m.genome));
    }
    w.buf
}

fn decode_state<T: Scalar>(bytes: &[u8]) -> Result<(Population<T>, f64)> {
    let mut r = Reader::new(bytes, |m| corrupt(format!("state section: {m}")));
    let generation = r.u64("generation")?;
    let next_id = r.u64("next id")?;
    let best_so_far = r.f64("best so far")?;
    let n = r.u64("member count")?;
    let mut members = Vec::new();
    for _ in 0..n {
        let id = r.u64("id")?;
        let parent_id = r.opt_u64("parent")?;
        let age = r.u32("age")?;
        let reward = r.opt_f64("reward")?;
        let rank = r.opt_u64("rank")?.map(|x| x as usize);
        let crowding = r.opt_f64("crowding")?;
        let birth = match r.opt_u64("birth")? {
            None => None,
            Some(i) => Some(
                Component::from_index(i as usize)
                    .ok_or_else(|| corrupt(format!("state section: bad component {i}")))?,
            ),
        };
        let genome = deserialize_genome::<T>(r.bytes("genome")?)?;
        members.push(Individual {
            id,
            parent_id,
            genome,
            age,
            reward,
            rank,
            crowding,
            birth,
        });
    }
    r.finish()?;
    Ok((
        Population {
            members,
            generation,
            next_id,
        },
        best_so_far,
    ))
}

fn utf8<'a>(b: &'a [u8], what: &str) -> Result<&'a str> {
    std::str::from_utf8(b).map_err(|_| corrupt(format!("{what} section is not UTF-8")))
}

impl<T: Scalar> Checkpoint<T> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let timing: String = self
            .timing
            .iter()
            .map(|t| serde_json::to_string(t).expect("timing serializes") + "\n")
            .collect();
        let payloads = [
            self.config.to_toml().into_bytes(),
            encode_state(&self.population, self.best_so_far),
            self.log.to_jsonl().into_bytes(),
            timing.into_bytes(),
            self.archive.to_bytes(),
        ];
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u32(CHECKPOINT_FORMAT_VERSION);
        w.u32(SECTIONS.len() as u32);
        for ((tag, _), payload) in SECTIONS.iter().zip(&payloads) {
            w.u8(*tag);
            w.u64(payload.len() as u64);
            w.u32(crc32fast::hash(payload));
            w.buf.extend_from_slice(payload);
        }
        w.buf
    }

    /// Decodes a checkpoint. Checksums of all sections are verified before
    /// anything is parsed; a mismatch reports stored and computed values for
    /// every damaged section.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, corrupt);
        if r.take(8, "magic")? != MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        let version = r.u32("version")?;
        if version != CHECKPOINT_FORMAT_VERSION {
            return Err(corrupt(format!(
                "unsupported version {version} (expected {CHECKPOINT_FORMAT_VERSION})"
            )));
        }
        let count = r.u32("section count")?;
        if count as usize != SECTIONS.len() {
            return Err(corrupt(format!(
                "expected {} sections, found {count}",
                SECTIONS.len()
            )));
        }
        let mut payloads = Vec::with_capacity(SECTIONS.len());
        let mut damaged = Vec::new();
        for (tag, name) in SECTIONS {
            let found = r.u8("section tag")?;
            if found != tag {
                return Err(corrupt(format!(
                    "expected {name} section (tag {tag}), found tag {found}"
                )));
            }
            let len = r.u64("section length")?;
            let len = usize::try_from(len)
                .map_err(|_| corrupt(format!("{name} section length {len} too large")))?;
            let stored = r.u32("section checksum")?;
            let payload = r.take(len, name)?;
            let computed = crc32fast::hash(payload);
            if stored != computed {
                damaged.push(format!(
                    "{name} (stored {stored:#010x}, computed {computed:#010x})"
                ));
            }
            payloads.push(payload);
        }
        r.finish()?;
        if !damaged.is_empty() {
            return Err(corrupt(format!(
                "checksum mismatch in {}",
                damaged.join(", ")
            )));
        }

        let config = toml::from_str::<RunConfig>(utf8(payloads[0], "config")?)
            .map_err(|e| corrupt(format!("config section: {e}")))?;
        let (population, best_so_far) = decode_state(payloads[1])?;
        let log = RunLog::from_jsonl(utf8(payloads[2], "log")?)
            .map_err(|e| corrupt(format!("log section: {e}")))?;
        let timing = utf8(payloads[3], "timing")?
            .lines()
            .map(|l| serde_json::from_str(l).map_err(|e| corrupt(format!("timing section: {e}"))))
            .collect::<Result<Vec<TimingRecord>>>()?;
        let archive = EliteArchive::from_bytes(payloads[4])?;
        if population.generation > config.generations {
            return Err(corrupt(format!(
                "generation {} exceeds configured {}",
                population.generation, config.generations
            )));
        }
        Ok(Self {
            config,
            population,
            best_so_far,
            log,
            timing,
            archive,
        })
    }

    /// Writes through a temporary file and renames, so an interrupted save
    /// leaves the previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_bytes())
            .map_err(|e| DipError::io(format!("writing {}", tmp.display()), e))?;
        fs::rename(&tmp, path)
            .map_err(|e| DipError::io(format!("renaming to {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes =
            fs::read(path).map_err(|e| DipError::io(format!("reading {}", path.display()), e))?;
        Self::from_bytes(&bytes)
    }
}
