//! Elite archive: a snapshot of the population's best individual at
//! generation 0 and whenever the best reward improves.
//!
//! ```text
//! "DIPA" | version u32 | config (len u64 + TOML) | crc32(header)
//! per entry: generation u64 | id u64 | reward f64 | age u32 | mean age f64 | genome (len u64 + bytes) | crc32(entry)
//! ```

use super::wire::{Reader, Writer};
use crate::error::{DipError, Result};
use crate::genome::{deserialize_genome, serialize_genome, Genome};
use crate::moea::Population;
use crate::scalar::Scalar;

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"DIPA";

#[derive(Clone, Debug, PartialEq)]
pub struct EliteEntry<T> {
    pub generation: u64,
    pub id: u64,
    pub reward: f64,
    pub age: u32,
    pub population_mean_age: f64,
    pub genome: Genome<T>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EliteArchive<T> {
    /// Run config as TOML.
    pub config: String,
    pub entries: Vec<EliteEntry<T>>,
}

fn corrupt(msg: String) -> DipError {
    DipError::CorruptCheckpoint(format!("elite archive: {msg}"))
}

impl<T: Scalar> EliteArchive<T> {
    pub fn new(config: String) -> Self {
        Self {
            config,
            entries: Vec::new(),
        }
    }

    /// Archives the population best if it beats `best_so_far` (or if the
    /// archive is empty). Returns whether an entry was added.
    pub fn offer(&mut self, pop: &Population<T>, best_so_far: f64) -> bool {
        let Some(best) = pop.best() else { return false };
        let reward = best.reward_or_min();
        if !self.entries.is_empty() && reward <= best_so_far {
            return false;
        }
        self.entries.push(EliteEntry {
            generation: pop.generation,
            id: best.id,
            reward,
            age: best.age,
            population_mean_age: pop.mean_age(),
            genome: best.genome.clone(),
        });
        true
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u32(ARCHIVE_FORMAT_VERSION);
        w.bytes(self.config.as_bytes());
        let crc = crc32fast::hash(&w.buf);
        w.u32(crc);
        for e in &self.entries {
            let start = w.buf.len();
            w.u64(e.generation);
            w.u64(e.id);
            w.f64(e.reward);
            w.u32(e.age);
            w.f64(e.population_mean_age);
            w.bytes(&serialize_genome(&e.genome));
            let crc = crc32fast::hash(&w.buf[start..]);
            w.u32(crc);
        }
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, corrupt);
        if r.take(4, "magic")? != MAGIC {
            return Err(corrupt("bad magic".into()));
        }
        let version = r.u32("version")?;
        if version != ARCHIVE_FORMAT_VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        let config = r.str("config")?.to_owned();
        check_crc(&mut r, 0, "header")?;
        let mut entries = Vec::new();
        while r.pos < bytes.len() {
            let start = r.pos;
            let generation = r.u64("generation")?;
            let id = r.u64("id")?;
            let reward = r.f64("reward")?;
            let age = r.u32("age")?;
            let population_mean_age = r.f64("mean age")?;
            let genome_bytes = r.bytes("genome")?;
            check_crc(&mut r, start, &format!("entry {}", entries.len()))?;
            entries.push(EliteEntry {
                generation,
                id,
                reward,
                age,
                population_mean_age,
                genome: deserialize_genome(genome_bytes)?,
            });
        }
        Ok(Self { config, entries })
    }
}

fn check_crc(r: &mut Reader<'_>, start: usize, what: &str) -> Result<()> {
    let computed = crc32fast::hash(&r.buf[start..r.pos]);
    let stored = r.u32("checksum")?;
    if stored != computed {
        return Err(corrupt(format!(
            "{what} checksum mismatch: stored {stored:#010x}, computed {computed:#010x}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::ArchitectureConfig;
    use crate::moea::Individual;
    use crate::rng::RandomSource;

    fn population(rewards: &[f64], generation: u64) -> Population<f64> {
        let arch = ArchitectureConfig::desk_scale(1);
        let mut rng = RandomSource::new(3, 0);
        let members = rewards
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut m = Individual::new(i as u64, Genome::init(&arch, &mut rng).unwrap());
                m.reward = Some(r);
                m.age = i as u32;
                m
            })
            .collect();
        Population::new(members, generation)
    }

    #[test]
    fn offers_only_improvements() {
        let mut a = EliteArchive::new("seed = 1\n".into());
        assert!(a.offer(&population(&[1.0, 5.0], 0), f64::NEG_INFINITY));
        assert!(!a.offer(&population(&[5.0, 2.0], 1), 5.0));
        assert!(a.offer(&population(&[6.0, 2.0], 2), 5.0));
        assert_eq!(a.entries.len(), 2);
        assert_eq!(a.entries[0].id, 1);
        assert_eq!(a.entries[0].age, 1);
        assert_eq!(a.entries[1].generation, 2);
    }

    #[test]
    fn bytes_round_trip_and_corruption() {
        let mut a = EliteArchive::new("seed = 1\n".into());
        a.offer(&population(&[1.0, 5.0], 0), f64::NEG_INFINITY);
        a.offer(&population(&[7.0], 3), 5.0);
        let bytes = a.to_bytes();
        assert_eq!(EliteArchive::<f64>::from_bytes(&bytes).unwrap(), a);
        let mut bad = bytes.clone();
        let n = bad.len();
        bad[n - 10] ^= 0x40;
        assert!(matches!(
            EliteArchive::<f64>::from_bytes(&bad),
            Err(DipError::CorruptCheckpoint(_))
        ));
        assert!(EliteArchive::<f64>::from_bytes(&bytes[..n - 3]).is_err());
    }
}
