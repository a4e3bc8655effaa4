//! Experiment driver: initialization, the generation loop, logging,
//! archiving and checkpointing.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};

use super::archive::EliteArchive;
use super::checkpoint::Checkpoint;
use super::config::RunConfig;
use super::evaluate::{reevaluate_elites, RolloutEvaluator};
use super::log::{GenerationRecord, RunLog, TimingRecord};
use crate::error::{DipError, Result};
use crate::genome::serialize_genome;
use crate::moea::{generation_step, initialize_population, Population};
use crate::scalar::Scalar;

pub const CONFIG_FILE: &str = "config.toml";
pub const LOG_FILE: &str = "log.jsonl";
pub const TIMING_FILE: &str = "timing.jsonl";
pub const ARCHIVE_FILE: &str = "elites.bin";
pub const BEST_FILE: &str = "best.genome";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";

#[derive(Clone, Debug, Default)]
pub struct RunControl {
    /// Stop (after checkpointing) once this many generations have completed.
    pub stop_after: Option<u64>,
    pub resume_from: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome<T> {
    pub config: RunConfig,
    pub population: Population<T>,
    pub log: RunLog,
    pub timing: Vec<TimingRecord>,
    pub archive: EliteArchive<T>,
    pub best_so_far: f64,
    /// True when `stop_after` ended the run before `generations`.
    pub stopped_early: bool,
}

pub struct Experiment<T> {
    pub config: RunConfig,
    pub population: Population<T>,
    pub log: RunLog,
    pub timing: Vec<TimingRecord>,
    pub archive: EliteArchive<T>,
    pub best_so_far: f64,
    evaluator: RolloutEvaluator,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| DipError::io(format!("writing {}", path.display()), e))
}

fn append_line(dir: &Path, name: &str, line: &str) -> Result<()> {
    let path = dir.join(name);
    let mut f = OpenOptions::new()
        .append(true)
        .create(true)
        .open(&path)
        .map_err(|e| DipError::io(format!("opening {}", path.display()), e))?;
    writeln!(f, "{line}").map_err(|e| DipError::io(format!("appending to {}", path.display()), e))
}

impl<T: Scalar> Experiment<T> {
    /// Builds and evaluates the initial population.
    pub fn start(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let text = config.canonical_toml();
        let evaluator = RolloutEvaluator::new(config.env.clone(), config.rollouts, config.seed);
        let (population, failures) =
            initialize_population(&config.arch, config.population, config.seed, &evaluator)?;
        for f in &failures {
            warn!("initial evaluation of {} failed: {}", f.id, f.message);
        }
        let population = reevaluate_elites(population, config.elite_reevaluations, &evaluator)?;
        let mut archive = EliteArchive::new(text.clone());
        archive.offer(&population, f64::NEG_INFINITY);
        let best_so_far = population
            .best()
            .map_or(f64::NEG_INFINITY, |b| b.reward_or_min());
        Ok(Self {
            log: RunLog::new(text),
            timing: Vec::new(),
            archive,
            best_so_far,
            population,
            evaluator,
            config,
        })
    }

    pub fn resume(ckpt: Checkpoint<T>) -> Result<Self> {
        ckpt.config.validate()?;
        let evaluator = RolloutEvaluator::new(
            ckpt.config.env.clone(),
            ckpt.config.rollouts,
            ckpt.config.seed,
        );
        Ok(Self {
            config: ckpt.config,
            population: ckpt.population,
            log: ckpt.log,
            timing: ckpt.timing,
            archive: ckpt.archive,
            best_so_far: ckpt.best_so_far,
            evaluator,
        })
    }

    pub fn generation(&self) -> u64 {
        self.population.generation
    }

    pub fn is_finished(&self) -> bool {
        self.generation() >= self.config.generations
    }

    /// Runs one generation and returns whether the elite archive grew.
    pub fn step(&mut self) -> Result<bool> {
        let started = Instant::now();
        let pop = std::mem::replace(&mut self.population, Population::new(Vec::new(), 0));
        let (pop, report) = generation_step(
            pop,
            &self.config.policy,
            &self.evaluator,
            self.config.sigma,
            self.config.seed,
        )?;
        let pop = reevaluate_elites(pop, self.config.elite_reevaluations, &self.evaluator)?;
        for f in &report.failures {
            warn!(
                "generation {}: evaluation of {} failed: {}",
                f.generation, f.id, f.message
            );
        }
        let archived = self.archive.offer(&pop, self.best_so_far);
        let best = pop.best().map_or(f64::NEG_INFINITY, |b| b.reward_or_min());
        self.best_so_far = self.best_so_far.max(best);
        let record = GenerationRecord::summarize(&pop, &report, self.best_so_far)?;
        info!(
            "generation {}: best {:.2} mean {:.2} mean age {:.2}",
            record.generation, record.best_reward, record.mean_reward, record.mean_age
        );
        self.log.records.push(record);
        self.population = pop;
        self.timing.push(TimingRecord {
            generation: self.population.generation,
            wall_clock_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        Ok(archived)
    }

    pub fn checkpoint(&self) -> Checkpoint<T> {
        Checkpoint {
            config: self.config.clone(),
            population: self.population.clone(),
            best_so_far: self.best_so_far,
            log: self.log.clone(),
            timing: self.timing.clone(),
            archive: self.archive.clone(),
        }
    }

    /// Rewrites every output file from in-memory state.
    pub fn write_all(&self, dir: &Path) -> Result<()> {
        write_file(dir, CONFIG_FILE, self.config.to_toml().as_bytes())?;
        write_file(dir, LOG_FILE, self.log.to_jsonl().as_bytes())?;
        let timing: String = self
            .timing
            .iter()
            .map(|t| serde_json::to_string(t).expect("timing serializes") + "\n")
            .collect();
        write_file(dir, TIMING_FILE, timing.as_bytes())?;
        write_file(dir, ARCHIVE_FILE, &self.archive.to_bytes())?;
        self.write_best(dir)?;
        self.checkpoint().save(&dir.join(CHECKPOINT_FILE))
    }

    fn write_best(&self, dir: &Path) -> Result<()> {
        match self.population.best() {
            Some(b) => write_file(dir, BEST_FILE, &serialize_genome(&b.genome)),
            None => Ok(()),
        }
    }

    fn outcome(self, stopped_early: bool) -> RunOutcome<T> {
        RunOutcome {
            config: self.config,
            population: self.population,
            log: self.log,
            timing: self.timing,
            archive: self.archive,
            best_so_far: self.best_so_far,
            stopped_early,
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| DipError::io(format!("creating output directory {}", dir.display()), e))?;
    // Fail before any evaluation work if the directory is not writable.
    write_file(dir, ".probe", b"")?;
    let _ = fs::remove_file(dir.join(".probe"));
    Ok(())
}

pub fn run_experiment<T: Scalar>(config: RunConfig) -> Result<RunOutcome<T>> {
    run_experiment_with(config, &RunControl::default())
}

/// Runs (or resumes) an experiment on a dedicated thread pool of
/// `config.workers` threads. Results do not depend on the worker count.
/// Files are written only when `config.output_dir` is set.
pub fn run_experiment_with<T: Scalar>(
    config: RunConfig,
    control: &RunControl,
) -> Result<RunOutcome<T>> {
    config.validate()?;
    let out = config.output_dir.clone();
    if let Some(dir) = &out {
        prepare_dir(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| DipError::config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| {
        let mut exp = match &control.resume_from {
            Some(path) => {
                let ckpt = Checkpoint::<T>::load(path)?;
                if ckpt.config.seed != config.seed
                    || ckpt.config.arch != config.arch
                    || ckpt.config.env != config.env
                {
                    return Err(DipError::config(format!(
                        "checkpoint {} was written by a different run config",
                        path.display()
                    )));
                }
                let mut exp = Experiment::resume(ckpt)?;
                exp.config.generations = config.generations;
                exp.config.output_dir = config.output_dir.clone();
                exp.config.workers = config.workers;
                exp
            }
            None => Experiment::start(config)?,
        };
        if let Some(dir) = &out {
            exp.write_all(dir)?;
        }
        let every = exp.config.checkpoint_every;
        while !exp.is_finished() {
            if control.stop_after.is_some_and(|s| exp.generation() >= s) {
                if let Some(dir) = &out {
                    exp.write_all(dir)?;
                }
                return Ok(exp.outcome(true));
            }
            let archived = exp.step()?;
            if let Some(dir) = &out {
                append_line(
                    dir,
                    LOG_FILE,
                    &RunLog::record_line(exp.log.records.last().expect("just pushed")),
                )?;
                let t = serde_json::to_string(exp.timing.last().expect("just pushed"))
                    .expect("timing serializes");
                append_line(dir, TIMING_FILE, &t)?;
                if archived {
                    write_file(dir, ARCHIVE_FILE, &exp.archive.to_bytes())?;
                }
                if exp.generation() % every == 0 || exp.is_finished() {
                    exp.write_best(dir)?;
                    exp.checkpoint().save(&dir.join(CHECKPOINT_FILE))?;
                }
            }
        }
        Ok(exp.outcome(false))
    })
}
