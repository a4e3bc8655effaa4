//! Command-line front end.
//!
//! Every failure is reported on stderr as `error[<code>]: <message>` where
//! `<code>` is [`DipError::code`] (or `verify` for failed self-checks).
//! Exit status: 0 success, 1 runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    activation_variance, distance_table_tsv, distance_trajectory, dump_vectors, reward_age_stats,
    reward_age_tsv, saliency_map, SaliencyConfig,
};
use crate::envs::{EnvConfig, EnvKind};
use crate::error::{DipError, Result};
use crate::genome::{count_params, deserialize_genome, ArchitectureConfig, Component, Genome};
use crate::harness::{
    rollout, run_experiment_with, AgentState, EliteArchive, Precision, RunConfig, RunControl,
    RunLog, WorldModel, ARCHIVE_FILE, BEST_FILE, CHECKPOINT_FILE, LOG_FILE,
};
use crate::moea::{ProtectionKind, ProtectionPolicy};
use crate::rng::{tags, RandomSource};
use crate::scalar::Scalar;
use crate::verify::run_verify;

pub const ENV_OUTPUT_DIR: &str = "DIP_OUTPUT_DIR";
pub const ENV_WORKERS: &str = "DIP_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "dip", version, about = "Evolve and inspect world-model agents")]
struct Cli {
    /// Log per-generation progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run (or resume) an experiment.
    Evolve(EvolveArgs),
    /// Load a genome and play episodes.
    Replay(ReplayArgs),
    /// Analyse genomes and run outputs.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Print per-component parameter counts.
    CountParams(SetupArgs),
    /// Run the built-in oracle and golden-output checks.
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Desk,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnvArg {
    Dodge,
    Track,
}

impl From<EnvArg> for EnvKind {
    fn from(e: EnvArg) -> Self {
        match e {
            EnvArg::Dodge => EnvKind::Dodge,
            EnvArg::Track => EnvKind::Track,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Dip,
    ControllerProtect,
    MemoryAndControllerProtect,
    RandomAge,
    None,
}

impl From<PolicyArg> for ProtectionKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Dip => ProtectionKind::Dip,
            PolicyArg::ControllerProtect => ProtectionKind::ControllerProtect,
            PolicyArg::MemoryAndControllerProtect => ProtectionKind::MemoryAndControllerProtect,
            PolicyArg::RandomAge => ProtectionKind::RandomAge,
            PolicyArg::None => ProtectionKind::None,
        }
    }
}

/// Where the run config comes from: a TOML file, or a preset.
#[derive(Args, Debug)]
struct SetupArgs {
    /// Run config file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    #[arg(long, value_enum, default_value = "dodge")]
    env: EnvArg,
}

impl SetupArgs {
    fn load(&self) -> Result<RunConfig> {
        match &self.config {
            Some(path) => RunConfig::from_toml(&read_text(path)?),
            None => Ok(match self.preset {
                Preset::Desk => RunConfig::desk(self.env.into()),
                Preset::Full => RunConfig::full(self.env.into()),
            }),
        }
    }
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[command(flatten)]
    setup: SetupArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<u64>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Output directory (overrides DIP_OUTPUT_DIR and the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores (overrides DIP_WORKERS and the config).
    #[arg(long)]
    workers: Option<usize>,
    /// Stop after this many completed generations, leaving a checkpoint.
    #[arg(long)]
    stop_after: Option<u64>,
    /// Continue from a checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenomeArgs {
    #[arg(long)]
    genome: PathBuf,
    #[command(flatten)]
    setup: SetupArgs,
    /// Episode seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[command(flatten)]
    genome: GenomeArgs,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    /// Write per-step z/h/action traces of the first episode to this file.
    #[arg(long)]
    dump_traces: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCommand {
    /// Perturbation saliency of one frame.
    Saliency {
        #[command(flatten)]
        genome: GenomeArgs,
        /// Frame index within the episode.
        #[arg(long, default_value_t = 0)]
        step: u32,
        #[arg(long, default_value_t = 5)]
        blur_size: usize,
        #[arg(long)]
        blur_sigma: Option<f64>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write a PPM overlay image.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    /// LSTM activation variance over one episode.
    Activation {
        #[command(flatten)]
        genome: GenomeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance of archived elites to the final best genome.
    Distances {
        /// Run output directory.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean reward per age, pooled over runs.
    RewardAge {
        /// Run log files (log.jsonl) or run directories.
        #[arg(long = "log", required = true)]
        logs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-step latent and hidden vectors of one episode.
    Dump {
        #[command(flatten)]
        genome: GenomeArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| DipError::io(format!("reading {}", path.display()), e))
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| DipError::io(format!("writing {}", p.display()), e))
        }
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn env_override<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(v) if !v.is_empty() => v
            .parse()
            .map(Some)
            .map_err(|_| DipError::Usage(format!("{name}=`{v}` is not valid"))),
        _ => Ok(None),
    }
}

/// Loads a genome of either stored precision as `f64`.
pub fn load_genome_f64(path: &Path) -> Result<Genome<f64>> {
    let bytes =
        fs::read(path).map_err(|e| DipError::io(format!("reading {}", path.display()), e))?;
    match deserialize_genome::<f64>(&bytes) {
        Err(DipError::Config(_)) => {
            let g = deserialize_genome::<f32>(&bytes)?;
            let widen = |c: Component| {
                g.segment(c)
                    .iter()
                    .map(|v| v.as_f64())
                    .collect::<Vec<f64>>()
            };
            Genome::from_segments(
                g.arch().clone(),
                widen(Component::Visual),
                widen(Component::Memory),
                widen(Component::Controller),
            )
        }
        other => other,
    }
}

fn load_for_env(args: &GenomeArgs) -> Result<(Genome<f64>, EnvConfig)> {
    let genome = load_genome_f64(&args.genome)?;
    let env = args.setup.load()?.env;
    Ok((genome, env))
}

fn evolve(args: EvolveArgs) -> Result<()> {
    let mut cfg = args.setup.load()?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.population {
        cfg.population = n;
    }
    if let Some(g) = args.generations {
        cfg.generations = g;
    }
    if let Some(p) = args.policy {
        cfg.policy = ProtectionPolicy {
            kind: p.into(),
            ..cfg.policy
        };
    }
    if let Some(s) = args.sigma {
        cfg.sigma = s;
    }
    if let Some(dir) = args.out.or(env_override::<PathBuf>(ENV_OUTPUT_DIR)?) {
        cfg.output_dir = Some(dir);
    }
    if let Some(w) = args.workers.or(env_override::<usize>(ENV_WORKERS)?) {
        cfg.workers = w;
    }
    if cfg.output_dir.is_none() {
        cfg.output_dir = Some(PathBuf::from("dip-run"));
    }
    cfg.validate()?;
    let control = RunControl {
        stop_after: args.stop_after,
        resume_from: args.resume,
    };
    let dir = cfg.output_dir.clone().expect("set above");
    let (generation, best, stopped) = match cfg.precision {
        Precision::F64 => {
            let o = run_experiment_with::<f64>(cfg, &control)?;
            (o.population.generation, o.best_so_far, o.stopped_early)
        }
        Precision::F32 => {
            let o = run_experiment_with::<f32>(cfg, &control)?;
            (o.population.generation, o.best_so_far, o.stopped_early)
        }
    };
    println!("generation {generation}");
    println!("best_so_far {best}");
    println!("output {}", dir.display());
    if stopped {
        println!("checkpoint {}", dir.join(CHECKPOINT_FILE).display());
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<()> {
    let (genome, env) = load_for_env(&args.genome)?;
    if args.episodes == 0 {
        return Err(DipError::Usage("--episodes must be >= 1".into()));
    }
    let model = WorldModel::new(&genome)?;
    let mut rng = RandomSource::derive(args.genome.seed, &[tags::REPLAY]);
    let mut scores = Vec::new();
    for e in 0..args.episodes {
        let seed = if e == 0 {
            args.genome.seed
        } else {
            rng.next_u64()
        };
        let r = rollout(&model, &env, seed, |_| {})?;
        println!(
            "episode {e} seed {seed} reward {} steps {}",
            r.total_reward, r.steps_survived
        );
        scores.push(r.total_reward);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    println!("mean_reward {mean}");
    if let Some(path) = &args.dump_traces {
        let dump = dump_vectors(&genome, &env, args.genome.seed, None)?;
        write_out(Some(path), dump.to_tsv().as_bytes())?;
    }
    Ok(())
}

fn analyze(cmd: AnalyzeCommand) -> Result<()> {
    match cmd {
        AnalyzeCommand::Saliency {
            genome,
            step,
            blur_size,
            blur_sigma,
            stride,
            out,
            overlay,
        } => {
            let (g, env) = load_for_env(&genome)?;
            let model = WorldModel::new(&g)?;
            let mut frame = None;
            rollout(&model, &env, genome.seed, |s| {
                if s.t == step {
                    frame = Some((s.observation.clone(), s.state_before.clone()));
                }
            })?;
            let (obs, state): (_, AgentState<f64>) = frame
                .ok_or_else(|| DipError::config(format!("episode ended before step {step}")))?;
            let cfg = SaliencyConfig {
                blur_size,
                blur_sigma,
                stride,
            };
            let map = saliency_map(&g, &obs, &state, &cfg)?;
            write_out(Some(&out), map.to_tsv().as_bytes())?;
            if let Some(path) = overlay {
                write_out(Some(&path), &map.overlay_ppm(&obs)?)?;
            }
            Ok(())
        }
        AnalyzeCommand::Activation { genome, out } => {
            let (g, env) = load_for_env(&genome)?;
            let dump = dump_vectors(&g, &env, genome.seed, None)?;
            let trace = activation_variance(&dump.hidden_trace())?;
            let mut text = format!(
                "# episode_mean={}\nt\tstep_mean\tvariance\n",
                trace.episode_mean
            );
            for (t, (m, v)) in trace.step_means.iter().zip(&trace.variance).enumerate() {
                text.push_str(&format!("{t}\t{m}\t{v}\n"));
            }
            write_out(Some(&out), text.as_bytes())
        }
        AnalyzeCommand::Distances { run, out } => {
            let bytes = fs::read(run.join(ARCHIVE_FILE)).map_err(|e| {
                DipError::io(format!("reading {}", run.join(ARCHIVE_FILE).display()), e)
            })?;
            let final_genome = load_genome_f64(&run.join(BEST_FILE))?;
            let rows = match EliteArchive::<f64>::from_bytes(&bytes) {
                Ok(a) => distance_trajectory(&a, &final_genome)?,
                Err(_) => {
                    let a = EliteArchive::<f32>::from_bytes(&bytes)?;
                    let narrow = narrow_genome(&final_genome)?;
                    distance_trajectory(&a, &narrow)?
                }
            };
            write_out(out.as_deref(), distance_table_tsv(&rows).as_bytes())
        }
        AnalyzeCommand::RewardAge { logs, out } => {
            let logs = logs
                .iter()
                .map(|p| {
                    let p = if p.is_dir() {
                        p.join(LOG_FILE)
                    } else {
                        p.clone()
                    };
                    RunLog::from_jsonl(&read_text(&p)?)
                })
                .collect::<Result<Vec<_>>>()?;
            write_out(
                out.as_deref(),
                reward_age_tsv(&reward_age_stats(&logs)?).as_bytes(),
            )
        }
        AnalyzeCommand::Dump { genome, out } => {
            let (g, env) = load_for_env(&genome)?;
            let dump = dump_vectors(&g, &env, genome.seed, None)?;
            write_out(Some(&out), dump.to_tsv().as_bytes())
        }
    }
}

fn narrow_genome(g: &Genome<f64>) -> Result<Genome<f32>> {
    let n = |c: Component| g.segment(c).iter().map(|&v| v as f32).collect::<Vec<f32>>();
    Genome::from_segments(
        g.arch().clone(),
        n(Component::Visual),
        n(Component::Memory),
        n(Component::Controller),
    )
}

fn count(args: SetupArgs) -> Result<()> {
    let arch: ArchitectureConfig = args.load()?.arch;
    for c in Component::ALL {
        println!("{} {}", c.name(), count_params(&arch, c)?);
    }
    Ok(())
}

fn verify() -> Result<bool> {
    let checks = run_verify()?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        eprintln!("error[verify]: {failed} of {} checks failed", checks.len());
    }
    Ok(failed == 0)
}

fn report(e: &DipError) -> i32 {
    eprintln!("error[{}]: {e}", e.code());
    match e {
        DipError::Usage(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            eprintln!("{}", e.render());
            return 2;
        }
    };
    log::set_max_level(if cli.verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    });
    let result = match cli.command {
        Command::Evolve(a) => evolve(a),
        Command::Replay(a) => replay(a),
        Command::Analyze(c) => analyze(c),
        Command::CountParams(a) => count(a),
        Command::Verify => {
            return match verify() {
                Ok(true) => 0,
                Ok(false) => 1,
                Err(e) => report(&e),
            }
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}
