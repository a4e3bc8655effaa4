use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dip(args: &[&str]) -> Output {
    dip_env(args, &[])
}

fn dip_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dip"));
    cmd.args(args)
        .env_remove("DIP_OUTPUT_DIR")
        .env_remove("DIP_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_params_full_scale() {
    let o = dip(&["count-params", "--preset", "full", "--env", "track"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "visual 755744"), "{out}");
    assert!(out.lines().any(|l| l == "controller 867"), "{out}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = dip(&["evolve", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[usage]:"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let text = dip::harness::RunConfig::desk(dip::envs::EnvKind::Dodge).to_toml();
    fs::write(&cfg, format!("mystery = 1\n{text}")).unwrap();
    let o = dip(&["evolve", "--config", path(&cfg), "--generations", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).starts_with("error[usage]:") && stderr(&o).contains("mystery"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn zero_generations_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = dip(&[
        "evolve",
        "--generations",
        "0",
        "--population",
        "4",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(cfg.contains("generations = 0"));
    let log = fs::read_to_string(out.join("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 1);
    assert!(log.starts_with("{\"type\":\"header\""));
}

#[test]
fn output_dir_and_workers_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let o = dip_env(
        &["evolve", "--generations", "1", "--population", "4"],
        &[("DIP_OUTPUT_DIR", path(&out)), ("DIP_WORKERS", "2")],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("config.toml"))
        .unwrap()
        .contains("workers = 2"));
    let o = dip_env(
        &["evolve", "--generations", "0"],
        &[("DIP_OUTPUT_DIR", path(&out)), ("DIP_WORKERS", "many")],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[usage]:"));
}

#[test]
fn run_replay_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = dip(&[
        "evolve",
        "--generations",
        "3",
        "--population",
        "6",
        "--seed",
        "2",
        "--out",
        path(&run),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let best = run.join("best.genome");

    let t1 = dir.path().join("t1.tsv");
    let t2 = dir.path().join("t2.tsv");
    for t in [&t1, &t2] {
        let o = dip(&[
            "replay",
            "--genome",
            path(&best),
            "--seed",
            "9",
            "--episodes",
            "2",
            "--dump-traces",
            path(t),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("mean_reward"));
    }
    assert_eq!(fs::read(&t1).unwrap(), fs::read(&t2).unwrap());

    let sal = dir.path().join("sal.tsv");
    let ppm = dir.path().join("sal.ppm");
    let o = dip(&[
        "analyze",
        "saliency",
        "--genome",
        path(&best),
        "--out",
        path(&sal),
        "--overlay",
        path(&ppm),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&sal).unwrap().lines().count(), 16);
    assert!(fs::read(&ppm).unwrap().starts_with(b"P6"));

    let act = dir.path().join("act.tsv");
    assert!(dip(&[
        "analyze",
        "activation",
        "--genome",
        path(&best),
        "--out",
        path(&act)
    ])
    .status
    .success());
    let dump = dir.path().join("dump.tsv");
    assert!(dip(&[
        "analyze",
        "dump",
        "--genome",
        path(&best),
        "--seed",
        "9",
        "--out",
        path(&dump)
    ])
    .status
    .success());
    assert_eq!(fs::read(&dump).unwrap(), fs::read(&t1).unwrap());

    let o = dip(&["analyze", "distances", "--run", path(&run)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("generation\tid\tvisual\tmemory\tcontroller"));
    let o = dip(&["analyze", "reward-age", "--log", path(&run)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("age\tmean_reward\tcount"));
}

#[test]
fn stop_resume_and_corrupt_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let common = [
        "evolve",
        "--generations",
        "4",
        "--population",
        "6",
        "--seed",
        "3",
    ];
    assert!(dip(&[&common[..], &["--out", path(&a)]].concat())
        .status
        .success());
    let o = dip(&[&common[..], &["--out", path(&b), "--stop-after", "2"]].concat());
    assert!(stdout(&o).contains("checkpoint"), "{}", stdout(&o));
    let ckpt = b.join("checkpoint.bin");
    let o = dip(&[&common[..], &["--out", path(&b), "--resume", path(&ckpt)]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(a.join("log.jsonl")).unwrap(),
        fs::read(b.join("log.jsonl")).unwrap()
    );

    let mut bytes = fs::read(&ckpt).unwrap();
    let n = bytes.len();
    bytes[n - 100] ^= 0xff;
    fs::write(&ckpt, bytes).unwrap();
    let o = dip(&[&common[..], &["--out", path(&b), "--resume", path(&ckpt)]].concat());
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).starts_with("error[corrupt-checkpoint]:"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_genome_is_an_io_error() {
    let o = dip(&["replay", "--genome", "/nonexistent/x.genome"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[io]:"));
}

#[test]
fn verify_passes() {
    let o = dip(&["verify"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
}
