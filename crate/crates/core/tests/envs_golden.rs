use dip::envs::golden::{run_golden_episode, scripted_action, GoldenEpisode, GOLDEN_CASES};
use dip::envs::{env_reset, env_step, EnvConfig, EnvKind};
use dip::verify::{check_golden_frames, GOLDEN_FIXTURE};
use proptest::prelude::*;

#[test]
fn frames_match_fixture() {
    let c = check_golden_frames(GOLDEN_FIXTURE).unwrap();
    assert!(c.passed, "{c}");
}

#[test]
fn fixture_lines_parse_back() {
    for line in GOLDEN_FIXTURE.lines().filter(|l| !l.starts_with('#')) {
        assert_eq!(GoldenEpisode::parse_line(line).unwrap().to_line(), line);
    }
    assert!(GoldenEpisode::parse_line("dodge x 3 00").is_err());
}

#[test]
fn a_changed_digest_is_caught() {
    let mut lines: Vec<String> = GOLDEN_FIXTURE.lines().map(String::from).collect();
    let last = lines.len() - 1;
    let mut e = GoldenEpisode::parse_line(&lines[last]).unwrap();
    e.digest ^= 1;
    lines[last] = e.to_line();
    assert!(!check_golden_frames(&lines.join("\n")).unwrap().passed);
}

#[test]
fn episodes_are_reproducible() {
    for (kind, seed) in GOLDEN_CASES {
        assert_eq!(
            run_golden_episode(kind, seed).unwrap(),
            run_golden_episode(kind, seed).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn rewards_and_pixels_stay_in_range(seed in any::<u64>(), track in any::<bool>()) {
        let cfg = if track { EnvConfig::track_desk() } else { EnvConfig::dodge_desk() };
        let kind = cfg.kind;
        let (mut state, obs) = env_reset(&cfg, seed).unwrap();
        prop_assert!(obs.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
        let mut total = 0.0;
        for t in 0..cfg.max_steps {
            let out = env_step(&mut state, &scripted_action(kind, t)).unwrap();
            prop_assert!(out.observation.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
            match kind {
                EnvKind::Dodge => prop_assert!(out.reward == 0.0 || out.reward == 1.0),
                EnvKind::Track => prop_assert!(out.reward >= -0.1 - 1e-12),
            }
            total += out.reward;
            if out.done {
                break;
            }
        }
        if kind == EnvKind::Dodge {
            prop_assert!(total <= cfg.max_steps as f64);
        } else {
            prop_assert!(total <= 100.0);
        }
    }
}

#[test]
fn stepping_a_finished_episode_is_refused() {
    let cfg = EnvConfig::dodge_desk();
    let (mut state, _) = env_reset(&cfg, 1).unwrap();
    let mut t = 0;
    while !env_step(&mut state, &scripted_action(EnvKind::Dodge, t))
        .unwrap()
        .done
    {
        t += 1;
    }
    assert!(env_step(&mut state, &[0.0]).is_err());
    assert!(env_step(&mut env_reset(&cfg, 1).unwrap().0, &[0.0, 1.0]).is_err());
}
