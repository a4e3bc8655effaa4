use dip::analysis::{
    activation_variance, distance_table_tsv, distance_trajectory, dump_vectors, reward_age_stats,
    saliency_map, spearman, SaliencyConfig,
};
use dip::envs::{EnvConfig, Observation};
use dip::genome::{ArchitectureConfig, Component, Genome};
use dip::harness::{
    AgeBucket, AgentState, EliteArchive, EliteEntry, GenerationRecord, RunLog, LOG_SCHEMA_VERSION,
};
use dip::verify::{check_saliency, saliency_by_two_passes};
use dip::RandomSource;

fn twelve_px() -> ArchitectureConfig {
    // 12 → 5 → 1 with 4×4 kernels at stride 2: the second layer reads first-layer
    // columns 0..=3, which cover input columns 0..=9. Columns 10 and 11 are unused.
    ArchitectureConfig {
        image_size: 12,
        channels: vec![2, 3],
        kernel: 4,
        z_dim: 2,
        hidden_dim: 3,
        n_mixtures: 1,
        action_dim: 2,
        mdn_head: false,
    }
}

fn random_obs(rng: &mut RandomSource, size: usize) -> Observation {
    Observation::from_pixels(size, (0..3 * size * size).map(|_| rng.uniform()).collect()).unwrap()
}

#[test]
fn saliency_zero_cases_and_two_pass_oracle() {
    let c = check_saliency(21, 50).unwrap();
    assert!(c.passed, "{c}");
}

#[test]
fn saliency_is_zero_outside_receptive_fields() {
    let arch = twelve_px();
    let cfg = SaliencyConfig {
        blur_size: 3,
        blur_sigma: None,
        stride: 1,
    };
    let mut rng = RandomSource::new(2, 0);
    let mut live = 0;
    for _ in 0..10 {
        let g: Genome<f64> = Genome::init(&arch, &mut rng).unwrap();
        let obs = random_obs(&mut rng, 12);
        let state = AgentState::zeros(2, 3, 2);
        let map = saliency_map(&g, &obs, &state, &cfg).unwrap();
        assert!(map.values.iter().all(|&v| v >= 0.0));
        for i in 0..12 {
            assert_eq!(map.get(i, 11), 0.0);
            assert_eq!(map.get(11, i), 0.0);
        }
        // ReLU can silence the whole 1×1 second layer for some genomes.
        if map.max() > 0.0 {
            live += 1;
        }
        let want = saliency_by_two_passes(&g, &obs, &state, 4, 7, 3, 1.0);
        assert!((map.get(4, 7) - want).abs() < 1e-9);
    }
    assert!(live >= 3, "only {live} genomes had any saliency");
}

#[test]
fn saliency_configuration_errors_and_stride() {
    let arch = twelve_px();
    let g: Genome<f64> = Genome::init(&arch, &mut RandomSource::new(3, 0)).unwrap();
    let obs = random_obs(&mut RandomSource::new(4, 0), 12);
    let state = AgentState::zeros(2, 3, 2);
    for (size, stride) in [(13, 1), (4, 1), (0, 1), (3, 0)] {
        let cfg = SaliencyConfig {
            blur_size: size,
            blur_sigma: None,
            stride,
        };
        assert_eq!(
            saliency_map(&g, &obs, &state, &cfg).unwrap_err().code(),
            "config"
        );
    }
    let full = saliency_map(
        &g,
        &obs,
        &state,
        &SaliencyConfig {
            blur_size: 3,
            ..Default::default()
        },
    )
    .unwrap();
    let strided = saliency_map(
        &g,
        &obs,
        &state,
        &SaliencyConfig {
            blur_size: 3,
            blur_sigma: None,
            stride: 5,
        },
    )
    .unwrap();
    for y in 0..12 {
        for x in 0..12 {
            assert_eq!(strided.get(y, x), full.get(y - y % 5, x - x % 5));
        }
    }
    let ppm = full.overlay_ppm(&obs).unwrap();
    assert!(ppm.starts_with(b"P6\n12 12\n255\n"));
    assert_eq!(ppm.len(), b"P6\n12 12\n255\n".len() + 12 * 12 * 3);
}

#[test]
fn activation_variance_ten_steps_by_hand() {
    // Step means are t = 0..9, so the episode mean is 4.5 and the raw values
    // (4.5 - t)² run from 0.25 to 20.25.
    let trace: Vec<Vec<f64>> = (0..10)
        .map(|t| vec![t as f64 - 1.0, t as f64, t as f64 + 1.0])
        .collect();
    let a = activation_variance(&trace).unwrap();
    assert_eq!(a.episode_mean, 4.5);
    let want = [1.0, 0.6, 0.3, 0.1, 0.0, 0.0, 0.1, 0.3, 0.6, 1.0];
    for (got, w) in a.variance.iter().zip(want) {
        assert!((got - w).abs() < 1e-12, "{got} vs {w}");
    }
    let permuted: Vec<Vec<f64>> = trace.iter().map(|h| vec![h[2], h[0], h[1]]).collect();
    assert_eq!(activation_variance(&permuted).unwrap(), a);
    assert!(activation_variance::<f64>(&[]).is_err());
}

fn archive_of(genomes: &[Genome<f64>]) -> EliteArchive<f64> {
    let mut a = EliteArchive::new(String::new());
    for (i, g) in genomes.iter().enumerate() {
        a.entries.push(EliteEntry {
            generation: 10 * i as u64,
            id: i as u64,
            reward: i as f64,
            age: i as u32 + 1,
            population_mean_age: 0.5 * i as f64,
            genome: g.clone(),
        });
    }
    a
}

#[test]
fn distance_trajectory_matches_direct_norms() {
    let arch = ArchitectureConfig::desk_scale(1);
    let mut rng = RandomSource::new(8, 0);
    let g0: Genome<f64> = Genome::init(&arch, &mut rng).unwrap();
    let g1 = g0.mutate_component(Component::Visual, 0.1, &mut rng);
    let g2 = g1.mutate_component(Component::Controller, 0.1, &mut rng);
    let rows =
        distance_trajectory(&archive_of(&[g0.clone(), g1.clone(), g2.clone()]), &g2).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, g) in rows.iter().zip([&g0, &g1, &g2]) {
        for c in Component::ALL {
            let direct: f64 = g
                .segment(c)
                .iter()
                .zip(g2.segment(c))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!((row.distances[c.index()] - direct).abs() < 1e-12);
        }
    }
    assert_eq!(rows[2].distances, [0.0; 3]);
    assert_eq!(rows[1].distances[Component::Memory.index()], 0.0);
    assert_eq!((rows[1].age, rows[1].population_mean_age), (2, 0.5));
    assert_eq!(distance_table_tsv(&rows).lines().count(), 4);
    assert_eq!(
        distance_trajectory(&archive_of(std::slice::from_ref(&g0)), &g0)
            .unwrap()
            .len(),
        1
    );

    let other: Genome<f64> = Genome::zeros(&ArchitectureConfig::desk_scale(3)).unwrap();
    assert!(distance_trajectory(&archive_of(std::slice::from_ref(&g0)), &other).is_err());
    assert!(distance_trajectory(&archive_of(&[]), &g0).is_err());
}

fn record(g: u64, buckets: &[(u32, u32, f64)]) -> GenerationRecord {
    GenerationRecord {
        schema: LOG_SCHEMA_VERSION,
        generation: g,
        best_reward: 0.0,
        mean_reward: 0.0,
        median_reward: 0.0,
        mean_age: 0.0,
        age_histogram: buckets
            .iter()
            .map(|&(age, count, reward_sum)| AgeBucket {
                age,
                count,
                reward_sum,
            })
            .collect(),
        mutations: Default::default(),
        resets: Default::default(),
        children_survived: 0,
        failures: 0,
        elite_id: 0,
        elite_age: 0,
        best_so_far: 0.0,
    }
}

#[test]
fn reward_age_grouping_by_hand() {
    // pairs: age 0 → 1, 3, 5; age 2 → 10; age 4 → 4, 8
    let a = RunLog {
        config: String::new(),
        records: vec![
            record(1, &[(0, 2, 4.0), (2, 1, 10.0)]),
            record(2, &[(4, 1, 4.0)]),
        ],
    };
    let b = RunLog {
        config: String::new(),
        records: vec![record(1, &[(0, 1, 5.0), (4, 1, 8.0)])],
    };
    let stats = reward_age_stats(&[a, b]).unwrap();
    let got: Vec<(u32, f64, u64)> = stats
        .iter()
        .map(|s| (s.age, s.mean_reward, s.count))
        .collect();
    assert_eq!(got, vec![(0, 3.0, 3), (2, 10.0, 1), (4, 6.0, 2)]);

    let flat = RunLog {
        config: String::new(),
        records: (1..=7).map(|g| record(g, &[(0, 16, 32.0)])).collect(),
    };
    let s = reward_age_stats(&[flat]).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].count, 16 * 7);
    assert!(reward_age_stats(&[RunLog::default()]).unwrap().is_empty());
    assert!(reward_age_stats(&[]).is_err());
    assert_eq!(spearman(&[0.0, 2.0, 4.0], &[3.0, 10.0, 6.0]), Some(0.5));
}

#[test]
fn vector_dump_shape_and_determinism() {
    let arch = ArchitectureConfig::desk_scale(1);
    let g: Genome<f64> = Genome::init(&arch, &mut RandomSource::new(1, 0)).unwrap();
    let env = EnvConfig::dodge_desk();
    let a = dump_vectors(&g, &env, 77, Some(4)).unwrap();
    let b = dump_vectors(&g, &env, 77, Some(4)).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
    let survived = a.records.iter().filter(|r| r.reward > 0.0).count();
    assert_eq!(
        a.records.len(),
        survived + 1,
        "every survived frame plus the fatal one"
    );
    let text = a.to_tsv();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header.split('\t').count(), 1 + 8 + 16 + 1 + 1);
}

#[test]
fn full_scale_dump_has_288_vector_columns() {
    let arch = ArchitectureConfig::full_scale(1);
    let g: Genome<f64> = Genome::init(&arch, &mut RandomSource::new(1, 0)).unwrap();
    let dump = dump_vectors(&g, &EnvConfig::dodge_full(), 3, None).unwrap();
    assert!(!dump.records.is_empty());
    for r in &dump.records {
        assert_eq!(r.z.len() + r.h.len(), 288);
    }
}
