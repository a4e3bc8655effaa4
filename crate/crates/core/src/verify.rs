//! Self-checks against independent reference implementations.
//!
//! The `oracle` functions are deliberately naive: plain index loops with no
//! shared code paths beyond the parameter layout, brute-force dominance
//! peeling, and a straight-line age simulator. `run_verify` runs every check
//! at its default size.

use std::fmt;

use crate::analysis::{saliency_map, SaliencyConfig};
use crate::envs::golden::{run_golden_episode, GoldenEpisode, GOLDEN_CASES};
use crate::envs::{Observation, Rgb};
use crate::error::Result;
use crate::genome::{count_params, ArchitectureConfig, Component, Genome};
use crate::harness::AgentState;
use crate::moea::{
    apply_protection, crowding_distance, nondominated_sort, Individual, ObjectivePoint,
    ObjectiveSet, ProtectionKind, ProtectionPolicy,
};
use crate::nn::{
    conv2d_forward, linear_forward, lstm_cell_forward, Activation, LayerSpec, Tensor, TensorShape,
};
use crate::rng::RandomSource;

pub const GOLDEN_FIXTURE: &str = include_str!("../tests/fixtures/golden_frames.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

pub mod oracle {
    use crate::genome::{Component, Genome};
    use crate::moea::{ObjectivePoint, ObjectiveSet, ProtectionKind};
    use crate::nn::Activation;

    pub fn activate(a: Activation, x: f64) -> f64 {
        match a {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    fn logistic(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    /// Valid convolution, `input[c][y][x]`, `weights[o][c][ky][kx]` followed by `o` biases.
    #[allow(clippy::too_many_arguments)]
    pub fn conv2d(
        input: &[f64],
        in_c: usize,
        size: usize,
        weights: &[f64],
        out_c: usize,
        k: usize,
        stride: usize,
        act: Activation,
    ) -> (Vec<f64>, usize) {
        let out = (size - k) / stride + 1;
        let mut y = vec![0.0; out_c * out * out];
        for o in 0..out_c {
            for oy in 0..out {
                for ox in 0..out {
                    let mut s = weights[out_c * in_c * k * k + o];
                    for c in 0..in_c {
                        for ky in 0..k {
                            for kx in 0..k {
                                let w = weights[((o * in_c + c) * k + ky) * k + kx];
                                let v =
                                    input[(c * size + oy * stride + ky) * size + ox * stride + kx];
                                s += w * v;
                            }
                        }
                    }
                    y[(o * out + oy) * out + ox] = activate(act, s);
                }
            }
        }
        (y, out)
    }

    /// `weights[o][i]` followed by `o` biases.
    pub fn linear(x: &[f64], weights: &[f64], out: usize, act: Activation) -> Vec<f64> {
        let n = x.len();
        (0..out)
            .map(|o| {
                let mut s = weights[out * n + o];
                for i in 0..n {
                    s += weights[o * n + i] * x[i];
                }
                activate(act, s)
            })
            .collect()
    }

    /// LSTM step written gate by gate from the textbook equations.
    pub fn lstm(x: &[f64], h: &[f64], c: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let hidden = h.len();
        let cols = x.len() + hidden;
        let gate = |g: usize, j: usize| {
            let base = g * (hidden * cols + hidden);
            let mut s = weights[base + hidden * cols + j];
            for (i, xi) in x.iter().chain(h.iter()).enumerate() {
                s += weights[base + j * cols + i] * xi;
            }
            s
        };
        let mut h2 = vec![0.0; hidden];
        let mut c2 = vec![0.0; hidden];
        for j in 0..hidden {
            let input_gate = logistic(gate(0, j));
            let forget_gate = logistic(gate(1, j));
            let candidate = gate(2, j).tanh();
            let output_gate = logistic(gate(3, j));
            c2[j] = forget_gate * c[j] + input_gate * candidate;
            h2[j] = output_gate * c2[j].tanh();
        }
        (h2, c2)
    }

    /// One agent step: conv stack (ReLU), mean head, LSTM on `[z, a_prev]`,
    /// tanh controller on `[z, h']`. Returns `(action, h', c')`.
    pub fn agent_step(
        genome: &Genome<f64>,
        image: &[f64],
        h: &[f64],
        c: &[f64],
        last_action: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let arch = genome.arch();
        let visual = genome.visual();
        let mut x = image.to_vec();
        let mut size = arch.image_size;
        let mut in_c = 3;
        let mut off = 0;
        for &out_c in &arch.channels {
            let n = out_c * in_c * arch.kernel * arch.kernel + out_c;
            let (y, s) = conv2d(
                &x,
                in_c,
                size,
                &visual[off..off + n],
                out_c,
                arch.kernel,
                2,
                Activation::Relu,
            );
            off += n;
            x = y;
            size = s;
            in_c = out_c;
        }
        let n = x.len() * arch.z_dim + arch.z_dim;
        let z = linear(&x, &visual[off..off + n], arch.z_dim, Activation::Identity);
        let mut lstm_in = z.clone();
        lstm_in.extend_from_slice(last_action);
        let hidden = arch.hidden_dim;
        let lstm_n = 4 * (hidden * (lstm_in.len() + hidden) + hidden);
        let (h2, c2) = lstm(&lstm_in, h, c, &genome.segment(Component::Memory)[..lstm_n]);
        let mut ctrl_in = z;
        ctrl_in.extend_from_slice(&h2);
        let a = linear(
            &ctrl_in,
            genome.controller(),
            arch.action_dim,
            Activation::Tanh,
        );
        (a, h2, c2)
    }

    fn dominates(a: &ObjectivePoint, b: &ObjectivePoint, set: ObjectiveSet) -> bool {
        let reward_ok = a.reward >= b.reward;
        match set {
            ObjectiveSet::RewardOnly => a.reward > b.reward,
            ObjectiveSet::AgeAndReward => {
                let no_worse = a.age <= b.age && reward_ok;
                let better = a.age < b.age || a.reward > b.reward;
                no_worse && better
            }
        }
    }

    /// Peels non-dominated sets one at a time with an all-pairs scan.
    pub fn brute_force_fronts(points: &[ObjectivePoint], set: ObjectiveSet) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..points.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| j != i && dominates(&points[j], &points[i], set))
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    /// Crowding distance from each member's rank position per objective.
    pub fn hand_crowding(
        front: &[usize],
        points: &[ObjectivePoint],
        set: ObjectiveSet,
    ) -> Vec<f64> {
        let m = front.len();
        if m <= 2 {
            return vec![f64::INFINITY; m];
        }
        let objectives: Vec<Box<dyn Fn(&ObjectivePoint) -> f64>> = match set {
            ObjectiveSet::AgeAndReward => vec![Box::new(|p| p.age as f64), Box::new(|p| -p.reward)],
            ObjectiveSet::RewardOnly => vec![Box::new(|p| -p.reward)],
        };
        let mut d = vec![0.0; m];
        for f in &objectives {
            let v: Vec<f64> = front.iter().map(|&i| f(&points[i])).collect();
            // position of member a when sorted by (value, original index)
            let pos: Vec<usize> = (0..m)
                .map(|a| {
                    (0..m)
                        .filter(|&b| (v[b], front[b]) < (v[a], front[a]))
                        .count()
                })
                .collect();
            let at = |p: usize| (0..m).find(|&a| pos[a] == p).unwrap();
            let (lo, hi) = (v[at(0)], v[at(m - 1)]);
            for a in 0..m {
                if pos[a] == 0 || pos[a] == m - 1 {
                    d[a] = f64::INFINITY;
                } else if hi > lo {
                    d[a] += (v[at(pos[a] + 1)] - v[at(pos[a] - 1)]) / (hi - lo);
                }
            }
        }
        d
    }

    /// Ages along a single lineage. Generation `g` advances the parent by one
    /// and produces a child through `events[g]`; the child's age is the
    /// parent's unless the policy resets on that component. Random-age takes
    /// its ages from `draws` (two per generation: parent, then child).
    pub fn lineage_ages(kind: ProtectionKind, events: &[Component], draws: &[u32]) -> Vec<u32> {
        let resets = |c: Component| match kind {
            ProtectionKind::Dip => c != Component::Controller,
            ProtectionKind::ControllerProtect => c == Component::Controller,
            ProtectionKind::MemoryAndControllerProtect => c != Component::Visual,
            ProtectionKind::RandomAge | ProtectionKind::None => false,
        };
        let mut ages = vec![0];
        let mut age = 0;
        for (g, &e) in events.iter().enumerate() {
            if kind == ProtectionKind::RandomAge {
                age = draws[2 * g + 1];
            } else {
                age += 1;
                if resets(e) {
                    age = 0;
                }
            }
            ages.push(age);
        }
        ages
    }

    /// Probability that each pool member wins one binary tournament between
    /// two distinct members, ties split evenly. `better(a, b)` is `Some(true)`
    /// if `a` wins outright, `None` on a tie.
    pub fn tournament_win_probability(
        m: usize,
        better: impl Fn(usize, usize) -> Option<bool>,
    ) -> Vec<f64> {
        let pairs = (m * (m - 1) / 2) as f64;
        let mut p = vec![0.0; m];
        for a in 0..m {
            for b in (a + 1)..m {
                match better(a, b) {
                    Some(true) => p[a] += 1.0,
                    Some(false) => p[b] += 1.0,
                    None => {
                        p[a] += 0.5;
                        p[b] += 0.5;
                    }
                }
            }
        }
        p.iter().map(|x| x / pairs).collect()
    }
}

pub fn check_param_counts() -> Result<Check> {
    let arch = ArchitectureConfig::full_scale(3);
    let visual = count_params(&arch, Component::Visual)?;
    let controller = count_params(&arch, Component::Controller)?;
    Ok(Check::new(
        "parameter counts",
        visual == 755_744 && controller == 867,
        format!("visual {visual} (want 755744), controller {controller} (want 867)"),
    ))
}

fn random_points(rng: &mut RandomSource, n: usize) -> Vec<ObjectivePoint> {
    // Few distinct values so ties and duplicates are common.
    (0..n)
        .map(|_| {
            ObjectivePoint::new(
                rng.int_inclusive(0, 6),
                (rng.int_inclusive(0, 12) as f64) * 7.5 - 20.0,
            )
        })
        .collect()
}

pub fn check_nsga(seed: u64, trials: usize) -> Result<Check> {
    let mut rng = RandomSource::new(seed, 0x5047);
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for t in 0..trials {
        let n = 1 + rng.below(30);
        let pts = random_points(&mut rng, n);
        let set = if t % 4 == 3 {
            ObjectiveSet::RewardOnly
        } else {
            ObjectiveSet::AgeAndReward
        };
        let fronts = nondominated_sort(&pts, set);
        if fronts != oracle::brute_force_fronts(&pts, set) {
            mismatches += 1;
            continue;
        }
        for f in &fronts {
            let got = crowding_distance(f, &pts, set);
            let want = oracle::hand_crowding(f, &pts, set);
            for (a, b) in got.iter().zip(&want) {
                if a.is_infinite() || b.is_infinite() {
                    if a != b {
                        worst = f64::INFINITY;
                    }
                } else {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    Ok(Check::new(
        "nondominated sort and crowding",
        mismatches == 0 && worst <= 1e-9,
        format!(
            "{trials} populations, {mismatches} front mismatches, max crowding error {worst:.3e}"
        ),
    ))
}

fn random_vec(rng: &mut RandomSource, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect()
}

fn random_activation(rng: &mut RandomSource) -> Activation {
    [Activation::Relu, Activation::Tanh, Activation::Identity][rng.below(3)]
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn check_forward_passes(seed: u64, trials: usize) -> Result<Check> {
    let mut rng = RandomSource::new(seed, 0xF0D);
    let (mut conv_err, mut lin_err, mut lstm_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let in_c = 1 + rng.below(3);
        let out_c = 1 + rng.below(4);
        let k = 1 + rng.below(4);
        let stride = 1 + rng.below(3);
        let size = k + rng.below(9);
        let act = random_activation(&mut rng);
        let spec = LayerSpec::conv("c", in_c, out_c, k, act).with_stride(stride);
        let x = random_vec(&mut rng, in_c * size * size);
        let w = random_vec(&mut rng, spec.param_count());
        let got = conv2d_forward(
            &Tensor::new(TensorShape::image(in_c, size, size)?, x.clone())?,
            &w,
            &spec,
        )?;
        let (want, _) = oracle::conv2d(&x, in_c, size, &w, out_c, k, stride, act);
        conv_err = conv_err.max(max_abs_diff(got.data(), &want));

        let (n_in, n_out) = (1 + rng.below(20), 1 + rng.below(10));
        let act = random_activation(&mut rng);
        let spec = LayerSpec::linear("l", n_in, n_out, act);
        let x = random_vec(&mut rng, n_in);
        let w = random_vec(&mut rng, spec.param_count());
        lin_err = lin_err.max(max_abs_diff(
            &linear_forward(&x, &w, &spec)?,
            &oracle::linear(&x, &w, n_out, act),
        ));

        let (n_in, hidden) = (1 + rng.below(8), 1 + rng.below(8));
        let x = random_vec(&mut rng, n_in);
        let h = random_vec(&mut rng, hidden);
        let c: Vec<f64> = random_vec(&mut rng, hidden)
            .iter()
            .map(|v| 3.0 * v)
            .collect();
        let w = random_vec(&mut rng, crate::nn::lstm_param_count(n_in, hidden));
        let (h1, c1) = lstm_cell_forward(&x, &h, &c, &w)?;
        let (h2, c2) = oracle::lstm(&x, &h, &c, &w);
        lstm_err = lstm_err
            .max(max_abs_diff(&h1, &h2))
            .max(max_abs_diff(&c1, &c2));
    }
    let worst = conv_err.max(lin_err).max(lstm_err);
    Ok(Check::new(
        "conv/linear/LSTM forward passes",
        worst <= 1e-10,
        format!("{trials} trials each, max error conv {conv_err:.2e} linear {lin_err:.2e} lstm {lstm_err:.2e}"),
    ))
}

/// Chi-square critical value, 2 degrees of freedom, 1% level.
pub const CHI2_2DOF_1PCT: f64 = 9.210;

pub fn check_mutation_stats(seed: u64, mutations: usize, sigma: f64) -> Result<Check> {
    let arch = ArchitectureConfig {
        image_size: 8,
        channels: vec![2],
        kernel: 4,
        z_dim: 3,
        hidden_dim: 4,
        n_mixtures: 2,
        action_dim: 1,
        mdn_head: true,
    };
    let mut rng = RandomSource::new(seed, 0x3A7);
    let parent: Genome<f64> = Genome::init(&arch, &mut rng)?;
    let mut counts = [0u64; 3];
    let (mut n, mut s1, mut s2, mut s4) = (0u64, 0.0, 0.0, 0.0);
    for _ in 0..mutations {
        let (child, event) = parent.mutate(sigma, &mut rng);
        counts[event.component.index()] += 1;
        for c in Component::ALL {
            let same = child.segment(c) == parent.segment(c);
            if (c == event.component) == same {
                return Ok(Check::new(
                    "mutation statistics",
                    false,
                    format!("{c} changed unexpectedly"),
                ));
            }
        }
        for (a, b) in child
            .segment(event.component)
            .iter()
            .zip(parent.segment(event.component))
        {
            let d = a - b;
            n += 1;
            s1 += d;
            s2 += d * d;
            s4 += d * d * d * d;
        }
    }
    let expected = mutations as f64 / 3.0;
    let chi2: f64 = counts
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    let nf = n as f64;
    let mean = s1 / nf;
    let var = s2 / nf - mean * mean;
    let kurt = s4 / nf / (var * var);
    let mean_ok = mean.abs() <= 0.05 * sigma;
    let var_ok = (var / (sigma * sigma) - 1.0).abs() <= 0.05;
    let kurt_ok = (kurt / 3.0 - 1.0).abs() <= 0.05;
    Ok(Check::new(
        "mutation statistics",
        chi2 < CHI2_2DOF_1PCT && mean_ok && var_ok && kurt_ok,
        format!(
            "{mutations} mutations, counts {counts:?} chi2 {chi2:.3} (< {CHI2_2DOF_1PCT}); {n} deltas mean {mean:.2e} sd {:.5} (sigma {sigma}) kurtosis {kurt:.3}",
            var.sqrt()
        ),
    ))
}

fn all_sequences(max_len: usize) -> Vec<Vec<Component>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in Component::ALL {
                let mut t: Vec<Component> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Ages produced by the library's age rules along one lineage.
pub fn simulate_lineage(
    policy: &ProtectionPolicy,
    events: &[Component],
    seed: u64,
) -> (Vec<u32>, Vec<u32>) {
    let arch = ArchitectureConfig {
        image_size: 8,
        channels: vec![1],
        kernel: 4,
        z_dim: 1,
        hidden_dim: 1,
        n_mixtures: 1,
        action_dim: 1,
        mdn_head: false,
    };
    let mut rng = RandomSource::new(seed, 0xA6E);
    let mut draws = Vec::new();
    let mut current = Individual::<f64>::new(0, Genome::zeros(&arch).expect("tiny arch is valid"));
    let mut ages = vec![current.age];
    for (g, &c) in events.iter().enumerate() {
        current.age = policy.advance_age(current.age, &mut rng);
        draws.push(current.age);
        let event = crate::genome::MutationEvent {
            component: c,
            sigma: 0.03,
        };
        let mut child = Individual::new(
            g as u64 + 1,
            current.genome.mutate_component(c, 0.03, &mut rng),
        );
        child.age = current.age;
        let child = apply_protection(&event, child, policy, &mut rng);
        draws.push(child.age);
        ages.push(child.age);
        current = child;
    }
    (ages, draws)
}

pub fn check_age_bookkeeping(max_len: usize) -> Result<Check> {
    let sequences = all_sequences(max_len);
    let mut failures = Vec::new();
    for kind in ProtectionKind::ALL {
        let policy = ProtectionPolicy::new(kind);
        for (i, seq) in sequences.iter().enumerate() {
            let (ages, draws) = simulate_lineage(&policy, seq, i as u64);
            if ages != oracle::lineage_ages(kind, seq, &draws) {
                failures.push(format!("{} {:?}", kind.name(), seq));
            }
        }
    }
    Ok(Check::new(
        "age bookkeeping",
        failures.is_empty(),
        format!(
            "{} sequences x 5 policies, {} mismatches{}",
            sequences.len(),
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first: {f}"))
                .unwrap_or_default()
        ),
    ))
}

/// 8×8 architecture used by the saliency checks.
pub fn toy_arch() -> ArchitectureConfig {
    ArchitectureConfig {
        image_size: 8,
        channels: vec![2],
        kernel: 4,
        z_dim: 3,
        hidden_dim: 4,
        n_mixtures: 2,
        action_dim: 2,
        mdn_head: true,
    }
}

fn random_observation(rng: &mut RandomSource, size: usize) -> Observation {
    let pixels = (0..3 * size * size).map(|_| rng.uniform()).collect();
    Observation::from_pixels(size, pixels).expect("pixels in range")
}

/// Saliency at one pixel by two direct forward passes through the oracle network.
pub fn saliency_by_two_passes(
    genome: &Genome<f64>,
    obs: &Observation,
    state: &AgentState<f64>,
    y: usize,
    x: usize,
    blur: usize,
    sigma: f64,
) -> f64 {
    let n = obs.size();
    let r = blur as isize / 2;
    let mut perturbed = obs.pixels().to_vec();
    for c in 0..3 {
        for py in (y as isize - r).max(0)..=(y as isize + r).min(n as isize - 1) {
            for px in (x as isize - r).max(0)..=(x as isize + r).min(n as isize - 1) {
                let (mut num, mut den) = (0.0, 0.0);
                for qy in (py - r).max(0)..=(py + r).min(n as isize - 1) {
                    for qx in (px - r).max(0)..=(px + r).min(n as isize - 1) {
                        let d2 = ((qy - py).pow(2) + (qx - px).pow(2)) as f64;
                        let w = (-d2 / (2.0 * sigma * sigma)).exp();
                        num += w * obs.get(c, qy as usize, qx as usize);
                        den += w;
                    }
                }
                perturbed[(c * n + py as usize) * n + px as usize] = num / den;
            }
        }
    }
    let (a, _, _) =
        oracle::agent_step(genome, obs.pixels(), &state.h, &state.c, &state.last_action);
    let (b, _, _) = oracle::agent_step(genome, &perturbed, &state.h, &state.c, &state.last_action);
    a.iter().zip(&b).map(|(p, q)| (p - q).abs()).sum()
}

pub fn check_saliency(seed: u64, genomes: usize) -> Result<Check> {
    let arch = toy_arch();
    let cfg = SaliencyConfig::default();
    let mut rng = RandomSource::new(seed, 0x5A1);
    let mut zero_case_max = 0.0f64;
    let mut worst = 0.0f64;
    for _ in 0..genomes {
        let g: Genome<f64> = Genome::init(&arch, &mut rng)?;
        let mut state = AgentState::zeros(arch.z_dim, arch.hidden_dim, arch.action_dim);
        state.h = random_vec(&mut rng, arch.hidden_dim);
        state.c = random_vec(&mut rng, arch.hidden_dim);
        state.last_action = random_vec(&mut rng, arch.action_dim);

        let color: Rgb = [rng.uniform(), rng.uniform(), rng.uniform()];
        let uniform = Observation::filled(arch.image_size, color);
        zero_case_max = zero_case_max.max(saliency_map(&g, &uniform, &state, &cfg)?.max());

        let obs = random_observation(&mut rng, arch.image_size);
        let silent = g.with_segment(Component::Controller, vec![0.0; g.controller().len()])?;
        zero_case_max = zero_case_max.max(saliency_map(&silent, &obs, &state, &cfg)?.max());

        let map = saliency_map(&g, &obs, &state, &cfg)?;
        let (y, x) = (rng.below(arch.image_size), rng.below(arch.image_size));
        let want = saliency_by_two_passes(&g, &obs, &state, y, x, cfg.blur_size, cfg.sigma());
        worst = worst.max((map.get(y, x) - want).abs());
    }
    Ok(Check::new(
        "saliency",
        zero_case_max == 0.0 && worst <= 1e-9,
        format!("{genomes} toy genomes, zero-case max {zero_case_max:e}, two-pass max error {worst:.2e}"),
    ))
}

pub fn check_golden_frames(fixture: &str) -> Result<Check> {
    let expected: Vec<GoldenEpisode> = fixture
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(GoldenEpisode::parse_line)
        .collect::<Result<_>>()?;
    let mut bad = Vec::new();
    for (kind, seed) in GOLDEN_CASES {
        let got = run_golden_episode(kind, seed)?;
        if !expected.contains(&got) {
            bad.push(got.to_line());
        }
    }
    Ok(Check::new(
        "golden frames",
        bad.is_empty() && expected.len() == GOLDEN_CASES.len(),
        format!(
            "{} episodes, {} differ{}",
            GOLDEN_CASES.len(),
            bad.len(),
            bad.first()
                .map(|b| format!(", got `{b}`"))
                .unwrap_or_default()
        ),
    ))
}

/// Every check at its default size.
pub fn run_verify() -> Result<Vec<Check>> {
    Ok(vec![
        check_param_counts()?,
        check_nsga(1, 200)?,
        check_forward_passes(2, 100)?,
        check_mutation_stats(3, 30_000, 0.03)?,
        check_age_bookkeeping(6)?,
        check_saliency(4, 50)?,
        check_golden_frames(GOLDEN_FIXTURE)?,
    ])
}
