use std::cmp::Ordering;

use super::agent::{rollout, WorldModel};
use crate::envs::EnvConfig;
use crate::error::{DipError, Result};
use crate::genome::Genome;
use crate::moea::{evaluate_genomes, EvalContext, EvalPurpose, Evaluator, Population};
use crate::rng::{tags, RandomSource};
use crate::scalar::Scalar;

pub fn episode_seeds(rng: &mut RandomSource, n: usize) -> Vec<u64> {
    (0..n).map(|_| rng.next_u64()).collect()
}

/// Mean total reward over `n_rollouts` fresh episodes whose seeds are drawn from `rng`.
pub fn evaluate<T: Scalar>(
    genome: &Genome<T>,
    env: &EnvConfig,
    n_rollouts: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if n_rollouts == 0 {
        return Err(DipError::config("rollouts per evaluation must be >= 1"));
    }
    let model = WorldModel::new(genome)?;
    let mut total = 0.0;
    for seed in episode_seeds(rng, n_rollouts) {
        total += rollout(&model, env, seed, |_| {})?.total_reward;
    }
    Ok(total / n_rollouts as f64)
}

/// Rollout-based evaluator. Episode seeds depend on the master seed, the
/// generation and the purpose, but not on the individual: every member of a
/// generation faces the same episodes.
#[derive(Clone, Debug)]
pub struct RolloutEvaluator {
    pub env: EnvConfig,
    pub rollouts: usize,
    pub seed: u64,
}

impl RolloutEvaluator {
    pub fn new(env: EnvConfig, rollouts: usize, seed: u64) -> Self {
        Self {
            env,
            rollouts,
            seed,
        }
    }

    pub fn seed_source(&self, ctx: &EvalContext) -> RandomSource {
        let purpose = match ctx.purpose {
            EvalPurpose::Training => tags::EPISODE,
            EvalPurpose::Reevaluation => tags::REEVAL,
            EvalPurpose::Holdout => tags::HOLDOUT,
        };
        RandomSource::derive(self.seed, &[purpose, ctx.generation])
    }
}

impl<T: Scalar> Evaluator<T> for RolloutEvaluator {
    fn evaluate(&self, genome: &Genome<T>, ctx: &EvalContext) -> Result<f64> {
        evaluate(genome, &self.env, self.rollouts, &mut self.seed_source(ctx))
    }

    fn min_reward(&self) -> f64 {
        self.env.min_reward()
    }
}

/// Evaluates the `k` highest-reward members once more and stores the mean of
/// the old and new reward.
pub fn reevaluate_elites<T: Scalar, E: Evaluator<T> + ?Sized>(
    mut pop: Population<T>,
    k: usize,
    evaluator: &E,
) -> Result<Population<T>> {
    if k == 0 || pop.is_empty() {
        return Ok(pop);
    }
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| {
        pop.members[b]
            .reward_or_min()
            .partial_cmp(&pop.members[a].reward_or_min())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    let genomes: Vec<&Genome<T>> = order.iter().map(|&i| &pop.members[i].genome).collect();
    let results = evaluate_genomes(
        &genomes,
        pop.generation,
        EvalPurpose::Reevaluation,
        evaluator,
    );
    for (&i, r) in order.iter().zip(results) {
        let m = &mut pop.members[i];
        let old = m.reward.ok_or_else(|| {
            DipError::logic(format!("re-evaluating unevaluated individual {}", m.id))
        })?;
        let new = match r {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                log::warn!("re-evaluation of {} returned non-finite {v}", m.id);
                evaluator.min_reward()
            }
            Err(e) => {
                log::warn!("re-evaluation of {} failed: {e}", m.id);
                evaluator.min_reward()
            }
        };
        m.reward = Some(0.5 * (old + new));
    }
    Ok(pop)
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

    use super::*;
    use crate::genome::ArchitectureConfig;
    use crate::moea::Individual;

    struct Fixed(f64);

    impl Evaluator<f64> for Fixed {
        fn evaluate(&self, _: &Genome<f64>, _: &EvalContext) -> Result<f64> {
            Ok(self.0)
        }
        fn min_reward(&self) -> f64 {
            0.0
        }
    }

    /// Returns 100 on the first call and 50 afterwards.
    struct Sequenced(AtomicUsize);

    impl Evaluator<f64> for Sequenced {
        fn evaluate(&self, _: &Genome<f64>, _: &EvalContext) -> Result<f64> {
            Ok(if self.0.fetch_add(1, AtomicOrdering::SeqCst) == 0 {
                100.0
            } else {
                50.0
            })
        }
        fn min_reward(&self) -> f64 {
            0.0
        }
    }

    fn pop(rewards: &[f64]) -> Population<f64> {
        let g = Genome::zeros(&ArchitectureConfig::desk_scale(1)).unwrap();
        let members = rewards
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut m = Individual::new(i as u64, g.clone());
                m.reward = Some(r);
                m
            })
            .collect();
        Population::new(members, 1)
    }

    #[test]
    fn deterministic_env_leaves_reward() {
        let p = reevaluate_elites(pop(&[7.0, 7.0, 7.0, 7.0]), 3, &Fixed(7.0)).unwrap();
        assert!(p.members.iter().all(|m| m.reward == Some(7.0)));
    }

    #[test]
    fn k_zero_is_identity() {
        let before = pop(&[1.0, 2.0]);
        let after = reevaluate_elites(before.clone(), 0, &Fixed(99.0)).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn averages_old_and_new() {
        let ev = Sequenced(AtomicUsize::new(0));
        let first = ev.evaluate(
            &Genome::zeros(&ArchitectureConfig::desk_scale(1)).unwrap(),
            &EvalContext {
                generation: 0,
                index: 0,
                purpose: EvalPurpose::Training,
            },
        );
        assert_eq!(first.unwrap(), 100.0);
        let p = reevaluate_elites(pop(&[100.0, 1.0]), 1, &ev).unwrap();
        assert_eq!(p.members[0].reward, Some(75.0));
        assert_eq!(p.members[1].reward, Some(1.0));
    }

    #[test]
    fn only_top_k_touched() {
        let p = reevaluate_elites(pop(&[5.0, 9.0, 1.0, 7.0, 8.0]), 3, &Fixed(0.0)).unwrap();
        let r: Vec<f64> = p.members.iter().map(|m| m.reward.unwrap()).collect();
        assert_eq!(r, vec![5.0, 4.5, 1.0, 3.5, 4.0]);
    }

    #[test]
    fn single_rollout_equals_episode_total() {
        let arch = ArchitectureConfig::desk_scale(1);
        let g: Genome<f64> = Genome::init(&arch, &mut RandomSource::new(4, 4)).unwrap();
        let env = EnvConfig::dodge_desk();
        let mut rng = RandomSource::new(10, 10);
        let seed = RandomSource::new(10, 10).next_u64();
        let direct = rollout(&WorldModel::new(&g).unwrap(), &env, seed, |_| {}).unwrap();
        assert_eq!(
            evaluate(&g, &env, 1, &mut rng).unwrap(),
            direct.total_reward
        );
    }
}
