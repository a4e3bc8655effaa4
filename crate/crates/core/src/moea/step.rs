use std::cmp::Ordering;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pareto::{dominates_point, ObjectiveSet};
use super::population::{Individual, Population};
use super::protection::{apply_protection, ProtectionPolicy};
use super::selection::select_parents;
use crate::error::{DipError, Result};
use crate::genome::{ArchitectureConfig, Genome};
use crate::rng::{tags, RandomSource};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalPurpose {
    Training,
    Reevaluation,
    Holdout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalContext {
    pub generation: u64,
    /// Position of the genome within its evaluation batch.
    pub index: usize,
    pub purpose: EvalPurpose,
}

/// Scores a genome. Implementations must be pure functions of
/// `(genome, ctx)` so that results do not depend on scheduling.
pub trait Evaluator<T: Scalar>: Sync {
    fn evaluate(&self, genome: &Genome<T>, ctx: &EvalContext) -> Result<f64>;

    /// Reward assigned when evaluation fails.
    fn min_reward(&self) -> f64;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalFailure {
    pub id: u64,
    pub generation: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub generation: u64,
    /// Children produced per component (visual, memory, controller).
    pub mutations: [u32; 3],
    /// Children whose age was reset to zero, per mutated component.
    pub resets: [u32; 3],
    /// Children that made it into the next population.
    pub children_survived: u32,
    pub failures: Vec<EvalFailure>,
}

/// Evaluate a batch concurrently; results come back in input order.
pub fn evaluate_genomes<T: Scalar, E: Evaluator<T> + ?Sized>(
    genomes: &[&Genome<T>],
    generation: u64,
    purpose: EvalPurpose,
    evaluator: &E,
) -> Vec<Result<f64>> {
    genomes
        .par_iter()
        .enumerate()
        .map(|(index, g)| {
            evaluator.evaluate(
                g,
                &EvalContext {
                    generation,
                    index,
                    purpose,
                },
            )
        })
        .collect()
}

fn settle<T>(
    members: &mut [Individual<T>],
    results: Vec<Result<f64>>,
    generation: u64,
    min_reward: f64,
    failures: &mut Vec<EvalFailure>,
) {
    for (m, r) in members.iter_mut().zip(results) {
        match r {
            Ok(v) if v.is_finite() => m.reward = Some(v),
            other => {
                let message = match other {
                    Err(e) => e.to_string(),
                    Ok(v) => format!("non-finite reward {v}"),
                };
                warn!(
                    "generation {generation}: individual {} evaluation failed: {message}",
                    m.id
                );
                m.reward = Some(min_reward);
                failures.push(EvalFailure {
                    id: m.id,
                    generation,
                    message,
                });
            }
        }
    }
}

/// Random initial population of size `n`, ages zero, evaluated at generation 0.
pub fn initialize_population<T: Scalar, E: Evaluator<T> + ?Sized>(
    arch: &ArchitectureConfig,
    n: usize,
    seed: u64,
    evaluator: &E,
) -> Result<(Population<T>, Vec<EvalFailure>)> {
    if n == 0 {
        return Err(DipError::config("population size must be >= 1"));
    }
    let mut members = (0..n)
        .map(|i| {
            let mut rng = RandomSource::derive(seed, &[tags::INIT, i as u64]);
            Ok(Individual::new(i as u64, Genome::init(arch, &mut rng)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let genomes: Vec<&Genome<T>> = members.iter().map(|m| &m.genome).collect();
    let results = evaluate_genomes(&genomes, 0, EvalPurpose::Training, evaluator);
    let mut failures = Vec::new();
    settle(
        &mut members,
        results,
        0,
        evaluator.min_reward(),
        &mut failures,
    );
    Ok((Population::new(members, 0), failures))
}

/// No member of front 0 may be dominated by any member of the population.
fn check_front_soundness<T>(pop: &Population<T>, set: ObjectiveSet) -> Result<()> {
    let points = pop.points()?;
    for (i, m) in pop.members.iter().enumerate() {
        if m.rank != Some(0) {
            continue;
        }
        if let Some(j) = (0..points.len()).find(|&j| dominates_point(&points[j], &points[i], set)) {
            return Err(DipError::logic(format!(
                "front-0 member {} dominated by {}",
                m.id, pop.members[j].id
            )));
        }
    }
    Ok(())
}

/// One elitist NSGA-II generation.
///
/// Ages advance, the population is ranked, `N` children are bred by binary
/// tournament from the top half and single-component mutation, protection
/// rules set the children's ages, children are evaluated, and the best `N`
/// of parents ∪ children survive by front then crowding distance.
///
/// Every random draw comes from a stream derived from
/// `(seed, generation, purpose, index)`.
pub fn generation_step<T: Scalar, E: Evaluator<T> + ?Sized>(
    mut pop: Population<T>,
    policy: &ProtectionPolicy,
    evaluator: &E,
    sigma: f64,
    seed: u64,
) -> Result<(Population<T>, StepReport)> {
    if pop.is_empty() {
        return Err(DipError::logic("generation step on an empty population"));
    }
    if !(sigma > 0.0) {
        return Err(DipError::config(format!(
            "mutation sigma must be > 0, got {sigma}"
        )));
    }
    let n = pop.len();
    let generation = pop.generation + 1;
    let set = policy.objectives();
    let mut report = StepReport {
        generation,
        ..Default::default()
    };

    for (i, m) in pop.members.iter_mut().enumerate() {
        let mut rng = RandomSource::derive(seed, &[tags::AGE, generation, i as u64]);
        m.age = policy.advance_age(m.age, &mut rng);
    }
    pop.assign_ranks(set)?;

    let mut select_rng = RandomSource::derive(seed, &[tags::SELECT, generation]);
    let parents = select_parents(&pop, n, &mut select_rng)?;

    let mut children = Vec::with_capacity(n);
    for (k, &pi) in parents.iter().enumerate() {
        let parent = &pop.members[pi];
        let mut rng = RandomSource::derive(seed, &[tags::MUTATE, generation, k as u64]);
        let (genome, event) = parent.genome.mutate(sigma, &mut rng);
        let mut child = Individual::new(pop.next_id + k as u64, genome);
        child.parent_id = Some(parent.id);
        child.age = parent.age;
        let child = apply_protection(&event, child, policy, &mut rng);
        report.mutations[event.component.index()] += 1;
        if policy.resets_on(event.component) {
            report.resets[event.component.index()] += 1;
        }
        children.push(child);
    }

    let genomes: Vec<&Genome<T>> = children.iter().map(|c| &c.genome).collect();
    let results = evaluate_genomes(&genomes, generation, EvalPurpose::Training, evaluator);
    settle(
        &mut children,
        results,
        generation,
        evaluator.min_reward(),
        &mut report.failures,
    );

    let next_id = pop.next_id + n as u64;
    let mut merged = pop.members;
    merged.extend(children);
    let mut merged = Population {
        members: merged,
        generation,
        next_id,
    };
    let fronts = merged.assign_ranks(set)?;
    if cfg!(debug_assertions) {
        check_front_soundness(&merged, set)?;
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            if chosen.len() == n {
                break;
            }
            continue;
        }
        let mut front = front;
        front.sort_by(|&a, &b| {
            let (ma, mb) = (&merged.members[a], &merged.members[b]);
            mb.crowding
                .partial_cmp(&ma.crowding)
                .unwrap_or(Ordering::Equal)
                .then_with(|| {
                    mb.reward_or_min()
                        .partial_cmp(&ma.reward_or_min())
                        .unwrap_or(Ordering::Equal)
                })
                .then(a.cmp(&b))
        });
        chosen.extend(front.into_iter().take(n - chosen.len()));
        break;
    }
    chosen.sort_unstable();
    report.children_survived = chosen.iter().filter(|&&i| i >= n).count() as u32;

    let mut slots: Vec<Option<Individual<T>>> = merged.members.into_iter().map(Some).collect();
    let survivors: Vec<Individual<T>> = chosen
        .into_iter()
        .map(|i| slots[i].take().expect("index chosen once"))
        .collect();
    let mut next = Population {
        members: survivors,
        generation,
        next_id,
    };
    next.assign_ranks(set)?;
    Ok((next, report))
}
