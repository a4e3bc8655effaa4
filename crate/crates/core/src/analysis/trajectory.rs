use std::collections::BTreeMap;

use crate::error::{DipError, Result};
use crate::genome::{weight_distance, Component, Genome};
use crate::harness::{EliteArchive, RunLog};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceRow {
    pub generation: u64,
    pub id: u64,
    /// Euclidean distance to the final genome, indexed by component.
    pub distances: [f64; 3],
    pub age: u32,
    pub population_mean_age: f64,
}

/// Distance of every archived elite to `final_genome`, per component.
pub fn distance_trajectory<T: Scalar>(
    archive: &EliteArchive<T>,
    final_genome: &Genome<T>,
) -> Result<Vec<DistanceRow>> {
    if archive.entries.is_empty() {
        return Err(DipError::config("elite archive is empty"));
    }
    archive
        .entries
        .iter()
        .map(|e| {
            let mut distances = [0.0; 3];
            for c in Component::ALL {
                distances[c.index()] = weight_distance(&e.genome, final_genome, c)?;
            }
            Ok(DistanceRow {
                generation: e.generation,
                id: e.id,
                distances,
                age: e.age,
                population_mean_age: e.population_mean_age,
            })
        })
        .collect()
}

pub fn distance_table_tsv(rows: &[DistanceRow]) -> String {
    let mut out =
        String::from("generation\tid\tvisual\tmemory\tcontroller\tage\tpopulation_mean_age\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.generation,
            r.id,
            r.distances[0],
            r.distances[1],
            r.distances[2],
            r.age,
            r.population_mean_age
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgeStat {
    pub age: u32,
    pub mean_reward: f64,
    pub count: u64,
}

/// Pools `(age, reward)` over every generation of every log and averages
/// the reward per age.
pub fn reward_age_stats(logs: &[RunLog]) -> Result<Vec<AgeStat>> {
    if logs.is_empty() {
        return Err(DipError::config(
            "reward/age statistics need at least one run log",
        ));
    }
    let mut groups: BTreeMap<u32, (u64, f64)> = BTreeMap::new();
    for record in logs.iter().flat_map(|l| &l.records) {
        for b in &record.age_histogram {
            let g = groups.entry(b.age).or_default();
            g.0 += u64::from(b.count);
            g.1 += b.reward_sum;
        }
    }
    Ok(groups
        .into_iter()
        .map(|(age, (count, sum))| AgeStat {
            age,
            mean_reward: sum / count as f64,
            count,
        })
        .collect())
}

pub fn reward_age_tsv(stats: &[AgeStat]) -> String {
    let mut out = String::from("age\tmean_reward\tcount\n");
    for s in stats {
        out.push_str(&format!("{}\t{}\t{}\n", s.age, s.mean_reward, s.count));
    }
    out
}
