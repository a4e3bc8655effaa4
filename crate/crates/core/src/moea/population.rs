use super::pareto::{
    crowding_distance, dominates_point, nondominated_sort, ObjectivePoint, ObjectiveSet,
};
use crate::error::{DipError, Result};
use crate::genome::{Component, Genome};

#[derive(Clone, Debug, PartialEq)]
pub struct Individual<T> {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub genome: Genome<T>,
    pub age: u32,
    /// Accumulated episode reward; `None` until evaluated.
    pub reward: Option<f64>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
    /// Component mutated to produce this individual; `None` for the initial population.
    pub birth: Option<Component>,
}

impl<T> Individual<T> {
    pub fn new(id: u64, genome: Genome<T>) -> Self {
        Self {
            id,
            parent_id: None,
            genome,
            age: 0,
            reward: None,
            rank: None,
            crowding: None,
            birth: None,
        }
    }

    pub fn objectives(&self) -> Result<ObjectivePoint> {
        let reward = self.reward.ok_or_else(|| {
            DipError::logic(format!("individual {} has not been evaluated", self.id))
        })?;
        Ok(ObjectivePoint::new(self.age, reward))
    }

    pub fn reward_or_min(&self) -> f64 {
        self.reward.unwrap_or(f64::NEG_INFINITY)
    }
}

/// Age-and-reward Pareto dominance; errors if either side is unevaluated.
pub fn dominates<T>(a: &Individual<T>, b: &Individual<T>) -> Result<bool> {
    Ok(dominates_point(
        &a.objectives()?,
        &b.objectives()?,
        ObjectiveSet::AgeAndReward,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population<T> {
    pub members: Vec<Individual<T>>,
    pub generation: u64,
    /// Next unused individual id.
    pub next_id: u64,
}

impl<T> Population<T> {
    pub fn new(members: Vec<Individual<T>>, generation: u64) -> Self {
        let next_id = members.iter().map(|m| m.id + 1).max().unwrap_or(0);
        Self {
            members,
            generation,
            next_id,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn points(&self) -> Result<Vec<ObjectivePoint>> {
        self.members.iter().map(Individual::objectives).collect()
    }

    /// Non-dominated sort plus crowding; writes `rank` and `crowding` on every member.
    pub fn assign_ranks(&mut self, set: ObjectiveSet) -> Result<Vec<Vec<usize>>> {
        let points = self.points()?;
        let fronts = nondominated_sort(&points, set);
        for (rank, front) in fronts.iter().enumerate() {
            let dist = crowding_distance(front, &points, set);
            for (&i, d) in front.iter().zip(dist) {
                self.members[i].rank = Some(rank);
                self.members[i].crowding = Some(d);
            }
        }
        Ok(fronts)
    }

    pub fn best(&self) -> Option<&Individual<T>> {
        self.members
            .iter()
            .fold(None, |best: Option<&Individual<T>>, m| match best {
                Some(b) if b.reward_or_min() >= m.reward_or_min() => Some(b),
                _ => Some(m),
            })
    }

    pub fn mean_age(&self) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        self.members.iter().map(|m| m.age as f64).sum::<f64>() / self.members.len() as f64
    }
}
