use std::cmp::Ordering;

/// Which objectives enter dominance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveSet {
    /// Minimize age, maximize reward.
    AgeAndReward,
    /// Maximize reward; age is ignored.
    RewardOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectivePoint {
    pub age: u32,
    pub reward: f64,
}

impl ObjectivePoint {
    pub fn new(age: u32, reward: f64) -> Self {
        Self { age, reward }
    }

    /// Objective values oriented so that smaller is better.
    fn minimized(&self, set: ObjectiveSet) -> ([f64; 2], usize) {
        match set {
            ObjectiveSet::AgeAndReward => ([self.age as f64, -self.reward], 2),
            ObjectiveSet::RewardOnly => ([-self.reward, 0.0], 1),
        }
    }
}

pub fn dominates_point(a: &ObjectivePoint, b: &ObjectivePoint, set: ObjectiveSet) -> bool {
    match set {
        ObjectiveSet::AgeAndReward => {
            a.age <= b.age && a.reward >= b.reward && (a.age < b.age || a.reward > b.reward)
        }
        ObjectiveSet::RewardOnly => a.reward > b.reward,
    }
}

/// Fast non-dominated sort. Front 0 holds the points nobody dominates; each
/// front lists indices in ascending order.
pub fn nondominated_sort(points: &[ObjectivePoint], set: ObjectiveSet) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_point(&points[i], &points[j], set) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_point(&points[j], &points[i], set) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
///
/// Per objective the boundary members get infinity and interior members
/// accumulate `(f[next] - f[prev]) / (f_max - f_min)`. Objectives with zero
/// range contribute nothing.
pub fn crowding_distance(
    front: &[usize],
    points: &[ObjectivePoint],
    set: ObjectiveSet,
) -> Vec<f64> {
    let m = front.len();
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let values: Vec<([f64; 2], usize)> = front.iter().map(|&i| points[i].minimized(set)).collect();
    let n_obj = values[0].1;
    let mut dist = vec![0.0f64; m];
    let mut order: Vec<usize> = (0..m).collect();
    for k in 0..n_obj {
        order.sort_by(|&a, &b| {
            values[a].0[k]
                .partial_cmp(&values[b].0[k])
                .unwrap_or(Ordering::Equal)
                .then(front[a].cmp(&front[b]))
        });
        let lo = values[order[0]].0[k];
        let hi = values[order[m - 1]].0[k];
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..m - 1 {
            let gap = values[order[w + 1]].0[k] - values[order[w - 1]].0[k];
            dist[order[w]] += gap / range;
        }
    }
    dist
}
