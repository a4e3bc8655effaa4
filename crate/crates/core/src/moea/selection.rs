use std::cmp::Ordering;

use super::population::{Individual, Population};
use crate::error::{DipError, Result};
use crate::rng::RandomSource;

fn key<T>(m: &Individual<T>) -> Result<(usize, f64)> {
    match (m.rank, m.crowding) {
        (Some(r), Some(c)) => Ok((r, c)),
        _ => Err(DipError::logic(format!(
            "individual {} selected before ranking",
            m.id
        ))),
    }
}

/// Crowded-comparison: lower rank wins, then larger crowding distance.
fn crowded_cmp(a: (usize, f64), b: (usize, f64)) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
}

/// Member indices sorted best-first by (rank asc, crowding desc, reward desc, index).
pub fn crowded_order<T>(pop: &Population<T>) -> Result<Vec<usize>> {
    let keys: Vec<(usize, f64)> = pop.members.iter().map(key).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| {
        crowded_cmp(keys[a], keys[b])
            .then_with(|| {
                pop.members[b]
                    .reward_or_min()
                    .partial_cmp(&pop.members[a].reward_or_min())
                    .unwrap_or(Ordering::Equal)
            })
            .then(a.cmp(&b))
    });
    Ok(order)
}

/// The top half (rounded up) of the population under the crowded ordering.
pub fn eligible_pool<T>(pop: &Population<T>) -> Result<Vec<usize>> {
    let mut order = crowded_order(pop)?;
    order.truncate(pop.len().div_ceil(2).max(1));
    Ok(order)
}

/// `n` binary tournaments between two distinct members of the eligible pool.
/// Returns member indices of the winners.
pub fn select_parents<T>(
    pop: &Population<T>,
    n: usize,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    if pop.is_empty() {
        return Err(DipError::logic(
            "cannot select parents from an empty population",
        ));
    }
    let pool = eligible_pool(pop)?;
    let m = pool.len();
    let mut winners = Vec::with_capacity(n);
    for _ in 0..n {
        if m == 1 {
            winners.push(pool[0]);
            continue;
        }
        let a = rng.below(m);
        let mut b = rng.below(m - 1);
        if b >= a {
            b += 1;
        }
        let (ia, ib) = (pool[a], pool[b]);
        let winner = match crowded_cmp(key(&pop.members[ia])?, key(&pop.members[ib])?) {
            Ordering::Less => ia,
            Ordering::Greater => ib,
            Ordering::Equal => {
                if rng.coin() {
                    ia
                } else {
                    ib
                }
            }
        };
        winners.push(winner);
    }
    Ok(winners)
}
