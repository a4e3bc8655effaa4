use crate::rng::RandomSource;
use crate::scalar::Scalar;

/// `count` draws from `U(-bound, bound)` with `bound = sqrt(1 / fan_in)`.
///
/// # Panics
/// If `fan_in` is zero.
pub fn he_uniform_init<T: Scalar>(fan_in: usize, count: usize, rng: &mut RandomSource) -> Vec<T> {
    assert!(fan_in >= 1, "fan_in must be positive");
    let bound = (1.0 / fan_in as f64).sqrt();
    (0..count)
        .map(|_| T::lit(rng.uniform_in(-bound, bound)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_respected() {
        let mut rng = RandomSource::new(1, 0);
        let a: Vec<f64> = he_uniform_init(1, 1000, &mut rng);
        assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
        let b: Vec<f64> = he_uniform_init(4, 1000, &mut rng);
        assert!(b.iter().all(|v| (-0.5..=0.5).contains(v)));
    }

    #[test]
    fn statistical_check_fan_in_9() {
        let mut rng = RandomSource::new(42, 9);
        let n = 100_000;
        let v: Vec<f64> = he_uniform_init(9, n, &mut rng);
        let bound = 1.0 / 3.0;
        let mean = v.iter().sum::<f64>() / n as f64;
        // sd of U(-b, b) is b / sqrt(3)
        let sd = bound / 3f64.sqrt();
        assert!(mean.abs() < 3.0 * sd / (n as f64).sqrt(), "mean {mean}");
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(min >= -bound && max <= bound);
        assert!(min < -0.99 * bound && max > 0.99 * bound);
    }

    #[test]
    fn deterministic() {
        let a: Vec<f32> = he_uniform_init(7, 50, &mut RandomSource::new(3, 3));
        let b: Vec<f32> = he_uniform_init(7, 50, &mut RandomSource::new(3, 3));
        assert_eq!(a, b);
    }
}
