use crate::error::{DipError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ActivationTrace {
    /// Mean over hidden units at each step.
    pub step_means: Vec<f64>,
    pub episode_mean: f64,
    /// `(episode_mean - step_mean)²`, min-max normalized to [0, 1].
    pub variance: Vec<f64>,
}

/// Activation variance of an episode's hidden states. A sequence whose raw
/// variances are all equal normalizes to zeros.
pub fn activation_variance<T: Scalar>(hidden: &[Vec<T>]) -> Result<ActivationTrace> {
    if hidden.is_empty() {
        return Err(DipError::config(
            "activation variance needs at least one step",
        ));
    }
    let step_means: Vec<f64> = hidden
        .iter()
        .map(|h| {
            if h.is_empty() {
                return Err(DipError::config("empty hidden state in trace"));
            }
            Ok(h.iter().map(|v| v.as_f64()).sum::<f64>() / h.len() as f64)
        })
        .collect::<Result<_>>()?;
    let episode_mean = step_means.iter().sum::<f64>() / step_means.len() as f64;
    let raw: Vec<f64> = step_means
        .iter()
        .map(|m| (episode_mean - m).powi(2))
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let variance = if hi > lo {
        raw.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; raw.len()]
    };
    Ok(ActivationTrace {
        step_means,
        episode_mean,
        variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trace_is_zero() {
        let t = activation_variance(&vec![vec![0.3f64, -0.1]; 7]).unwrap();
        assert_eq!(t.variance, vec![0.0; 7]);
    }

    #[test]
    fn symmetric_two_point() {
        let t = activation_variance(&[vec![0.0f64, 0.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(t.episode_mean, 1.0);
        assert_eq!(t.variance, vec![0.0, 0.0]);
    }
}
