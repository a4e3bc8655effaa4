use super::{linear_forward, LayerSpec};
use crate::error::Result;
use crate::scalar::Scalar;

pub fn mdn_param_count(hidden: usize, n_mixtures: usize, z_dim: usize) -> usize {
    LayerSpec::mdn_head("mdn", hidden, n_mixtures, z_dim).param_count()
}

/// Raw mixture-density outputs, each `[z][k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureParams<T> {
    pub n_mixtures: usize,
    pub z_dim: usize,
    pub logits: Vec<T>,
    pub means: Vec<T>,
    pub log_scales: Vec<T>,
}

impl<T: Scalar> MixtureParams<T> {
    /// Softmax of the mixture logits for latent dimension `d`.
    pub fn mixture_weights(&self, d: usize) -> Vec<T> {
        let k = self.n_mixtures;
        let logits = &self.logits[d * k..(d + 1) * k];
        let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
        let sum = exps.iter().copied().fold(T::zero(), |a, b| a + b);
        exps.into_iter().map(|e| e / sum).collect()
    }
}

pub fn mdn_head_forward<T: Scalar>(
    h: &[T],
    weights: &[T],
    n_mixtures: usize,
    z_dim: usize,
) -> Result<MixtureParams<T>> {
    let spec = LayerSpec::mdn_head("mdn", h.len(), n_mixtures, z_dim);
    let out = linear_forward(h, weights, &spec)?;
    let group = n_mixtures * z_dim;
    Ok(MixtureParams {
        n_mixtures,
        z_dim,
        logits: out[..group].to_vec(),
        means: out[group..2 * group].to_vec(),
        log_scales: out[2 * group..].to_vec(),
    })
}
