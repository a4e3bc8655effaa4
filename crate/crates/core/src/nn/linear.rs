use super::{LayerKind, LayerSpec};
use crate::error::{DipError, Result};
use crate::scalar::Scalar;

/// `y[j] = act(Σᵢ W[j,i]·x[i] + b[j])`.
pub fn linear_forward<T: Scalar>(input: &[T], weights: &[T], spec: &LayerSpec) -> Result<Vec<T>> {
    if !matches!(spec.kind, LayerKind::Linear | LayerKind::MdnHead) {
        return Err(DipError::shape(
            &spec.name,
            "linear layer",
            format!("{:?}", spec.kind),
        ));
    }
    if input.len() != spec.in_size {
        return Err(DipError::shape(
            &spec.name,
            format!("input length {}", spec.in_size),
            input.len(),
        ));
    }
    if weights.len() != spec.param_count() {
        return Err(DipError::shape(
            &spec.name,
            format!("{} parameters", spec.param_count()),
            weights.len(),
        ));
    }
    let (w, b) = weights.split_at(spec.out_size * spec.in_size);
    Ok(w.chunks_exact(spec.in_size)
        .zip(b)
        .map(|(row, &bias)| {
            let acc = row
                .iter()
                .zip(input)
                .fold(bias, |acc, (&wi, &xi)| acc + wi * xi);
            spec.activation.apply(acc)
        })
        .collect())
}
