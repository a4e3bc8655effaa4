//! Forward-only neural network primitives.
//!
//! Parameter segments are flat slices laid out in the canonical order:
//!
//! * conv: weights `[out][in][k][k]` row-major, then `out` biases;
//! * linear: weights `[out][in]` row-major, then `out` biases;
//! * LSTM cell: four gate blocks in the order (input, forget, candidate,
//!   output); each block is weights `[hidden][in + hidden]` (input columns
//!   first, then recurrent columns) followed by `hidden` biases;
//! * MDN head: a linear `hidden -> 3·K·Z` map whose outputs are grouped as
//!   `[logits | means | log-scales]`, each group `[z][k]`.
//!
//! Images are channel-major `[c][h][w]`.

mod conv;
mod init;
mod layer;
mod linear;
mod lstm;
mod mdn;
mod tensor;

pub use conv::{conv2d_forward, conv_output_size};
pub use init::he_uniform_init;
pub use layer::{Activation, LayerKind, LayerSpec};
pub use linear::linear_forward;
pub use lstm::{lstm_cell_forward, lstm_param_count};
pub use mdn::{mdn_head_forward, mdn_param_count, MixtureParams};
pub use tensor::{Tensor, TensorShape};

use crate::scalar::Scalar;

#[inline]
pub(crate) fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}
