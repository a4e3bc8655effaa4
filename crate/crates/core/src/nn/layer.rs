use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerKind {
    Conv,
    Linear,
    LstmCell,
    MdnHead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Relu => x.max(T::zero()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }
}

/// Shape and activation of one layer. For conv layers `in_size`/`out_size`
/// are channel counts; for the rest they are vector lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub in_size: usize,
    pub out_size: usize,
    pub kernel: usize,
    pub stride: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub const DEFAULT_STRIDE: usize = 2;

    pub fn conv(
        name: impl Into<String>,
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        activation: Activation,
    ) -> Self {
        Self {
            name: name.into(),
            kind: LayerKind::Conv,
            in_size: in_channels,
            out_size: out_channels,
            kernel,
            stride: Self::DEFAULT_STRIDE,
            activation,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn linear(
        name: impl Into<String>,
        in_size: usize,
        out_size: usize,
        activation: Activation,
    ) -> Self {
        Self {
            name: name.into(),
            kind: LayerKind::Linear,
            in_size,
            out_size,
            kernel: 1,
            stride: 1,
            activation,
        }
    }

    pub fn lstm_cell(name: impl Into<String>, in_size: usize, hidden: usize) -> Self {
        Self {
            name: name.into(),
            kind: LayerKind::LstmCell,
            in_size,
            out_size: hidden,
            kernel: 1,
            stride: 1,
            activation: Activation::Tanh,
        }
    }

    /// `out_size` is the raw output width `3·K·Z`.
    pub fn mdn_head(
        name: impl Into<String>,
        hidden: usize,
        n_mixtures: usize,
        z_dim: usize,
    ) -> Self {
        Self {
            name: name.into(),
            kind: LayerKind::MdnHead,
            in_size: hidden,
            out_size: 3 * n_mixtures * z_dim,
            kernel: 1,
            stride: 1,
            activation: Activation::Identity,
        }
    }

    /// Number of weights plus biases in this layer's flat segment.
    pub fn param_count(&self) -> usize {
        match self.kind {
            LayerKind::Conv => {
                self.out_size * self.in_size * self.kernel * self.kernel + self.out_size
            }
            LayerKind::Linear | LayerKind::MdnHead => self.out_size * self.in_size + self.out_size,
            LayerKind::LstmCell => super::lstm_param_count(self.in_size, self.out_size),
        }
    }

    /// Fan-in used by the uniform initializer.
    pub fn fan_in(&self) -> usize {
        match self.kind {
            LayerKind::Conv => self.in_size * self.kernel * self.kernel,
            LayerKind::Linear | LayerKind::MdnHead => self.in_size,
            LayerKind::LstmCell => self.out_size,
        }
    }
}
