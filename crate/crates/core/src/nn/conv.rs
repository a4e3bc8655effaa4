use super::{LayerKind, LayerSpec, Tensor, TensorShape};
use crate::error::{DipError, Result};
use crate::scalar::Scalar;

/// Valid-padding output extent along one axis, or `None` if the kernel does
/// not fit.
pub fn conv_output_size(input: usize, kernel: usize, stride: usize) -> Option<usize> {
    if kernel == 0 || stride == 0 || input < kernel {
        None
    } else {
        Some((input - kernel) / stride + 1)
    }
}

/// 2-D convolution over a `[c][h][w]` image with valid padding.
pub fn conv2d_forward<T: Scalar>(
    input: &Tensor<T>,
    weights: &[T],
    spec: &LayerSpec,
) -> Result<Tensor<T>> {
    if spec.kind != LayerKind::Conv {
        return Err(DipError::shape(
            &spec.name,
            "conv layer",
            format!("{:?}", spec.kind),
        ));
    }
    let dims = input.shape().dims();
    if dims.len() != 3 || dims[0] != spec.in_size {
        return Err(DipError::shape(
            &spec.name,
            format!("input {}xHxW", spec.in_size),
            input.shape(),
        ));
    }
    if weights.len() != spec.param_count() {
        return Err(DipError::shape(
            &spec.name,
            format!("{} parameters", spec.param_count()),
            weights.len(),
        ));
    }
    let (cin, h, w) = (dims[0], dims[1], dims[2]);
    let k = spec.kernel;
    let s = spec.stride;
    let (oh, ow) = match (conv_output_size(h, k, s), conv_output_size(w, k, s)) {
        (Some(oh), Some(ow)) => (oh, ow),
        _ => {
            return Err(DipError::shape(
                &spec.name,
                format!("spatial extent >= kernel {k}"),
                input.shape(),
            ))
        }
    };
    let cout = spec.out_size;
    let (kernels, biases) = weights.split_at(cout * cin * k * k);
    let x = input.data();
    let mut out = vec![T::zero(); cout * oh * ow];

    for oc in 0..cout {
        let wk = &kernels[oc * cin * k * k..(oc + 1) * cin * k * k];
        let plane = &mut out[oc * oh * ow..(oc + 1) * oh * ow];
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = biases[oc];
                for ic in 0..cin {
                    let xc = &x[ic * h * w..(ic + 1) * h * w];
                    let wc = &wk[ic * k * k..(ic + 1) * k * k];
                    for ky in 0..k {
                        let row = (oy * s + ky) * w + ox * s;
                        let xr = &xc[row..row + k];
                        let wr = &wc[ky * k..(ky + 1) * k];
                        for (a, b) in xr.iter().zip(wr) {
                            acc += *a * *b;
                        }
                    }
                }
                plane[oy * ow + ox] = spec.activation.apply(acc);
            }
        }
    }
    Tensor::new(TensorShape::image(cout, oh, ow)?, out)
}
