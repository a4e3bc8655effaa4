use super::sigmoid;
use crate::error::{DipError, Result};
use crate::scalar::Scalar;

pub fn lstm_param_count(in_size: usize, hidden: usize) -> usize {
    4 * (hidden * (in_size + hidden) + hidden)
}

/// One LSTM step. Gate blocks are ordered (input, forget, candidate, output).
///
/// Returns `(h', c')` with `c' = f∘c + i∘g` and `h' = o∘tanh(c')`.
pub fn lstm_cell_forward<T: Scalar>(
    x: &[T],
    h: &[T],
    c: &[T],
    weights: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    let hidden = h.len();
    let in_size = x.len();
    if hidden == 0 || c.len() != hidden {
        return Err(DipError::shape(
            "lstm",
            format!("cell state length {hidden}"),
            c.len(),
        ));
    }
    let expected = lstm_param_count(in_size, hidden);
    if weights.len() != expected {
        return Err(DipError::shape(
            "lstm",
            format!("{expected} parameters"),
            weights.len(),
        ));
    }

    let cols = in_size + hidden;
    let block = hidden * cols + hidden;
    let pre = |gate: usize, j: usize| -> T {
        let base = gate * block;
        let row = &weights[base + j * cols..base + (j + 1) * cols];
        let bias = weights[base + hidden * cols + j];
        let (wx, wh) = row.split_at(in_size);
        let acc = wx.iter().zip(x).fold(bias, |acc, (&w, &v)| acc + w * v);
        wh.iter().zip(h).fold(acc, |acc, (&w, &v)| acc + w * v)
    };

    let mut h_next = Vec::with_capacity(hidden);
    let mut c_next = Vec::with_capacity(hidden);
    for j in 0..hidden {
        let i = sigmoid(pre(0, j));
        let f = sigmoid(pre(1, j));
        let g = pre(2, j).tanh();
        let o = sigmoid(pre(3, j));
        let cj = f * c[j] + i * g;
        c_next.push(cj);
        h_next.push(o * cj.tanh());
    }
    Ok((h_next, c_next))
}
