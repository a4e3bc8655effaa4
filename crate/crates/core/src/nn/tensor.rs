use std::fmt;

use crate::error::{DipError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(DipError::config(format!(
                "tensor dims must be non-empty and positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn vector(len: usize) -> Result<Self> {
        Self::new(vec![len])
    }

    pub fn image(channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(vec![channels, height, width])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn numel(&self) -> usize {
        self.dims.iter().product()
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: TensorShape,
    data: Vec<T>,
}

impl<T> Tensor<T> {
    pub fn new(shape: TensorShape, data: Vec<T>) -> Result<Self> {
        if shape.numel() != data.len() {
            return Err(DipError::shape(
                "tensor",
                format!("{} elements for shape {shape}", shape.numel()),
                data.len(),
            ));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numel_is_product() {
        assert_eq!(TensorShape::image(3, 64, 64).unwrap().numel(), 12288);
    }

    #[test]
    fn zero_dim_rejected() {
        assert!(TensorShape::new(vec![3, 0]).is_err());
        assert!(TensorShape::new(vec![]).is_err());
    }

    #[test]
    fn data_length_checked() {
        let s = TensorShape::vector(3).unwrap();
        assert!(Tensor::new(s, vec![1.0, 2.0]).is_err());
    }
}
