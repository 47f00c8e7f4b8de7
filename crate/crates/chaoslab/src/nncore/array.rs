//! Contiguous row-major array with up to three dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl NumArray {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn scalar(v: f64) -> Self {
        Self {
            shape: vec![1],
            data: vec![v],
        }
    }

    pub fn from_vec(data: Vec<f64>, shape: &[usize]) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(ChaosError::ShapeMismatch(format!(
                "arrays support 1 to 3 dims, got {:?}",
                shape
            )));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(ChaosError::ShapeMismatch(format!(
                "{} values cannot fill shape {:?}",
                data.len(),
                shape
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn vector(data: Vec<f64>) -> Self {
        let shape = vec![data.len()];
        Self { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    /// Rows of a 2-D array (a vector counts as a single row).
    pub fn rows(&self) -> usize {
        if self.shape.len() >= 2 {
            self.shape[0]
        } else {
            1
        }
    }

    /// Columns of a 2-D array (a vector's length).
    pub fn cols(&self) -> usize {
        if self.shape.len() >= 2 {
            self.shape[1]
        } else {
            self.shape[0]
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn first(&self) -> f64 {
        self.data[0]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(NumArray::from_vec(vec![1.0; 6], &[2, 3]).is_ok());
        assert!(NumArray::from_vec(vec![1.0; 5], &[2, 3]).is_err());
        assert!(NumArray::from_vec(vec![1.0; 6], &[1, 2, 3]).is_ok());
        assert!(NumArray::from_vec(vec![1.0], &[]).is_err());
        assert!(NumArray::from_vec(vec![1.0; 16], &[2, 2, 2, 2]).is_err());
    }

    #[test]
    fn scalar_and_vector() {
        let s = NumArray::scalar(4.5);
        assert!(s.is_scalar());
        assert_eq!(s.first(), 4.5);
        let v = NumArray::vector(vec![1.0, 2.0]);
        assert_eq!(v.shape(), &[2]);
        assert_eq!(v.rows(), 1);
        assert_eq!(v.cols(), 2);
    }
}
