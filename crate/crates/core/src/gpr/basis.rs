use serde::{Deserialize, Serialize};

use super::linalg::Matrix;
use crate::scalar::Scalar;

/// Regression basis `F(x) = (f_0(x), ..., f_n(x))` of the mean function.
///
/// `f_0` is always the constant 1. `Linear` appends the raw input coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisExpansion {
    #[default]
    Constant,
    Linear,
}

impl BasisExpansion {
    /// Number of basis functions for `dim`-dimensional inputs.
    pub fn len(&self, dim: usize) -> usize {
        match self {
            BasisExpansion::Constant => 1,
            BasisExpansion::Linear => 1 + dim,
        }
    }

    pub fn evaluate<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let mut f = Vec::with_capacity(self.len(x.len()));
        f.push(T::one());
        if *self == BasisExpansion::Linear {
            f.extend_from_slice(x);
        }
        f
    }

    /// N×(n+1) design matrix, one row `F(x_j)` per input row.
    pub fn design_matrix<T: Scalar>(&self, inputs: &Matrix<T>) -> Matrix<T> {
        let p = self.len(inputs.ncols());
        let data = inputs.rows().flat_map(|x| self.evaluate(x)).collect();
        Matrix::from_row_major(inputs.nrows(), p, data).expect("design matrix shape")
    }
}
