//! Minimal dense matrix type, row-major f64.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(CoreError::ShapeMismatch {
                context: "Matrix::from_vec".to_string(),
                expected: format!("{} values", rows * cols),
                got: format!("{} values", data.len()),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build column by column; each column must have length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Matrix> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(CoreError::ShapeMismatch {
                    context: format!("Matrix::from_columns column {j}"),
                    expected: format!("{rows} rows"),
                    got: format!("{} rows", col.len()),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `self * other`, (r×k)(k×c) -> (r×c).
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(CoreError::ShapeMismatch {
                context: "matmul".to_string(),
                expected: format!("lhs cols = rhs rows ({})", self.cols),
                got: format!("{}", other.rows),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other`, (r×k)^T (r×c) -> (k×c).
    pub fn matmul_transpose_self(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(CoreError::ShapeMismatch {
                context: "matmul_transpose_self".to_string(),
                expected: format!("lhs rows = rhs rows ({})", self.rows),
                got: format!("{}", other.rows),
            });
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.get(r, j);
                }
            }
        }
        Ok(out)
    }

    /// `self * other^T`, (r×k)(c×k)^T -> (r×c).
    pub fn matmul_transpose_other(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(CoreError::ShapeMismatch {
                context: "matmul_transpose_other".to_string(),
                expected: format!("lhs cols = rhs cols ({})", self.cols),
                got: format!("{}", other.cols),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(j, k);
                }
                out.data[i * out.cols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::ShapeMismatch {
                context: "add_assign".to_string(),
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// Add a column vector to every column.
    pub fn add_column_broadcast(&mut self, col: &[f64]) -> Result<()> {
        if col.len() != self.rows {
            return Err(CoreError::ShapeMismatch {
                context: "add_column_broadcast".to_string(),
                expected: format!("{} rows", self.rows),
                got: format!("{}", col.len()),
            });
        }
        for (i, &c) in col.iter().enumerate() {
            for j in 0..self.cols {
                self.data[i * self.cols + j] += c;
            }
        }
        Ok(())
    }
}
