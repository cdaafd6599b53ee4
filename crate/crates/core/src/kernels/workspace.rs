use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Kind, Shape};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix, WorkspaceError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(WorkspaceError::BadMatrix {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Matrix, WorkspaceError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(WorkspaceError::BadMatrix {
                rows: rows.len(),
                cols,
                len: data.len(),
            });
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkspaceError {
    #[error("name `{name}` is already bound as a {existing}")]
    KindConflict { name: String, existing: Kind },
    #[error("cannot rebind `{name}` from {old} to {new}")]
    ShapeChange {
        name: String,
        old: Shape,
        new: Shape,
    },
    #[error("vector `{0}` must have positive length")]
    EmptyVector(String),
    #[error("invalid matrix: {rows}x{cols} with {len} elements")]
    BadMatrix {
        rows: usize,
        cols: usize,
        len: usize,
    },
}

/// Named dense storage for vectors, matrices and scalars. A name belongs to
/// exactly one of the three maps, and its shape is fixed once bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workspace {
    vectors: BTreeMap<String, Vec<f64>>,
    matrices: BTreeMap<String, Matrix>,
    scalars: BTreeMap<String, f64>,
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        if self.vectors.contains_key(name) {
            Some(Kind::Vector)
        } else if self.matrices.contains_key(name) {
            Some(Kind::Matrix)
        } else if self.scalars.contains_key(name) {
            Some(Kind::Scalar)
        } else {
            None
        }
    }

    pub fn shape_of_name(&self, name: &str) -> Option<Shape> {
        if let Some(v) = self.vectors.get(name) {
            Some(Shape::Vector(v.len()))
        } else if let Some(m) = self.matrices.get(name) {
            Some(Shape::Matrix {
                rows: m.rows,
                cols: m.cols,
            })
        } else {
            self.scalars.get(name).map(|_| Shape::Scalar)
        }
    }

    fn check_rebind(&self, name: &str, kind: Kind, shape: Shape) -> Result<(), WorkspaceError> {
        match self.kind_of(name) {
            None => Ok(()),
            Some(existing) if existing != kind => Err(WorkspaceError::KindConflict {
                name: name.to_string(),
                existing,
            }),
            Some(_) => {
                let old = self.shape_of_name(name).expect("bound name has a shape");
                if old == shape {
                    Ok(())
                } else {
                    Err(WorkspaceError::ShapeChange {
                        name: name.to_string(),
                        old,
                        new: shape,
                    })
                }
            }
        }
    }

    /// Binds or overwrites a vector. Overwriting keeps the length fixed.
    pub fn bind_vector(
        &mut self,
        name: impl Into<String>,
        data: Vec<f64>,
    ) -> Result<(), WorkspaceError> {
        let name = name.into();
        if data.is_empty() {
            return Err(WorkspaceError::EmptyVector(name));
        }
        self.check_rebind(&name, Kind::Vector, Shape::Vector(data.len()))?;
        self.vectors.insert(name, data);
        Ok(())
    }

    pub fn bind_matrix(
        &mut self,
        name: impl Into<String>,
        m: Matrix,
    ) -> Result<(), WorkspaceError> {
        let name = name.into();
        let shape = Shape::Matrix {
            rows: m.rows,
            cols: m.cols,
        };
        self.check_rebind(&name, Kind::Matrix, shape)?;
        self.matrices.insert(name, m);
        Ok(())
    }

    pub fn bind_scalar(
        &mut self,
        name: impl Into<String>,
        value: f64,
    ) -> Result<(), WorkspaceError> {
        let name = name.into();
        self.check_rebind(&name, Kind::Scalar, Shape::Scalar)?;
        self.scalars.insert(name, value);
        Ok(())
    }

    pub fn vector(&self, name: &str) -> Option<&[f64]> {
        self.vectors.get(name).map(Vec::as_slice)
    }

    pub fn vector_mut(&mut self, name: &str) -> Option<&mut [f64]> {
        self.vectors.get_mut(name).map(Vec::as_mut_slice)
    }

    pub fn matrix(&self, name: &str) -> Option<&Matrix> {
        self.matrices.get(name)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }

    pub fn vectors(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&str, &Matrix)> {
        self.matrices.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn scalars(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scalars.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Moves a vector out of its slot, leaving an empty placeholder that
    /// [`Workspace::restore_vector`] fills again.
    pub(crate) fn take_vector(&mut self, name: &str) -> Option<Vec<f64>> {
        self.vectors.get_mut(name).map(std::mem::take)
    }

    pub(crate) fn restore_vector(&mut self, name: &str, data: Vec<f64>) {
        if let Some(slot) = self.vectors.get_mut(name) {
            *slot = data;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_across_kinds() {
        let mut ws = Workspace::new();
        ws.bind_vector("A", vec![1.0, 2.0]).unwrap();
        assert_eq!(
            ws.bind_scalar("A", 1.0),
            Err(WorkspaceError::KindConflict {
                name: "A".into(),
                existing: Kind::Vector
            })
        );
        assert!(ws.bind_matrix("A", Matrix::identity(2)).is_err());
        ws.bind_scalar("c", 1.0).unwrap();
        assert!(ws.bind_vector("c", vec![1.0]).is_err());
    }

    #[test]
    fn shapes_are_fixed_after_binding() {
        let mut ws = Workspace::new();
        ws.bind_vector("x", vec![0.0; 3]).unwrap();
        ws.bind_vector("x", vec![1.0; 3]).unwrap();
        assert_eq!(ws.vector("x"), Some(&[1.0, 1.0, 1.0][..]));
        assert!(matches!(
            ws.bind_vector("x", vec![0.0; 4]),
            Err(WorkspaceError::ShapeChange { .. })
        ));
        ws.bind_matrix("M", Matrix::zeros(2, 3)).unwrap();
        assert!(ws.bind_matrix("M", Matrix::zeros(3, 2)).is_err());
        assert!(ws.bind_vector("e", vec![]).is_err());
    }

    #[test]
    fn matrix_is_row_major() {
        let m = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.row(1), &[4.0, 5.0, 6.0]);
        assert!(Matrix::from_rows(&[&[1.0], &[1.0, 2.0]]).is_err());
        assert!(Matrix::new(2, 2, vec![0.0; 3]).is_err());
    }
}
