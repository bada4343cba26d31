//! Row-major serialization helpers for nalgebra matrices.

use nalgebra::{DMatrix, Matrix4};
use serde::ser::{SerializeSeq, Serializer};

pub(crate) fn rows_of<S: Serializer>(rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows))?;
    for i in 0..rows {
        let row: Vec<f64> = (0..cols).map(|j| at(i, j)).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

pub fn matrix4<S: Serializer>(m: &Matrix4<f64>, s: S) -> Result<S::Ok, S::Error> {
    rows_of(4, 4, |i, j| m[(i, j)], s)
}

pub fn opt_matrix4<S: Serializer>(m: &Option<Matrix4<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(m) => matrix4(m, s),
        None => s.serialize_none(),
    }
}

pub fn dmatrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    rows_of(m.nrows(), m.ncols(), |i, j| m[(i, j)], s)
}

pub fn opt_dmatrix<S: Serializer>(m: &Option<DMatrix<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(m) => dmatrix(m, s),
        None => s.serialize_none(),
    }
}
