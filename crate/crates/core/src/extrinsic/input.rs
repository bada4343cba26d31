//! JSON schema for point inputs: `{"n":4, "c":1, "lambda":[...]}` or
//! `{"A":[[...]]}`, with optional `nablaA`, `hessS`, `parallel`, `tol` and
//! a `fields` object of Laplacian/gradient data for the Bochner residuals.

use nalgebra::DMatrix;
use serde::Deserialize;

use super::{FieldData, PointState, Sym3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct PointInput {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, rename = "A")]
    pub a: Option<Vec<Vec<f64>>>,
    /// Packed `i ≤ j ≤ k` entries, or all `n³` entries.
    #[serde(default, rename = "nablaA")]
    pub nabla_a: Option<Vec<f64>>,
    #[serde(default, rename = "hessS")]
    pub hess_s: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub parallel: bool,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub fields: Option<FieldInput>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct FieldInput {
    #[serde(default, rename = "laplacianA")]
    pub laplacian_a: Option<Vec<Vec<f64>>>,
    #[serde(default, rename = "laplacianA2")]
    pub laplacian_a2: Option<Vec<Vec<f64>>>,
    #[serde(default, rename = "laplacianA2sq")]
    pub laplacian_a2sq: Option<f64>,
    #[serde(default)]
    pub parallel_weyl: bool,
    #[serde(default)]
    pub laplacian_wplus_sq: Option<f64>,
    #[serde(default)]
    pub grad_wplus_sq: Option<f64>,
    #[serde(default)]
    pub laplacian_wminus_sq: Option<f64>,
    #[serde(default)]
    pub grad_wminus_sq: Option<f64>,
}

/// Square matrix from rows, with the field name in errors.
pub fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput(format!("{field}: empty matrix")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::InvalidInput(format!("{field}[{i}]: row has {} entries, expected {n}", r.len())));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{field}: entries must be finite")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl PointInput {
    /// Validate and build the point. `tol_override` wins over the `tol` field.
    pub fn build(&self, tol_override: Option<f64>) -> Result<(PointState, FieldData)> {
        let c = self.c.unwrap_or(1.0);
        let p = match (&self.lambda, &self.a) {
            (Some(_), Some(_)) => return Err(Error::InvalidInput("give either lambda or A, not both".into())),
            (None, None) => return Err(Error::InvalidInput("lambda or A is required".into())),
            (Some(l), None) => {
                if l.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidInput("lambda: entries must be finite".into()));
                }
                PointState::from_spectrum(c, l)?
            }
            (None, Some(rows)) => PointState::from_matrix(c, matrix_from_rows(rows, "A")?)?,
        };
        if let Some(n) = self.n {
            if n != p.n() {
                return Err(Error::InvalidInput(format!("n = {n} but the shape operator has dimension {}", p.n())));
            }
        }
        let tol = tol_override.or(self.tol).unwrap_or(super::DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
        }
        let n = p.n();
        let mut p = p.with_tol(tol).with_parallel(self.parallel);
        if let Some(v) = &self.nabla_a {
            let s = if v.len() == Sym3::packed_len(n) {
                Sym3::from_packed(n, v)?
            } else if v.len() == n * n * n {
                Sym3::from_dense(n, v.clone())?
            } else {
                return Err(Error::InvalidInput(format!(
                    "nablaA: expected {} packed or {} dense entries, got {}",
                    Sym3::packed_len(n),
                    n * n * n,
                    v.len()
                )));
            };
            p = p.with_nabla_a(s)?;
        }
        if let Some(rows) = &self.hess_s {
            p = p.with_hess_s(matrix_from_rows(rows, "hessS")?)?;
        }
        let fields = match &self.fields {
            None => FieldData::default(),
            Some(f) => FieldData {
                laplacian_a: f.laplacian_a.as_deref().map(|r| matrix_from_rows(r, "fields.laplacianA")).transpose()?,
                laplacian_a2: f.laplacian_a2.as_deref().map(|r| matrix_from_rows(r, "fields.laplacianA2")).transpose()?,
                laplacian_a2sq: f.laplacian_a2sq,
                parallel_weyl: f.parallel_weyl,
                laplacian_wplus_sq: f.laplacian_wplus_sq,
                grad_wplus_sq: f.grad_wplus_sq,
                laplacian_wminus_sq: f.laplacian_wminus_sq,
                grad_wminus_sq: f.grad_wminus_sq,
            },
        };
        Ok((p, fields))
    }
}
