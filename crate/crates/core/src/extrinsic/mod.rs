//! Pointwise extrinsic curvature of a hypersurface `M^n` in a space form
//! `N^{n+1}(c)`, in an orthonormal frame of `M`.

mod derivative;
mod input;
mod point;

pub use derivative::{
    bach_tensor, bochner_residuals, div_weyl_sd, div_weyl_sd_table, DivWeylSd, FieldData, Residual,
};
pub use input::{matrix_from_rows, FieldInput, PointInput};
pub use point::{trace_powers, PointState, Sym3, DEFAULT_TOL};

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambda2::{self, kulkarni_nomizu, CurvTensor4};

/// Dense rank-4 array for general `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n.pow(4)] }
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn to_curv4(&self) -> Result<CurvTensor4> {
        if self.n != 4 {
            return Err(Error::UnsupportedDimension { n: self.n, what: "Λ² operator form needs n = 4" });
        }
        Ok(CurvTensor4::from_fn(|i, j, k, l| self.get(i, j, k, l)))
    }
}

/// Intrinsic curvature of `M` obtained from the Gauss equation.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePack {
    pub riem: Riemann,
    pub ric: DMatrix<f64>,
    pub scal: f64,
    pub ric_tf: DMatrix<f64>,
}

/// `R_ijkl = c(δ_ik δ_jl − δ_il δ_jk) + A_ik A_jl − A_il A_jk`, with Ricci
/// and scalar curvature obtained by contraction of the assembled tensor.
pub fn gauss_equations(p: &PointState) -> CurvaturePack {
    let n = p.n();
    let a = p.a();
    let c = p.c();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut riem = Riemann::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = c * (d(i, k) * d(j, l) - d(i, l) * d(j, k)) + a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)];
                    riem.set(i, j, k, l, v);
                }
            }
        }
    }
    let ric = DMatrix::from_fn(n, n, |j, l| (0..n).map(|i| riem.get(i, j, i, l)).sum());
    let scal = ric.trace();
    let ric_tf = &ric - DMatrix::identity(n, n) * (scal / n as f64);
    CurvaturePack { riem, ric, scal, ric_tf }
}

/// Weyl part of the curvature pack via the Ricci decomposition, any `n ≥ 3`:
/// `W = Riem − (Ric ⊙ g)/(n−2) + R/(2(n−1)(n−2)) g ⊙ g`.
pub fn weyl_from_curvature(pack: &CurvaturePack) -> Riemann {
    let n = pack.riem.n();
    let nf = n as f64;
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let r = &pack.ric;
    let mut w = Riemann::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let ricci = r[(i, k)] * d(j, l) - r[(i, l)] * d(j, k) + r[(j, l)] * d(i, k) - r[(j, k)] * d(i, l);
                    let scalar = d(i, k) * d(j, l) - d(i, l) * d(j, k);
                    let v = pack.riem.get(i, j, k, l) - ricci / (nf - 2.0)
                        + pack.scal / ((nf - 1.0) * (nf - 2.0)) * scalar;
                    w.set(i, j, k, l, v);
                }
            }
        }
    }
    w
}

/// Weyl tensor of `M^4` from the second fundamental form alone:
///
/// `W_ijkl = A_ik A_jl − A_il A_jk − H/2 (A_ik δ_jl − A_il δ_jk + A_jl δ_ik − A_jk δ_il)
///   + ½ (A²_ik δ_jl − A²_il δ_jk + A²_jl δ_ik − A²_jk δ_il) + (H² − S)/6 (δ_ik δ_jl − δ_il δ_jk)`.
///
/// `c` does not enter.
pub fn weyl_tensor(p: &PointState) -> Result<CurvTensor4> {
    Ok(weyl_of(&p.a4()?))
}

pub(crate) fn weyl_of(a: &Matrix4<f64>) -> CurvTensor4 {
    let a2 = a * a;
    let h = a.trace();
    let s = a.norm_squared();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    CurvTensor4::from_fn(|i, j, k, l| {
        a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)]
            - 0.5 * h * (a[(i, k)] * d(j, l) - a[(i, l)] * d(j, k) + a[(j, l)] * d(i, k) - a[(j, k)] * d(i, l))
            + 0.5 * (a2[(i, k)] * d(j, l) - a2[(i, l)] * d(j, k) + a2[(j, l)] * d(i, k) - a2[(j, k)] * d(i, l))
            + (h * h - s) / 6.0 * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
    })
}

/// Fialkow tensor `F = ½(A² − HA) + (H² − S)/12 g`, so that
/// `W = ½ A⊙A + F⊙g`. At minimal points this is `½(A² − S/6 g)`.
pub fn fialkow(a: &Matrix4<f64>) -> Matrix4<f64> {
    let h = a.trace();
    let s = a.norm_squared();
    (a * a - a * h) * 0.5 + Matrix4::identity() * ((h * h - s) / 12.0)
}

/// `W = ½ A⊙A + F⊙g`; the second construction route, for minimal points.
pub fn weyl_fialkow(p: &PointState) -> Result<CurvTensor4> {
    let a = p.a4()?;
    if !p.is_minimal() {
        return Err(Error::NotMinimal { h: p.h() });
    }
    Ok(kulkarni_nomizu(&a, &a) * 0.5 + kulkarni_nomizu(&fialkow(&a), &Matrix4::identity()))
}

/// `(W⁺, W⁻)` of a point with `n = 4`.
pub fn weyl_split(p: &PointState) -> Result<(CurvTensor4, CurvTensor4)> {
    let w = weyl_tensor(p)?;
    lambda2::sd_asd_split(&w, 1e-9)
}

/// Closed-form scalar invariants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormPack {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "A2sq")]
    pub a2sq: f64,
    #[serde(rename = "trA3")]
    pub tr_a3: f64,
    #[serde(rename = "trA5")]
    pub tr_a5: f64,
    #[serde(rename = "trA6")]
    pub tr_a6: f64,
    #[serde(rename = "Wsq")]
    pub wsq: f64,
    #[serde(rename = "Wpmsq", skip_serializing_if = "Option::is_none")]
    pub wpmsq: Option<f64>,
    #[serde(rename = "RicTFsq", skip_serializing_if = "Option::is_none")]
    pub ric_tf_sq: Option<f64>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none", serialize_with = "crate::serde_rows::opt_matrix4")]
    pub fialkow: Option<Matrix4<f64>>,
}

/// Closed-form norms. For `n = 4` every field is filled and `H` may be
/// arbitrary; for other `n` only the minimal-case `|W|²` is known, and the
/// four-dimensional fields are left empty.
pub fn closed_form_norms(p: &PointState) -> Result<NormPack> {
    let t = trace_powers(p.a());
    let a4 = trace_powers(&(p.a() * p.a()))[2];
    let (h, s) = (t[1], t[2]);
    let n = p.n();
    if n == 4 {
        let wpm = 7.0 / 6.0 * s * s + h.powi(4) / 6.0 - 2.0 * a4 + 2.0 * h * t[3] - 4.0 / 3.0 * h * h * s;
        let ric = a4 - 0.25 * s * s + 1.5 * h * h * s - 2.0 * h * t[3] - h.powi(4) / 4.0;
        return Ok(NormPack {
            s,
            a2sq: a4,
            tr_a3: t[3],
            tr_a5: t[5],
            tr_a6: t[6],
            wsq: 2.0 * wpm,
            wpmsq: Some(wpm),
            ric_tf_sq: Some(ric),
            fialkow: Some(fialkow(&p.a4()?)),
        });
    }
    if !p.is_minimal() {
        return Err(Error::UnsupportedDimension { n, what: "closed-form |W|^2 for n != 4 is known only at minimal points" });
    }
    let nf = n as f64;
    let wsq = 2.0 * (nf * nf - 3.0 * nf + 3.0) / ((nf - 1.0) * (nf - 2.0)) * s * s - 2.0 * nf / (nf - 2.0) * a4;
    Ok(NormPack { s, a2sq: a4, tr_a3: t[3], tr_a5: t[5], tr_a6: t[6], wsq, wpmsq: None, ric_tf_sq: None, fialkow: None })
}

/// Chern–Gauss–Bonnet density of `M^4`:
/// `3S² − 6|A²|² − 6H²S + H⁴ + 8H tr(A³) + 4c(6c − S + H²)`, so that
/// `32π²χ(M) = ∫ cgb_integrand dV`.
///
/// This equals `|W|² − 2|Ric̊|² + R²/6` after the Gauss substitutions.
pub fn cgb_integrand(p: &PointState) -> Result<f64> {
    Ok(cgb_of(&p.a4()?, p.c()))
}

pub(crate) fn cgb_of(a: &Matrix4<f64>, c: f64) -> f64 {
    let a2 = a * a;
    let (h, s) = (a.trace(), a2.trace());
    let a4 = a2.norm_squared();
    let t3 = a2.dot(a);
    3.0 * s * s - 6.0 * a4 - 6.0 * h * h * s + h.powi(4) + 8.0 * h * t3 + 4.0 * c * (6.0 * c - s + h * h)
}

/// Closed-form `|W|²` for `n = 4`, any `H`.
pub(crate) fn weyl_sq_of(a: &Matrix4<f64>) -> f64 {
    let a2 = a * a;
    let (h, s) = (a.trace(), a2.trace());
    let a4 = a2.norm_squared();
    let t3 = a2.dot(a);
    7.0 / 3.0 * s * s + h.powi(4) / 3.0 - 4.0 * a4 + 4.0 * h * t3 - 8.0 / 3.0 * h * h * s
}

/// `⟨W, ⋆W⟩ = |W⁺|² − |W⁻|²`, the signature density times `48π²`.
pub fn signature_integrand(p: &PointState) -> Result<f64> {
    let w = weyl_tensor(p)?;
    Ok(lambda2::inner(&w, &lambda2::star_weyl(&w)?))
}

/// `⟨W, ⋆W⟩` from the assembled Λ² operator of `W`, without validation.
///
/// Uses `W = A⊙A/2 + B⊙g + κ g⊙g/2` entrywise, with `B = ½A² − (H/2)A` and
/// `κ = (H² − S)/6`.
pub(crate) fn signature_of(a: &Matrix4<f64>) -> f64 {
    let a2 = a * a;
    let h = a.trace();
    let kappa = (h * h - a2.trace()) / 6.0;
    let bm = a2 * 0.5 - a * (0.5 * h);
    let a: [[f64; 4]; 4] = (*a).into();
    let b: [[f64; 4]; 4] = bm.into();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let entry = |p: usize, q: usize| {
        let (i, j) = lambda2::PAIRS[p];
        let (k, l) = lambda2::PAIRS[q];
        a[i][k] * a[j][l] - a[i][l] * a[j][k] + b[i][k] * d(j, l) - b[i][l] * d(j, k) + b[j][l] * d(i, k)
            - b[j][k] * d(i, l)
            + kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
    };
    let mut m = [[0.0f64; 6]; 6];
    for p in 0..6 {
        for q in p..6 {
            let v = entry(p, q);
            m[p][q] = v;
            m[q][p] = v;
        }
    }
    let mut s = 0.0;
    for r in 0..3 {
        for c in 0..6 {
            s += m[r][c] * m[r + 3][c];
        }
    }
    2.0 * lambda2::NORM_FACTOR * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_signature_matches_tensor_route() {
        let a = Matrix4::new(1.0, 0.3, -0.2, 0.5, 0.3, -2.0, 0.7, 0.1, -0.2, 0.7, 0.4, -0.6, 0.5, 0.1, -0.6, 1.5);
        let w = weyl_of(&a);
        let slow = lambda2::inner(&w, &lambda2::star_weyl(&w).unwrap());
        assert!((signature_of(&a) - slow).abs() < 1e-12 * (1.0 + w.norm_sq()));
    }
}
