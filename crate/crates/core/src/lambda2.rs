//! Algebra of 2-forms and algebraic curvature tensors in dimension four.
//!
//! Tensors with the symmetries of a curvature tensor are stored as 6×6
//! operators on Λ² in the ordered basis
//! `(e1∧e2, e1∧e3, e1∧e4, e3∧e4, e4∧e2, e2∧e3)`, so the self-dual and
//! anti-self-dual 2-forms are `(e_a ± e_{a+3})/√2` for `a = 0, 1, 2`.
//!
//! The operator entry `M[a][b]` is the tensor component `T_ijkl` with
//! `(i,j) = PAIRS[a]`, `(k,l) = PAIRS[b]`. Full four-index sums are therefore
//! `4×` the Frobenius pairing of the operators (see [`NORM_FACTOR`]).
//!
//! All indices are zero-based except in [`levi_civita`], which takes the
//! one-based indices used in formulas.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Matrix6, SMatrix};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Ordered index pairs of the Λ² basis (zero-based).
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Ratio between the full index sum `Σ T_ijkl T'_ijkl` and the Frobenius
/// pairing of the Λ² operators.
pub const NORM_FACTOR: f64 = 4.0;

/// Levi-Civita symbol with one-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> Result<i8> {
    for &x in &[i, j, k, l] {
        if !(1..=4).contains(&x) {
            return Err(Error::IndexOutOfRange(x));
        }
    }
    Ok(eps([i - 1, j - 1, k - 1, l - 1]))
}

/// Zero-based Levi-Civita symbol, no range checks.
pub(crate) fn eps(idx: [usize; 4]) -> i8 {
    let mut sign = 1i8;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] == idx[b] {
                return 0;
            }
            if idx[a] > idx[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Generalized Kronecker delta `δ^{i1..ik}_{j1..jk}`: the determinant of the
/// matrix `[δ^{i_a}_{j_b}]`.
pub fn generalized_kronecker(upper: &[usize], lower: &[usize]) -> i64 {
    assert_eq!(upper.len(), lower.len());
    let k = upper.len();
    let m = nalgebra::DMatrix::from_fn(k, k, |a, b| if upper[a] == lower[b] { 1.0 } else { 0.0 });
    let det: f64 = m.determinant();
    det.round() as i64
}

/// Position of `(i,j)` in the Λ² basis together with the orientation sign.
pub fn pair_slot(i: usize, j: usize) -> Option<(usize, f64)> {
    PAIRS.iter().enumerate().find_map(|(a, &(p, q))| {
        if (p, q) == (i, j) {
            Some((a, 1.0))
        } else if (q, p) == (i, j) {
            Some((a, -1.0))
        } else {
            None
        }
    })
}

/// Antisymmetric components `ω_ij` of a 2-form.
///
/// Components carry the full antisymmetric sum `ω = ω_ij θ^i∧θ^j`, so the
/// basis form `θ^1∧θ^2` has `ω_12 = ½`, `ω_21 = −½`. [`TwoForm::from_basis`]
/// and [`TwoForm::to_basis`] are the only places that convert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm {
    w: Matrix4<f64>,
}

impl TwoForm {
    pub fn from_components(w: Matrix4<f64>) -> Result<Self> {
        let defect = (w + w.transpose()).abs().max();
        if defect > 1e-12 * (1.0 + w.abs().max()) {
            return Err(Error::SymmetryViolation(format!(
                "2-form components not antisymmetric (defect {defect:.3e})"
            )));
        }
        Ok(Self { w })
    }

    /// Build from coefficients on the Λ² basis.
    pub fn from_basis(c: [f64; 6]) -> Self {
        let mut w = Matrix4::zeros();
        for (a, &(i, j)) in PAIRS.iter().enumerate() {
            w[(i, j)] = 0.5 * c[a];
            w[(j, i)] = -0.5 * c[a];
        }
        Self { w }
    }

    pub fn basis(a: usize) -> Self {
        let mut c = [0.0; 6];
        c[a] = 1.0;
        Self::from_basis(c)
    }

    pub fn to_basis(&self) -> [f64; 6] {
        let mut c = [0.0; 6];
        for (a, &(i, j)) in PAIRS.iter().enumerate() {
            c[a] = 2.0 * self.w[(i, j)];
        }
        c
    }

    pub fn components(&self) -> &Matrix4<f64> {
        &self.w
    }
}

/// Hodge star on 2-forms. In components `(⋆ω)_ij = ½ μ_ijkl ω_kl`, which is
/// the same linear map under either normalization of `ω`.
pub fn hodge_star(w: &TwoForm) -> TwoForm {
    let mut out = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += eps([i, j, k, l]) as f64 * w.w[(k, l)];
                }
            }
            out[(i, j)] = 0.5 * s;
        }
    }
    TwoForm { w: out }
}

/// Hodge star as a matrix on basis coefficients.
pub fn hodge_matrix() -> Matrix6<f64> {
    let mut p = Matrix6::zeros();
    for a in 0..3 {
        p[(a, a + 3)] = 1.0;
        p[(a + 3, a)] = 1.0;
    }
    p
}

pub type Components4 = [[[[f64; 4]; 4]; 4]; 4];

/// Rank-4 tensor antisymmetric in `(i,j)` and `(k,l)`, stored as its Λ²
/// operator. Pair symmetry is not enforced by the representation (the
/// left action of ⋆ on a Riemann tensor with Ricci part is not pair
/// symmetric); see [`CurvTensor4::pair_asymmetry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvTensor4 {
    op: Matrix6<f64>,
}

impl CurvTensor4 {
    pub fn zero() -> Self {
        Self { op: Matrix6::zeros() }
    }

    pub fn from_operator(op: Matrix6<f64>) -> Self {
        Self { op }
    }

    /// Sample a component function (zero-based) on the basis pairs. The
    /// function is assumed antisymmetric in each pair.
    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut op = Matrix6::zeros();
        for (a, &(i, j)) in PAIRS.iter().enumerate() {
            for (b, &(k, l)) in PAIRS.iter().enumerate() {
                op[(a, b)] = f(i, j, k, l);
            }
        }
        Self { op }
    }

    pub fn from_components(t: &Components4) -> Result<Self> {
        let scale = 1.0 + t.iter().flatten().flatten().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-12 * scale;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = t[i][j][k][l];
                        if (v + t[j][i][k][l]).abs() > tol || (v + t[i][j][l][k]).abs() > tol {
                            return Err(Error::SymmetryViolation(format!(
                                "component ({},{},{},{}) breaks pair antisymmetry",
                                i + 1,
                                j + 1,
                                k + 1,
                                l + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self::from_fn(|i, j, k, l| t[i][j][k][l]))
    }

    /// Component `T_ijkl` (zero-based).
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        match (pair_slot(i, j), pair_slot(k, l)) {
            (Some((a, sa)), Some((b, sb))) => sa * sb * self.op[(a, b)],
            _ => 0.0,
        }
    }

    pub fn components(&self) -> Components4 {
        let mut t = [[[[0.0; 4]; 4]; 4]; 4];
        for (i, ti) in t.iter_mut().enumerate() {
            for (j, tij) in ti.iter_mut().enumerate() {
                for (k, tijk) in tij.iter_mut().enumerate() {
                    for (l, v) in tijk.iter_mut().enumerate() {
                        *v = self.get(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn operator(&self) -> &Matrix6<f64> {
        &self.op
    }

    /// Largest `|T_ijkl − T_klij|`.
    pub fn pair_asymmetry(&self) -> f64 {
        (self.op - self.op.transpose()).abs().max()
    }

    /// `T_1234 + T_1342 + T_1423`, the only independent first-Bianchi
    /// component once the pair symmetries hold.
    pub fn bianchi_defect(&self) -> f64 {
        self.op[(0, 3)] + self.op[(1, 4)] + self.op[(2, 5)]
    }

    /// Contraction `Σ_i T_ijil`.
    pub fn ricci_contraction(&self) -> Matrix4<f64> {
        let mut r = Matrix4::zeros();
        for j in 0..4 {
            for l in 0..4 {
                r[(j, l)] = (0..4).map(|i| self.get(i, j, i, l)).sum();
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.op.abs().max()
    }

    pub fn norm_sq(&self) -> f64 {
        inner(self, self)
    }

    /// `(𝒯ω)_ij = ½ T_ijkl ω_kl`; on basis coefficients this is the operator.
    pub fn apply(&self, w: &TwoForm) -> TwoForm {
        let c = self.op * nalgebra::Vector6::from_column_slice(&w.to_basis());
        TwoForm::from_basis([c[0], c[1], c[2], c[3], c[4], c[5]])
    }

    /// Row-major upper triangle of the operator (21 entries).
    pub fn to_upper_triangle(&self) -> Result<[f64; 21]> {
        if self.pair_asymmetry() > 1e-12 * (1.0 + self.max_abs()) {
            return Err(Error::SymmetryViolation(
                "only pair-symmetric tensors serialize as a symmetric operator".into(),
            ));
        }
        let mut out = [0.0; 21];
        let mut n = 0;
        for a in 0..6 {
            for b in a..6 {
                out[n] = self.op[(a, b)];
                n += 1;
            }
        }
        Ok(out)
    }

    pub fn from_upper_triangle(v: &[f64]) -> Result<Self> {
        if v.len() != 21 {
            return Err(Error::InvalidInput(format!(
                "lambda2_op needs 21 entries, got {}",
                v.len()
            )));
        }
        let mut op = Matrix6::zeros();
        let mut n = 0;
        for a in 0..6 {
            for b in a..6 {
                op[(a, b)] = v[n];
                op[(b, a)] = v[n];
                n += 1;
            }
        }
        Ok(Self { op })
    }
}

impl Add for CurvTensor4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { op: self.op + rhs.op }
    }
}

impl Sub for CurvTensor4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { op: self.op - rhs.op }
    }
}

impl Neg for CurvTensor4 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { op: -self.op }
    }
}

impl Mul<f64> for CurvTensor4 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self { op: self.op * s }
    }
}

#[derive(Serialize, Deserialize)]
struct Lambda2Op {
    lambda2_op: Vec<f64>,
}

impl Serialize for CurvTensor4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let tri = self.to_upper_triangle().map_err(serde::ser::Error::custom)?;
        Lambda2Op { lambda2_op: tri.to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurvTensor4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Lambda2Op::deserialize(d)?;
        CurvTensor4::from_upper_triangle(&raw.lambda2_op).map_err(serde::de::Error::custom)
    }
}

/// `(⋆T)_ijkl = ½ μ_ijrs T_klrs`, the Hodge star acting on the first pair.
pub fn star_weyl(t: &CurvTensor4) -> Result<CurvTensor4> {
    let asym = t.pair_asymmetry();
    if asym > 1e-10 * (1.0 + t.max_abs()) {
        return Err(Error::SymmetryViolation(format!(
            "pair symmetry T_ijkl = T_klij fails by {asym:.3e}"
        )));
    }
    Ok(CurvTensor4 { op: hodge_matrix() * t.op })
}

/// Kulkarni–Nomizu product
/// `(U⊙V)_ijkl = U_ik V_jl + U_jl V_ik − U_il V_jk − U_jk V_il`.
///
/// For symmetric `U`, `V` this is already symmetric in its arguments and pair
/// symmetric, so `½(U⊙V + V⊙U) = U⊙V`.
pub fn kulkarni_nomizu(u: &Matrix4<f64>, v: &Matrix4<f64>) -> CurvTensor4 {
    CurvTensor4::from_fn(|i, j, k, l| {
        u[(i, k)] * v[(j, l)] + u[(j, l)] * v[(i, k)] - u[(i, l)] * v[(j, k)] - u[(j, k)] * v[(i, l)]
    })
}

/// Split a Weyl-type tensor into self-dual and anti-self-dual parts,
/// `T± = ½(T ± ⋆T)`.
pub fn sd_asd_split(t: &CurvTensor4, tol: f64) -> Result<(CurvTensor4, CurvTensor4)> {
    let scale = 1.0 + t.max_abs();
    let asym = t.pair_asymmetry();
    if asym > tol * scale {
        return Err(Error::SymmetryViolation(format!("pair symmetry fails by {asym:.3e}")));
    }
    let b = t.bianchi_defect().abs();
    if b > tol * scale {
        return Err(Error::SymmetryViolation(format!("first Bianchi identity fails by {b:.3e}")));
    }
    let trace_norm = t.ricci_contraction().norm();
    if trace_norm > tol * scale {
        return Err(Error::NotTraceFree { trace_norm });
    }
    let star = hodge_matrix() * t.op;
    Ok((
        CurvTensor4 { op: (t.op + star) * 0.5 },
        CurvTensor4 { op: (t.op - star) * 0.5 },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Plus,
    Minus,
}

/// Restriction of the operator to Λ+ or Λ− in the orthonormal basis
/// `(e_a ± e_{a+3})/√2`.
pub fn lambda2_block(t: &CurvTensor4, part: Part) -> Matrix3<f64> {
    let s = match part {
        Part::Plus => 1.0,
        Part::Minus => -1.0,
    };
    let mut u = SMatrix::<f64, 6, 3>::zeros();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..3 {
        u[(a, a)] = r;
        u[(a + 3, a)] = s * r;
    }
    let block = u.transpose() * t.op * u;
    (block + block.transpose()) * 0.5
}

/// Eigenvalues of the Λ± block, sorted descending.
pub fn lambda2_spectrum(t: &CurvTensor4, part: Part) -> [f64; 3] {
    let eig = lambda2_block(t, part).symmetric_eigenvalues();
    let mut v = [eig[0], eig[1], eig[2]];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `Σ T1_ijkl T2_ijkl`.
pub fn inner(t1: &CurvTensor4, t2: &CurvTensor4) -> f64 {
    NORM_FACTOR * t1.op.component_mul(&t2.op).sum()
}

/// `Σ T1_ijkl T2_pqkl T3_ijpq`.
pub fn triple(t1: &CurvTensor4, t2: &CurvTensor4, t3: &CurvTensor4) -> f64 {
    8.0 * (t1.op * t2.op.transpose()).component_mul(&t3.op).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_slots_cover_all_ordered_pairs() {
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(pair_slot(i, j).is_some(), i != j);
            }
        }
        assert_eq!(pair_slot(1, 3), Some((4, -1.0)));
    }

    #[test]
    fn basis_roundtrip() {
        let c = [1.0, -2.0, 3.0, 0.5, 0.25, -7.0];
        assert_eq!(TwoForm::from_basis(c).to_basis(), c);
    }

    #[test]
    fn kronecker_small_cases() {
        assert_eq!(generalized_kronecker(&[0, 1], &[0, 1]), 1);
        assert_eq!(generalized_kronecker(&[0, 1], &[1, 0]), -1);
        assert_eq!(generalized_kronecker(&[0, 0], &[0, 0]), 0);
        assert_eq!(generalized_kronecker(&[0, 1, 2], &[2, 0, 1]), 1);
    }
}
