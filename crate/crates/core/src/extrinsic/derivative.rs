//! Identities involving covariant derivatives of `A`. Derivative data is
//! supplied by the caller (or zeroed by the parallel flag), never derived.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4};
use serde::{Serialize, Serializer};

use super::point::{trace_powers, PointState, Sym3};
use crate::error::{Error, Result};
use crate::lambda2::{self, hodge_matrix, kulkarni_nomizu, CurvTensor4};

fn require_minimal(p: &PointState) -> Result<()> {
    if p.is_minimal() {
        Ok(())
    } else {
        Err(Error::NotMinimal { h: p.h() })
    }
}

/// `q_ij = Σ_kt A_ikt A_jkt`.
fn nabla_gram(nabla: &Sym3) -> DMatrix<f64> {
    let n = nabla.n();
    DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            for t in 0..n {
                s += nabla.get(i, k, t) * nabla.get(j, k, t);
            }
        }
        s
    })
}

/// `|∇A²|²` with `(A²)_ij,k = A_itk A_tj + A_it A_tjk`.
fn grad_a2_sq(a: &DMatrix<f64>, nabla: &Sym3) -> f64 {
    let n = a.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v: f64 = (0..n).map(|t| nabla.get(i, t, k) * a[(t, j)] + a[(i, t)] * nabla.get(t, j, k)).sum();
                total += v * v;
            }
        }
    }
    total
}

/// Bach tensor of a minimal `M^4`:
///
/// `2B_ij = 2A⁴_ij − 2A_ij tr(A³) − 4cA²_ij + (4/3)S A²_ij + (1/3)S_ij − 2A_ikt A_jkt
///   + ((1/3)|∇A|² + (1/3)cS − (1/6)S² − ½|A²|²) δ_ij`.
///
/// The formula is trace-free only when `ΔS` obeys Simons' identity
/// `½ΔS = |∇A|² + S(4c − S)`; inconsistent derivative data is rejected.
pub fn bach_tensor(p: &PointState) -> Result<Matrix4<f64>> {
    p.a4()?;
    require_minimal(p)?;
    let nabla = p.nabla_a().ok_or(Error::MissingData("nablaA (or the parallel flag) for the Bach tensor"))?;
    let hess = p.hess_s().ok_or(Error::MissingData("hessS (or the parallel flag) for the Bach tensor"))?;
    let a = p.a();
    let c = p.c();
    let t = trace_powers(a);
    let s = t[2];
    let a2 = a * a;
    let a2sq = a2.norm_squared();
    let grad_sq = nabla.norm_sq();

    let simons = 0.5 * hess.trace() - grad_sq - s * (4.0 * c - s);
    let scale = 1.0 + grad_sq + s * (4.0 * c.abs() + s) + hess.trace().abs();
    if simons.abs() > 1e3 * p.tol().max(f64::EPSILON) * scale {
        return Err(Error::InconsistentDerivatives { defect: simons });
    }

    let q = nabla_gram(&nabla);
    let scalar = grad_sq / 3.0 + c * s / 3.0 - s * s / 6.0 - 0.5 * a2sq;
    let two_b = &a2 * &a2 * 2.0 - a * (2.0 * t[3]) - &a2 * (4.0 * c) + &a2 * (4.0 / 3.0 * s) + &hess / 3.0 - q * 2.0
        + DMatrix::identity(4, 4) * scalar;
    Ok(Matrix4::from_fn(|i, j| 0.5 * two_b[(i, j)]))
}

/// Divergences `(δW±)_ijk = W±_tijk,t` of the self-dual and anti-self-dual
/// Weyl tensors, indexed `[i][j][k]` (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct DivWeylSd {
    pub plus: [[[f64; 4]; 4]; 4],
    pub minus: [[[f64; 4]; 4]; 4],
}

impl DivWeylSd {
    /// The twelve components `(δW±)_{i,1,k}`, `k ∈ {2,3,4}`, which determine
    /// the rest by (anti-)self-duality. Indices are one-based.
    pub fn components(&self) -> Vec<([usize; 3], f64, f64)> {
        let mut out = Vec::with_capacity(12);
        for i in 0..4 {
            for k in 1..4 {
                out.push(([i + 1, 1, k + 1], self.plus[i][0][k], self.minus[i][0][k]));
            }
        }
        out
    }

    pub fn plus_norm_sq(&self) -> f64 {
        self.plus.iter().flatten().flatten().map(|x| x * x).sum()
    }

    pub fn minus_norm_sq(&self) -> f64 {
        self.minus.iter().flatten().flatten().map(|x| x * x).sum()
    }
}

/// Derivative of the Weyl map `A ↦ W(A)` in direction `B`.
///
/// `W = ½A⊙A − (H/2)A⊙g + ½A²⊙g + (H² − S)/12 g⊙g` is quadratic in `A`,
/// and `δ`, `μ` are parallel, so `∇_t W = DW(A)[∇_t A]`.
fn weyl_derivative(a: &Matrix4<f64>, b: &Matrix4<f64>) -> CurvTensor4 {
    let g = Matrix4::identity();
    let h = a.trace();
    let hb = b.trace();
    let ab = a.dot(b);
    kulkarni_nomizu(a, b) - kulkarni_nomizu(a, &g) * (0.5 * hb) - kulkarni_nomizu(b, &g) * (0.5 * h)
        + kulkarni_nomizu(&((a * b + b * a) * 0.5), &g)
        + kulkarni_nomizu(&g, &g) * ((h * hb - ab) / 6.0)
}

/// `δW±` at a minimal point from `A` and `∇A`, valid in any orthonormal frame.
pub fn div_weyl_sd(p: &PointState) -> Result<DivWeylSd> {
    let a = p.a4()?;
    require_minimal(p)?;
    let nabla = p.nabla_a().ok_or(Error::MissingData("nablaA (or the parallel flag) for the Weyl divergence"))?;
    let star = hodge_matrix();
    let mut plus = [[[0.0; 4]; 4]; 4];
    let mut minus = [[[0.0; 4]; 4]; 4];
    for t in 0..4 {
        let b = Matrix4::from_fn(|i, j| nabla.get(i, j, t));
        let dw = weyl_derivative(&a, &b);
        let dw_star = CurvTensor4::from_operator(star * dw.operator());
        let dp = (dw + dw_star) * 0.5;
        let dm = (dw - dw_star) * 0.5;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    plus[i][j][k] += dp.get(t, i, j, k);
                    minus[i][j][k] += dm.get(t, i, j, k);
                }
            }
        }
    }
    Ok(DivWeylSd { plus, minus })
}

/// Component table for `δW±` in a frame diagonalizing `A`, valid when every
/// `A_iik` vanishes (constant principal curvatures):
///
/// `(δW±)_{r12} = ¼[(λ1−λ2)A_r12 ± (λ3−λ4)A_r34]`,
/// `(δW±)_{r13} = ¼[(λ1−λ3)A_r13 ± (λ4−λ2)A_r42]`,
/// `(δW±)_{r14} = ¼[(λ1−λ4)A_r14 ± (λ2−λ3)A_r23]`.
///
/// Returns `(plus, minus)` indexed `[r][k−2]`.
pub fn div_weyl_sd_table(lambda: &[f64; 4], nabla: &Sym3) -> ([[f64; 3]; 4], [[f64; 3]; 4]) {
    let l = lambda;
    let mut plus = [[0.0; 3]; 4];
    let mut minus = [[0.0; 3]; 4];
    for r in 0..4 {
        let terms = [
            ((l[0] - l[1]) * nabla.get(r, 0, 1), (l[2] - l[3]) * nabla.get(r, 2, 3)),
            ((l[0] - l[2]) * nabla.get(r, 0, 2), (l[3] - l[1]) * nabla.get(r, 3, 1)),
            ((l[0] - l[3]) * nabla.get(r, 0, 3), (l[1] - l[2]) * nabla.get(r, 1, 2)),
        ];
        for (k, (x, y)) in terms.iter().enumerate() {
            plus[r][k] = 0.25 * (x + y);
            minus[r][k] = 0.25 * (x - y);
        }
    }
    (plus, minus)
}

/// Laplacian and gradient data not derivable from `A`, `∇A`, `Hess S`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldData {
    pub laplacian_a: Option<DMatrix<f64>>,
    pub laplacian_a2: Option<DMatrix<f64>>,
    pub laplacian_a2sq: Option<f64>,
    /// Asserts `∇W⁺ = ∇W⁻ = 0`, which zeroes the Weyl Laplacian and gradient terms.
    pub parallel_weyl: bool,
    pub laplacian_wplus_sq: Option<f64>,
    pub grad_wplus_sq: Option<f64>,
    pub laplacian_wminus_sq: Option<f64>,
    pub grad_wminus_sq: Option<f64>,
}

/// `LHS − RHS` of one identity, or the reason it could not be evaluated.
/// Matrix-valued identities report the Frobenius norm of the difference.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Value(f64),
    Unavailable(String),
}

impl Residual {
    pub fn value(&self) -> Option<f64> {
        match self {
            Residual::Value(v) => Some(*v),
            Residual::Unavailable(_) => None,
        }
    }
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Residual::Value(v) => s.serialize_f64(*v),
            Residual::Unavailable(why) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("unavailable", why)?;
                m.end()
            }
        }
    }
}

/// Residuals of the Simons, Bochner and Bach-type identities:
///
/// - `simonsLocal`: `ΔA − (nc − S)A` (minimal)
/// - `simonsScalar`: `½ΔS − |∇A|² − S(nc − S)` (minimal)
/// - `laplaceA2`: `ΔA² − 2(4c − S)A² − 2A_ikt A_jkt` (minimal, n = 4)
/// - `laplaceA2sq`: `½Δ|A²|² − |∇A²|² − 2|A²|²(4c − S) − 2A²_ij A_ikt A_jkt`
/// - `firstBach`: `A_ij A_ikl A_jkl − tr(A⁵) + (2c + S/3)tr(A³) − ⅙A_ij S_ij`
/// - `secondBach`: `½Δ|A²|² − |∇A²|² − 2tr(A⁶) + 2tr(A³)² + (7/6)S|A²|² − S³/6
///   − c(4|A²|² − S²) − ⅓S_ij A²_ij − ⅙SΔS`
/// - `scalarBochnerPlus/Minus`: `½Δ|W±|² − |∇W±|² − (R/2)|W±|² + 3W±_ijkl W±_pqkl W±_ijpq`
///
/// The two Bach identities vanish on Bach-flat points (they are `⟨B, A⟩ = 0`
/// and its companion), not identically.
pub fn bochner_residuals(p: &PointState, fields: &FieldData) -> BTreeMap<&'static str, Residual> {
    let mut out = BTreeMap::new();
    let a = p.a();
    let n = p.n();
    let nf = n as f64;
    let c = p.c();
    let t = trace_powers(a);
    let s = t[2];
    let a2 = a * a;
    let a2sq = a2.norm_squared();
    let minimal = p.is_minimal();
    let nabla = p.nabla_a();
    let hess = p.hess_s();
    let zero_if_parallel = |m: &Option<DMatrix<f64>>| -> Option<DMatrix<f64>> {
        m.clone().or_else(|| p.parallel().then(|| DMatrix::zeros(n, n)))
    };
    let lap_a = zero_if_parallel(&fields.laplacian_a);
    let lap_a2 = zero_if_parallel(&fields.laplacian_a2);
    let lap_a2sq = fields.laplacian_a2sq.or(p.parallel().then_some(0.0));

    let unavailable = |why: &str| Residual::Unavailable(why.to_string());
    let not_minimal = "requires a minimal point";
    let not_four = "requires n = 4";

    out.insert(
        "simonsLocal",
        match (&lap_a, minimal) {
            (_, false) => unavailable(not_minimal),
            (None, _) => unavailable("needs laplacianA or the parallel flag"),
            (Some(l), true) => Residual::Value((l - a * (nf * c - s)).norm()),
        },
    );

    out.insert(
        "simonsScalar",
        match (&nabla, &hess, minimal) {
            (_, _, false) => unavailable(not_minimal),
            (Some(d), Some(h), true) => Residual::Value(0.5 * h.trace() - d.norm_sq() - s * (nf * c - s)),
            _ => unavailable("needs nablaA and hessS or the parallel flag"),
        },
    );

    let four = n == 4;
    out.insert(
        "laplaceA2",
        match (&lap_a2, &nabla, minimal, four) {
            (_, _, _, false) => unavailable(not_four),
            (_, _, false, _) => unavailable(not_minimal),
            (Some(l), Some(d), true, true) => {
                Residual::Value((l - &a2 * (2.0 * (4.0 * c - s)) - nabla_gram(d) * 2.0).norm())
            }
            _ => unavailable("needs laplacianA2 and nablaA or the parallel flag"),
        },
    );

    out.insert(
        "laplaceA2sq",
        match (lap_a2sq, &nabla, minimal, four) {
            (_, _, _, false) => unavailable(not_four),
            (_, _, false, _) => unavailable(not_minimal),
            (Some(l), Some(d), true, true) => Residual::Value(
                0.5 * l - grad_a2_sq(a, d) - 2.0 * a2sq * (4.0 * c - s) - 2.0 * a2.dot(&nabla_gram(d)),
            ),
            _ => unavailable("needs laplacianA2sq and nablaA or the parallel flag"),
        },
    );

    out.insert(
        "firstBach",
        match (&nabla, &hess, minimal, four) {
            (_, _, _, false) => unavailable(not_four),
            (_, _, false, _) => unavailable(not_minimal),
            (Some(d), Some(h), true, true) => {
                let lhs = a.dot(&nabla_gram(d));
                let rhs = t[5] - (2.0 * c + s / 3.0) * t[3] + a.dot(h) / 6.0;
                Residual::Value(lhs - rhs)
            }
            _ => unavailable("needs nablaA and hessS or the parallel flag"),
        },
    );

    out.insert(
        "secondBach",
        match (lap_a2sq, &nabla, &hess, minimal, four) {
            (_, _, _, _, false) => unavailable(not_four),
            (_, _, _, false, _) => unavailable(not_minimal),
            (Some(l), Some(d), Some(h), true, true) => {
                let rhs = grad_a2_sq(a, d) + 2.0 * t[6] - 2.0 * t[3] * t[3] - 7.0 / 6.0 * s * a2sq + s.powi(3) / 6.0
                    + c * (4.0 * a2sq - s * s)
                    + h.dot(&a2) / 3.0
                    + s * h.trace() / 6.0;
                Residual::Value(0.5 * l - rhs)
            }
            _ => unavailable("needs laplacianA2sq, nablaA and hessS or the parallel flag"),
        },
    );

    let weyl_data = p.parallel() || fields.parallel_weyl;
    for (name, part, lap, grad) in [
        ("scalarBochnerPlus", 0, fields.laplacian_wplus_sq, fields.grad_wplus_sq),
        ("scalarBochnerMinus", 1, fields.laplacian_wminus_sq, fields.grad_wminus_sq),
    ] {
        let entry = if !four {
            unavailable(not_four)
        } else {
            let lap = lap.or(weyl_data.then_some(0.0));
            let grad = grad.or(weyl_data.then_some(0.0));
            match (lap, grad, super::weyl_split(p)) {
                (Some(l), Some(g), Ok((wp, wm))) => {
                    let w = if part == 0 { wp } else { wm };
                    let r = nf * (nf - 1.0) * c + t[1] * t[1] - s;
                    Residual::Value(0.5 * l - g - 0.5 * r * w.norm_sq() + 3.0 * lambda2::triple(&w, &w, &w))
                }
                (_, _, Err(e)) => Residual::Unavailable(e.to_string()),
                _ => unavailable("needs the Weyl Laplacian and gradient or a parallel-Weyl assertion"),
            }
        };
        out.insert(name, entry);
    }
    out
}
