//! Catalog hypersurfaces of the unit sphere `S⁵ ⊂ ℝ⁶`, their second
//! fundamental forms (analytic and finite-difference) and product-rule
//! quadrature of curvature functionals.

mod quadrature;

pub use quadrature::{gauss_legendre, Axis, AxisKind, QuadratureGrid};

use std::f64::consts::{FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4, Matrix6, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrinsic::{cgb_of, signature_of, weyl_sq_of, PointState};

/// Catalog entries.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `S^k(√(k/n)) × S^{n−k}(√((n−k)/n))`.
    Clifford { n: usize, k: usize },
    /// Equatorial `S^n`.
    TotallyGeodesicSphere { n: usize },
    /// Small sphere `S⁴(sin ρ)` at height `cos ρ`, with `A = cot ρ · I`.
    UmbilicSphere { rho: f64 },
    /// A point of the isoparametric hypersurface with four distinct principal
    /// curvatures; no chart.
    IsoparametricM4Point,
    /// User-supplied chart.
    Custom(String),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Clifford { n, k } => write!(f, "clifford:{n}:{k}"),
            Kind::TotallyGeodesicSphere { n } => write!(f, "sphere:{n}"),
            Kind::UmbilicSphere { rho } => write!(f, "umbilic:{rho}"),
            Kind::IsoparametricM4Point => write!(f, "isoparametric-m4"),
            Kind::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    /// `clifford:N:K`, `sphere:N`, `umbilic:RHO`, `isoparametric-m4`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<usize>().map_err(|_| Error::UnknownKind(s.to_string()));
        match parts.as_slice() {
            ["clifford", n, k] => {
                let (n, k) = (num(n)?, num(k)?);
                if k == 0 || k >= n {
                    return Err(Error::InvalidInput(format!("clifford:{n}:{k} needs 0 < k < n")));
                }
                Ok(Kind::Clifford { n, k })
            }
            ["sphere", n] => Ok(Kind::TotallyGeodesicSphere { n: num(n)? }),
            ["umbilic", rho] => {
                let rho: f64 = rho.parse().map_err(|_| Error::UnknownKind(s.to_string()))?;
                if !(rho > 0.0 && rho < PI) {
                    return Err(Error::InvalidInput(format!("umbilic radius angle must lie in (0, pi), got {rho}")));
                }
                Ok(Kind::UmbilicSphere { rho })
            }
            ["isoparametric-m4"] | ["m4"] => Ok(Kind::IsoparametricM4Point),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// Analytic point data of a catalog entry, flagged parallel (`∇A = 0`).
pub fn catalog_point(kind: &Kind) -> Result<PointState> {
    let (c, lambda) = match *kind {
        Kind::Clifford { n, k } => {
            if k == 0 || k >= n {
                return Err(Error::InvalidInput(format!("clifford:{n}:{k} needs 0 < k < n")));
            }
            let (nf, kf) = (n as f64, k as f64);
            let l1 = ((nf - kf) / kf).sqrt();
            let l2 = -(kf / (nf - kf)).sqrt();
            (1.0, (0..n).map(|i| if i < k { l1 } else { l2 }).collect::<Vec<_>>())
        }
        Kind::TotallyGeodesicSphere { n } => (1.0, vec![0.0; n]),
        Kind::UmbilicSphere { rho } => (1.0, vec![1.0 / rho.tan(); 4]),
        Kind::IsoparametricM4Point => {
            (1.0, [1.0, 3.0, 5.0, 7.0].iter().map(|j| 1.0 / (j * FRAC_PI_8).tan()).collect())
        }
        Kind::Custom(ref name) => return Err(Error::UnknownKind(format!("custom:{name} has no catalog data"))),
    };
    Ok(PointState::from_spectrum(c, &lambda)?.with_parallel(true))
}

/// A round factor `S^d(r)` in hyperspherical coordinates: `d − 1` polar
/// angles followed by one azimuth. Coordinate `i` of the unit sphere is
/// `sin θ₀ ⋯ sin θ_{i−1} cos θ_i` (the last one ends in `sin θ_{d−1}`).
#[derive(Debug, Clone)]
struct Factor {
    dim: usize,
    radius: f64,
    /// Coefficient of `u` in the unit normal.
    normal: f64,
    /// First ambient coordinate.
    offset: usize,
    /// First chart parameter.
    param: usize,
    /// Per coordinate, the angles it depends on and whether through `sin`.
    rows: Vec<Vec<(usize, bool)>>,
}

impl Factor {
    fn new(dim: usize, radius: f64, normal: f64, offset: usize, param: usize) -> Self {
        let rows = (0..=dim)
            .map(|i| (0..dim.min(i + 1)).map(|a| (a, a < i)).collect())
            .collect();
        Self { dim, radius, normal, offset, param, rows }
    }

    fn axes(&self, res: usize) -> Vec<Axis> {
        (0..self.dim).map(|a| if a + 1 == self.dim { Axis::periodic(res) } else { Axis::polar(res) }).collect()
    }
}

/// Position, first and second derivatives and unit normal at a chart point.
#[derive(Debug, Clone, Copy)]
struct Jet {
    x: [f64; 6],
    xa: [[f64; 6]; 4],
    xab: [[[f64; 6]; 4]; 4],
    nu: [f64; 6],
}

#[derive(Debug, Clone)]
struct ProductChart {
    factors: Vec<Factor>,
    x0: [f64; 6],
    nu0: [f64; 6],
}

impl ProductChart {
    fn axes(&self, res: usize) -> Vec<Axis> {
        self.factors.iter().flat_map(|f| f.axes(res)).collect()
    }

    #[inline]
    fn jet(&self, trig: &[(f64, f64); 4]) -> Jet {
        // d^k/dθ^k of cos and sin, k = 0, 1, 2.
        let table: [[[f64; 3]; 2]; 4] = std::array::from_fn(|a| {
            let (c, s) = trig[a];
            [[c, -s, -c], [s, c, -s]]
        });
        let mut j = Jet { x: self.x0, xa: [[0.0; 6]; 4], xab: [[[0.0; 6]; 4]; 4], nu: self.nu0 };
        for f in &self.factors {
            let p = f.param;
            for (i, row) in f.rows.iter().enumerate() {
                let at = f.offset + i;
                let v = |a: usize, sin: bool, order: usize| table[p + a][usize::from(sin)][order];
                let u: f64 = row.iter().map(|&(a, sin)| v(a, sin, 0)).product();
                j.x[at] += f.radius * u;
                j.nu[at] += f.normal * u;
                for (ia, &(a, _)) in row.iter().enumerate() {
                    let da: f64 = row
                        .iter()
                        .map(|&(e, sin)| v(e, sin, usize::from(e == a)))
                        .product();
                    j.xa[p + a][at] = f.radius * da;
                    for &(b, _) in &row[ia..] {
                        let dab: f64 = row
                            .iter()
                            .map(|&(e, sin)| v(e, sin, usize::from(e == a) + usize::from(e == b)))
                            .product();
                        j.xab[p + a][p + b][at] = f.radius * dab;
                        j.xab[p + b][p + a][at] = f.radius * dab;
                    }
                }
            }
        }
        j
    }
}

type CustomMap = Arc<dyn Fn(&[f64; 4]) -> [f64; 6] + Send + Sync>;

#[derive(Clone)]
enum Chart {
    None,
    Product(ProductChart),
    Custom { map: CustomMap, lo: [f64; 4], hi: [f64; 4] },
}

/// A parametrized hypersurface of `S⁵`.
#[derive(Clone)]
pub struct Immersion {
    kind: Kind,
    chart: Chart,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl Immersion {
    pub fn new(kind: Kind) -> Result<Self> {
        let chart = match kind {
            Kind::Clifford { n: 4, k } if (1..4).contains(&k) => {
                let r1 = (k as f64 / 4.0).sqrt();
                let r2 = ((4 - k) as f64 / 4.0).sqrt();
                Chart::Product(ProductChart {
                    factors: vec![Factor::new(k, r1, -r2, 0, 0), Factor::new(4 - k, r2, r1, k + 1, k)],
                    x0: [0.0; 6],
                    nu0: [0.0; 6],
                })
            }
            Kind::TotallyGeodesicSphere { n: 4 } => Self::small_sphere(PI / 2.0),
            Kind::UmbilicSphere { rho } => Self::small_sphere(rho),
            _ => Chart::None,
        };
        Ok(Self { kind, chart })
    }

    fn small_sphere(rho: f64) -> Chart {
        let mut x0 = [0.0; 6];
        let mut nu0 = [0.0; 6];
        x0[5] = rho.cos();
        nu0[5] = rho.sin();
        Chart::Product(ProductChart { factors: vec![Factor::new(4, rho.sin(), -rho.cos(), 0, 0)], x0, nu0 })
    }

    /// A custom chart on the box `[lo, hi]`; integrals over it are local.
    pub fn custom(
        name: &str,
        lo: [f64; 4],
        hi: [f64; 4],
        map: impl Fn(&[f64; 4]) -> [f64; 6] + Send + Sync + 'static,
    ) -> Self {
        Self { kind: Kind::Custom(name.to_string()), chart: Chart::Custom { map: Arc::new(map), lo, hi } }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn has_chart(&self) -> bool {
        !matches!(self.chart, Chart::None)
    }

    /// Analytic principal curvatures, when known.
    pub fn analytic_spectrum(&self) -> Option<Vec<f64>> {
        catalog_point(&self.kind).ok().map(|p| p.spectrum())
    }

    /// Product quadrature grid at `res` nodes per angle.
    pub fn grid(&self, res: usize) -> Result<QuadratureGrid> {
        match &self.chart {
            Chart::Product(p) => Ok(QuadratureGrid { axes: p.axes(res) }),
            Chart::Custom { lo, hi, .. } => Ok(QuadratureGrid {
                axes: (0..4)
                    .map(|a| {
                        let (x, w) = gauss_legendre(res);
                        let half = 0.5 * (hi[a] - lo[a]);
                        Axis {
                            kind: AxisKind::Polar,
                            nodes: x.iter().map(|t| lo[a] + half * (t + 1.0)).collect(),
                            weights: w.iter().map(|v| half * v).collect(),
                        }
                    })
                    .collect(),
            }),
            Chart::None => Err(self.no_chart()),
        }
    }

    fn no_chart(&self) -> Error {
        Error::InvalidInput(format!("{} has no chart (point data only)", self.kind))
    }

    /// Image of a chart point in `ℝ⁶`.
    pub fn embed(&self, params: &[f64; 4]) -> Result<[f64; 6]> {
        match &self.chart {
            Chart::Product(p) => Ok(p.jet(&trig_of(params)).x),
            Chart::Custom { map, .. } => Ok(map(params)),
            Chart::None => Err(self.no_chart()),
        }
    }

    fn analytic_normal(&self, params: &[f64; 4]) -> Option<[f64; 6]> {
        match &self.chart {
            Chart::Product(p) => Some(p.jet(&trig_of(params)).nu),
            _ => None,
        }
    }
}

fn trig_of(params: &[f64; 4]) -> [(f64, f64); 4] {
    let mut t = [(0.0, 0.0); 4];
    for (slot, p) in t.iter_mut().zip(params) {
        *slot = (p.cos(), p.sin());
    }
    t
}

fn dot6(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `A = L⁻¹ h L⁻ᵀ` with `g = LLᵀ`, plus `√det g`.
#[inline]
fn shape_operator(g: &Matrix4<f64>, h: &Matrix4<f64>) -> Option<(Matrix4<f64>, f64)> {
    let mut l = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for k in 0..=i {
            let mut v = g[(i, k)];
            for m in 0..k {
                v -= l[i][m] * l[k][m];
            }
            if i == k {
                if v <= 0.0 {
                    return None;
                }
                l[i][i] = v.sqrt();
            } else {
                l[i][k] = v / l[k][k];
            }
        }
    }
    // y = L⁻¹ h, then A = L⁻¹ yᵀ.
    let solve = |rhs: [[f64; 4]; 4]| -> [[f64; 4]; 4] {
        let mut y = [[0.0; 4]; 4];
        for col in 0..4 {
            for i in 0..4 {
                let mut v = rhs[i][col];
                for m in 0..i {
                    v -= l[i][m] * y[m][col];
                }
                y[i][col] = v / l[i][i];
            }
        }
        y
    };
    let y = solve(std::array::from_fn(|i| std::array::from_fn(|j| h[(i, j)])));
    let a = solve(std::array::from_fn(|i| std::array::from_fn(|j| y[j][i])));
    let det_sqrt = l[0][0] * l[1][1] * l[2][2] * l[3][3];
    Some((Matrix4::from_fn(|i, j| 0.5 * (a[i][j] + a[j][i])), det_sqrt))
}

const CONDITION_LIMIT: f64 = 1e12;

fn condition(g: &Matrix4<f64>) -> f64 {
    let e = SymmetricEigen::new(*g).eigenvalues;
    let (lo, hi) = e.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x.abs()), hi.max(x.abs())));
    hi / lo
}

/// Second fundamental form in an orthonormal tangent frame from central
/// differences of the chart with step `h` and one Richardson level.
pub fn numeric_second_fundamental_form(imm: &Immersion, params: &[f64; 4], h: f64) -> Result<Matrix4<f64>> {
    let x = imm.embed(params)?;
    let off = (dot6(&x, &x).sqrt() - 1.0).abs();
    if off > 1e-10 {
        return Err(Error::OffSphere { defect: off });
    }
    let at = |p: [f64; 4]| imm.embed(&p);
    let shift = |p: &[f64; 4], a: usize, s: f64| {
        let mut q = *p;
        q[a] += s;
        q
    };
    let first = |a: usize, h: f64| -> Result<[f64; 6]> {
        let (xp, xm) = (at(shift(params, a, h))?, at(shift(params, a, -h))?);
        Ok(std::array::from_fn(|i| (xp[i] - xm[i]) / (2.0 * h)))
    };
    let second = |a: usize, b: usize, h: f64| -> Result<[f64; 6]> {
        if a == b {
            let (xp, xm) = (at(shift(params, a, h))?, at(shift(params, a, -h))?);
            Ok(std::array::from_fn(|i| (xp[i] - 2.0 * x[i] + xm[i]) / (h * h)))
        } else {
            let pp = at(shift(&shift(params, a, h), b, h))?;
            let pm = at(shift(&shift(params, a, h), b, -h))?;
            let mp = at(shift(&shift(params, a, -h), b, h))?;
            let mm = at(shift(&shift(params, a, -h), b, -h))?;
            Ok(std::array::from_fn(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h)))
        }
    };
    let richardson = |d1: [f64; 6], d2: [f64; 6]| -> [f64; 6] { std::array::from_fn(|i| (4.0 * d2[i] - d1[i]) / 3.0) };

    let mut xa = [[0.0; 6]; 4];
    for (a, slot) in xa.iter_mut().enumerate() {
        *slot = richardson(first(a, h)?, first(a, 0.5 * h)?);
    }
    let g = Matrix4::from_fn(|a, b| dot6(&xa[a], &xa[b]));
    let cond = condition(&g);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::DegenerateChart { condition: cond });
    }

    let nu = normal_from_frame(&x, &xa, imm.analytic_normal(params));
    let mut hm = Matrix4::zeros();
    for a in 0..4 {
        for b in a..4 {
            let d = richardson(second(a, b, h)?, second(a, b, 0.5 * h)?);
            hm[(a, b)] = dot6(&d, &nu);
            hm[(b, a)] = hm[(a, b)];
        }
    }
    let (a, _) = shape_operator(&g, &hm).ok_or(Error::DegenerateChart { condition: cond })?;
    Ok((a + a.transpose()) * 0.5)
}

/// Unit vector orthogonal to `x` and the tangent frame, by Gram–Schmidt.
/// Oriented along `hint` when given, else so that `det[x, x_a, ν] > 0`.
fn normal_from_frame(x: &[f64; 6], xa: &[[f64; 6]; 4], hint: Option<[f64; 6]>) -> [f64; 6] {
    let mut basis: Vec<[f64; 6]> = Vec::with_capacity(5);
    for v in std::iter::once(x).chain(xa.iter()) {
        let mut w = *v;
        for b in &basis {
            let d = dot6(&w, b);
            for i in 0..6 {
                w[i] -= d * b[i];
            }
        }
        let n = dot6(&w, &w).sqrt();
        basis.push(std::array::from_fn(|i| w[i] / n));
    }
    let mut best = [0.0; 6];
    let mut best_norm = -1.0;
    for e in 0..6 {
        let mut w = [0.0; 6];
        w[e] = 1.0;
        for b in &basis {
            let d = dot6(&w, b);
            for i in 0..6 {
                w[i] -= d * b[i];
            }
        }
        let n = dot6(&w, &w).sqrt();
        if n > best_norm {
            best_norm = n;
            best = std::array::from_fn(|i| w[i] / n);
        }
    }
    let sign = match hint {
        Some(h) => dot6(&best, &h).signum(),
        None => {
            let m = Matrix6::from_fn(|i, j| match j {
                0 => x[i],
                5 => best[i],
                _ => xa[j - 1][i],
            });
            m.determinant().signum()
        }
    };
    best.map(|v| sign * v)
}

/// Integrated functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Functional {
    /// `(1/32π²) ∫` Chern–Gauss–Bonnet density `= χ`.
    CgbEuler,
    /// `∫ |W|²`.
    WeylFunctional,
    /// `(1/48π²) ∫ (|W⁺|² − |W⁻|²) = τ`.
    Signature,
    Volume,
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cgb" | "cgbEuler" | "euler" | "chi" => Ok(Functional::CgbEuler),
            "weyl" | "weylFunctional" => Ok(Functional::WeylFunctional),
            "signature" | "tau" => Ok(Functional::Signature),
            "volume" | "vol" => Ok(Functional::Volume),
            _ => Err(Error::InvalidInput(format!("unknown functional `{s}` (cgb, weyl, signature, volume)"))),
        }
    }
}

impl Functional {
    fn density(self, a: &Matrix4<f64>, c: f64) -> f64 {
        match self {
            Functional::CgbEuler => cgb_of(a, c),
            Functional::WeylFunctional => weyl_sq_of(a),
            Functional::Signature => signature_of(a),
            Functional::Volume => 1.0,
        }
    }

    fn normalization(self) -> f64 {
        match self {
            Functional::CgbEuler => 1.0 / (32.0 * PI * PI),
            Functional::Signature => 1.0 / (48.0 * PI * PI),
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegralResult {
    pub geometry: String,
    pub functional: Functional,
    /// Normalized value: `χ`, `τ`, `∫|W|²` or the volume.
    pub value: f64,
    /// The bare integral `∫ density dV`.
    pub integral: f64,
    pub res: usize,
    pub nodes: usize,
    /// `false` for local patches, where the value carries no topological meaning.
    pub topological: bool,
}

/// Per-node record for dumps. `weight` includes `√det g`, so the integral
/// is `Σ integrand · weight`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRecord {
    pub params: [f64; 4],
    pub integrand: f64,
    pub weight: f64,
}

/// `∫ density dV` over the chart at `res` nodes per angle.
pub fn integrate(imm: &Immersion, functional: Functional, res: usize) -> Result<IntegralResult> {
    run(imm, functional, res, false).map(|(r, _)| r)
}

/// As [`integrate`], also returning every node in grid order.
pub fn integrate_with_nodes(imm: &Immersion, functional: Functional, res: usize) -> Result<(IntegralResult, Vec<NodeRecord>)> {
    run(imm, functional, res, true)
}

/// Derivative multi-indices up to order two: `∅`, `e_a`, `e_a + e_b` (`a ≤ b`).
const MULTI: [[usize; 4]; 15] = {
    let mut out = [[0; 4]; 15];
    let mut k = 1;
    let mut a = 0;
    while a < 4 {
        out[k][a] = 1;
        k += 1;
        a += 1;
    }
    let mut a = 0;
    while a < 4 {
        let mut b = a;
        while b < 4 {
            out[k][a] += 1;
            out[k][b] += 1;
            k += 1;
            b += 1;
        }
        a += 1;
    }
    out
};

fn second_slot(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    // Rows a' < a contribute 4 − a' entries each.
    5 + (0..a).map(|x| 4 - x).sum::<usize>() + (b - a)
}

/// Ambient coordinate `radius · Π_a f_a(θ_a)` with `f ∈ {1, cos, sin}`.
struct SepCoord {
    at: usize,
    radius: f64,
    normal: f64,
    funcs: [usize; 4],
}

fn separable(p: &ProductChart) -> Vec<SepCoord> {
    let mut out = Vec::new();
    for f in &p.factors {
        for (i, row) in f.rows.iter().enumerate() {
            let mut funcs = [0; 4];
            for &(a, sin) in row {
                funcs[f.param + a] = if sin { 2 } else { 1 };
            }
            out.push(SepCoord { at: f.offset + i, radius: f.radius, normal: f.normal, funcs });
        }
    }
    out
}

/// Product-chart quadrature over one outermost node. The coordinate
/// products over the three outer angles are formed once per inner sweep.
#[allow(clippy::too_many_arguments)]
fn product_block(
    p: &ProductChart,
    coords: &[SepCoord],
    axes: &[Axis],
    vals: &[Vec<[[f64; 3]; 3]>],
    functional: Functional,
    i0: usize,
    keep: bool,
    recs: &mut Vec<NodeRecord>,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut outer = vec![[0.0f64; 15]; coords.len()];
    for i1 in 0..axes[1].len() {
        for i2 in 0..axes[2].len() {
            for (slot, co) in outer.iter_mut().zip(coords) {
                for (m, o) in MULTI.iter().enumerate() {
                    slot[m] = vals[0][i0][co.funcs[0]][o[0]] * vals[1][i1][co.funcs[1]][o[1]] * vals[2][i2][co.funcs[2]][o[2]];
                }
            }
            let w012 = axes[0].weights[i0] * axes[1].weights[i1] * axes[2].weights[i2];
            for i3 in 0..axes[3].len() {
                let v3 = &vals[3][i3];
                let mut d = [[0.0f64; 6]; 15];
                let mut nu = p.nu0;
                for (slot, co) in outer.iter().zip(coords) {
                    let f3 = &v3[co.funcs[3]];
                    for (m, o) in MULTI.iter().enumerate() {
                        d[m][co.at] = co.radius * slot[m] * f3[o[3]];
                    }
                    nu[co.at] += co.normal * slot[0] * f3[0];
                }
                let g = Matrix4::from_fn(|a, b| dot6(&d[1 + a], &d[1 + b]));
                let h = Matrix4::from_fn(|a, b| dot6(&d[second_slot(a, b)], &nu));
                let (a, dv) = shape_operator(&g, &h).ok_or(Error::DegenerateChart { condition: f64::INFINITY })?;
                let f = functional.density(&a, 1.0);
                let w = w012 * axes[3].weights[i3] * dv;
                sum += f * w;
                if keep {
                    let idx = [i0, i1, i2, i3];
                    recs.push(NodeRecord { params: std::array::from_fn(|k| axes[k].nodes[idx[k]]), integrand: f, weight: w });
                }
            }
        }
    }
    Ok(sum)
}

/// Custom charts: finite-difference `A` at every node.
fn custom_block(imm: &Immersion, axes: &[Axis], functional: Functional, i0: usize, keep: bool, recs: &mut Vec<NodeRecord>) -> Result<f64> {
    let mut sum = 0.0;
    for i1 in 0..axes[1].len() {
        for i2 in 0..axes[2].len() {
            for i3 in 0..axes[3].len() {
                let idx = [i0, i1, i2, i3];
                let params: [f64; 4] = std::array::from_fn(|k| axes[k].nodes[idx[k]]);
                let a = numeric_second_fundamental_form(imm, &params, 1e-4)?;
                let step = 1e-6;
                let mut xa = [[0.0; 6]; 4];
                for (k, slot) in xa.iter_mut().enumerate() {
                    let mut q = params;
                    q[k] += step;
                    let xp = imm.embed(&q)?;
                    q[k] -= 2.0 * step;
                    let xm = imm.embed(&q)?;
                    *slot = std::array::from_fn(|i| (xp[i] - xm[i]) / (2.0 * step));
                }
                let g = Matrix4::from_fn(|a, b| dot6(&xa[a], &xa[b]));
                let w: f64 = (0..4).map(|k| axes[k].weights[idx[k]]).product::<f64>() * g.determinant().max(0.0).sqrt();
                let f = functional.density(&a, 1.0);
                sum += f * w;
                if keep {
                    recs.push(NodeRecord { params, integrand: f, weight: w });
                }
            }
        }
    }
    Ok(sum)
}

fn run(imm: &Immersion, functional: Functional, res: usize, keep: bool) -> Result<(IntegralResult, Vec<NodeRecord>)> {
    if res == 0 {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let grid = imm.grid(res)?;
    let axes = &grid.axes;
    // Per axis and node: [1, cos, sin] and their first two derivatives.
    let vals: Vec<Vec<[[f64; 3]; 3]>> = axes
        .iter()
        .map(|a| {
            a.nodes
                .iter()
                .map(|t| {
                    let (c, s) = (t.cos(), t.sin());
                    [[1.0, 0.0, 0.0], [c, -s, -c], [s, c, -s]]
                })
                .collect()
        })
        .collect();
    let coords = match &imm.chart {
        Chart::Product(p) => separable(p),
        _ => Vec::new(),
    };

    // One block per outermost node, summed in fixed order for reproducibility.
    let blocks: Vec<Result<(f64, Vec<NodeRecord>)>> = (0..axes[0].len())
        .into_par_iter()
        .map(|i0| {
            let mut recs = Vec::new();
            let sum = match &imm.chart {
                Chart::Product(p) => product_block(p, &coords, axes, &vals, functional, i0, keep, &mut recs)?,
                Chart::Custom { .. } => custom_block(imm, axes, functional, i0, keep, &mut recs)?,
                Chart::None => return Err(imm.no_chart()),
            };
            Ok((sum, recs))
        })
        .collect();
    let mut integral = 0.0;
    let mut records = Vec::new();
    for b in blocks {
        let (s, mut r) = b?;
        integral += s;
        records.append(&mut r);
    }
    let result = IntegralResult {
        geometry: imm.kind.to_string(),
        functional,
        value: integral * functional.normalization(),
        integral,
        res,
        nodes: grid.len(),
        topological: matches!(imm.chart, Chart::Product(_)),
    };
    Ok((result, records))
}

/// Analytic volume of a catalog entry with `n = 4`.
pub fn analytic_volume(kind: &Kind) -> Option<f64> {
    let s = |d: usize, r: f64| -> f64 {
        let unit = match d {
            1 => 2.0 * PI,
            2 => 4.0 * PI,
            3 => 2.0 * PI * PI,
            4 => 8.0 * PI * PI / 3.0,
            _ => return f64::NAN,
        };
        unit * r.powi(d as i32)
    };
    match *kind {
        Kind::Clifford { n: 4, k } if (1..4).contains(&k) => {
            Some(s(k, (k as f64 / 4.0).sqrt()) * s(4 - k, ((4 - k) as f64 / 4.0).sqrt()))
        }
        Kind::TotallyGeodesicSphere { n: 4 } => Some(s(4, 1.0)),
        Kind::UmbilicSphere { rho } => Some(s(4, rho.sin())),
        _ => None,
    }
}

/// Convenience: `DMatrix` view of a numeric second fundamental form.
pub fn to_dmatrix(a: &Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| a[(i, j)])
}
