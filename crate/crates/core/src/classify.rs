//! Pointwise classification by principal-curvature multiplicities and the
//! spectrum of the Weyl operator on Λ±.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrinsic::{closed_form_norms, trace_powers, PointState};

/// Result of gap-based clustering of a list of reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    /// Cluster sizes, in order of descending value.
    pub partition: Vec<usize>,
    /// Cluster representatives (means), descending.
    pub values: Vec<f64>,
    /// Some gap lies within a factor two of the splitting threshold.
    pub indeterminate: bool,
}

impl Clustering {
    pub fn distinct(&self) -> usize {
        self.partition.len()
    }
}

/// Sort descending and split wherever consecutive values differ by more than
/// `tol·(1 + max|x|)`.
pub fn cluster(values: &[f64], tol: f64) -> Clustering {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let thr = tol * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let mut partition = Vec::new();
    let mut means = Vec::new();
    let mut indeterminate = false;
    let mut start = 0;
    for i in 0..v.len() {
        let last = i + 1 == v.len();
        let split = last || {
            let gap = v[i] - v[i + 1];
            if gap >= 0.5 * thr && gap <= 2.0 * thr {
                indeterminate = true;
            }
            gap > thr
        };
        if split {
            let group = &v[start..=i];
            partition.push(group.len());
            means.push(group.iter().sum::<f64>() / group.len() as f64);
            start = i + 1;
        }
    }
    Clustering { partition, values: means, indeterminate }
}

/// Number `m` of distinct principal curvatures and their multiplicities.
pub fn principal_multiplicities(lambda: &[f64], tol: f64) -> Clustering {
    cluster(lambda, tol)
}

/// Eigenvalues of `𝒲±` and their distinct count `w`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylSpectrum {
    pub w: usize,
    pub eigen: [f64; 3],
    pub indeterminate: bool,
}

/// `2W±_1i1i = ½(λ₁+λᵢ)(λ₁+λᵢ−H) + (H²−S)/6`, `i = 2,3,4`, which are the
/// eigenvalues of both `𝒲⁺` and `𝒲⁻` in a frame diagonalizing `A`.
pub fn weyl_operator_spectrum(lambda: &[f64; 4], tol: f64) -> WeylSpectrum {
    let h: f64 = lambda.iter().sum();
    let s: f64 = lambda.iter().map(|x| x * x).sum();
    let mut eigen = [0.0; 3];
    for (slot, li) in eigen.iter_mut().zip(&lambda[1..]) {
        let p = lambda[0] + li;
        *slot = 0.5 * p * (p - h) + (h * h - s) / 6.0;
    }
    eigen.sort_by(|a, b| b.total_cmp(a));
    let c = cluster(&eigen, tol);
    WeylSpectrum { w: c.distinct(), eigen, indeterminate: c.indeterminate }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    pub lcf: bool,
    pub einstein: bool,
    pub two_two_split: bool,
}

/// Locally conformally flat iff some principal curvature has multiplicity
/// at least three. Einstein for minimal points iff `A = 0` or the spectrum
/// is `(λ,λ,−λ,−λ)`; otherwise iff `|Ric̊|² ≤ tol·(1 + S²)`.
pub fn structure_predicates(lambda: &[f64; 4], tol: f64) -> Flags {
    let cl = cluster(lambda, tol);
    let lcf = cl.partition.iter().any(|&k| k >= 3);
    let two_two_split = cl.partition == [2, 2];
    let scale = 1.0 + lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let h: f64 = lambda.iter().sum();
    let einstein = if h.abs() <= tol.max(1e-10) * scale {
        let zero = lambda.iter().all(|x| x.abs() <= tol * scale);
        zero || (two_two_split && (cl.values[0] + cl.values[1]).abs() <= tol * scale)
    } else {
        let t = trace_powers(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambda)));
        let a4: f64 = lambda.iter().map(|x| x.powi(4)).sum();
        let (h, s) = (t[1], t[2]);
        let ric_tf = a4 - 0.25 * s * s + 1.5 * h * h * s - 2.0 * h * t[3] - h.powi(4) / 4.0;
        ric_tf <= tol * (1.0 + s * s)
    };
    Flags { lcf, einstein, two_two_split }
}

/// Slacks of the sharp trace inequalities for trace-free `A`:
///
/// - `a2sq_lower`: `|A²|² − S²/n`
/// - `a2sq_upper`: `(n²−3n+3)/(n(n−1))·S² − |A²|²`
/// - `trA3_upper`, `trA3_lower`: `(n−2)/√(n(n−1))·S^{3/2} ∓ tr(A³)`
///
/// Equality is flagged when `|slack| ≤ tol·S^p` with `p` the homogeneity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpReport {
    pub margins: BTreeMap<&'static str, f64>,
    pub equality: BTreeMap<&'static str, bool>,
}

pub fn sharp_inequalities(p: &PointState) -> Result<SharpReport> {
    if !p.is_minimal() {
        return Err(Error::NotMinimal { h: p.h() });
    }
    let n = p.n() as f64;
    let t = trace_powers(p.a());
    let s = t[2];
    let a2sq = trace_powers(&(p.a() * p.a()))[2];
    let cubic = (n - 2.0) / (n * (n - 1.0)).sqrt() * s.powf(1.5);
    let tol = p.tol();
    let rows = [
        ("a2sq_lower", a2sq - s * s / n, 2.0),
        ("a2sq_upper", (n * n - 3.0 * n + 3.0) / (n * (n - 1.0)) * s * s - a2sq, 2.0),
        ("trA3_upper", cubic - t[3], 1.5),
        ("trA3_lower", cubic + t[3], 1.5),
    ];
    let mut margins = BTreeMap::new();
    let mut equality = BTreeMap::new();
    for (name, slack, power) in rows {
        margins.insert(name, slack);
        equality.insert(name, slack.abs() <= tol * s.powf(power));
    }
    Ok(SharpReport { margins, equality })
}

/// Everything the pointwise classifier knows about a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumReport {
    pub m: usize,
    pub partition: Vec<usize>,
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl_eigen: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flags: Option<Flags>,
    pub margins: BTreeMap<&'static str, f64>,
    pub equality: BTreeMap<&'static str, bool>,
    pub indeterminate: bool,
}

/// Classify a point. The Weyl data and flags are filled for `n = 4`; the
/// trace margins only at minimal points.
pub fn spectrum_report(p: &PointState) -> SpectrumReport {
    let tol = p.tol();
    let lambda = p.spectrum();
    let mult = principal_multiplicities(&lambda, tol);
    let (w, weyl_eigen, flags, w_indet) = match <[f64; 4]>::try_from(lambda.as_slice()) {
        Ok(l4) => {
            let ws = weyl_operator_spectrum(&l4, tol);
            (Some(ws.w), Some(ws.eigen), Some(structure_predicates(&l4, tol)), ws.indeterminate)
        }
        Err(_) => (None, None, None, false),
    };
    let (margins, equality) = match sharp_inequalities(p) {
        Ok(r) => (r.margins, r.equality),
        Err(_) => Default::default(),
    };
    SpectrumReport {
        m: mult.distinct(),
        partition: mult.partition,
        lambda,
        w,
        weyl_eigen,
        flags,
        margins,
        equality,
        indeterminate: mult.indeterminate || w_indet,
    }
}

/// Whether `w` agrees with the multiplicity table for `n = 4`:
/// `w = 3 ⟺ m = 4`, `w = 2 ⟺ m = 3 or partition (2,2)`, `w = 1 ⟺` some
/// multiplicity is at least three.
pub fn m_w_consistent(partition: &[usize], w: usize) -> bool {
    let expected = match partition.len() {
        4 => 3,
        3 => 2,
        2 if partition.contains(&2) => 2,
        _ => 1,
    };
    w == expected
}

/// Pointwise `|W|²` used to cross-check the lcf flag.
pub fn weyl_norm_sq(p: &PointState) -> Result<f64> {
    Ok(closed_form_norms(p)?.wsq)
}

/// Whether every sampled point has the same principal curvatures (within
/// `tol`). A finite sample cannot certify isoparametricity; this only
/// reports constancy on the supplied set.
pub fn constant_over_samples(samples: &[Vec<f64>], tol: f64) -> bool {
    let Some(first) = samples.first() else { return true };
    let sort = |v: &Vec<f64>| {
        let mut v = v.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let base = sort(first);
    let scale = 1.0 + base.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    samples.iter().all(|s| {
        let s = sort(s);
        s.len() == base.len() && s.iter().zip(&base).all(|(x, y)| (x - y).abs() <= tol * scale)
    })
}
