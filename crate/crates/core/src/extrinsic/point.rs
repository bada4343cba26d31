use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};

/// Default relative tolerance for equality-style checks on unit-scale data.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    let defect = (m - m.transpose()).abs().max();
    if defect > 1e-12 * (1.0 + m.abs().max()) {
        return Err(Error::SymmetryViolation(format!("{what} is not symmetric (defect {defect:.3e})")));
    }
    Ok(())
}

/// Totally symmetric rank-3 array `A_ijk`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym3 {
    n: usize,
    data: Vec<f64>,
}

impl Sym3 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    /// Number of independent entries, `C(n+2, 3)`.
    pub fn packed_len(n: usize) -> usize {
        n * (n + 1) * (n + 2) / 6
    }

    /// From the independent entries `i ≤ j ≤ k` in lexicographic order.
    pub fn from_packed(n: usize, packed: &[f64]) -> Result<Self> {
        if packed.len() != Self::packed_len(n) {
            return Err(Error::InvalidInput(format!(
                "nablaA needs {} entries for n = {n}, got {}",
                Self::packed_len(n),
                packed.len()
            )));
        }
        let mut out = Self::zeros(n);
        let mut it = packed.iter();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    out.set_sym(i, j, k, *it.next().unwrap());
                }
            }
        }
        Ok(out)
    }

    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::InvalidInput(format!("dense rank-3 array needs {} entries", n * n * n)));
        }
        let out = Self { n, data };
        let scale = 1.0 + out.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = out.get(i, j, k);
                    if (v - out.get(j, i, k)).abs() > 1e-12 * scale || (v - out.get(i, k, j)).abs() > 1e-12 * scale {
                        return Err(Error::SymmetryViolation(format!(
                            "A_ijk not totally symmetric at ({},{},{})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Set `A_ijk` and all its permutations.
    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.data[(a * n + b) * n + c] = v;
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::packed_len(self.n));
        for i in 0..self.n {
            for j in i..self.n {
                for k in j..self.n {
                    out.push(self.get(i, j, k));
                }
            }
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// The symmetric matrix `(A_abt)_ab` for a fixed last index `t`.
    pub fn slice(&self, t: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| self.get(a, b, t))
    }

    /// `Σ_i A_iik`.
    pub fn trace_vector(&self) -> Vec<f64> {
        (0..self.n).map(|k| (0..self.n).map(|i| self.get(i, i, k)).sum()).collect()
    }
}

/// Pointwise extrinsic data of a hypersurface of a space form.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    n: usize,
    c: f64,
    a: DMatrix<f64>,
    nabla_a: Option<Sym3>,
    hess_s: Option<DMatrix<f64>>,
    parallel: bool,
    tol: f64,
    warnings: Vec<String>,
}

impl PointState {
    pub fn from_matrix(c: f64, a: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&a, "A")?;
        let n = a.nrows();
        if n < 3 {
            return Err(Error::UnsupportedDimension { n, what: "hypersurface dimension must be at least 3" });
        }
        if !c.is_finite() {
            return Err(Error::InvalidInput("c must be finite".into()));
        }
        let a = (&a + a.transpose()) * 0.5;
        let mut p = Self { n, c, a, nabla_a: None, hess_s: None, parallel: false, tol: DEFAULT_TOL, warnings: Vec::new() };
        if ![-1.0, 0.0, 1.0].contains(&c) {
            p.warnings.push(format!("ambient curvature c = {c} is not normalized to -1, 0 or 1"));
        }
        if p.s() > 1e8 {
            p.warnings.push(format!("|A|^2 = {:.3e} exceeds 1e8; results may be ill-conditioned", p.s()));
        }
        Ok(p)
    }

    pub fn from_spectrum(c: f64, lambda: &[f64]) -> Result<Self> {
        Self::from_matrix(c, DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambda)))
    }

    pub fn with_nabla_a(mut self, nabla: Sym3) -> Result<Self> {
        if nabla.n() != self.n {
            return Err(Error::InvalidInput(format!("nablaA has dimension {}, expected {}", nabla.n(), self.n)));
        }
        if self.is_minimal() {
            let tr = nabla.trace_vector();
            let defect = tr.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let scale = 1.0 + nabla.norm_sq().sqrt();
            if defect > self.tol * scale {
                return Err(Error::InvalidInput(format!(
                    "minimal point requires sum_i A_iik = dH = 0, defect {defect:.3e}"
                )));
            }
        }
        self.nabla_a = Some(nabla);
        Ok(self)
    }

    pub fn with_hess_s(mut self, hess: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&hess, "hessS")?;
        if hess.nrows() != self.n {
            return Err(Error::InvalidInput(format!("hessS must be {}x{}", self.n, self.n)));
        }
        self.hess_s = Some(hess);
        Ok(self)
    }

    /// Mark the point as isoparametric with parallel second fundamental form:
    /// every derivative term is taken to be zero.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn parallel(&self) -> bool {
        self.parallel
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn a4(&self) -> Result<Matrix4<f64>> {
        if self.n != 4 {
            return Err(Error::UnsupportedDimension { n: self.n, what: "operation is defined for n = 4" });
        }
        Ok(Matrix4::from_fn(|i, j| self.a[(i, j)]))
    }

    pub fn h(&self) -> f64 {
        self.a.trace()
    }

    pub fn s(&self) -> f64 {
        self.a.norm_squared()
    }

    pub fn is_minimal(&self) -> bool {
        self.h().abs() <= DEFAULT_TOL.max(self.tol) * (1.0 + self.a.norm())
    }

    /// Principal curvatures, sorted descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.a.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }

    /// `∇A`, with zeros substituted when the point is flagged parallel.
    pub fn nabla_a(&self) -> Option<Sym3> {
        match (&self.nabla_a, self.parallel) {
            (Some(n), _) => Some(n.clone()),
            (None, true) => Some(Sym3::zeros(self.n)),
            (None, false) => None,
        }
    }

    /// Hessian of `S`, with zeros substituted when the point is flagged parallel.
    pub fn hess_s(&self) -> Option<DMatrix<f64>> {
        match (&self.hess_s, self.parallel) {
            (Some(h), _) => Some(h.clone()),
            (None, true) => Some(DMatrix::zeros(self.n, self.n)),
            (None, false) => None,
        }
    }
}

/// `tr(A^k)` for `k = 0..=6` from repeated matrix products.
pub fn trace_powers(a: &DMatrix<f64>) -> [f64; 7] {
    let mut out = [0.0; 7];
    out[0] = a.nrows() as f64;
    let mut p = a.clone();
    for slot in out.iter_mut().skip(1) {
        *slot = p.trace();
        p = &p * a;
    }
    out
}
