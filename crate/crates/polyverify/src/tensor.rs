use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::poly::{q, RationalPoly};

/// Entries grouped by a pair of their indices.
type Buckets<'a> = BTreeMap<(usize, usize), Vec<(&'a [usize; 4], &'a RationalPoly)>>;

/// Sparse 4-index tensor with polynomial entries; zero entries are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor4 {
    nvars: usize,
    entries: BTreeMap<[usize; 4], RationalPoly>,
}

impl SymTensor4 {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, entries: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, idx: [usize; 4]) -> Option<&RationalPoly> {
        self.entries.get(&idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 4], &RationalPoly)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn accumulate(&mut self, idx: [usize; 4], p: RationalPoly) {
        if p.is_zero() {
            return;
        }
        let slot = self.entries.remove(&idx);
        let sum = match slot {
            Some(old) => &old + &p,
            None => p,
        };
        if !sum.is_zero() {
            self.entries.insert(idx, sum);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::new(self.nvars);
        for (k, v) in &self.entries {
            out.accumulate(*k, v.scale(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.accumulate(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1, 1)))
    }

    /// `Σ_ijkl S_ijkl T_ijkl`.
    pub fn inner(&self, other: &Self) -> RationalPoly {
        let mut acc = RationalPoly::zero(self.nvars);
        for (k, v) in &self.entries {
            if let Some(w) = other.entries.get(k) {
                acc = &acc + &(v * w);
            }
        }
        acc
    }

    /// Pair product `(ST)_ijpq = Σ_kl S_ijkl T_klpq`.
    pub fn pair_mul(&self, other: &Self) -> Self {
        let mut by_first: Buckets<'_> = BTreeMap::new();
        for (k, v) in &other.entries {
            by_first.entry((k[0], k[1])).or_default().push((k, v));
        }
        let mut out = Self::new(self.nvars);
        for (k, v) in &self.entries {
            if let Some(row) = by_first.get(&(k[2], k[3])) {
                for (k2, w) in row {
                    out.accumulate([k[0], k[1], k2[2], k2[3]], v * w);
                }
            }
        }
        out
    }

    /// `S_ijkl T_pqkl U_ijpq`.
    pub fn triple(&self, t: &Self, u: &Self) -> RationalPoly {
        self.pair_mul(&t.pair_transpose()).inner(u)
    }

    fn pair_transpose(&self) -> Self {
        Self { nvars: self.nvars, entries: self.entries.iter().map(|(k, v)| ([k[2], k[3], k[0], k[1]], v.clone())).collect() }
    }
}

/// Symmetric matrix with polynomial entries, dense.
pub type SymMatrix = Vec<Vec<RationalPoly>>;

/// Kulkarni–Nomizu product
/// `(U⊙V)_ijkl = U_ik V_jl + U_jl V_ik − U_il V_jk − U_jk V_il`.
pub fn kulkarni_nomizu(u: &SymMatrix, v: &SymMatrix) -> SymTensor4 {
    let n = u.len();
    let mut out = SymTensor4::new(u[0][0].nvars());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let terms = [
                        (&u[i][k], &v[j][l], false),
                        (&u[j][l], &v[i][k], false),
                        (&u[i][l], &v[j][k], true),
                        (&u[j][k], &v[i][l], true),
                    ];
                    for (a, b, neg) in terms {
                        if a.is_zero() || b.is_zero() {
                            continue;
                        }
                        let p = a * b;
                        out.accumulate([i, j, k, l], if neg { -&p } else { p });
                    }
                }
            }
        }
    }
    out
}

/// Sign of the permutation `(i, j, k, l)` of `(0, 1, 2, 3)`; 0 on repeats.
pub fn levi_civita(idx: [usize; 4]) -> i64 {
    let mut sign = 1;
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

/// Curvature of a hypersurface with `A = diag(λ_1..λ_n)` in a space form of
/// curvature `c`. Variables are `λ_1..λ_n, c` in that order.
#[derive(Clone, Debug)]
pub struct DiagonalHypersurface {
    pub n: usize,
    pub lambda: Vec<RationalPoly>,
    pub c: RationalPoly,
}

impl DiagonalHypersurface {
    pub fn new(n: usize) -> Self {
        let nv = n + 1;
        Self { n, lambda: (0..n).map(|i| RationalPoly::var(nv, i)).collect(), c: RationalPoly::var(nv, n) }
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    fn zero(&self) -> RationalPoly {
        RationalPoly::zero(self.nvars())
    }

    fn constant(&self, c: BigRational) -> RationalPoly {
        RationalPoly::constant(self.nvars(), c)
    }

    pub fn diag(&self, d: &[RationalPoly]) -> SymMatrix {
        (0..self.n).map(|i| (0..self.n).map(|j| if i == j { d[i].clone() } else { self.zero() }).collect()).collect()
    }

    pub fn identity(&self) -> SymMatrix {
        let one = vec![self.constant(q(1, 1)); self.n];
        self.diag(&one)
    }

    pub fn a(&self) -> SymMatrix {
        self.diag(&self.lambda)
    }

    /// `A^k` as a diagonal matrix.
    pub fn a_pow(&self, k: u32) -> SymMatrix {
        let d: Vec<RationalPoly> = self.lambda.iter().map(|l| l.pow(k)).collect();
        self.diag(&d)
    }

    /// `tr(A^k)`.
    pub fn trace_pow(&self, k: u32) -> RationalPoly {
        self.lambda.iter().fold(self.zero(), |acc, l| &acc + &l.pow(k))
    }

    pub fn h(&self) -> RationalPoly {
        self.trace_pow(1)
    }

    pub fn s(&self) -> RationalPoly {
        self.trace_pow(2)
    }

    /// `|A²|² = tr(A⁴)`.
    pub fn a2_sq(&self) -> RationalPoly {
        self.trace_pow(4)
    }

    /// Gauss equation: `R_ijkl = c(δ_ik δ_jl − δ_il δ_jk) + A_ik A_jl − A_il A_jk`.
    pub fn riemann(&self) -> SymTensor4 {
        let mut out = SymTensor4::new(self.nvars());
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let sec = &self.c + &(&self.lambda[i] * &self.lambda[j]);
                out.accumulate([i, j, i, j], sec.clone());
                out.accumulate([i, j, j, i], -&sec);
            }
        }
        out
    }

    /// `Ric_ij = Σ_k R_ikjk`.
    pub fn ricci(&self) -> SymMatrix {
        let r = self.riemann();
        let mut m: SymMatrix = vec![vec![self.zero(); self.n]; self.n];
        for (k, v) in r.entries() {
            if k[1] == k[3] {
                m[k[0]][k[2]] = &m[k[0]][k[2]] + v;
            }
        }
        m
    }

    pub fn scalar(&self) -> RationalPoly {
        let ric = self.ricci();
        (0..self.n).fold(self.zero(), |acc, i| &acc + &ric[i][i])
    }

    /// Trace-free Ricci `Ric − (R/n) g`.
    pub fn ricci_tf(&self) -> SymMatrix {
        let ric = self.ricci();
        let shift = self.scalar().scale(&q(1, self.n as i64));
        let mut out = ric;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = &row[i] - &shift;
        }
        out
    }

    /// Weyl tensor `W = Rm − P⊙g` with Schouten tensor
    /// `P = (Ric − R g / (2(n−1))) / (n−2)`.
    pub fn weyl(&self) -> SymTensor4 {
        let n = self.n as i64;
        let ric = self.ricci();
        let r = self.scalar().scale(&q(1, 2 * (n - 1)));
        let mut schouten = ric;
        for (i, row) in schouten.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let v = if i == j { &*e - &r } else { e.clone() };
                *e = v.scale(&q(1, n - 2));
            }
        }
        self.riemann().sub(&kulkarni_nomizu(&schouten, &self.identity()))
    }

    /// `(⋆T)_ijkl = ½ μ_ijrs T_rskl`; only for `n = 4`.
    pub fn star(&self, t: &SymTensor4) -> SymTensor4 {
        assert_eq!(self.n, 4, "Hodge star needs n = 4");
        let half = q(1, 2);
        let mut out = SymTensor4::new(self.nvars());
        for (k, v) in t.entries() {
            let (r, s) = (k[0], k[1]);
            for i in 0..4 {
                for j in 0..4 {
                    let e = levi_civita([i, j, r, s]);
                    if e != 0 {
                        out.accumulate([i, j, k[2], k[3]], v.scale(&(&half * q(e, 1))));
                    }
                }
            }
        }
        out
    }

    /// `W± = ½(W ± ⋆W)`.
    pub fn weyl_half(&self, plus: bool) -> SymTensor4 {
        let w = self.weyl();
        let sw = self.star(&w);
        let half = q(1, 2);
        if plus {
            w.add(&sw).scale(&half)
        } else {
            w.sub(&sw).scale(&half)
        }
    }

    /// `Q_ijkl = T_ipkq T_jplq + T_iplq T_jpkq`.
    pub fn quadratic_split(&self, t: &SymTensor4) -> SymTensor4 {
        let mut by_pq: Buckets<'_> = BTreeMap::new();
        for (k, v) in t.entries() {
            by_pq.entry((k[1], k[3])).or_default().push((k, v));
        }
        let mut out = SymTensor4::new(self.nvars());
        for row in by_pq.values() {
            for (a, va) in row {
                for (b, vb) in row {
                    let p = *va * *vb;
                    out.accumulate([a[0], b[0], a[2], b[2]], p.clone());
                    out.accumulate([a[0], b[0], b[2], a[2]], p);
                }
            }
        }
        out
    }

    /// `s · δ_ij δ_kl`.
    pub fn delta_delta(&self, s: &RationalPoly) -> SymTensor4 {
        let mut out = SymTensor4::new(self.nvars());
        for i in 0..self.n {
            for k in 0..self.n {
                out.accumulate([i, i, k, k], s.clone());
            }
        }
        out
    }

    /// `A⊙A/2 + F⊙g` with `F = ½(A² − HA) + (H² − S)/12 · g`.
    pub fn fialkow_weyl(&self) -> SymTensor4 {
        let h = self.h();
        let s = self.s();
        let kappa = (&(&h * &h) - &s).scale(&q(1, 12));
        let f: Vec<RationalPoly> = self
            .lambda
            .iter()
            .map(|l| &(&l.pow(2) - &(&h * l)).scale(&q(1, 2)) + &kappa)
            .collect();
        let a = self.a();
        kulkarni_nomizu(&a, &a).scale(&q(1, 2)).add(&kulkarni_nomizu(&self.diag(&f), &self.identity()))
    }
}
