use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational from `num / den`.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Monomials are exponent vectors of length `nvars`; the map never holds
/// a zero coefficient, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl RationalPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += m;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "evaluation point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = point.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Replace every variable `x_i` by `subs[i]`; the result lives in the
    /// variables of the substituted polynomials.
    pub fn compose(&self, subs: &[RationalPoly]) -> RationalPoly {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<RationalPoly>> = subs.iter().map(|s| vec![RationalPoly::one(target), s.clone()]).collect();
        let mut out = RationalPoly::zero(target);
        for (e, c) in &self.terms {
            let mut m = RationalPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = &cache[i][cache[i].len() - 1] * &subs[i];
                    cache[i].push(next);
                }
                m = &m * &cache[i][k as usize];
            }
            out = &out + &m;
        }
        out
    }

    /// Substitute `x_i := value` and keep the variable count.
    pub fn substitute(&self, i: usize, value: &RationalPoly) -> RationalPoly {
        let subs: Vec<RationalPoly> =
            (0..self.nvars).map(|j| if j == i { value.clone() } else { RationalPoly::var(self.nvars, j) }).collect();
        self.compose(&subs)
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = RationalPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalPoly {
    /// Variables print as `x1, x2, ...`, highest monomials first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mag = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{p}", i + 1) })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let x = RationalPoly::var(2, 0);
        let y = RationalPoly::var(2, 1);
        let p = &(&x + &y) - &x;
        assert_eq!(p, y);
        assert!((&p - &y).is_zero());
        assert_eq!((&x - &x).len(), 0);
    }

    #[test]
    fn binomial_square() {
        let x = RationalPoly::var(2, 0);
        let y = RationalPoly::var(2, 1);
        let s = (&x + &y).pow(2);
        let expect = &(&x.pow(2) + &(&x * &y).scale(&q(2, 1))) + &y.pow(2);
        assert_eq!(s, expect);
        assert_eq!(s.degree(), Some(2));
        assert_eq!(s.to_string(), "x1^2 + 2*x1*x2 + x2^2");
    }

    #[test]
    fn compose_into_one_variable() {
        let x = RationalPoly::var(2, 0);
        let y = RationalPoly::var(2, 1);
        let p = &x * &y;
        let t = RationalPoly::var(1, 0);
        let r = p.compose(&[t.scale(&q(-3, 1)), t.clone()]);
        assert_eq!(r, t.pow(2).scale(&q(-3, 1)));
    }
}
