//! A small expression language over the scalar invariants of a diagonal
//! shape operator, e.g. `7/6 S^2 + 1/6 H^4 - 2|A2|^2`.

use std::cell::OnceCell;

use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{q, RationalPoly};
use crate::tensor::{DiagonalHypersurface, SymTensor4};
use crate::{Error, Result};

/// Recognised atoms, longest first within each shared prefix. The second
/// field is the canonical name.
const ATOMS: &[(&str, &str)] = &[
    ("tr(W∘⋆W)", "tr(W*W)"),
    ("tr(W*W)", "tr(W*W)"),
    ("<W,*W>", "tr(W*W)"),
    ("cubic(W+)", "cubic(W+)"),
    ("cubic(W-)", "cubic(W-)"),
    ("cubic(W)", "cubic(W)"),
    ("|RicTF|^2", "|RicTF|^2"),
    ("|Ric̊|^2", "|RicTF|^2"),
    ("|A2|^2", "|A2|^2"),
    ("|A^2|^2", "|A2|^2"),
    ("|W+|^2", "|W+|^2"),
    ("|W-|^2", "|W-|^2"),
    ("|W|^2", "|W|^2"),
    ("trA^1", "trA1"),
    ("trA^2", "trA2"),
    ("trA^3", "trA3"),
    ("trA^4", "trA4"),
    ("trA^5", "trA5"),
    ("trA^6", "trA6"),
    ("trA1", "trA1"),
    ("trA2", "trA2"),
    ("trA3", "trA3"),
    ("trA4", "trA4"),
    ("trA5", "trA5"),
    ("trA6", "trA6"),
    ("cgb", "cgb"),
    ("S", "S"),
    ("H", "H"),
    ("R", "R"),
    ("c", "c"),
];

/// Canonical atom names accepted by [`assemble_symbolic`].
pub fn atom_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = ATOMS.iter().map(|a| a.1).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn normalise(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(|c| match c {
            '²' => "^2".chars().collect::<Vec<_>>(),
            '³' => "^3".chars().collect(),
            '⁴' => "^4".chars().collect(),
            '⁵' => "^5".chars().collect(),
            '⁶' => "^6".chars().collect(),
            '±' => vec!['+'],
            '−' => vec!['-'],
            '·' => vec!['*'],
            other => vec![other],
        })
        .collect()
}

/// Lazily assembled curvature data for one dimension.
pub struct Context {
    geom: DiagonalHypersurface,
    weyl: OnceCell<SymTensor4>,
    star_weyl: OnceCell<SymTensor4>,
    halves: OnceCell<(SymTensor4, SymTensor4)>,
}

impl Context {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=12).contains(&n) {
            return Err(Error::Dimension { n, what: "diagonal assembly supports 2 <= n <= 12" });
        }
        Ok(Self { geom: DiagonalHypersurface::new(n), weyl: OnceCell::new(), star_weyl: OnceCell::new(), halves: OnceCell::new() })
    }

    pub fn geometry(&self) -> &DiagonalHypersurface {
        &self.geom
    }

    pub fn nvars(&self) -> usize {
        self.geom.nvars()
    }

    pub fn weyl(&self) -> &SymTensor4 {
        self.weyl.get_or_init(|| self.geom.weyl())
    }

    fn need_four(&self, what: &'static str) -> Result<()> {
        if self.geom.n != 4 {
            return Err(Error::Dimension { n: self.geom.n, what });
        }
        Ok(())
    }

    pub fn star_weyl(&self) -> Result<&SymTensor4> {
        self.need_four("the Hodge star exists only for n = 4")?;
        Ok(self.star_weyl.get_or_init(|| self.geom.star(self.weyl())))
    }

    /// `(W⁺, W⁻)`.
    pub fn halves(&self) -> Result<&(SymTensor4, SymTensor4)> {
        let sw = self.star_weyl()?;
        Ok(self.halves.get_or_init(|| {
            let w = self.weyl();
            let half = q(1, 2);
            (w.add(sw).scale(&half), w.sub(sw).scale(&half))
        }))
    }

    fn ric_tf_sq(&self) -> RationalPoly {
        let m = self.geom.ricci_tf();
        m.iter().flatten().fold(RationalPoly::zero(self.nvars()), |acc, e| &acc + &(e * e))
    }

    /// Value of a canonical atom.
    pub fn atom(&self, name: &str) -> Result<RationalPoly> {
        let g = &self.geom;
        Ok(match name {
            "S" => g.s(),
            "H" => g.h(),
            "R" => g.scalar(),
            "c" => g.c.clone(),
            "|A2|^2" => g.a2_sq(),
            "|W|^2" => self.weyl().inner(self.weyl()),
            "|W+|^2" => {
                let (p, _) = self.halves()?;
                p.inner(p)
            }
            "|W-|^2" => {
                let (_, m) = self.halves()?;
                m.inner(m)
            }
            "tr(W*W)" => self.weyl().inner(self.star_weyl()?),
            "|RicTF|^2" => self.ric_tf_sq(),
            "cubic(W)" => {
                let w = self.weyl();
                w.triple(w, w)
            }
            "cubic(W+)" => {
                let (p, _) = self.halves()?;
                p.triple(p, p)
            }
            "cubic(W-)" => {
                let (_, m) = self.halves()?;
                m.triple(m, m)
            }
            "cgb" => {
                let r = g.scalar();
                let w = self.atom("|W|^2")?;
                &(&w - &self.ric_tf_sq().scale(&q(2, 1))) + &(&r * &r).scale(&q(1, 6))
            }
            t if t.starts_with("trA") => {
                let k: u32 = t[3..].parse().map_err(|_| Error::UnsupportedPattern(t.to_string()))?;
                g.trace_pow(k)
            }
            other => return Err(Error::UnsupportedPattern(other.to_string())),
        })
    }

    /// Parse and expand a recipe.
    pub fn assemble(&self, recipe: &str) -> Result<RationalPoly> {
        let src = normalise(recipe);
        let mut p = Parser { src: &src, pos: 0, ctx: self };
        let out = p.expr()?;
        if p.pos != src.len() {
            return Err(p.unsupported());
        }
        Ok(out)
    }
}

/// Expand `recipe` at `A = diag(λ_1..λ_n)` with curvature variable `c`.
/// Variables of the result are `λ_1..λ_n, c`.
pub fn assemble_symbolic(recipe: &str, n: usize) -> Result<RationalPoly> {
    Context::new(n)?.assemble(recipe)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn unsupported(&self) -> Error {
        let rest = self.rest();
        let end = rest.char_indices().nth(12).map_or(rest.len(), |(i, _)| i);
        if rest.is_empty() {
            Error::UnsupportedPattern("<end of recipe>".into())
        } else {
            Error::UnsupportedPattern(rest[..end].to_string())
        }
    }

    fn expr(&mut self) -> Result<RationalPoly> {
        let mut neg = false;
        if self.peek() == Some('-') {
            self.pos += 1;
            neg = true;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let first = self.term()?;
        let mut acc = if neg { -&first } else { first };
        while let Some(op) = self.peek() {
            match op {
                '+' | '-' => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = if op == '+' { &acc + &t } else { &acc - &t };
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '(' => true,
            Some(_) => self.match_atom().is_some(),
            None => false,
        }
    }

    fn term(&mut self) -> Result<RationalPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Some('/') => {
                    self.pos += 1;
                    let f = self.power()?;
                    let d = constant_value(&f).ok_or_else(|| Error::UnsupportedPattern("division by a non-constant".into()))?;
                    if d.is_zero() {
                        return Err(Error::UnsupportedPattern("division by zero".into()));
                    }
                    acc = acc.scale(&(BigRational::from_integer(1.into()) / d));
                }
                _ if self.starts_factor() => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<RationalPoly> {
        let base = self.factor()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer().ok_or_else(|| self.unsupported())?;
            let k: u32 = k.try_into().map_err(|_| Error::UnsupportedPattern(format!("exponent {k}")))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Option<u64> {
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return None;
        }
        self.pos += digits.len();
        digits.parse().ok()
    }

    fn match_atom(&self) -> Option<(&'static str, usize)> {
        let rest = self.rest();
        ATOMS.iter().filter(|(alias, _)| rest.starts_with(alias)).max_by_key(|(alias, _)| alias.len()).map(|(a, c)| (*c, a.len()))
    }

    fn factor(&mut self) -> Result<RationalPoly> {
        let nv = self.ctx.nvars();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.unsupported());
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer().ok_or_else(|| self.unsupported())?;
                Ok(RationalPoly::constant(nv, BigRational::from_integer(k.into())))
            }
            Some(_) => match self.match_atom() {
                Some((name, len)) => {
                    self.pos += len;
                    self.ctx.atom(name)
                }
                None => Err(self.unsupported()),
            },
            None => Err(self.unsupported()),
        }
    }
}

fn constant_value(p: &RationalPoly) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    let mut it = p.terms();
    let (e, c) = it.next()?;
    if it.next().is_none() && e.iter().all(|&k| k == 0) {
        Some(c.clone())
    } else {
        None
    }
}
