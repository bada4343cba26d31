use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::poly::{q, RationalPoly};
use crate::recipe::Context;
use crate::tensor::SymTensor4;
use crate::{Error, Result};

/// Restriction applied to `LHS − RHS` before testing for zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Constraint {
    None,
    /// `λ_n := −(λ_1 + … + λ_{n−1})`.
    Minimal,
    /// `λ_i := coeffs[i]·t`, with `c` kept free.
    Family(Vec<i64>),
}

/// One scalar equation; tensor identities contribute one per component.
#[derive(Debug, Clone)]
pub struct Component {
    pub label: String,
    pub n: usize,
    pub lhs: RationalPoly,
    pub rhs: RationalPoly,
}

type Builder = fn() -> Result<Vec<Component>>;

#[derive(Clone)]
pub struct Identity {
    pub name: &'static str,
    pub statement: &'static str,
    pub constraint: Constraint,
    build: Builder,
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity").field("name", &self.name).field("constraint", &self.constraint).finish()
    }
}

impl Identity {
    pub fn components(&self) -> Result<Vec<Component>> {
        (self.build)()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Rational point where `LHS ≠ RHS`, in the original variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub component: String,
    pub variables: Vec<String>,
    pub point: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub name: String,
    pub statement: String,
    pub constraint: Constraint,
    pub status: Status,
    pub components: usize,
    /// Largest total degree of either side, before the constraint.
    pub max_degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn scalar(n: usize, label: &str, lhs: &str, rhs: &str) -> Result<Vec<Component>> {
    let ctx = Context::new(n)?;
    Ok(vec![Component { label: label.to_string(), n, lhs: ctx.assemble(lhs)?, rhs: ctx.assemble(rhs)? }])
}

fn tensor_components(n: usize, tag: &str, lhs: &SymTensor4, rhs: &SymTensor4, nv: usize) -> Vec<Component> {
    let mut keys: BTreeSet<[usize; 4]> = BTreeSet::new();
    keys.extend(lhs.entries().map(|(k, _)| *k));
    keys.extend(rhs.entries().map(|(k, _)| *k));
    let zero = RationalPoly::zero(nv);
    keys.into_iter()
        .map(|k| Component {
            label: format!("{tag}[{}{}{}{}]", k[0] + 1, k[1] + 1, k[2] + 1, k[3] + 1),
            n,
            lhs: lhs.get(k).cloned().unwrap_or_else(|| zero.clone()),
            rhs: rhs.get(k).cloned().unwrap_or_else(|| zero.clone()),
        })
        .collect()
}

const NORM_WPM: &str = "7/6 S^2 + 1/6 H^4 - 2|A2|^2 + 2 H trA3 - 4/3 H^2 S";
const NORM_WPM_CORRUPTED: &str = "S^2 + 1/6 H^4 - 2|A2|^2 + 2 H trA3 - 4/3 H^2 S";
const CGB_CLOSED: &str = "3S^2 - 6|A2|^2 - 6H^2 S + H^4 + 8H trA3 + 4c(6c - S + H^2)";
const CGB_MISPRINT: &str = "3S^2 - 6|A2|^2 - 16/3 H^2 S + H^4 + 8H trA3 + 4c(6c - S + H^2)";
const HARMWEYL_LHS: &str = "15 trA3^2 - 42 trA6 + 55/2 S |A2|^2 - 13/4 S^3";

fn normwpm() -> Result<Vec<Component>> {
    let ctx = Context::new(4)?;
    let rhs = ctx.assemble(NORM_WPM)?;
    Ok(vec![
        Component { label: "|W+|^2".into(), n: 4, lhs: ctx.assemble("|W+|^2")?, rhs: rhs.clone() },
        Component { label: "|W-|^2".into(), n: 4, lhs: ctx.assemble("|W-|^2")?, rhs },
    ])
}

fn fialkow() -> Result<Vec<Component>> {
    let ctx = Context::new(4)?;
    let g = ctx.geometry();
    Ok(tensor_components(4, "W", ctx.weyl(), &g.fialkow_weyl(), ctx.nvars()))
}

fn quadratic_split() -> Result<Vec<Component>> {
    let ctx = Context::new(4)?;
    let g = ctx.geometry();
    let (p, m) = ctx.halves()?;
    let mut out = Vec::new();
    for (tag, t) in [("W+", p), ("W-", m)] {
        let lhs = g.quadratic_split(t);
        let rhs = g.delta_delta(&t.inner(t).scale(&q(1, 8)));
        out.extend(tensor_components(4, tag, &lhs, &rhs, ctx.nvars()));
    }
    Ok(out)
}

fn general_n() -> Result<Vec<Component>> {
    (3..=8)
        .map(|n| {
            let ni = n as i64;
            let rhs = format!("{}/{} S^2 - {}/{} |A2|^2", 2 * (ni * ni - 3 * ni + 3), (ni - 1) * (ni - 2), 2 * ni, ni - 2);
            Ok(scalar(n, &format!("n={n}"), "|W|^2", &rhs)?.remove(0))
        })
        .collect()
}

fn strict_harmweyl() -> Result<Vec<Component>> {
    let ctx = Context::new(4)?;
    let nv = ctx.nvars();
    let family = Component {
        label: "equality family".into(),
        n: 4,
        lhs: ctx.assemble("5 trA3^2 - 14 trA6 + 55/6 S|A2|^2 - 13/12 S^3")?,
        rhs: ctx.assemble("427/72 S^3 - 14 trA6")?,
    };
    // 5/3 + (55/6)(7/12) − 13/12 = 427/72, as pure rationals.
    let lhs = &q(5, 3) + &(&q(55, 6) * &q(7, 12)) - q(13, 12);
    let rewrite = Component {
        label: "coefficient rewrite".into(),
        n: 4,
        lhs: RationalPoly::constant(nv, lhs),
        rhs: RationalPoly::constant(nv, q(427, 72)),
    };
    Ok(vec![family, rewrite])
}

fn registry_entries() -> Vec<Identity> {
    vec![
        Identity {
            name: "normWpm_generalH",
            statement: "|W±|² = 7/6 S² + 1/6 H⁴ − 2|A²|² + 2H trA³ − 4/3 H²S",
            constraint: Constraint::None,
            build: normwpm,
        },
        Identity {
            name: "normW_generalH",
            statement: "|W|² = 7/3 S² + 1/3 H⁴ − 4|A²|² + 4H trA³ − 8/3 H²S",
            constraint: Constraint::None,
            build: || scalar(4, "|W|^2", "|W|^2", "7/3 S^2 + 1/3 H^4 - 4|A2|^2 + 4H trA3 - 8/3 H^2 S"),
        },
        Identity {
            name: "ricTFsq",
            statement: "|Ric̊|² = |A²|² − ¼S² + 3/2 H²S − 2H trA³ − ¼H⁴",
            constraint: Constraint::None,
            build: || scalar(4, "|RicTF|^2", "|RicTF|^2", "|A2|^2 - 1/4 S^2 + 3/2 H^2 S - 2H trA3 - 1/4 H^4"),
        },
        Identity {
            name: "cgb_consistency",
            statement: "|W|² − 2|Ric̊|² + R²/6 = 3S² − 6|A²|² − 6H²S + H⁴ + 8H trA³ + 4c(6c − S + H²)",
            constraint: Constraint::None,
            build: || scalar(4, "cgb", "cgb", CGB_CLOSED),
        },
        Identity {
            name: "fialkow_form",
            statement: "W = ½A⊙A + F⊙g, F = ½(A² − HA) + (H² − S)/12 g",
            constraint: Constraint::Minimal,
            build: fialkow,
        },
        Identity {
            name: "cubic_contraction_minimal",
            statement: "W_ijkl W_pqkl W_ijpq = 10(trA³)² − 28 trA⁶ + 19 S|A²|² − 23/9 S³",
            constraint: Constraint::Minimal,
            build: || scalar(4, "cubic(W)", "cubic(W)", "10 trA3^2 - 28 trA6 + 19 S|A2|^2 - 23/9 S^3"),
        },
        Identity {
            name: "cubic_half_relation",
            statement: "W_ijkl W_pqkl W_ijpq = 2 W⁺_ijkl W⁺_pqkl W⁺_ijpq",
            constraint: Constraint::None,
            build: || scalar(4, "cubic(W)", "cubic(W)", "2 cubic(W+)"),
        },
        Identity {
            name: "weyl_quadratic_split",
            statement: "W±_ipkq W±_jplq + W±_iplq W±_jpkq = ⅛|W±|² δ_ij δ_kl",
            constraint: Constraint::None,
            build: quadratic_split,
        },
        Identity {
            name: "harmweyl_equality_form",
            statement: "15(trA³)² − 42 trA⁶ + 55/2 S|A²|² − 13/4 S³ = 3 W⁺_ijkl W⁺_pqkl W⁺_ijpq + ½S|W⁺|²",
            constraint: Constraint::Minimal,
            build: || scalar(4, "harmonic W+", HARMWEYL_LHS, "3 cubic(W+) + 1/2 S |W+|^2"),
        },
        Identity {
            name: "generalN_weylnorm",
            statement: "|W|² = 2(n² − 3n + 3)/((n − 1)(n − 2)) S² − 2n/(n − 2) |A²|², n = 3..8",
            constraint: Constraint::Minimal,
            build: general_n,
        },
        Identity {
            name: "strict_harmweyl_rhs",
            statement: "5(trA³)² − 14 trA⁶ + 55/6 S|A²|² − 13/12 S³ = 427/72 S³ − 14 trA⁶ on λ = (−3t, t, t, t)",
            constraint: Constraint::Family(vec![-3, 1, 1, 1]),
            build: strict_harmweyl,
        },
        Identity {
            name: "lcf_trace6",
            statement: "trA⁶ = 61/144 S³ on λ = (−3t, t, t, t)",
            constraint: Constraint::Family(vec![-3, 1, 1, 1]),
            build: || scalar(4, "trA6", "trA6", "61/144 S^3"),
        },
    ]
}

/// The certified identities, in report order.
pub fn registry() -> Vec<Identity> {
    registry_entries()
}

/// Deliberately wrong variants that must fail: a corrupted coefficient, the
/// misprinted `−16/3 H²S` Euler coefficient, and the harmonic-`W⁺` relation
/// without its `½S|W⁺|²` term.
pub fn diagnostics() -> Vec<Identity> {
    vec![
        Identity {
            name: "negative_control_normWpm",
            statement: "|W+|² = S² + 1/6 H⁴ − 2|A²|² + 2H trA³ − 4/3 H²S (7/6 replaced by 1)",
            constraint: Constraint::None,
            build: || scalar(4, "|W+|^2", "|W+|^2", NORM_WPM_CORRUPTED),
        },
        Identity {
            name: "cgb_misprint_16_3",
            statement: "|W|² − 2|Ric̊|² + R²/6 = 3S² − 6|A²|² − 16/3 H²S + H⁴ + 8H trA³ + 4c(6c − S + H²)",
            constraint: Constraint::None,
            build: || scalar(4, "cgb", "cgb", CGB_MISPRINT),
        },
        Identity {
            name: "harmweyl_without_norm_term",
            statement: "15(trA³)² − 42 trA⁶ + 55/2 S|A²|² − 13/4 S³ = 3 W⁺_ijkl W⁺_pqkl W⁺_ijpq",
            constraint: Constraint::Minimal,
            build: || scalar(4, "harmonic W+", HARMWEYL_LHS, "3 cubic(W+)"),
        },
    ]
}

pub fn lookup(name: &str) -> Result<Identity> {
    registry_entries()
        .into_iter()
        .chain(diagnostics())
        .find(|i| i.name == name)
        .ok_or_else(|| Error::UnknownIdentity(name.to_string()))
}

/// Free variables after the constraint, and the substitution expressing
/// `λ_1..λ_n, c` in them.
fn substitution(constraint: &Constraint, n: usize) -> Result<(Vec<String>, Vec<RationalPoly>)> {
    let full: Vec<String> = (1..=n).map(|i| format!("λ{i}")).chain(["c".to_string()]).collect();
    match constraint {
        Constraint::None => Ok((full, (0..=n).map(|i| RationalPoly::var(n + 1, i)).collect())),
        Constraint::Minimal => {
            let m = n;
            let mut subs: Vec<RationalPoly> = (0..n - 1).map(|i| RationalPoly::var(m, i)).collect();
            let last = subs.iter().fold(RationalPoly::zero(m), |a, v| &a - v);
            subs.push(last);
            subs.push(RationalPoly::var(m, n - 1));
            let mut names: Vec<String> = full[..n - 1].to_vec();
            names.push("c".into());
            Ok((names, subs))
        }
        Constraint::Family(coeffs) => {
            if coeffs.len() != n {
                return Err(Error::Dimension { n, what: "family coefficients must match the dimension" });
            }
            let t = RationalPoly::var(2, 0);
            let mut subs: Vec<RationalPoly> = coeffs.iter().map(|&k| t.scale(&q(k, 1))).collect();
            subs.push(RationalPoly::var(2, 1));
            Ok((vec!["t".into(), "c".into()], subs))
        }
    }
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// A point where the nonzero polynomial `p` does not vanish.
///
/// Tries unit vectors and a small grid first. The fallback is the Kronecker
/// point `x_i = t^(D^i)`: it turns `p` into a univariate polynomial with the
/// same coefficients, and `t` beyond the Cauchy root bound cannot be a root.
pub fn find_nonzero(p: &RationalPoly) -> Vec<BigRational> {
    let m = p.nvars();
    let zero_point = vec![BigRational::zero(); m];
    let mut candidates: Vec<Vec<BigRational>> = vec![zero_point.clone()];
    for i in 0..m {
        let mut e = zero_point.clone();
        e[i] = BigRational::one();
        candidates.push(e);
    }
    for cand in candidates {
        if !p.eval(&cand).is_zero() {
            return cand;
        }
    }
    let grid = [int(1), int(-1), int(2), q(1, 2), int(3)];
    if m <= 6 {
        let total = grid.len().pow(m as u32);
        for code in 0..total {
            let mut c = code;
            let cand: Vec<BigRational> = (0..m)
                .map(|_| {
                    let v = grid[c % grid.len()].clone();
                    c /= grid.len();
                    v
                })
                .collect();
            if !p.eval(&cand).is_zero() {
                return cand;
            }
        }
    }
    let d = p.terms().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as u64 + 1;
    let max = p.terms().map(|(_, c)| c.abs()).max().unwrap_or_else(BigRational::one);
    let min = p.terms().map(|(_, c)| c.abs()).min().unwrap_or_else(BigRational::one);
    let t = (max / min).ceil() + int(2);
    let mut cand = Vec::with_capacity(m);
    let mut x = t.clone();
    for _ in 0..m {
        cand.push(x.clone());
        x = num_traits::pow(x, d as usize);
    }
    cand
}

fn reduce(c: &Component, constraint: &Constraint) -> Result<(RationalPoly, Vec<String>, Vec<RationalPoly>)> {
    let (names, subs) = substitution(constraint, c.n)?;
    let diff = &c.lhs - &c.rhs;
    Ok((diff.compose(&subs), names, subs))
}

/// Certify one identity exactly.
pub fn verify(id: &Identity) -> Result<Verification> {
    let comps = id.components()?;
    let mut max_degree = 0;
    let mut witness = None;
    for c in &comps {
        for side in [&c.lhs, &c.rhs] {
            max_degree = max_degree.max(side.degree().unwrap_or(0));
        }
        let (reduced, _, subs) = reduce(c, &id.constraint)?;
        if reduced.is_zero() {
            continue;
        }
        let free = find_nonzero(&reduced);
        let full: Vec<BigRational> = subs.iter().map(|s| s.eval(&free)).collect();
        let variables: Vec<String> = (1..=c.n).map(|i| format!("λ{i}")).chain(["c".to_string()]).collect();
        witness = Some(Witness {
            component: c.label.clone(),
            variables,
            point: full.iter().map(ToString::to_string).collect(),
            lhs: c.lhs.eval(&full).to_string(),
            rhs: c.rhs.eval(&full).to_string(),
        });
        break;
    }
    Ok(Verification {
        name: id.name.to_string(),
        statement: id.statement.to_string(),
        constraint: id.constraint.clone(),
        status: if witness.is_none() { Status::Pass } else { Status::Fail },
        components: comps.len(),
        max_degree,
        witness,
    })
}

pub fn verify_identity(name: &str) -> Result<Verification> {
    verify(&lookup(name)?)
}

/// Every registry entry, verified in parallel, reported in registry order.
pub fn verify_all() -> Result<Vec<Verification>> {
    registry_entries().par_iter().map(verify).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_fallback_avoids_roots() {
        // Vanishes on the whole small grid except where the fallback lands.
        let x = RationalPoly::var(1, 0);
        let mut p = RationalPoly::one(1);
        for r in [0i64, 1, -1, 2, 3] {
            p = &p * &(&x - &RationalPoly::constant(1, q(r, 1)));
        }
        p = &p * &(&x - &RationalPoly::constant(1, q(1, 2)));
        let pt = find_nonzero(&p);
        assert!(!p.eval(&pt).is_zero());
    }

    #[test]
    fn minimal_substitution_eliminates_last_variable() {
        let (names, subs) = substitution(&Constraint::Minimal, 4).unwrap();
        assert_eq!(names, ["λ1", "λ2", "λ3", "c"]);
        let h = subs[..4].iter().fold(RationalPoly::zero(4), |a, s| &a + s);
        assert!(h.is_zero());
    }
}
