//! Global bounds for closed minimal hypersurfaces `M^4 ⊂ N^5(c)`: the
//! quadratic formula for constant `S`, the pinching function `f`, Weyl
//! functional thresholds and the volume-hypothesis bounds.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|S⁴| = 8π²/3`.
pub const VOL_S4: f64 = 8.0 * PI * PI / 3.0;
/// `|S⁵| = π³`.
pub const VOL_S5: f64 = PI * PI * PI;
/// Upper volume bound `5|S⁵|/4` under the cross-section hypothesis.
pub const VOL_UPPER: f64 = 5.0 * VOL_S5 / 4.0;
/// Default relative tolerance for equality flags of global bounds.
pub const DEFAULT_BOUNDS_TOL: f64 = 1e-6;

/// `B₄ = 11 + 2e¹²⁸`.
pub fn b4() -> f64 {
    11.0 + 2.0 * 128f64.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalSign {
    Positive,
    Zero,
    Negative,
    #[default]
    Unknown,
}

/// Global data of a closed hypersurface. Absent fields make the predicates
/// depending on them unavailable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalData {
    pub chi: Option<i64>,
    pub vol: Option<f64>,
    /// Value of `S` when it is constant.
    #[serde(rename = "S")]
    pub s: Option<f64>,
    #[serde(rename = "weylL2")]
    pub weyl_l2: Option<f64>,
    pub c: Option<f64>,
    #[serde(rename = "A2avg")]
    pub a2avg: Option<f64>,
    #[serde(default)]
    pub scal_sign: ScalSign,
}

impl GlobalData {
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.vol {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("vol must be positive, got {v}")));
            }
        }
        if let Some(w) = self.weyl_l2 {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidInput(format!("weylL2 must be non-negative, got {w}")));
            }
        }
        if let Some(s) = self.s {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("S must be non-negative, got {s}")));
            }
        }
        Ok(())
    }
}

/// Both roots `2c/3 ± √D` of the constant-`S` quadratic
/// `(3/4)S² − cS + 6c² − 8π²χ/Vol = (3/2)𝒜`, with
/// `D = −68c²/9 + 32π²χ/(3Vol) + 2𝒜`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SQuadratic {
    pub plus: f64,
    pub minus: f64,
    pub discriminant: f64,
    /// Set when a root violates `𝒜 ≥ S²/4`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn s_quadratic(c: f64, chi: i64, vol: f64, a2avg: f64) -> Result<SQuadratic> {
    if vol.is_nan() || vol <= 0.0 {
        return Err(Error::InvalidInput(format!("vol must be positive, got {vol}")));
    }
    let disc = -68.0 * c * c / 9.0 + 32.0 * PI * PI * chi as f64 / (3.0 * vol) + 2.0 * a2avg;
    let scale = 68.0 * c * c / 9.0 + 2.0 * a2avg.abs() + 1.0;
    if disc < -1e-14 * scale {
        return Err(Error::NegativeDiscriminant { disc });
    }
    let root = disc.max(0.0).sqrt();
    let plus = 2.0 * c / 3.0 + root;
    let minus = 2.0 * c / 3.0 - root;
    let mut warnings = Vec::new();
    for (label, s) in [("+", plus), ("-", minus)] {
        if s < -1e-12 * (1.0 + c.abs()) {
            warnings.push(format!("{label} root {s} is negative"));
        } else if a2avg < s * s / 4.0 - 1e-12 * (1.0 + s * s) {
            warnings.push(format!("{label} root {s} violates A2avg >= S^2/4 (A2avg = {a2avg})"));
        }
    }
    Ok(SQuadratic { plus, minus, discriminant: disc, warnings })
}

/// Pinching function, with `x = π²r`:
/// `−4 + 8√(1−x)` for `x ≤ 9/25`, `4√x` for `9/25 < x ≤ 1`,
/// `4/3 + (8√2/3)√(3x/2 − 1)` for `x > 1`.
pub fn f_lower_bound(ratio: f64) -> f64 {
    let x = PI * PI * ratio;
    if x <= 9.0 / 25.0 {
        -4.0 + 8.0 * (1.0 - x).sqrt()
    } else if x <= 1.0 {
        4.0 * x.sqrt()
    } else {
        4.0 / 3.0 + 8.0 * 2f64.sqrt() / 3.0 * (1.5 * x - 1.0).sqrt()
    }
}

/// `max` of the three branch expressions of [`f_lower_bound`] over those
/// that are real at `r`.
pub fn f_branch_max(ratio: f64) -> f64 {
    let x = PI * PI * ratio;
    let mut best = f64::NEG_INFINITY;
    if x <= 1.0 {
        best = best.max(-4.0 + 8.0 * (1.0 - x).sqrt());
    }
    if x >= 0.0 {
        best = best.max(4.0 * x.sqrt());
    }
    if x >= 2.0 / 3.0 {
        best = best.max(4.0 / 3.0 + 8.0 * 2f64.sqrt() / 3.0 * (1.5 * x - 1.0).sqrt());
    }
    best
}

/// Outcome of one theorem-conditional bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Predicate {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    Evaluated,
    NotApplicable,
    Unavailable,
}

impl Predicate {
    fn skip(status: Status, why: impl Into<String>) -> Self {
        Self { status, holds: None, slack: None, equality: None, bound: None, note: Some(why.into()) }
    }

    fn evaluated(holds: bool, slack: f64, equality: bool) -> Self {
        Self { status: Status::Evaluated, holds: Some(holds), slack: Some(slack), equality: Some(equality), bound: None, note: None }
    }

    /// `true` when the bound was evaluated and violated.
    pub fn violated(&self) -> bool {
        self.holds == Some(false)
    }
}

const TOTALLY_GEODESIC: &str = "totally geodesic: excluded from the bound";

fn is_near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn weyl_bound(g: &GlobalData, factor: f64, tol: f64) -> std::result::Result<(f64, f64, bool), Predicate> {
    let (Some(chi), Some(w)) = (g.chi, g.weyl_l2) else {
        return Err(Predicate::skip(Status::Unavailable, "needs chi and weylL2"));
    };
    let bound = factor * PI * PI * chi as f64;
    let slack = w - bound;
    let eq = is_near(w, bound, tol);
    Ok((bound, slack, eq))
}

/// Evaluate every Weyl-functional threshold and the `S` pinching bounds
/// whose hypotheses are met by `g`:
///
/// - `euclidean_256_9` (`c = 0`): `∫|W|² > (256/9)π²χ` unless LCF with `χ ≥ 0`
/// - `sphere_64_3` (`c = 1`, constant `S`): `∫|W|² ≥ (64/3)π²χ` unless totally geodesic
/// - `nonpositive_scalar_32` (`c = 1`, `R ≤ 0` constant): `∫|W|² ≥ 32π²χ`
/// - `corpinch` (`c = 1`, constant `S`, `χ ≥ 0`): `S ≥ 4π√(χ/Vol)` unless totally geodesic
/// - `pinching_f` (`c = 1`, constant `S > 0`): `S ≥ f(χ/Vol)`
/// - `euler_bracket` (`c = 1`, constant `S`): `(4−S)(12+S)/16 ≤ 4π²χ/Vol < S²/3`
///
/// Hypotheses that cannot be checked from `g` (closedness, minimality,
/// positive Yamabe constant) are the caller's responsibility.
pub fn weyl_threshold_report(g: &GlobalData, tol: f64) -> BTreeMap<&'static str, Predicate> {
    let mut out = BTreeMap::new();
    let c = g.c;
    let sphere = c == Some(1.0);

    out.insert(
        "euclidean_256_9",
        match c {
            None => Predicate::skip(Status::Unavailable, "needs c"),
            Some(c) if c != 0.0 => Predicate::skip(Status::NotApplicable, "requires c = 0"),
            _ => match weyl_bound(g, 256.0 / 9.0, tol) {
                Err(p) => p,
                Ok((bound, slack, eq)) => {
                    let chi = g.chi.unwrap_or(0);
                    let lcf = g.weyl_l2.is_some_and(|w| w <= tol * (1.0 + bound.abs()));
                    let strict = slack > 0.0 && !eq;
                    let mut p = Predicate::evaluated(strict || (lcf && chi >= 0), slack, eq);
                    p.bound = Some(bound);
                    if !strict && lcf && chi >= 0 {
                        p.note = Some("locally conformally flat with chi >= 0".into());
                    }
                    p
                }
            },
        },
    );

    out.insert(
        "sphere_64_3",
        if !sphere {
            Predicate::skip(Status::NotApplicable, "requires c = 1")
        } else if g.s.is_none() {
            Predicate::skip(Status::Unavailable, "needs constant S")
        } else {
            match weyl_bound(g, 64.0 / 3.0, tol) {
                Err(p) => p,
                Ok((bound, slack, eq)) => {
                    let mut p = Predicate::evaluated(slack >= 0.0 || eq, slack, eq);
                    p.bound = Some(bound);
                    if g.s == Some(0.0) {
                        p.status = Status::NotApplicable;
                        p.holds = None;
                        p.note = Some(TOTALLY_GEODESIC.into());
                    }
                    p
                }
            }
        },
    );

    let nonpositive = g.s.is_some_and(|s| s >= 12.0) || matches!(g.scal_sign, ScalSign::Zero | ScalSign::Negative);
    out.insert(
        "nonpositive_scalar_32",
        if !sphere {
            Predicate::skip(Status::NotApplicable, "requires c = 1")
        } else if !nonpositive {
            Predicate::skip(Status::NotApplicable, "requires constant non-positive scalar curvature (S >= 12)")
        } else {
            match weyl_bound(g, 32.0, tol) {
                Err(p) => p,
                Ok((bound, slack, eq)) => {
                    let mut p = Predicate::evaluated(slack >= 0.0 || eq, slack, eq);
                    p.bound = Some(bound);
                    p
                }
            }
        },
    );

    out.insert(
        "corpinch",
        match (sphere, g.s, g.chi, g.vol) {
            (false, ..) => Predicate::skip(Status::NotApplicable, "requires c = 1"),
            (_, Some(s), Some(chi), Some(vol)) if chi >= 0 => {
                let bound = 4.0 * PI * (chi as f64 / vol).sqrt();
                let eq = is_near(s, bound, tol);
                let mut p = Predicate::evaluated(s >= bound || eq, s - bound, eq);
                p.bound = Some(bound);
                if s == 0.0 {
                    p.status = Status::NotApplicable;
                    p.holds = None;
                    p.note = Some(TOTALLY_GEODESIC.into());
                }
                p
            }
            (_, _, Some(chi), _) if chi < 0 => Predicate::skip(Status::NotApplicable, "requires chi >= 0"),
            _ => Predicate::skip(Status::Unavailable, "needs constant S, chi and vol"),
        },
    );

    out.insert(
        "pinching_f",
        match (sphere, g.s, g.chi, g.vol) {
            (false, ..) => Predicate::skip(Status::NotApplicable, "requires c = 1"),
            (_, Some(0.0), _, _) => Predicate::skip(Status::NotApplicable, "requires a non-totally-geodesic point"),
            (_, Some(s), Some(chi), Some(vol)) => {
                let bound = f_lower_bound(chi as f64 / vol);
                let eq = is_near(s, bound, tol);
                let mut p = Predicate::evaluated(s >= bound || eq, s - bound, eq);
                p.bound = Some(bound);
                p
            }
            _ => Predicate::skip(Status::Unavailable, "needs constant S, chi and vol"),
        },
    );

    out.insert(
        "euler_bracket",
        match (sphere, g.s, g.chi, g.vol) {
            (false, ..) => Predicate::skip(Status::NotApplicable, "requires c = 1"),
            (_, Some(0.0), _, _) => Predicate::skip(Status::NotApplicable, TOTALLY_GEODESIC),
            (_, Some(s), Some(chi), Some(vol)) => {
                let (low, high) = euler_integrand_bounds(s);
                let mid = 4.0 * PI * PI * chi as f64 / vol;
                let eq = is_near(low, mid, tol);
                let mut p = Predicate::evaluated((low <= mid || eq) && mid < high, (mid - low).min(high - mid), eq);
                p.note = Some("assumes positive Yamabe constant and M not diffeomorphic to S^4".into());
                p
            }
            _ => Predicate::skip(Status::Unavailable, "needs constant S, chi and vol"),
        },
    );
    out
}

/// `((4−S)(12+S)/16, S²/3)`, the per-volume bracket of `4π²χ/Vol` for constant `S`.
pub fn euler_integrand_bounds(s: f64) -> (f64, f64) {
    ((4.0 - s) * (12.0 + s) / 16.0, s * s / 3.0)
}

/// Lower bound on `S` when `Vol ≤ 5π³/4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VolumeBound {
    pub bound: f64,
    /// `Some(bound > 16/3)` when the improvement over `16/3` is asserted;
    /// `None` for `χ ∈ {0, 4}` where it is not.
    #[serde(rename = "exceeds16Over3")]
    pub exceeds_16_3: Option<bool>,
}

/// `χ ≤ 0`: `−4 + 8√(1 − 4χ/(5π))`; `χ ≥ 4`: `4/3 + (8√2/3)√(6χ/(5π) − 1)`.
/// `χ = 2` gives nothing beyond `S ≥ 4` and returns `None`.
pub fn volume_hypothesis_bounds(chi: i64) -> Result<Option<VolumeBound>> {
    if chi % 2 != 0 {
        return Err(Error::OddEuler(chi));
    }
    let x = chi as f64;
    let bound = if chi <= 0 {
        -4.0 + 8.0 * (1.0 - 4.0 * x / (5.0 * PI)).sqrt()
    } else if chi > 2 {
        4.0 / 3.0 + 8.0 * 2f64.sqrt() / 3.0 * (6.0 * x / (5.0 * PI) - 1.0).sqrt()
    } else {
        return Ok(None);
    };
    let claim = !matches!(chi, 0 | 4);
    Ok(Some(VolumeBound { bound, exceeds_16_3: claim.then_some(bound > 16.0 / 3.0) }))
}

/// Bound from `Vol ≥ (1 + 1/B₄)|S⁴|`, defined only for `χ ∈ {0, 2}`:
/// `−4 + 8√(1 − 3χ/(8(1 + 1/B₄)))`.
pub fn volume_lower_bound_s(chi: i64) -> Option<f64> {
    let arg = 1.0 - 3.0 * chi as f64 / (8.0 * (1.0 + 1.0 / b4()));
    (chi >= 0 && arg >= 0.0).then(|| -4.0 + 8.0 * arg.sqrt())
}
