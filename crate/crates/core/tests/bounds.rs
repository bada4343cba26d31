use std::f64::consts::PI;

use hypercurv_core::bounds::{
    euler_integrand_bounds, f_branch_max, f_lower_bound, s_quadratic, volume_hypothesis_bounds, volume_lower_bound_s,
    weyl_threshold_report, GlobalData, ScalSign, Status, DEFAULT_BOUNDS_TOL, VOL_S4,
};
use hypercurv_core::Error;
use proptest::prelude::*;

fn pi2() -> f64 {
    PI * PI
}

fn s2s2() -> GlobalData {
    GlobalData {
        chi: Some(4),
        vol: Some(4.0 * pi2()),
        s: Some(4.0),
        weyl_l2: Some(64.0 / 3.0 * 4.0 * pi2()),
        c: Some(1.0),
        a2avg: Some(4.0),
        scal_sign: ScalSign::Positive,
    }
}

#[test]
fn f_breakpoints() {
    let r1 = 9.0 / (25.0 * pi2());
    let r2 = 1.0 / pi2();
    assert!((f_lower_bound(r1) - 12.0 / 5.0).abs() < 1e-14);
    assert!((f_lower_bound(r1 * (1.0 + 1e-15)) - 12.0 / 5.0).abs() < 1e-12);
    assert!((f_lower_bound(r2) - 4.0).abs() < 1e-14);
    assert!((f_lower_bound(r2 * (1.0 + 1e-15)) - 4.0).abs() < 1e-12);
    assert_eq!(f_lower_bound(0.0), 4.0);
}

/// The first branch decreases from 4 to 12/5, so `f` is not monotone on
/// `[0, 9/(25π²)]`; it is non-decreasing from there on.
#[test]
fn f_dips_then_increases() {
    let r1 = 9.0 / (25.0 * pi2());
    assert!(f_lower_bound(0.0) > f_lower_bound(r1));
    let mut prev = f_lower_bound(r1);
    let mut r = r1;
    while r < 2.0 / pi2() {
        r += 1e-4 / pi2();
        let v = f_lower_bound(r);
        assert!(v >= prev - 1e-12, "decrease at r = {r}");
        prev = v;
    }
}

#[test]
fn f_is_continuous_on_dense_grid() {
    let mut k = -10_000i64;
    let mut prev = f_lower_bound(-1.0 / pi2());
    while k < 20_000 {
        k += 1;
        let v = f_lower_bound(k as f64 * 1e-4 / pi2());
        assert!((v - prev).abs() < 0.05, "jump at step {k}");
        prev = v;
    }
}

#[test]
fn f_agrees_with_branch_max() {
    let mut worst = 0.0f64;
    for k in 0..10_000 {
        let r = (-1.0 + 3.0 * k as f64 / 10_000.0) / pi2();
        worst = worst.max((f_lower_bound(r) - f_branch_max(r)).abs());
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn f_dominates_sqrt_branch_on_middle_interval() {
    for k in 1..=1000 {
        let x = 9.0 / 25.0 + (1.0 - 9.0 / 25.0) * k as f64 / 1000.0;
        let r = x / pi2();
        assert!(f_lower_bound(r) >= 4.0 * PI * r.sqrt() - 1e-12);
    }
}

#[test]
fn s_quadratic_goldens() {
    let q = s_quadratic(1.0, 4, 4.0 * pi2(), 4.0).unwrap();
    assert!((q.plus - 4.0).abs() < 1e-12);
    assert!((q.discriminant - 100.0 / 9.0).abs() < 1e-12);
    for vol in [1.0, 10.0, 1e3] {
        let q = s_quadratic(1.0, 0, vol, 28.0 / 3.0).unwrap();
        assert!((q.plus - 4.0).abs() < 1e-12);
    }
    // Totally geodesic sphere: the geometric value is the minus root.
    let q = s_quadratic(1.0, 2, VOL_S4, 0.0).unwrap();
    assert!((q.plus - 4.0 / 3.0).abs() < 1e-12);
    assert!(q.minus.abs() < 1e-12);
    assert_eq!(q.warnings.len(), 1);
    assert!(q.warnings[0].starts_with('+'));

    assert!(matches!(s_quadratic(1.0, -4, 1.0, 0.0), Err(Error::NegativeDiscriminant { .. })));
    assert!(s_quadratic(1.0, 0, 0.0, 1.0).is_err());
}

#[test]
fn threshold_goldens() {
    let r = weyl_threshold_report(&s2s2(), DEFAULT_BOUNDS_TOL);
    let s = &r["sphere_64_3"];
    assert_eq!((s.holds, s.equality), (Some(true), Some(true)));
    let c = &r["corpinch"];
    assert!((c.bound.unwrap() - 4.0).abs() < 1e-12);
    assert_eq!((c.holds, c.equality), (Some(true), Some(true)));
    assert_eq!(r["euclidean_256_9"].status, Status::NotApplicable);
    assert!(r.values().all(|p| !p.violated()));

    let s1s3 = GlobalData { chi: Some(0), vol: Some(2.0 * PI.powi(3)), s: Some(4.0), weyl_l2: Some(0.0), c: Some(1.0), ..GlobalData::default() };
    let r = weyl_threshold_report(&s1s3, DEFAULT_BOUNDS_TOL);
    assert_eq!(r["sphere_64_3"].holds, Some(true));
    assert_eq!(r["sphere_64_3"].slack, Some(0.0));
    assert_eq!(r["corpinch"].holds, Some(true));
    assert_eq!(r["corpinch"].bound, Some(0.0));
    assert!(r.values().all(|p| !p.violated()));

    let geodesic = GlobalData { chi: Some(2), vol: Some(VOL_S4), s: Some(0.0), weyl_l2: Some(0.0), c: Some(1.0), ..GlobalData::default() };
    let r = weyl_threshold_report(&geodesic, DEFAULT_BOUNDS_TOL);
    let s = &r["sphere_64_3"];
    assert_eq!((s.status, s.holds), (Status::NotApplicable, None));
    assert!(s.slack.unwrap() < 0.0);
    assert!(r.values().all(|p| !p.violated()));

    let r = weyl_threshold_report(&GlobalData::default(), DEFAULT_BOUNDS_TOL);
    assert!(r.values().all(|p| p.holds.is_none() && p.status != Status::Evaluated));
}

#[test]
fn euclidean_and_nonpositive_thresholds() {
    let g = GlobalData { chi: Some(2), weyl_l2: Some(0.0), c: Some(0.0), ..GlobalData::default() };
    let p = &weyl_threshold_report(&g, DEFAULT_BOUNDS_TOL)["euclidean_256_9"];
    assert_eq!(p.holds, Some(true));
    let g = GlobalData { chi: Some(2), weyl_l2: Some(1.0), c: Some(0.0), ..GlobalData::default() };
    assert!(weyl_threshold_report(&g, DEFAULT_BOUNDS_TOL)["euclidean_256_9"].violated());
    let g = GlobalData { chi: Some(2), weyl_l2: Some(1.0), s: Some(12.0), c: Some(1.0), ..GlobalData::default() };
    assert!(weyl_threshold_report(&g, DEFAULT_BOUNDS_TOL)["nonpositive_scalar_32"].violated());
}

#[test]
fn euler_bracket_examples() {
    assert_eq!(euler_integrand_bounds(4.0), (0.0, 16.0 / 3.0));
    assert_eq!(euler_integrand_bounds(0.0), (3.0, 0.0));
    assert_eq!(euler_integrand_bounds(12.0), (-12.0, 48.0));
}

#[test]
fn volume_bounds() {
    let b = volume_hypothesis_bounds(-2).unwrap().unwrap();
    assert!((b.bound - (-4.0 + 8.0 * (1.0 + 8.0 / (5.0 * PI)).sqrt())).abs() < 1e-14);
    assert!((b.bound - 5.828).abs() < 1e-3);
    assert_eq!(b.exceeds_16_3, Some(true));
    let b = volume_hypothesis_bounds(6).unwrap().unwrap();
    assert!((b.bound - 5.6197).abs() < 1e-4);
    assert_eq!(b.exceeds_16_3, Some(true));
    for chi in [0, 4] {
        assert_eq!(volume_hypothesis_bounds(chi).unwrap().unwrap().exceeds_16_3, None);
    }
    assert_eq!(volume_hypothesis_bounds(2).unwrap(), None);
    assert!(matches!(volume_hypothesis_bounds(3), Err(Error::OddEuler(3))));
    assert!(volume_lower_bound_s(0).unwrap() == 4.0);
    let s2 = volume_lower_bound_s(2).unwrap();
    // 1 − 3/8·2 = ¼, so the bound is 0 up to the 1/B₄ correction.
    assert!(s2.abs() < 1e-12);
    assert_eq!(volume_lower_bound_s(4), None);
}

proptest! {
    #[test]
    fn sphere_bound_is_scale_consistent(w in 0.0f64..2000.0, vol in 1.0f64..100.0, k in 0.01f64..100.0, chi in -4i64..8) {
        let base = GlobalData { chi: Some(chi), vol: Some(vol), s: Some(4.0), weyl_l2: Some(w), c: Some(1.0), ..GlobalData::default() };
        let scaled = GlobalData { vol: Some(vol * k), weyl_l2: Some(w * k), ..base.clone() };
        let a = &weyl_threshold_report(&base, 0.0)["sphere_64_3"];
        let b = &weyl_threshold_report(&scaled, 0.0)["sphere_64_3"];
        let bound = 64.0 / 3.0 * pi2() * chi as f64;
        // Skip the knife edge where rounding of `w·k` can flip the sign.
        prop_assume!((w - bound).abs() > 1e-9 * (1.0 + w.abs()) && (w * k - bound).abs() > 1e-9 * (1.0 + (w * k).abs()) || chi == 0);
        if chi == 0 || (w - bound).signum() == (w * k - bound).signum() {
            prop_assert_eq!(a.holds, b.holds);
        }
    }

    #[test]
    fn quadratic_roots_solve_the_balance(chi in -2i64..6, vol in 5.0f64..200.0, a in 0.0f64..20.0) {
        let c = 1.0;
        if let Ok(q) = s_quadratic(c, chi, vol, a) {
            for s in [q.plus, q.minus] {
                let lhs = 0.75 * s * s - c * s + 6.0 * c * c - 8.0 * pi2() * chi as f64 / vol;
                prop_assert!((lhs - 1.5 * a).abs() <= 1e-9 * (1.0 + a));
            }
        }
    }
}
