use hypercurv_core::classify::{
    cluster, constant_over_samples, m_w_consistent, principal_multiplicities, sharp_inequalities, spectrum_report,
    structure_predicates, weyl_norm_sq, weyl_operator_spectrum,
};
use hypercurv_core::extrinsic::weyl_split;
use hypercurv_core::lambda2::{lambda2_spectrum, Part};
use hypercurv_core::PointState;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R2: f64 = std::f64::consts::SQRT_2;
const R3: f64 = 1.732_050_807_568_877_2;
const TOL: f64 = 1e-8;

fn s1s3() -> [f64; 4] {
    [R3, -1.0 / R3, -1.0 / R3, -1.0 / R3]
}

#[test]
fn multiplicity_examples() {
    let c = principal_multiplicities(&[1.0, 1.0, -1.0, -1.0], TOL);
    assert_eq!((c.distinct(), c.partition.as_slice()), (2, &[2, 2][..]));
    let c = principal_multiplicities(&s1s3(), TOL);
    assert_eq!((c.distinct(), c.partition.as_slice()), (2, &[1, 3][..]));
    let c = principal_multiplicities(&[1.0 + R2, R2 - 1.0, 1.0 - R2, -1.0 - R2], TOL);
    assert_eq!(c.distinct(), 4);
    assert!(!c.indeterminate);
}

#[test]
fn clustering_flags_ties_near_threshold() {
    let c = cluster(&[1.0, 1.0 + 1.5e-8], 1e-8);
    assert!(c.indeterminate);
    let c = cluster(&[1.0, 1.0 + 1e-12], 1e-8);
    assert_eq!(c.partition, vec![2]);
    assert!(!c.indeterminate);
    assert_eq!(cluster(&[], 1e-8).partition, Vec::<usize>::new());
}

#[test]
fn weyl_spectrum_examples() {
    let close = |a: [f64; 3], b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    let s = weyl_operator_spectrum(&[1.0, 1.0, -1.0, -1.0], TOL);
    assert!(close(s.eigen, [4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0]) && s.w == 2);
    let s = weyl_operator_spectrum(&[1.0 + R2, R2 - 1.0, 1.0 - R2, -1.0 - R2], TOL);
    assert!(close(s.eigen, [2.0, 0.0, -2.0]) && s.w == 3);
    let s = weyl_operator_spectrum(&[5.0, 2.0, 2.0, 2.0], TOL);
    assert!(close(s.eigen, [0.0; 3]) && s.w == 1);
}

#[test]
fn structure_examples() {
    let f = structure_predicates(&s1s3(), TOL);
    assert!(f.lcf && !f.einstein);
    let f = structure_predicates(&[1.0, 1.0, -1.0, -1.0], TOL);
    assert!(!f.lcf && f.einstein && f.two_two_split);
    let f = structure_predicates(&[0.0; 4], TOL);
    assert!(f.lcf && f.einstein);
    // (2,2) but not λ₁ = −λ₂ at a non-minimal point: Ric̊ ≠ 0.
    let f = structure_predicates(&[2.0, 2.0, -1.0, -1.0], TOL);
    assert!(f.two_two_split && !f.einstein);
}

#[test]
fn sharp_examples() {
    let p = PointState::from_spectrum(1.0, &s1s3()).unwrap();
    let r = sharp_inequalities(&p).unwrap();
    assert!(r.equality["a2sq_upper"] && r.equality["trA3_upper"]);
    assert!(!r.equality["a2sq_lower"]);
    let p = PointState::from_spectrum(1.0, &[1.0, 1.0, -1.0, -1.0]).unwrap();
    let r = sharp_inequalities(&p).unwrap();
    assert!(r.equality["a2sq_lower"] && !r.equality["trA3_upper"] && !r.equality["trA3_lower"]);
    assert!(r.margins["trA3_upper"] > 1.0);
    let off = PointState::from_spectrum(1.0, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(sharp_inequalities(&off).is_err());
}

#[test]
fn report_for_five_dimensions_skips_weyl() {
    let p = PointState::from_spectrum(1.0, &[2.0, 2.0, -1.0, -1.0, -2.0]).unwrap();
    let r = spectrum_report(&p);
    assert_eq!((r.m, r.w, r.flags), (3, None, None));
    assert_eq!(r.equality.len(), 4);
}

#[test]
fn constancy_over_samples() {
    let a = vec![1.0, 1.0, -1.0, -1.0];
    let b = vec![-1.0, 1.0, -1.0, 1.0];
    assert!(constant_over_samples(&[a.clone(), b], 1e-10));
    assert!(!constant_over_samples(&[a, vec![1.0, 1.0, -1.0, -0.9]], 1e-10));
    assert!(constant_over_samples(&[], 1e-10));
}

/// Spectra with a prescribed multiplicity pattern, distinct values at least
/// `0.5` apart and each copy perturbed by far less than the tolerance.
fn patterned(rng: &mut ChaCha8Rng, pattern: &[usize], jitter: f64) -> [f64; 4] {
    let mut values: Vec<f64> = Vec::new();
    while values.len() < pattern.len() {
        let v = rng.random_range(-4.0..4.0);
        if values.iter().all(|u: &f64| (u - v).abs() > 0.5) {
            values.push(v);
        }
    }
    let mut out = Vec::new();
    for (v, &k) in values.iter().zip(pattern) {
        for _ in 0..k {
            out.push(v + rng.random_range(-jitter..jitter));
        }
    }
    let mut l: [f64; 4] = out.try_into().unwrap();
    for i in (1..4).rev() {
        l.swap(i, rng.random_range(0..=i));
    }
    l
}

#[test]
fn m_w_table_on_near_degenerate_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let patterns: [&[usize]; 5] = [&[1, 1, 1, 1], &[2, 1, 1], &[2, 2], &[3, 1], &[4]];
    for pattern in patterns {
        for _ in 0..400 {
            let l = patterned(&mut rng, pattern, 1e-3 * TOL);
            let m = principal_multiplicities(&l, TOL);
            let w = weyl_operator_spectrum(&l, TOL);
            assert!(!m.indeterminate && !w.indeterminate, "{l:?}");
            let mut sorted = m.partition.clone();
            sorted.sort_unstable();
            let mut want = pattern.to_vec();
            want.sort_unstable();
            assert_eq!(sorted, want, "{l:?}");
            assert!(m_w_consistent(&m.partition, w.w), "{l:?}: m={:?} w={}", m.partition, w.w);
        }
    }
}

fn arb_spectrum() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-5.0f64..5.0)
}

proptest! {
    #[test]
    fn generic_spectra_have_w_three(l in arb_spectrum()) {
        let m = principal_multiplicities(&l, TOL);
        let w = weyl_operator_spectrum(&l, TOL);
        prop_assume!(!m.indeterminate && !w.indeterminate);
        prop_assert!(m_w_consistent(&m.partition, w.w));
    }

    #[test]
    fn formula_matches_assembled_operator(l in arb_spectrum()) {
        let p = PointState::from_spectrum(1.0, &l).unwrap();
        let (wp, wm) = weyl_split(&p).unwrap();
        let f = weyl_operator_spectrum(&l, TOL).eigen;
        let scale = 1.0 + f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for part in [(wp, Part::Plus), (wm, Part::Minus)] {
            let t = lambda2_spectrum(&part.0, part.1);
            for (x, y) in t.iter().zip(f) {
                prop_assert!((x - y).abs() <= 1e-10 * scale, "{t:?} vs {f:?}");
            }
        }
    }

    #[test]
    fn invariant_under_permutation_and_flip(l in arb_spectrum(), k in 0usize..24) {
        let mut perm = [0usize, 1, 2, 3];
        let mut code = k;
        for i in (1..4).rev() {
            perm.swap(i, code % (i + 1));
            code /= i + 1;
        }
        let q: [f64; 4] = std::array::from_fn(|i| l[perm[i]]);
        let neg = l.map(|x| -x);
        let base = (principal_multiplicities(&l, TOL).distinct(), weyl_operator_spectrum(&l, TOL));
        for other in [q, neg] {
            prop_assert_eq!(principal_multiplicities(&other, TOL).distinct(), base.0);
            let w = weyl_operator_spectrum(&other, TOL);
            prop_assert_eq!(w.w, base.1.w);
            for (x, y) in w.eigen.iter().zip(base.1.eigen) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }
    }

    #[test]
    fn lcf_flag_matches_weyl_norm(l in arb_spectrum(), triple in any::<bool>()) {
        let l = if triple { [l[0], l[1], l[1], l[1]] } else { l };
        let p = PointState::from_spectrum(1.0, &l).unwrap();
        let s = p.s();
        let flat = weyl_norm_sq(&p).unwrap() <= TOL * (1.0 + s * s);
        prop_assert_eq!(structure_predicates(&l, TOL).lcf, flat);
    }

    #[test]
    fn trace_free_margins_non_negative(v in prop::collection::vec(-3.0f64..3.0, 3)) {
        let l = [v[0], v[1], v[2], -(v[0] + v[1] + v[2])];
        let p = PointState::from_spectrum(1.0, &l).unwrap();
        let r = sharp_inequalities(&p).unwrap();
        let s = p.s();
        for (name, m) in &r.margins {
            prop_assert!(*m >= -1e-12 * (1.0 + s * s), "{name} {m}");
        }
    }
}
