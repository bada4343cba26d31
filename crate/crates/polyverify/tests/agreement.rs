//! The exact expansion evaluated at rational points agrees with the
//! floating-point tensor routes of the core crate.

use hypercurv_core::extrinsic::{
    cgb_integrand, gauss_equations, signature_integrand, weyl_fialkow, weyl_from_curvature, weyl_split, weyl_tensor,
};
use hypercurv_core::lambda2::{inner, triple};
use hypercurv_core::PointState;
use hypercurv_poly::recipe::Context;
use hypercurv_poly::{q, RationalPoly};
use nalgebra::{DMatrix, Matrix4};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 100;

fn random_point(rng: &mut ChaCha8Rng, n: usize, minimal: bool) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = (0..n).map(|_| q(rng.random_range(-40..=40), rng.random_range(1..=12))).collect();
    if minimal {
        let s: BigRational = v[..n - 1].iter().cloned().sum();
        v[n - 1] = -s;
    }
    v.push(q(rng.random_range(-6..=6), rng.random_range(1..=4)));
    v
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn close(exact: f64, approx: f64, what: &str) {
    let scale = 1.0 + exact.abs();
    assert!((exact - approx).abs() <= 1e-9 * scale, "{what}: exact {exact} vs float {approx}");
}

fn point_state(pt: &[BigRational]) -> PointState {
    let n = pt.len() - 1;
    let lambda: Vec<f64> = pt[..n].iter().map(f).collect();
    PointState::from_spectrum(f(&pt[n]), &lambda).unwrap()
}

fn eval(p: &RationalPoly, pt: &[BigRational]) -> f64 {
    f(&p.eval(pt))
}

#[test]
fn four_dimensional_atoms_match_tensor_routes() {
    let ctx = Context::new(4).unwrap();
    let atoms = ["|W|^2", "|W+|^2", "|W-|^2", "tr(W*W)", "cubic(W)", "cubic(W+)", "|RicTF|^2", "R", "cgb"];
    let polys: Vec<RationalPoly> = atoms.iter().map(|a| ctx.assemble(a).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..SAMPLES {
        let pt = random_point(&mut rng, 4, false);
        let p = point_state(&pt);
        let w = weyl_tensor(&p).unwrap();
        let (wp, wm) = weyl_split(&p).unwrap();
        let pack = gauss_equations(&p);
        let floats = [
            inner(&w, &w),
            inner(&wp, &wp),
            inner(&wm, &wm),
            signature_integrand(&p).unwrap(),
            triple(&w, &w, &w),
            triple(&wp, &wp, &wp),
            pack.ric_tf.norm_squared(),
            pack.scal,
            cgb_integrand(&p).unwrap(),
        ];
        for ((name, poly), x) in atoms.iter().zip(&polys).zip(floats) {
            close(eval(poly, &pt), x, name);
        }
    }
}

#[test]
fn general_dimension_weyl_norm_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 3..=8 {
        let w = Context::new(n).unwrap().assemble("|W|^2").unwrap();
        for _ in 0..SAMPLES / 4 {
            let pt = random_point(&mut rng, n, false);
            let p = point_state(&pt);
            let x = weyl_from_curvature(&gauss_equations(&p)).norm_sq();
            close(eval(&w, &pt), x, &format!("|W|^2 n={n}"));
        }
    }
}

#[test]
fn fialkow_components_match_at_minimal_points() {
    let ctx = Context::new(4).unwrap();
    let sym = ctx.geometry().fialkow_weyl();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..SAMPLES {
        let pt = random_point(&mut rng, 4, true);
        let wf = weyl_fialkow(&point_state(&pt)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let exact = sym.get([i, j, k, l]).map_or(0.0, |p| eval(p, &pt));
                        close(exact, wf.get(i, j, k, l), "fialkow component");
                    }
                }
            }
        }
    }
}

/// Orthogonal invariance: the diagonal computation predicts the value at any
/// rotated shape operator.
#[test]
fn rotated_shape_operators_keep_the_invariants() {
    let ctx = Context::new(4).unwrap();
    let wsq = ctx.assemble("|W|^2").unwrap();
    let cubic = ctx.assemble("cubic(W+)").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let pt = random_point(&mut rng, 4, false);
        let m = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let qr = m.qr().q();
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::from_iterator(pt[..4].iter().map(f)));
        let a = qr * d * qr.transpose();
        let a = (a + a.transpose()) * 0.5;
        let p = PointState::from_matrix(f(&pt[4]), DMatrix::from_iterator(4, 4, a.iter().copied())).unwrap();
        let w = weyl_tensor(&p).unwrap();
        close(eval(&wsq, &pt), inner(&w, &w), "rotated |W|^2");
        let (wp, _) = weyl_split(&p).unwrap();
        close(eval(&cubic, &pt), triple(&wp, &wp, &wp), "rotated cubic(W+)");
    }
}
