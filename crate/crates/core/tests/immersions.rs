use std::f64::consts::PI;

use hypercurv_core::immersions::{
    analytic_volume, catalog_point, integrate, integrate_with_nodes, numeric_second_fundamental_form, Functional,
    Immersion, Kind,
};
use hypercurv_core::Error;
use nalgebra::SymmetricEigen;

fn imm(s: &str) -> Immersion {
    Immersion::new(s.parse().unwrap()).unwrap()
}

fn sorted_eigen(a: &nalgebra::Matrix4<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(*a).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

#[test]
fn catalog_spectra() {
    let s3 = 3f64.sqrt();
    let p = catalog_point(&"clifford:4:1".parse().unwrap()).unwrap();
    let expect = [s3, -1.0 / s3, -1.0 / s3, -1.0 / s3];
    for (x, y) in p.spectrum().iter().zip(expect) {
        assert!((x - y).abs() < 1e-15);
    }
    assert!(p.parallel());

    let p = catalog_point(&"clifford:4:2".parse().unwrap()).unwrap();
    assert_eq!(p.spectrum(), vec![1.0, 1.0, -1.0, -1.0]);

    // m = 4 entry: H = 0 and S = 12 so that R = n(n − m) = 0 with c = 1.
    let p = catalog_point(&Kind::IsoparametricM4Point).unwrap();
    let r2 = 2f64.sqrt();
    let expect = [1.0 + r2, r2 - 1.0, 1.0 - r2, -1.0 - r2];
    for (x, y) in p.spectrum().iter().zip(expect) {
        assert!((x - y).abs() < 1e-14, "{x} vs {y}");
    }
    assert!(p.h().abs() < 1e-14);
    assert!((p.s() - 12.0).abs() < 1e-13);
}

#[test]
fn kind_parsing() {
    assert_eq!("clifford:4:2".parse::<Kind>().unwrap(), Kind::Clifford { n: 4, k: 2 });
    assert_eq!("sphere:4".parse::<Kind>().unwrap(), Kind::TotallyGeodesicSphere { n: 4 });
    assert!(matches!("torus".parse::<Kind>(), Err(Error::UnknownKind(_))));
    assert!("clifford:4:4".parse::<Kind>().is_err());
    assert!(catalog_point(&Kind::Custom("x".into())).is_err());
}

#[test]
fn finite_difference_matches_analytic_spectrum() {
    for (name, expect) in [
        ("clifford:4:1", vec![3f64.sqrt(), -1.0 / 3f64.sqrt(), -1.0 / 3f64.sqrt(), -1.0 / 3f64.sqrt()]),
        ("clifford:4:2", vec![1.0, 1.0, -1.0, -1.0]),
        ("clifford:4:3", vec![1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), -3f64.sqrt()]),
        ("umbilic:0.9", vec![1.0 / 0.9f64.tan(); 4]),
    ] {
        let im = imm(name);
        for params in [[0.7, 1.1, 2.0, 0.3], [1.3, 0.4, 0.9, 5.0], [2.5, 2.2, 1.6, 3.3]] {
            let a = numeric_second_fundamental_form(&im, &params, 1e-4).unwrap();
            let got = sorted_eigen(&a);
            for (x, y) in got.iter().zip(&expect) {
                assert!((x - y).abs() < 1e-6, "{name} at {params:?}: {got:?}");
            }
        }
    }
}

#[test]
fn totally_geodesic_sphere_has_zero_shape_operator() {
    let a = numeric_second_fundamental_form(&imm("sphere:4"), &[0.5, 1.0, 2.0, 4.0], 1e-4).unwrap();
    assert!(a.abs().max() < 1e-6);
}

#[test]
fn degenerate_and_off_sphere_charts_are_rejected() {
    // Collapsing one parameter direction.
    let flat = Immersion::custom("flat", [0.0; 4], [1.0; 4], |p| {
        let (a, b) = (p[0], p[1]);
        let u = [a.cos(), a.sin() * b.cos(), a.sin() * b.sin(), 0.0, 0.0];
        [u[0], u[1], u[2], u[3], u[4], 0.0]
    });
    assert!(matches!(numeric_second_fundamental_form(&flat, &[0.5, 0.5, 0.5, 0.5], 1e-4), Err(Error::DegenerateChart { .. })));

    let off = Immersion::custom("off", [0.0; 4], [1.0; 4], |p| [2.0, p[0], p[1], p[2], p[3], 0.0]);
    assert!(matches!(numeric_second_fundamental_form(&off, &[0.1; 4], 1e-4), Err(Error::OffSphere { .. })));
}

#[test]
fn custom_patch_of_clifford_torus_agrees_with_catalog() {
    // S²(1/√2) × S²(1/√2) written by hand.
    let r = 0.5f64.sqrt();
    let patch = Immersion::custom("s2xs2", [0.5, 0.0, 0.5, 0.0], [2.5, 1.0, 2.5, 1.0], move |p| {
        [
            r * p[0].cos(),
            r * p[0].sin() * p[1].cos(),
            r * p[0].sin() * p[1].sin(),
            r * p[2].cos(),
            r * p[2].sin() * p[3].cos(),
            r * p[2].sin() * p[3].sin(),
        ]
    });
    let a = numeric_second_fundamental_form(&patch, &[1.0, 0.3, 2.0, 0.7], 1e-4).unwrap();
    let got = sorted_eigen(&a);
    let mut abs: Vec<f64> = got.iter().map(|x| x.abs()).collect();
    abs.sort_by(|x, y| x.total_cmp(y));
    for x in abs {
        assert!((x - 1.0).abs() < 1e-6);
    }
    let vol = integrate(&patch, Functional::Volume, 6).unwrap();
    assert!(!vol.topological);
    // Local patch volume: (r² ∫ sin θ dθ dφ)² over the box.
    let f = r * r * ((0.5f64).cos() - (2.5f64).cos());
    assert!((vol.value - f * f).abs() < 1e-5, "{} vs {}", vol.value, f * f);
}

#[test]
fn euler_characteristics_and_volumes() {
    for (name, chi) in [("clifford:4:1", 0.0), ("clifford:4:2", 4.0), ("clifford:4:3", 0.0), ("sphere:4", 2.0), ("umbilic:0.7", 2.0)] {
        let im = imm(name);
        let r = integrate(&im, Functional::CgbEuler, 24).unwrap();
        assert!((r.value - chi).abs() < 1e-8, "{name}: chi = {}", r.value);
        assert!(r.topological);
        let v = integrate(&im, Functional::Volume, 24).unwrap();
        let exact = analytic_volume(im.kind()).unwrap();
        assert!((v.value / exact - 1.0).abs() < 1e-10, "{name}: vol = {} vs {exact}", v.value);
        let tau = integrate(&im, Functional::Signature, 16).unwrap();
        assert!(tau.value.abs() < 1e-10, "{name}: tau = {}", tau.value);
    }
}

#[test]
fn analytic_volumes() {
    let v = analytic_volume(&Kind::Clifford { n: 4, k: 1 }).unwrap();
    assert!((v - 3.0 * 3f64.sqrt() / 4.0 * PI.powi(3)).abs() < 1e-12);
    let v = analytic_volume(&Kind::Clifford { n: 4, k: 2 }).unwrap();
    assert!((v - 4.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn weyl_functional_on_s2xs2() {
    let r = integrate(&imm("clifford:4:2"), Functional::WeylFunctional, 24).unwrap();
    let exact = 64.0 / 3.0 * 4.0 * PI * PI;
    assert!((r.value / exact - 1.0).abs() < 1e-10);
}

#[test]
fn sphere_quadrature_converges() {
    let im = imm("sphere:4");
    let e2 = (integrate(&im, Functional::CgbEuler, 2).unwrap().value - 2.0).abs();
    let e4 = (integrate(&im, Functional::CgbEuler, 4).unwrap().value - 2.0).abs();
    let e8 = (integrate(&im, Functional::CgbEuler, 8).unwrap().value - 2.0).abs();
    assert!(e4 < e2 / 4.0 && e8 < e4 / 4.0, "{e2} {e4} {e8}");
}

#[test]
fn node_dump_reproduces_integral_and_is_deterministic() {
    let im = imm("clifford:4:2");
    let (r, nodes) = integrate_with_nodes(&im, Functional::CgbEuler, 6).unwrap();
    assert_eq!(nodes.len(), r.nodes);
    let sum: f64 = nodes.iter().map(|n| n.integrand * n.weight).sum();
    assert!((sum - r.integral).abs() < 1e-9 * r.integral.abs());
    let again = integrate(&im, Functional::CgbEuler, 6).unwrap();
    assert_eq!(r.integral.to_bits(), again.integral.to_bits());
}

#[test]
fn point_only_entries_cannot_be_integrated() {
    let im = Immersion::new(Kind::IsoparametricM4Point).unwrap();
    assert!(!im.has_chart());
    assert!(integrate(&im, Functional::Volume, 4).is_err());
}
