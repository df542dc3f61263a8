use std::f64::consts::PI;

use conewedge::models::{
    eguchi_hanson_potential, eguchi_hanson_potential_check, euclidean_pullback_residual, hopf_bogomolony_residual,
    hopf_euclidean_residual, hopf_map, lebrun_potential_check, quotient_crosscheck, taubnut_chart, taubnut_invert,
    EhPotential, HopfChart,
};
use conewedge::{Complex64, Field, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn taubnut_trivial_cases() {
    let (a, b) = (c(0.3, -0.4), c(1.2, 0.1));
    assert_eq!(taubnut_chart(a, b, 0.0), (a, b));
    assert_eq!(taubnut_invert(a, b, 0.0).unwrap(), (a, b));
    assert!(taubnut_invert(a, b, -0.1).is_err());
}

#[test]
fn taubnut_round_trip_random() {
    let mut g = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z1 = c(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0));
        let z2 = c(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0));
        let (z, w) = taubnut_chart(z1, z2, 0.5);
        let (y1, y2) = taubnut_invert(z, w, 0.5).unwrap();
        worst = worst.max((y1 - z1).norm()).max((y2 - z2).norm());
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn euclidean_metric_is_the_beta_one_field() {
    let f = Field::reflection(1).unwrap();
    for (r, th, s, t) in [(2.0, 0.7, 0.3, 0.2), (0.5, -1.0, -0.6, 1.0), (1.5, 2.0, 1.2, -0.4)] {
        let res = euclidean_pullback_residual(&Point::new(r, th, s).unwrap(), t, &f).unwrap();
        assert!(res < 1e-10, "{res}");
    }
    assert!(euclidean_pullback_residual(&Point::new(2.0, 0.7, 0.3).unwrap(), 0.0, &Field::reflection(2).unwrap()).is_err());
}

#[test]
fn lebrun_flat_limit() {
    let r = lebrun_potential_check(c(0.4, -0.3), c(0.9, 0.2), 0.0).unwrap();
    assert!(r.residual < 1e-8);
    // the Euclidean form: h = identity
    assert!((r.from_metric[0][0] - c(1.0, 0.0)).norm() < 1e-12);
    assert!(r.from_metric[0][1].norm() < 1e-12);
}

#[test]
fn lebrun_rotation_invariance() {
    // (z, w) ↦ (e^{iτ}z, e^{−iτ}w) is an isometry; diagonal entries are invariant
    let (z, w, tau) = (c(0.6, 0.1), c(-0.2, 0.8), 0.9);
    let a = lebrun_potential_check(z, w, 0.3).unwrap();
    let e = Complex64::from_polar(1.0, tau);
    let b = lebrun_potential_check(z * e, w / e, 0.3).unwrap();
    for i in 0..2 {
        assert!((a.from_metric[i][i] - b.from_metric[i][i]).norm() < 1e-9);
    }
    assert!((a.from_metric[0][1].norm() - b.from_metric[0][1].norm()).abs() < 1e-9);
    assert!(a.residual < 1e-4 && b.residual < 1e-4);
}

#[test]
fn eguchi_hanson_potential_and_swap() {
    let f = Field::reflection(2).unwrap();
    let pts = [(c(0.5, 0.2), c(-0.3, 0.7)), (c(1.2, -0.4), c(0.1, 0.3)), (c(0.3, 0.1), c(1.0, 1.0))];
    let swapped: Vec<_> = pts.iter().map(|&(z, w)| (w, z)).collect();
    let a = eguchi_hanson_potential_check(&pts, &f, EhPotential::default()).unwrap();
    let b = eguchi_hanson_potential_check(&swapped, &f, EhPotential::default()).unwrap();
    assert!(a.max_residual() < 1e-3 && b.max_residual() < 1e-3);
    assert!((a.kappa - 2.0).abs() < 1e-6 && (b.kappa - 2.0).abs() < 1e-6);
    assert!(a.volume_residuals.iter().all(|v| *v < 1e-7));
    // the unweighted form is not a potential for any multiple of ω_RF
    let u = eguchi_hanson_potential_check(&pts, &f, EhPotential::Unweighted).unwrap();
    assert!(u.max_residual() > 1e-2);
    assert_eq!(eguchi_hanson_potential(c(1.0, 0.0), c(1.0, 0.0)), 2.0);
    assert!(eguchi_hanson_potential_check(&pts, &Field::reflection(3).unwrap(), EhPotential::default()).is_err());
}

#[test]
fn quotients() {
    let pts: Vec<Point> = [(0.5, 2.0, 0.2), (2.0, -2.5, 1.0), (1.3, 1.0, -0.4), (0.2, 0.3, 0.0)]
        .iter()
        .map(|&(r, th, s)| Point::new(r, th, s).unwrap())
        .collect();
    for n in [1u32, 2, 3, 4] {
        let q = quotient_crosscheck(n, &pts).unwrap();
        assert!(q.max_deviation < 1e-5, "n={n}: {}", q.max_deviation);
    }
}

proptest! {
    #[test]
    fn hopf_identities(a in -2.0f64..2.0, b in -2.0f64..2.0, d in -2.0f64..2.0, e in -2.0f64..2.0) {
        let (z1, z2) = (c(a, b), c(d, e));
        let n2 = z1.norm_sqr() + z2.norm_sqr();
        prop_assume!(n2 > 0.1);
        let x = hopf_map(z1, z2);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        prop_assert!((2.0 * r - n2).abs() < 1e-13 * n2);
        prop_assert!(hopf_euclidean_residual(z1, z2) < 1e-12);
        prop_assert!(hopf_bogomolony_residual(z1, z2) < 1e-8 / n2);
        let h = HopfChart::from_c2(z1, z2);
        prop_assume!(!(x[1] == 0.0 && x[0] <= 0.0));
        let back = HopfChart::from_base(h.x, h.t).unwrap();
        prop_assert!((back.z1 - z1).norm() < 1e-12 * (1.0 + n2));
        prop_assert!((back.z2 - z2).norm() < 1e-12 * (1.0 + n2));
        prop_assert!(h.t.abs() <= PI);
    }
}
