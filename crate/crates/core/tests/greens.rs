use std::f64::consts::PI;

use conewedge::greens::identities::two_point_green;
use conewedge::greens::{greens_flat_edge_pole, greens_reflection, greens_series};
use conewedge::{Angle, Field, Point, Series, SeriesRoute};
use proptest::prelude::*;

/// Images of the pole at the n-th roots of unity, summed by hand.
fn images(x: [f64; 3], n: u32) -> f64 {
    (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            let d = ((x[0] - a.cos()).powi(2) + (x[1] - a.sin()).powi(2) + x[2] * x[2]).sqrt();
            1.0 / (4.0 * PI * d)
        })
        .sum()
}

#[test]
fn free_space_value() {
    let g = greens_reflection(&Point::new(2.0, 0.0, 0.0).unwrap(), 1).unwrap();
    assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-16);
    assert!((g - 0.0795775).abs() < 1e-7);
}

#[test]
fn reflection_matches_image_sum() {
    for n in [2u32, 3, 5] {
        let angle = Angle::from_n(n).unwrap();
        for (r, th, s) in [(0.4, 0.3, -0.2), (2.0, -2.5, 1.1), (1.2, 1.0, 0.0)] {
            let x = Point::new(r, th, s).unwrap();
            let want = images(x.unrolled(&angle), n);
            let got = greens_reflection(&x, n).unwrap();
            assert!((got - want).abs() < 1e-15 * want, "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn three_series_routes_agree() {
    let angle = Angle::new(0.7).unwrap();
    let x = Point::new(1.6, 0.9, 0.35).unwrap();
    let mut vals = Vec::new();
    for route in [SeriesRoute::Resummed, SeriesRoute::Legendre, SeriesRoute::Bessel] {
        let p = Series { route, quad_rel_tol: 1e-10, ..Default::default() };
        vals.push(greens_series(&x, &p, &angle).unwrap());
    }
    assert!((vals[0] - vals[1]).abs() < 1e-9 * vals[0], "{vals:?}");
    assert!((vals[0] - vals[2]).abs() < 1e-7 * vals[0], "{vals:?}");
}

#[test]
fn flat_edge_pole_closed_form() {
    let angle = Angle::new(0.4).unwrap();
    let x = Point::new(3.0, 0.2, 4.0).unwrap();
    let g = greens_flat_edge_pole(&x, &angle).unwrap();
    assert!((g - 1.0 / (4.0 * PI * 0.4 * 5.0)).abs() < 1e-16);
    assert!(greens_flat_edge_pole(&Point::new(0.0, 0.0, 0.0).unwrap(), &angle).is_err());
}

#[test]
fn edge_value_is_zero_mode() {
    // on r = 0 only the axisymmetric part survives: f = 1/(2β√(1+s²))
    let f = Field::series(0.6).unwrap();
    let v = f.value(&Point::new(0.0, 0.0, 0.75).unwrap()).unwrap();
    assert!((v - 1.0 / (1.2 * 1.25)).abs() < 1e-15);
    let near = f.value(&Point::new(1e-7, 1.0, 0.75).unwrap()).unwrap();
    assert!((near - v).abs() < 1e-6);
}

#[test]
fn pole_is_rejected() {
    let f = Field::series(0.5).unwrap();
    assert!(f.value(&Point::pole()).is_err());
    assert!(Field::reflection(2).unwrap().value(&Point::pole()).is_err());
}

#[test]
fn smooth_part_vanishes_in_free_space() {
    let f = Field::reflection(1).unwrap();
    assert!(f.smooth_part(&Point::new(0.5, 1.0, 0.2).unwrap()).unwrap().abs() < 1e-15);
}

#[test]
fn laplacian_is_zero_away_from_pole() {
    for f in [Field::reflection(3).unwrap(), Field::series(0.7).unwrap()] {
        let x = Point::new(0.8, 2.0, -0.4).unwrap();
        let jet = f.jet_at(&x, 2).unwrap();
        let lap = conewedge::cone_space::laplacian_beta(&jet, &x, f.angle()).unwrap();
        assert!(lap.abs() < 1e-9 * jet.value(), "{lap}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reflection_symmetries(r in 0.05f64..4.0, th in -3.1f64..3.1, s in -3.0f64..3.0, n in 1u32..6) {
        let f = Field::reflection(n).unwrap();
        let x = Point::new(r, th, s).unwrap();
        prop_assume!(x.distance_to_pole(f.angle()) > 1e-3);
        let v = f.value(&x).unwrap();
        prop_assert!(v > 0.0);
        let mirror_s = f.value(&Point::new(r, th, -s).unwrap()).unwrap();
        let mirror_th = f.value(&Point::new(r, -th, s).unwrap()).unwrap();
        prop_assert!((v - mirror_s).abs() <= 1e-14 * v);
        prop_assert!((v - mirror_th).abs() <= 1e-14 * v);
        // β = 1/n: f ≥ the free-space term and F ≥ 0
        if n > 1 {
            prop_assert!(f.smooth_part(&x).unwrap() > 0.0);
        }
    }

    #[test]
    fn series_matches_reflection(r in 0.1f64..3.0, th in -3.1f64..3.1, s in -2.0f64..2.0, n in 2u32..5) {
        let x = Point::new(r, th, s).unwrap();
        let refl = Field::reflection(n).unwrap();
        prop_assume!(x.distance_to_pole(refl.angle()) > 1e-2);
        let ser = Field::series(1.0 / n as f64).unwrap();
        let (a, b) = (ser.value(&x).unwrap(), refl.value(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * b, "{} vs {}", a, b);
    }

    #[test]
    fn two_point_symmetry(r1 in 0.2f64..3.0, t1 in -3.0f64..3.0, s1 in -1.0f64..1.0,
                          r2 in 0.2f64..3.0, t2 in -3.0f64..3.0, s2 in -1.0f64..1.0) {
        let f = Field::series(0.65).unwrap();
        let (x, q) = (Point::new(r1, t1, s1).unwrap(), Point::new(r2, t2, s2).unwrap());
        prop_assume!(conewedge::cone_space::cone_distance(&x, &q, f.angle()) > 1e-2);
        let (a, b) = (two_point_green(&f, &x, &q).unwrap(), two_point_green(&f, &q, &x).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a.abs());
        prop_assert!(a > 0.0);
    }
}
