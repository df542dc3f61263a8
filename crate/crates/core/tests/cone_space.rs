use std::f64::consts::PI;

use conewedge::cone_space::{cone_distance, laplacian_beta, laplacian_beta_fd, normalize_angle};
use conewedge::jet::Jet;
use conewedge::{Angle, Point};
use proptest::prelude::*;

#[test]
fn angle_validation() {
    assert!(Angle::new(0.0).is_err());
    assert!(Angle::new(1.5).is_err());
    assert!(Angle::new(f64::NAN).is_err());
    assert_eq!(Angle::from_n(4).unwrap().reciprocal_integer(), Some(4));
    assert_eq!(Angle::new(0.7).unwrap().reciprocal_integer(), None);
}

#[test]
fn edge_modes_are_harmonic() {
    // r^{k/β} cos kθ is harmonic for g_β
    let angle = Angle::new(0.6).unwrap();
    let x = Point::new(0.7, 0.4, 0.3).unwrap();
    for k in 1..4 {
        let [r, th, _] = Jet::seed([x.r, x.theta, x.s], 2);
        let u = r.powf(k as f64 / 0.6) * (th * k as f64).cos();
        assert!(laplacian_beta(&u, &x, &angle).unwrap().abs() < 1e-12);
        let fd = laplacian_beta_fd(
            |r: f64, t: f64, _| r.powf(k as f64 / 0.6) * (k as f64 * t).cos(),
            &x,
            &angle,
        )
        .unwrap();
        assert!(fd.abs() < 1e-4, "{fd}");
    }
}

#[test]
fn distance_is_the_unrolled_chord() {
    let (a, b) = (Point::new(1.0, 0.0, 0.0).unwrap(), Point::new(2.0, PI, 0.5).unwrap());
    for beta in [0.25, 0.9, 1.0] {
        let chord = (5.0 - 4.0 * (beta * PI).cos() + 0.25f64).sqrt();
        let d = cone_distance(&a, &b, &Angle::new(beta).unwrap());
        assert!((d - chord).abs() < 1e-14, "β={beta}: {d} vs {chord}");
    }
}

proptest! {
    #[test]
    fn unrolled_round_trip(r in 0.0f64..10.0, th in -PI..PI, s in -5.0f64..5.0, beta in 0.05f64..1.0) {
        let angle = Angle::new(beta).unwrap();
        let x = Point::new(r, th, s).unwrap();
        let y = Point::from_unrolled(x.unrolled(&angle), &angle).unwrap();
        prop_assert!((y.r - x.r).abs() < 1e-12 * (1.0 + r));
        prop_assert!((y.s - x.s).abs() < 1e-15 * (1.0 + s.abs()));
        if r > 1e-9 {
            prop_assert!(normalize_angle(y.theta - x.theta).abs() < 1e-10);
        }
    }

    #[test]
    fn distance_is_a_metric(a in (0.0f64..3.0, -PI..PI, -2.0f64..2.0),
                            b in (0.0f64..3.0, -PI..PI, -2.0f64..2.0),
                            c in (0.0f64..3.0, -PI..PI, -2.0f64..2.0),
                            beta in 0.1f64..1.0) {
        let angle = Angle::new(beta).unwrap();
        let p = |t: (f64, f64, f64)| Point::new(t.0, t.1, t.2).unwrap();
        let (x, y, z) = (p(a), p(b), p(c));
        let d = |u: &Point, v: &Point| cone_distance(u, v, &angle);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-14);
        prop_assert!(d(&x, &x) < 1e-15);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
        // never longer than the path through the edge
        prop_assert!(d(&x, &y) <= (x.r + y.r).hypot(x.s - y.s) + 1e-12);
    }
}
