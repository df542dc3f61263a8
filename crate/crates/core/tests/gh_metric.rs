use conewedge::gh_metric::{
    bogomolony_components, connection_at, connection_holder_fit, kahler_closedness_residual, kahler_form_at,
    metric_at,
};
use conewedge::{Angle, Field, Point};
use proptest::prelude::*;

#[test]
fn flat_connection_is_hopf() {
    // β = 1, pole at p: u = ½ asinh(s/ρ), the Hopf gauge centred at p
    let f = Field::reflection(1).unwrap();
    let x = Point::new(1.5, 0.8, 0.6).unwrap();
    let c = connection_at(&x, &f).unwrap();
    let planar = (1.5f64.powi(2) + 1.0 - 3.0 * 0.8f64.cos()).sqrt();
    assert!((c.u - 0.5 * (0.6 / planar).asinh()).abs() < 1e-13);
}

#[test]
fn edge_pole_connection_closed_form() {
    // f = 1/(2β|x|): a₂ = −s/(2βr|x|), a₁ = 0
    let angle = Angle::new(0.4).unwrap();
    let f = Field::flat_edge_pole(angle);
    let x = Point::new(0.9, 1.1, -0.7).unwrap();
    let c = connection_at(&x, &f).unwrap();
    let n = x.norm();
    assert!(c.a1.abs() < 1e-13);
    assert!((c.a2 + x.s / (2.0 * 0.4 * x.r * n)).abs() < 1e-12);
}

#[test]
fn holder_exponent_of_connection() {
    let f = Field::series(0.7).unwrap();
    let fit = connection_holder_fit(&f, 0.8, 0.4, (1e-4, 1e-2), 8).unwrap();
    assert!((fit.slope - (1.0 / 0.7 - 1.0)).abs() < 0.1 && fit.is_good(), "{fit:?}");
    assert!(connection_holder_fit(&f, 0.8, 0.4, (1e-4, 1e-2), 4).is_err());
}

#[test]
fn kahler_form_is_closed() {
    for f in [Field::reflection(2).unwrap(), Field::series(0.7).unwrap()] {
        let r = kahler_closedness_residual(&Point::new(0.9, 1.3, 0.2).unwrap(), &f, 1e-3).unwrap();
        assert!(r < 1e-6, "{r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn metric_invariants(r in 0.1f64..3.0, th in -3.0f64..3.0, s in -2.0f64..2.0, n in 1u32..5) {
        let f = Field::reflection(n).unwrap();
        let x = Point::new(r, th, s).unwrap();
        prop_assume!(x.distance_to_pole(f.angle()) > 0.05);
        let m = metric_at(&x, &f).unwrap();
        let beta = f.beta();
        // det g = f²β²r² and g(∂t, ∂t) = 1/f
        let det = m.f * m.f * beta * beta * r * r;
        prop_assert!((m.determinant() - det).abs() <= 1e-9 * det);
        prop_assert!((m.g[3][3] - 1.0 / m.f).abs() <= 1e-14 / m.f);
        prop_assert!(m.min_eigenvalue() > 0.0);
        // ω∧ω = 2 vol
        let w = kahler_form_at(&x, &f).unwrap();
        prop_assert!((w.wedge_square() - 2.0 * det.sqrt()).abs() <= 1e-9 * det.sqrt());
        let b = bogomolony_components(&x, &f).unwrap();
        prop_assert!(b.iter().all(|v| v.abs() < 1e-8 * (1.0 + m.f * m.f)));
    }
}
