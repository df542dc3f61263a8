use std::sync::Arc;

use conewedge::curvature::{curvature_block, edge_density_fit, energy_density, nut_curvature_limit, nut_scale};
use conewedge::greens::CustomField;
use conewedge::jet::Jet;
use conewedge::{Angle, Field, Point};
use proptest::prelude::*;

/// `f_λ(x) = λ⁻¹ f(x/λ)`: the same geometry with the metric scaled by λ.
fn dilated(base: Field, lambda: f64) -> Field {
    let angle = *base.angle();
    Field::custom(
        angle,
        CustomField {
            name: format!("dilated by {lambda}"),
            pole: None,
            f: Arc::new(move |v: &[Jet<f64>; 3]| {
                let [r, th, s] = *v;
                base.jet_cone(r * (1.0 / lambda), th, s * (1.0 / lambda)).unwrap() * (1.0 / lambda)
            }),
        },
    )
}

#[test]
fn density_scales_like_inverse_square_of_metric_scale() {
    let base = Field::reflection(2).unwrap();
    let angle = *base.angle();
    for lambda in [0.5, 3.0] {
        let f = dilated(base.clone(), lambda);
        let y = Point::new(0.7, 1.9, 0.3).unwrap();
        let x = Point::new(0.7 * lambda, 1.9, 0.3 * lambda).unwrap();
        let d0 = curvature_block(y.unrolled(&angle), &base).unwrap().norm_sq;
        let d1 = curvature_block(x.unrolled(&angle), &f).unwrap().norm_sq;
        assert!((d1 * lambda * lambda - d0).abs() < 1e-10 * d0, "λ={lambda}: {d1} vs {d0}");
    }
}

#[test]
fn taub_nut_density_closed_form() {
    // radial f = 2c + 1/(2ρ): c_ij = diag(λ₁, λ₂, λ₂) with
    // λ₁ = f''/f² − 2f'²/f³ and λ₂ = f'/(ρf²) + f'²/f³
    let c = 0.7;
    let f = Field::taubnut(Angle::new(1.0).unwrap(), c).unwrap();
    let r: f64 = 1.3;
    let fv = 2.0 * c + 0.5 / r;
    let (d1, d2) = (-0.5 / (r * r), 1.0 / (r * r * r));
    let l1 = d2 / (fv * fv) - 2.0 * d1 * d1 / fv.powi(3);
    let l2 = d1 / (r * fv * fv) + d1 * d1 / fv.powi(3);
    let want = l1 * l1 + 2.0 * l2 * l2;
    let got = curvature_block([0.0, 0.0, r], &f).unwrap().norm_sq;
    assert!((got - want).abs() < 1e-13 * want, "{got} vs {want}");
    assert!(l1 + 2.0 * l2 < 1e-14);
}

#[test]
fn edge_density_exponent() {
    let f = Field::series(0.8).unwrap();
    let fit = edge_density_fit(&f, 0.3, 0.5, (1e-4, 1e-2), 8).unwrap();
    assert!((fit.slope - (2.0 / 0.8 - 4.0)).abs() < 0.05 && fit.is_good(), "{fit:?}");
}

#[test]
fn nut_limit_scaling_bracket() {
    let mut prev = None;
    for n in [2u32, 4, 8, 16] {
        let f = Field::reflection(n).unwrap();
        let ratio = nut_curvature_limit(&f).unwrap().value / nut_scale(&f).unwrap();
        assert!(ratio > 1.0 && ratio < 3.0, "n={n}: {ratio}");
        if let Some(p) = prev {
            // the ratio decreases monotonically towards its limit
            assert!(ratio < p);
        }
        prev = Some(ratio);
    }
    assert!(nut_scale(&Field::series(0.5).unwrap()).is_none());
    assert!(nut_curvature_limit(&Field::flat_edge_pole(Angle::new(0.5).unwrap())).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_is_trace_free_and_matches_bilaplacian(
        r in 0.1f64..3.0, th in -3.0f64..3.0, s in -2.0f64..2.0, n in 2u32..5
    ) {
        let f = Field::reflection(n).unwrap();
        let x = Point::new(r, th, s).unwrap();
        prop_assume!(x.distance_to_pole(f.angle()) > 0.1);
        let u = x.unrolled(f.angle());
        let b = curvature_block(u, &f).unwrap();
        let scale = b.max_abs();
        prop_assert!(b.trace().abs() <= 1e-10 * scale);
        prop_assert!(b.asymmetry() <= 1e-12 * scale);
        prop_assert!(b.alt_deviation <= 1e-9 * scale);
        let d = energy_density(u, &f).unwrap();
        prop_assert!((d - b.norm_sq).abs() <= 1e-8 * b.norm_sq);
    }
}
