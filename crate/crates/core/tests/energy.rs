use std::f64::consts::PI;

use conewedge::energy::{
    cylinder_flux, energy_flux, energy_quadrature, energy_target, inner_flux, outer_flux_limit, EnergyReport,
    FluxOptions, QuadratureOptions,
};
use conewedge::{Angle, Field};

#[test]
fn targets() {
    assert!((energy_target::<f64>(0.5) - 6.0 * PI * PI).abs() < 1e-13);
    assert!((energy_target::<f64>(0.5) - 59.2176).abs() < 1e-4);
    assert_eq!(energy_target::<f64>(1.0), 0.0);
}

#[test]
fn flux_route_reflection() {
    for n in [2u32, 3] {
        let f = Field::reflection(n).unwrap();
        let e = energy_flux(&f, &FluxOptions::default()).unwrap();
        let target = energy_target(f.beta());
        assert!(((e.value - target) / target).abs() < 1e-6, "n={n}: {}", e.value);
        assert!(e.outer_correction.abs() < 1e-6);
        let rep = EnergyReport::new(f.beta(), e.value, None);
        assert!(rep.rel_err_flux < 1e-6);
    }
}

#[test]
fn options_are_validated() {
    let f = Field::reflection(2).unwrap();
    let near = FluxOptions { r_outer: 10.0, ..Default::default() };
    assert!(energy_flux(&f, &near).is_err());
    assert!(inner_flux(&f, 0.7, &FluxOptions::default()).is_err());
    let edge = Field::flat_edge_pole(Angle::new(0.5).unwrap());
    assert!(energy_flux(&edge, &FluxOptions::default()).is_err());
}

#[test]
fn inner_flux_converges_quadratically() {
    let f = Field::reflection(3).unwrap();
    let opts = FluxOptions::default();
    let limit = -16.0 * PI;
    let e1 = inner_flux(&f, 0.02, &opts).unwrap() - limit;
    let e2 = inner_flux(&f, 0.01, &opts).unwrap() - limit;
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.2, "{order}");
}

/// Log-log slope of the edge tube flux over `ρ ∈ {0.02, …, 0.16}`.
fn tube_slope(f: &Field) -> f64 {
    let rs = [0.02, 0.04, 0.08, 0.16];
    let v: Vec<f64> = rs.iter().map(|&r| cylinder_flux(f, r, 2.0, (24, 32)).unwrap().abs()).collect();
    conewedge::numerics::fit::fit_loglog(&rs, &v).unwrap().slope
}

#[test]
fn edge_tube_flux_vanishes() {
    // O(ρ^{min(2, 2/β−2)}): the edge mode r^{1/β} against the r² term of the
    // axisymmetric part
    for (f, want) in [
        (Field::reflection(2).unwrap(), 2.0),
        (Field::reflection(3).unwrap(), 2.0),
        (Field::series(0.7).unwrap(), 2.0 / 0.7 - 2.0),
    ] {
        let slope = tube_slope(&f);
        assert!((slope - want).abs() < 0.2, "β={}: {slope}", f.beta());
    }
}

#[test]
fn outer_limit_is_model_flux() {
    assert!((outer_flux_limit::<f64>(0.5) + 4.0 * PI).abs() < 1e-14);
}

#[test]
fn quadrature_route_and_error_estimate() {
    let f = Field::reflection(2).unwrap();
    let q = energy_quadrature(&f, &QuadratureOptions::default()).unwrap();
    let target = energy_target(0.5);
    let err = (q.value - target).abs();
    assert!(err / target < 1e-6, "{}", q.value);
    assert!(err <= q.error, "estimate {} below actual {err}", q.error);
    assert!(q.contraction < 0.9);
}
