use std::f64::consts::PI;

use conewedge::{Complex64, Field, Point, PoleLocation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest distance a sample keeps from the singular point of the field.
const POLE_CLEARANCE: f64 = 0.1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `r ∈ [0.1, 3]`, `|θ| ∈ [0.05, π]`, `s ∈ [−2, 2]`, clear of the pole.
///
/// `|θ| ≥ 0.05` keeps the chart cut `θ = 0, r ≥ 1` out of reach.
pub fn cone_points(field: &Field, n: usize, seed: u64) -> Vec<Point> {
    let mut g = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = g.gen_range(0.1..3.0);
        let th = g.gen_range(0.05..PI) * if g.gen_bool(0.5) { 1.0 } else { -1.0 };
        let s = g.gen_range(-2.0..2.0);
        let x = Point::new(r, th, s).expect("finite sample");
        let clear = match field.pole_location() {
            Some(PoleLocation::Unit) => x.distance_to_pole(field.angle()),
            Some(PoleLocation::Origin) => x.norm(),
            None => f64::INFINITY,
        };
        if clear > POLE_CLEARANCE {
            out.push(x);
        }
    }
    out
}

/// Fiber angles in `(−π, π)`, drawn after the points from the same stream.
pub fn cone_points_with_t(field: &Field, n: usize, seed: u64) -> Vec<(Point, f64)> {
    let pts = cone_points(field, n, seed);
    let mut g = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    pts.into_iter().map(|x| (x, g.gen_range(-PI..PI))).collect()
}

/// Pairs `(z, w)` with components in `[−1.5, 1.5]²`, away from `zw ≤ 0` and from
/// `z = 0`, `w = 0`.
pub fn complex_pairs(n: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut g = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut c = || Complex64::new(g.gen_range(-1.5..1.5), g.gen_range(-1.5..1.5));
        let (z, w) = (c(), c());
        let zw = z * w;
        if z.norm() > 0.1 && w.norm() > 0.1 && !(zw.im.abs() < 1e-3 && zw.re <= 0.0) {
            out.push((z, w));
        }
    }
    out
}
