//! Two-point Green's function and its symmetries: translation along the
//! edge, rotation about it, the scaling law `G(λp, λq) = λ⁻¹G(p, q)`, and
//! `G(p, q) = G(q, p)`.

use serde::Serialize;

use super::kernel::{newtonian_jet, smooth_part_jet};
use super::modes::{auto_k_max, green_bessel, green_legendre, ModeGeometry};
use super::{Method, PotentialField, SeriesRoute};
use crate::cone_space::{normalize_angle, ConePoint};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{lit, Scalar};

/// `G(x, q)` for an arbitrary pole `q` (series and reflection fields).
pub fn two_point_green<T: Scalar>(
    field: &PotentialField<T>,
    x: &ConePoint<T>,
    q: &ConePoint<T>,
) -> Result<T> {
    let beta = field.beta();
    let four_pi = lit::<T>(4.0) * T::PI();
    match field.method() {
        Method::Reflection { n } => {
            let a = field.angle();
            let u = x.unrolled(a);
            let v = q.unrolled(a);
            let mut acc = crate::numerics::sum::Neumaier::new();
            for j in 0..*n {
                let ang = lit::<T>(2.0) * T::PI() * lit(j as f64) / lit(*n as f64);
                let (sn, cs) = ang.sin_cos();
                let w = [v[0] * cs - v[1] * sn, v[0] * sn + v[1] * cs, v[2]];
                let d = ((u[0] - w[0]).powi(2) + (u[1] - w[1]).powi(2) + (u[2] - w[2]).powi(2)).sqrt();
                if d == T::zero() {
                    return Err(Error::AtPole);
                }
                acc.add(d.recip());
            }
            Ok(acc.value() / four_pi)
        }
        Method::Series(p) => {
            if x.r == T::zero() || q.r == T::zero() {
                return Err(Error::OnEdge);
            }
            let dtheta = normalize_angle(x.theta - q.theta);
            let ds = x.s - q.s;
            match p.route {
                SeriesRoute::Resummed => {
                    let c = |v: T| Jet::constant(v);
                    let (r, rp, dt, dz) = (c(x.r), c(q.r), c(dtheta), c(ds));
                    if x.r == q.r && ds == T::zero() && dtheta == T::zero() {
                        return Err(Error::AtPole);
                    }
                    let f = newtonian_jet(r, dt, dz, rp, beta)
                        + smooth_part_jet(r, dt, dz, rp, beta, p.quad_rel_tol)?;
                    Ok(f.value() / (lit::<T>(2.0) * T::PI()))
                }
                route => {
                    let geom = ModeGeometry {
                        r: x.r,
                        rp: q.r,
                        ds,
                        dtheta,
                    };
                    let k = p
                        .k_max
                        .unwrap_or_else(|| auto_k_max(&geom, beta, p.quad_rel_tol));
                    if route == SeriesRoute::Legendre {
                        green_legendre(&geom, beta, k)
                    } else {
                        green_bessel(&geom, beta, k, p.quad_rel_tol, p.lambda_cap)
                    }
                }
            }
        }
        _ => Err(Error::InvalidParameter(format!(
            "two-point evaluation is not available for the {} field",
            field.method_name()
        ))),
    }
}

/// Largest relative violation of each identity over the sampled pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub translation: f64,
    pub rotation: f64,
    pub scaling: f64,
    pub symmetry: f64,
    pub pairs: usize,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.translation
            .max(self.rotation)
            .max(self.scaling)
            .max(self.symmetry)
    }
}

/// Checks the four identities on consecutive pairs `(samples[2i], samples[2i+1])`.
///
/// Uses an edge translation `l = 0.37`, a rotation `τ = 0.9` and a dilation
/// `λ = 2`.
pub fn check_identities<T: Scalar>(
    field: &PotentialField<T>,
    samples: &[ConePoint<T>],
) -> Result<IdentityReport> {
    let l = lit::<T>(0.37);
    let tau = lit::<T>(0.9);
    let lambda = lit::<T>(2.0);
    let rel = |a: T, b: T| ((a - b).abs() / b.abs()).to_f64().unwrap_or(f64::INFINITY);
    let mut rep = IdentityReport::default();
    for pair in samples.chunks_exact(2) {
        let (p, q) = (&pair[0], &pair[1]);
        let g = two_point_green(field, p, q)?;
        let shift = |x: &ConePoint<T>| ConePoint::new(x.r, x.theta, x.s + l);
        let rot = |x: &ConePoint<T>| ConePoint::new(x.r, x.theta + tau, x.s);
        let dil = |x: &ConePoint<T>| ConePoint::new(x.r * lambda, x.theta, x.s * lambda);
        let gt = two_point_green(field, &shift(p)?, &shift(q)?)?;
        let gr = two_point_green(field, &rot(p)?, &rot(q)?)?;
        let gs = two_point_green(field, &dil(p)?, &dil(q)?)?;
        let gsym = two_point_green(field, q, p)?;
        rep.translation = rep.translation.max(rel(gt, g));
        rep.rotation = rep.rotation.max(rel(gr, g));
        rep.scaling = rep.scaling.max(rel(gs * lambda, g));
        rep.symmetry = rep.symmetry.max(rel(gsym, g));
        rep.pairs += 1;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<ConePoint<f64>> {
        [
            (0.5, 0.3, 0.2),
            (1.4, -2.0, -0.7),
            (2.2, 2.9, 1.1),
            (0.8, -0.4, 0.0),
        ]
        .iter()
        .map(|&(r, t, s)| ConePoint::new(r, t, s).unwrap())
        .collect()
    }

    #[test]
    fn reflection_identities_hold_to_rounding() {
        let f = PotentialField::reflection(2).unwrap();
        let rep = check_identities(&f, &samples()).unwrap();
        assert_eq!(rep.pairs, 2);
        assert!(rep.max() < 1e-13, "{rep:?}");
    }

    #[test]
    fn series_identities() {
        let f = PotentialField::series(0.7).unwrap();
        let rep = check_identities(&f, &samples()).unwrap();
        assert!(rep.max() < 1e-10, "{rep:?}");
    }
}
