//! The potential `f = 2πΓ_p`: Green's function of `Δ_β` with pole at
//! `p = (1, 0, 0)`, its closed-form special cases, and evaluation with
//! derivatives through [`Jet`]s.

pub mod identities;
pub mod kernel;
pub mod modes;
pub mod near_pole;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cone_space::{normalize_angle, ConeAngle, ConePoint};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{lit, Scalar};

pub use identities::{check_identities, two_point_green, IdentityReport};
use modes::{auto_k_max, green_bessel, green_legendre, ModeGeometry};
use near_pole::{SphereData, NEAR_RADIUS};

/// How the angular mode sum of the series method is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesRoute {
    /// All modes summed in closed form under a single integral; supports jets.
    Resummed,
    /// Mode by mode through the toroidal harmonics `Q_{k/β−½}`.
    Legendre,
    /// Mode by mode through the λ-integral of `J_ν J_ν`.
    Bessel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams<T> {
    /// Mode truncation for the mode-by-mode routes; `None` picks it from the
    /// tolerance and the distance to the pole.
    pub k_max: Option<usize>,
    pub quad_rel_tol: T,
    /// Upper limit of the λ-integral.
    pub lambda_cap: T,
    pub route: SeriesRoute,
}

impl<T: Scalar> Default for SeriesParams<T> {
    fn default() -> Self {
        SeriesParams {
            k_max: None,
            quad_rel_tol: lit(1e-12),
            lambda_cap: lit(1e4),
            route: SeriesRoute::Resummed,
        }
    }
}

/// Where a field is singular.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleLocation {
    /// `p = (1, 0, 0)`.
    Unit,
    /// The origin, on the edge.
    Origin,
}

pub type JetFn<T> = dyn Fn(&[Jet<T>; 3]) -> Jet<T> + Send + Sync;

/// A user-supplied potential, given as a function of `(r, θ, s)` jets.
#[derive(Clone)]
pub struct CustomField<T> {
    pub name: String,
    pub pole: Option<PoleLocation>,
    pub f: Arc<JetFn<T>>,
}

impl<T> fmt::Debug for CustomField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomField")
            .field("name", &self.name)
            .field("pole", &self.pole)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum Method<T> {
    Series(SeriesParams<T>),
    /// `β = 1/n`, images at the `n`-th roots of unity.
    Reflection { n: u32 },
    /// `1/(2β|x|)`, pole at the origin.
    FlatEdgePole,
    /// `2c + 1/(2β|x|)`.
    TaubNut { c: T },
    Custom(CustomField<T>),
}

/// Evaluator for `f`. Immutable; safe to share across threads.
#[derive(Clone, Debug)]
pub struct PotentialField<T> {
    angle: ConeAngle<T>,
    method: Method<T>,
    /// Sphere data for the near-pole extension of the series method, built on
    /// first use and shared between clones.
    sphere: Arc<OnceLock<Result<SphereData<T>>>>,
}

impl<T: Scalar> PotentialField<T> {
    pub fn new(angle: ConeAngle<T>, method: Method<T>) -> Result<Self> {
        match &method {
            Method::Reflection { n } => {
                if angle.reciprocal_integer() != Some(*n) {
                    return Err(Error::InvalidParameter(format!(
                        "reflection with n = {n} needs beta = 1/{n}, got {}",
                        angle.beta()
                    )));
                }
            }
            Method::TaubNut { c } if !(*c >= T::zero()) => {
                return Err(Error::InvalidParameter(format!(
                    "Taub-NUT constant must be >= 0, got {c}"
                )));
            }
            Method::Series(p) if !(p.quad_rel_tol > T::zero() && p.lambda_cap > T::zero()) => {
                return Err(Error::InvalidParameter(
                    "series tolerance and lambda cap must be positive".into(),
                ));
            }
            _ => {}
        }
        Ok(PotentialField {
            angle,
            method,
            sphere: Default::default(),
        })
    }

    pub fn series(beta: T) -> Result<Self> {
        Self::new(ConeAngle::new(beta)?, Method::Series(SeriesParams::default()))
    }

    pub fn series_with(angle: ConeAngle<T>, params: SeriesParams<T>) -> Result<Self> {
        Self::new(angle, Method::Series(params))
    }

    pub fn reflection(n: u32) -> Result<Self> {
        Self::new(ConeAngle::from_n(n)?, Method::Reflection { n })
    }

    pub fn flat_edge_pole(angle: ConeAngle<T>) -> Self {
        PotentialField {
            angle,
            method: Method::FlatEdgePole,
            sphere: Default::default(),
        }
    }

    pub fn taubnut(angle: ConeAngle<T>, c: T) -> Result<Self> {
        Self::new(angle, Method::TaubNut { c })
    }

    pub fn custom(angle: ConeAngle<T>, field: CustomField<T>) -> Self {
        PotentialField {
            angle,
            method: Method::Custom(field),
            sphere: Default::default(),
        }
    }

    pub fn angle(&self) -> &ConeAngle<T> {
        &self.angle
    }

    pub fn beta(&self) -> T {
        self.angle.beta()
    }

    pub fn method(&self) -> &Method<T> {
        &self.method
    }

    pub fn method_name(&self) -> &str {
        match &self.method {
            Method::Series(_) => "series",
            Method::Reflection { .. } => "reflection",
            Method::FlatEdgePole => "flat",
            Method::TaubNut { .. } => "taubnut",
            Method::Custom(c) => &c.name,
        }
    }

    pub fn pole_location(&self) -> Option<PoleLocation> {
        match &self.method {
            Method::Series(_) | Method::Reflection { .. } => Some(PoleLocation::Unit),
            Method::FlatEdgePole | Method::TaubNut { .. } => Some(PoleLocation::Origin),
            Method::Custom(c) => c.pole,
        }
    }

    /// Relative tolerance the field is evaluated to.
    pub fn tolerance(&self) -> T {
        match &self.method {
            Method::Series(p) => p.quad_rel_tol,
            _ => T::epsilon() * lit(16.0),
        }
    }

    fn check_pole(&self, x: &ConePoint<T>) -> Result<()> {
        match self.pole_location() {
            Some(PoleLocation::Unit) if x.distance_to_pole(&self.angle) == T::zero() => {
                Err(Error::AtPole)
            }
            Some(PoleLocation::Origin) if x.norm() == T::zero() => Err(Error::AtOrigin),
            _ => Ok(()),
        }
    }

    /// `f` as a jet in whatever variables `r, θ, s` are seeded in.
    pub fn jet_cone(&self, r: Jet<T>, theta: Jet<T>, s: Jet<T>) -> Result<Jet<T>> {
        let beta = self.beta();
        let f = match &self.method {
            Method::Series(p) => {
                if !(r.value() > T::zero()) {
                    return Err(Error::OnEdge);
                }
                let dtheta = theta + (normalize_angle(theta.value()) - theta.value());
                let one = Jet::constant(T::one());
                let smooth = self.series_smooth(r, dtheta, s, p.quad_rel_tol)?;
                kernel::newtonian_jet(r, dtheta, s, one, beta) + smooth
            }
            Method::Reflection { .. } | Method::FlatEdgePole | Method::TaubNut { .. } => {
                let phi = theta * beta;
                self.jet_cartesian_vars(r * phi.cos(), r * phi.sin(), s)?
            }
            Method::Custom(c) => (c.f)(&[r, theta, s]),
        };
        if f.value().is_finite() {
            Ok(f)
        } else if r.value() == T::zero() && s.value() == T::zero() {
            Err(Error::AtOrigin)
        } else {
            Err(Error::AtPole)
        }
    }

    /// `2πF` for the series method; `dtheta` already reduced.
    fn series_smooth(&self, r: Jet<T>, dtheta: Jet<T>, s: Jet<T>, tol: T) -> Result<Jet<T>> {
        let beta = self.beta();
        let phi = dtheta * beta;
        let delta = [r * phi.cos() - T::one(), r * phi.sin(), s];
        let d2 = delta.iter().map(|c| c.value() * c.value()).sum::<T>();
        if d2 < lit::<T>(NEAR_RADIUS * NEAR_RADIUS) {
            let sphere = self
                .sphere
                .get_or_init(|| SphereData::compute(beta, tol))
                .as_ref()
                .map_err(Clone::clone)?;
            Ok(sphere.eval(delta))
        } else {
            kernel::smooth_part_jet(r, dtheta, s, Jet::constant(T::one()), beta, tol)
        }
    }

    /// `f` as a jet in unrolled Cartesian variables.
    pub fn jet_cartesian_vars(&self, x: Jet<T>, y: Jet<T>, z: Jet<T>) -> Result<Jet<T>> {
        let beta = self.beta();
        let half = lit::<T>(0.5);
        let inv_norm = |a: Jet<T>, b: Jet<T>, c: Jet<T>| (a * a + b * b + c * c).sqrt().recip();
        match &self.method {
            Method::Reflection { n } => {
                let mut acc = inv_norm(x - T::one(), y, z);
                for j in 1..*n {
                    let ang = lit::<T>(2.0) * T::PI() * lit(j as f64) / lit(*n as f64);
                    let (sn, cs) = ang.sin_cos();
                    acc += inv_norm(x - cs, y - sn, z);
                }
                Ok(acc * half)
            }
            Method::FlatEdgePole => Ok(inv_norm(x, y, z) * (half / beta)),
            Method::TaubNut { c } => Ok(inv_norm(x, y, z) * (half / beta) + (*c + *c)),
            Method::Series(_) | Method::Custom(_) => {
                let r = (x * x + y * y).sqrt();
                let theta = y.atan2(&x) / beta;
                self.jet_cone(r, theta, z)
            }
        }
    }

    /// Jet of `f` seeded in `(r, θ, s)` at `x`.
    pub fn jet_at(&self, x: &ConePoint<T>, order: u8) -> Result<Jet<T>> {
        self.check_pole(x)?;
        let [r, th, s] = Jet::seed([x.r, x.theta, x.s], order);
        self.jet_cone(r, th, s)
    }

    /// Jet of `f` seeded in unrolled Cartesian coordinates at `x`.
    pub fn jet_cartesian(&self, x: [T; 3], order: u8) -> Result<Jet<T>> {
        let [a, b, c] = Jet::seed(x, order);
        let f = self.jet_cartesian_vars(a, b, c)?;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::AtPole)
        }
    }

    /// The value `f(x)`.
    pub fn value(&self, x: &ConePoint<T>) -> Result<T> {
        self.check_pole(x)?;
        if let Method::Series(p) = &self.method {
            if x.r == T::zero() {
                // Only the k = 0 mode survives on the edge.
                return Ok((lit::<T>(2.0) * self.beta() * (T::one() + x.s * x.s).sqrt()).recip());
            }
            if p.route != SeriesRoute::Resummed {
                return Ok(greens_series(x, p, &self.angle)? * lit(2.0) * T::PI());
            }
        }
        Ok(self.jet_at(x, 0)?.value())
    }

    /// `2πF = f − 1/(2|x − p|)`, the smooth part of `f` at a unit pole.
    pub fn smooth_part(&self, x: &ConePoint<T>) -> Result<T> {
        if self.pole_location() != Some(PoleLocation::Unit) {
            return Err(Error::InvalidParameter(format!(
                "the {} field has no pole at (1, 0, 0)",
                self.method_name()
            )));
        }
        self.check_pole(x)?;
        match &self.method {
            Method::Series(p) if x.r > T::zero() && p.route == SeriesRoute::Resummed => {
                let c = |v: T| Jet::constant(v);
                Ok(self.series_smooth(c(x.r), c(x.theta), c(x.s), p.quad_rel_tol)?.value())
            }
            Method::Reflection { n } => {
                let u = x.unrolled(&self.angle);
                let mut acc = crate::numerics::sum::Neumaier::new();
                for j in 1..*n {
                    let ang = lit::<T>(2.0) * T::PI() * lit(j as f64) / lit(*n as f64);
                    let (sn, cs) = ang.sin_cos();
                    let d = ((u[0] - cs).powi(2) + (u[1] - sn).powi(2) + u[2] * u[2]).sqrt();
                    acc.add(lit::<T>(0.5) / d);
                }
                Ok(acc.value())
            }
            _ => Ok(self.value(x)? - lit::<T>(0.5) / x.distance_to_pole(&self.angle)),
        }
    }
}

/// `G(0, x) = 1/(4πβ|x|)`, the Green's function with pole on the edge.
pub fn greens_flat_edge_pole<T: Scalar>(x: &ConePoint<T>, angle: &ConeAngle<T>) -> Result<T> {
    let n = x.norm();
    if n == T::zero() {
        return Err(Error::AtOrigin);
    }
    Ok((lit::<T>(4.0) * T::PI() * angle.beta() * n).recip())
}

/// `Γ_p(x) = (1/4π) Σ_j 1/|x − p_j|` for `β = 1/n`.
pub fn greens_reflection<T: Scalar>(x: &ConePoint<T>, n: u32) -> Result<T> {
    let field = PotentialField::reflection(n)?;
    Ok(field.value(x)? / (lit::<T>(2.0) * T::PI()))
}

/// `Γ_p(x)` from the angular mode expansion.
pub fn greens_series<T: Scalar>(
    x: &ConePoint<T>,
    params: &SeriesParams<T>,
    angle: &ConeAngle<T>,
) -> Result<T> {
    let two_pi = lit::<T>(2.0) * T::PI();
    if x.distance_to_pole(angle) == T::zero() {
        return Err(Error::AtPole);
    }
    if x.r == T::zero() {
        return Ok((lit::<T>(4.0) * T::PI() * angle.beta() * (T::one() + x.s * x.s).sqrt()).recip());
    }
    let geom = ModeGeometry {
        r: x.r,
        rp: T::one(),
        ds: x.s,
        dtheta: x.theta,
    };
    let k_max = params
        .k_max
        .unwrap_or_else(|| auto_k_max(&geom, angle.beta(), params.quad_rel_tol));
    match params.route {
        SeriesRoute::Resummed => {
            let field = PotentialField::series_with(*angle, *params)?;
            Ok(field.jet_at(x, 0)?.value() / two_pi)
        }
        SeriesRoute::Legendre => green_legendre(&geom, angle.beta(), k_max),
        SeriesRoute::Bessel => green_bessel(
            &geom,
            angle.beta(),
            k_max,
            params.quad_rel_tol,
            params.lambda_cap,
        ),
    }
}

/// All partial derivatives of `f` in `(r, θ, s)` up to `order`.
pub fn greens_derivatives<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    order: u8,
) -> Result<Jet<T>> {
    field.jet_at(x, order)
}

/// `2πF(x) = f(x) − 1/(2|x − p|)`.
pub fn smooth_part_f<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<T> {
    field.smooth_part(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(r: f64, t: f64, s: f64) -> ConePoint<f64> {
        ConePoint::new(r, t, s).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let one = ConeAngle::<f64>::new(1.0).unwrap();
        let half = ConeAngle::<f64>::new(0.5).unwrap();
        let third = ConeAngle::<f64>::new(1.0 / 3.0).unwrap();
        let q = 1.0 / (4.0 * PI);
        assert!((greens_flat_edge_pole(&pt(1.0, 0.0, 0.0), &one).unwrap() - q).abs() < 1e-16);
        assert!((greens_flat_edge_pole(&pt(0.0, 0.0, 2.0), &half).unwrap() - q).abs() < 1e-16);
        assert!((greens_flat_edge_pole(&pt(0.0, 0.0, 3.0), &third).unwrap() - q).abs() < 1e-16);
        assert_eq!(
            greens_flat_edge_pole(&pt(0.0, 0.0, 0.0), &one),
            Err(Error::AtOrigin)
        );
        assert!((greens_reflection(&pt(1.0, 0.0, 1.0), 1).unwrap() - q).abs() < 1e-16);
        assert!((greens_reflection(&pt(0.0, 0.0, 0.0), 2).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((greens_reflection(&pt(2.0, 0.0, 0.0), 2).unwrap() - 1.0 / (3.0 * PI)).abs() < 1e-16);
        assert_eq!(greens_reflection(&pt(1.0, 0.0, 0.0), 2), Err(Error::AtPole));
    }

    #[test]
    fn series_reproduces_free_space() {
        let p = SeriesParams::default();
        let one = ConeAngle::new(1.0).unwrap();
        let g = greens_series(&pt(2.0, 0.0, 0.0), &p, &one).unwrap();
        assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn series_routes_agree_with_reflection() {
        let half = ConeAngle::new(0.5).unwrap();
        for &(r, t, s) in &[(0.4, 1.0, 0.3), (1.7, -2.2, -0.6), (3.0, 3.0, 1.5)] {
            let x = pt(r, t, s);
            let exact = greens_reflection(&x, 2).unwrap();
            for route in [SeriesRoute::Resummed, SeriesRoute::Legendre, SeriesRoute::Bessel] {
                let p = SeriesParams {
                    route,
                    ..SeriesParams::default()
                };
                let g = greens_series(&x, &p, &half).unwrap();
                assert!((g - exact).abs() < 1e-8 * exact, "{route:?} at {x:?}: {g} {exact}");
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let f1 = PotentialField::<f64>::reflection(1).unwrap();
        let j = greens_derivatives(&pt(1.0, 0.0, 1.0), &f1, 1).unwrap();
        assert!((j.partial([0, 0, 1]) + 0.5).abs() < 1e-15);
        let fs = PotentialField::<f64>::series(0.7).unwrap();
        let j = greens_derivatives(&pt(1.3, 0.0, 0.4), &fs, 2).unwrap();
        assert!(j.partial([0, 1, 0]).abs() < 1e-14);
        let j = greens_derivatives(&pt(1.3, 0.6, 0.0), &fs, 2).unwrap();
        assert!(j.partial([0, 0, 1]).abs() < 1e-14);
    }

    #[test]
    fn smooth_part_examples() {
        let one = PotentialField::<f64>::series(1.0).unwrap();
        assert_eq!(one.smooth_part(&pt(0.5, 1.0, 0.2)).unwrap(), 0.0);
        let half = PotentialField::<f64>::reflection(2).unwrap();
        assert!((half.smooth_part(&pt(2.0, 0.0, 0.0)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let s = PotentialField::<f64>::series(0.5).unwrap();
        assert!((s.smooth_part(&pt(2.0, 0.0, 0.0)).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_requires_matching_angle() {
        let a = ConeAngle::<f64>::new(0.4).unwrap();
        assert!(PotentialField::new(a, Method::Reflection { n: 2 }).is_err());
    }

    #[test]
    fn edge_value_of_series() {
        let f = PotentialField::<f64>::series(0.5).unwrap();
        let refl = PotentialField::<f64>::reflection(2).unwrap();
        let x = pt(0.0, 0.0, 0.7);
        assert!((f.value(&x).unwrap() - refl.value(&x).unwrap()).abs() < 1e-15);
    }
}
