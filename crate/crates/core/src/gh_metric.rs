//! The Gibbons–Hawking data on `(R²_* × R) × S¹`: connection, metric and
//! Kähler form.
//!
//! Everything derives from one jet of the fiber potential
//! `U(r, θ, s) = ∫₀^s f(r, θ, q) dq`. With it `u = U`, `a₂ = ∂_r U` and
//! `a₁ = −(βr)⁻¹ ∂_θ U`, so `α₀ = a₁ dr + a₂ βr dθ` vanishes on `{s = 0}`.
//! The `(r, θ)` coefficients of the jet come from quadrature of `f`-jets
//! (differentiation under the integral); the coefficients carrying a power of
//! `s` are read off `f` itself at the endpoint.

use std::cell::RefCell;

use serde::Serialize;

use crate::asymptotics::DecayFit;
use crate::cone_space::ConePoint;
use crate::error::{Error, Result};
use crate::greens::{Method, PotentialField};
use crate::jet::{Jet, MAX_ORDER};
use crate::linalg::symmetric_eigenvalues;
use crate::numerics::quadrature::{integrate_breaks, Integrand, QuadOptions, QuadResult};
use crate::numerics::fit::logspace;
use crate::numerics::richardson::central_diff;
use crate::scalar::{lit, Scalar};

/// `α₀ = a1·dr + a2·βr dθ` and `u = ∫₀^s f dq` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConnectionValue<T> {
    pub a1: T,
    pub a2: T,
    pub u: T,
}

/// Jets of the connection data seeded in `(r, θ, s)`.
#[derive(Clone, Copy, Debug)]
pub struct ConnectionJets<T> {
    /// Order `n`.
    pub u: Jet<T>,
    /// Order `n − 1`.
    pub f: Jet<T>,
    pub a1: Jet<T>,
    pub a2: Jet<T>,
}

/// `g_RF` in the coordinate frame `(∂r, ∂θ, ∂s, ∂t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameMetric<T> {
    pub g: [[T; 4]; 4],
    pub f: T,
    pub conn: ConnectionValue<T>,
}

impl<T: Scalar> FrameMetric<T> {
    pub fn determinant(&self) -> T {
        crate::linalg::determinant(&self.g)
    }

    pub fn min_eigenvalue(&self) -> T {
        symmetric_eigenvalues(&self.g)[0]
    }
}

/// `ω_RF` in the basis `(dt∧ds, dr∧ds, dθ∧ds, dr∧dθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KahlerForm<T> {
    pub dt_ds: T,
    pub dr_ds: T,
    pub dtheta_ds: T,
    pub dr_dtheta: T,
}

impl<T: Scalar> KahlerForm<T> {
    /// Antisymmetric matrix in the order `(r, θ, s, t)`.
    pub fn matrix(&self) -> [[T; 4]; 4] {
        let z = T::zero();
        let (ts, rs, qs, rq) = (self.dt_ds, self.dr_ds, self.dtheta_ds, self.dr_dtheta);
        [
            [z, rq, rs, z],
            [-rq, z, qs, z],
            [-rs, -qs, z, -ts],
            [z, z, ts, z],
        ]
    }

    /// Coefficient of `dt∧ds∧dr∧dθ` in `ω ∧ ω`.
    pub fn wedge_square(&self) -> T {
        // 2·Pf in the order (t, s, r, θ); only dt∧ds carries a t.
        let two = lit::<T>(2.0);
        two * self.dt_ds * self.dr_dtheta
    }
}

/// Relative accuracy of the `s`-integrals.
///
/// Tighter than the evaluation tolerance would suggest: the chart inverse
/// solves `u(s) = const`, and its round trip is only as good as `u`.
pub fn s_tolerance<T: Scalar>(field: &PotentialField<T>) -> T {
    match field.method() {
        Method::Series(p) => p.quad_rel_tol * lit(100.0),
        _ => lit(1e-12),
    }
}

/// Partition of `[0, s]` refined towards the scales set by the pole and the
/// edge, so the adaptive rule does not have to discover them.
fn s_breaks<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Vec<T> {
    let s = x.s;
    let len = s.abs();
    let mut scales = vec![x.r];
    if field.pole_location().is_some() {
        let at_slice = ConePoint { s: T::zero(), ..*x };
        scales.push(at_slice.distance_to_pole(field.angle()));
    }
    let mut qs: Vec<T> = Vec::new();
    let four = lit::<T>(4.0);
    for d in scales {
        let mut q = d;
        while q > T::zero() && q < len {
            qs.push(q);
            q = q * four;
        }
    }
    qs.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    qs.dedup();
    let mut out = vec![T::zero()];
    out.extend(qs);
    out.push(len);
    out
}

/// `∫₀^s g` over the partition from [`s_breaks`], which is ascending in `|q|`.
fn integrate_s<T: Scalar, V>(
    g: impl Fn(T) -> V,
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    opts: &QuadOptions<T>,
) -> QuadResult<V, T>
where
    V: Integrand<T> + std::ops::Mul<T, Output = V>,
{
    let sign = x.s.signum();
    let mut res = integrate_breaks(|q: T| g(q * sign), &s_breaks(x, field), opts);
    res.value = res.value * sign;
    res
}

/// Jet of `U = ∫₀^s f dq` of the given order, seeded in `(r, θ, s)`.
pub fn fiber_potential_jet<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    order: u8,
) -> Result<Jet<T>> {
    if order == 0 {
        return Ok(Jet::constant(fiber_potential_value(x, field)?).truncate(0));
    }
    if !(x.r > T::zero()) {
        return Err(Error::OnEdge);
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "fiber potential jet of order {order} exceeds {MAX_ORDER}"
        )));
    }
    let tol = s_tolerance(field);
    let r = Jet::variable(x.r, 0, order);
    let th = Jet::variable(x.theta, 1, order);
    let failure = RefCell::new(None);
    let integrand = |q: T| match field.jet_cone(r, th, Jet::constant(q)) {
        Ok(f) => f,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Jet::constant(T::zero()).truncate(order)
        }
    };
    let integral = if x.s == T::zero() {
        Jet::constant(T::zero()).truncate(order)
    } else {
        let opts = QuadOptions::new(T::min_positive_value(), tol);
        let res = integrate_s(integrand, x, field, &opts);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        res.ok(tol)?
    };
    let f_end = field.jet_at(x, order - 1)?;
    Ok(Jet::from_coeffs(order, |[i, j, k]| {
        if k == 0 {
            integral.coeff([i, j, 0])
        } else {
            f_end.coeff([i, j, k - 1]) / lit(k as f64)
        }
    }))
}

/// `u = ∫₀^s f dq` from point values of `f`; also valid on the edge.
fn fiber_potential_value<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<T> {
    if x.s == T::zero() {
        return Ok(T::zero());
    }
    let tol = s_tolerance(field);
    let failure = RefCell::new(None);
    let integrand = |q: T| {
        field.value(&ConePoint { s: q, ..*x }).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            T::zero()
        })
    };
    let opts = QuadOptions::new(T::min_positive_value(), tol);
    let res = integrate_s(integrand, x, field, &opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    res.ok(tol)
}

/// Connection jets of order `order − 1` (so `order ≤ 4`).
pub fn connection_jets<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    order: u8,
) -> Result<ConnectionJets<T>> {
    if order == 0 {
        return Err(Error::InvalidParameter("connection jets need order ≥ 1".into()));
    }
    let u = fiber_potential_jet(x, field, order)?;
    let f = field.jet_at(x, order - 1)?;
    let beta = field.beta();
    let r = Jet::variable(x.r, 0, order - 1);
    let a2 = u.derivative(0);
    let a1 = -u.derivative(1) / (r * beta);
    Ok(ConnectionJets { u, f, a1, a2 })
}

pub fn connection_at<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
) -> Result<ConnectionValue<T>> {
    let j = connection_jets(x, field, 1)?;
    Ok(ConnectionValue {
        a1: j.a1.value(),
        a2: j.a2.value(),
        u: j.u.value(),
    })
}

/// The three components of `dα₀ = −⋆_β df`:
///
/// ```text
/// ∂_s a₂ − ∂_r f,   ∂_s a₁ + (βr)⁻¹ ∂_θ f,
/// ∂_r a₂ + a₂/r − (βr)⁻¹ ∂_θ a₁ + ∂_s f.
/// ```
///
/// The first two hold by the fundamental theorem of calculus once `a_i` are
/// `s`-integrals; the third integrates `Δ_β f = 0` and uses `∂_s f = 0` on
/// the slice through the pole.
pub fn bogomolony_components<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
) -> Result<[T; 3]> {
    let j = connection_jets(x, field, 2)?;
    let beta = field.beta();
    let br = beta * x.r;
    let [fr, fth, fs] = j.f.gradient();
    let da1 = j.a1.gradient();
    let da2 = j.a2.gradient();
    Ok([
        da2[2] - fr,
        da1[2] + fth / br,
        da2[0] + j.a2.value() / x.r - da1[1] / br + fs,
    ])
}

/// Largest of the [`bogomolony_components`] in absolute value.
pub fn bogomolony_residual<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<T> {
    let c = bogomolony_components(x, field)?;
    Ok(c.iter().fold(T::zero(), |m, v| m.max(v.abs())))
}

/// Log-log fit of `max(|a₁|, |a₂|)` against `r` at fixed `(θ, s)`, `n ≥ 8`
/// log-spaced radii. Near the edge both components behave like
/// `r^{1/β − 1}`.
pub fn connection_holder_fit<T: Scalar>(
    field: &PotentialField<T>,
    theta: T,
    s: T,
    r_range: (T, T),
    n: usize,
) -> Result<DecayFit<T>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("Hölder fit needs at least 8 radii, got {n}")));
    }
    let radii = logspace(r_range.0, r_range.1, n);
    let values = radii
        .iter()
        .map(|&r| {
            let c = connection_at(&ConePoint { r, theta, s }, field)?;
            Ok(c.a1.abs().max(c.a2.abs()))
        })
        .collect::<Result<Vec<T>>>()?;
    DecayFit::new(radii, values)
}

pub fn frame_metric<T: Scalar>(x: &ConePoint<T>, f: T, conn: ConnectionValue<T>, beta: T) -> FrameMetric<T> {
    let br = beta * x.r;
    let inv = f.recip();
    let (a1, a2) = (conn.a1, conn.a2 * br);
    // α = dt + a1 dr + a2 dθ (a2 already carries βr)
    let alpha = [a1, a2, T::zero(), T::one()];
    let base = [f, f * br * br, f, T::zero()];
    let mut g = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = inv * alpha[i] * alpha[j];
        }
        g[i][i] = g[i][i] + base[i];
    }
    FrameMetric { g, f, conn }
}

pub fn metric_at<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<FrameMetric<T>> {
    let conn = connection_at(x, field)?;
    let f = field.value(x)?;
    Ok(frame_metric(x, f, conn, field.beta()))
}

pub fn kahler_form_at<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<KahlerForm<T>> {
    let conn = connection_at(x, field)?;
    let f = field.value(x)?;
    let br = field.beta() * x.r;
    Ok(KahlerForm {
        dt_ds: T::one(),
        dr_ds: conn.a1,
        dtheta_ds: conn.a2 * br,
        dr_dtheta: f * br,
    })
}

/// Coefficient of `dr∧dθ∧ds` in `dω_RF`, by central differences of
/// [`kahler_form_at`] with step `h`.
pub fn kahler_closedness_residual<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    h: T,
) -> Result<T> {
    let failure = RefCell::new(None);
    let eval = |p: ConePoint<T>, pick: fn(&KahlerForm<T>) -> T| match kahler_form_at(&p, field) {
        Ok(w) => pick(&w),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::zero()
        }
    };
    let d_theta_p = central_diff(|v| eval(ConePoint { theta: v, ..*x }, |w| w.dr_ds), x.theta, h);
    let d_r_q = central_diff(|v| eval(ConePoint { r: v, ..*x }, |w| w.dtheta_ds), x.r, h);
    let d_s_r = central_diff(|v| eval(ConePoint { s: v, ..*x }, |w| w.dr_dtheta), x.s, h);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(d_r_q - d_theta_p + d_s_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::ConeAngle;
    use crate::numerics::quadrature::gauss_legendre_on;

    fn pt(r: f64, theta: f64, s: f64) -> ConePoint<f64> {
        ConePoint::new(r, theta, s).unwrap()
    }

    #[test]
    fn connection_vanishes_on_the_slice() {
        let field = PotentialField::reflection(2).unwrap();
        let c = connection_at(&pt(1.7, 0.4, 0.0), &field).unwrap();
        assert_eq!((c.a1, c.a2, c.u), (0.0, 0.0, 0.0));
    }

    #[test]
    fn a1_vanishes_on_theta_zero() {
        let field = PotentialField::reflection(3).unwrap();
        let c = connection_at(&pt(2.0, 0.0, 0.8), &field).unwrap();
        assert!(c.a1.abs() < 1e-14, "{}", c.a1);
        assert!(c.u > 0.0);
    }

    #[test]
    fn a2_matches_fixed_order_quadrature() {
        // ∂_r of ½(1/|x−p| + 1/|x+p|) in closed form, integrated with a
        // 200-point Gauss rule.
        let field = PotentialField::reflection(2).unwrap();
        let c = connection_at(&pt(2.0, 0.0, 1.0), &field).unwrap();
        let dr = |x: f64, q: f64| -0.5 * (x - 1.0) / ((x - 1.0).powi(2) + q * q).powf(1.5)
            - 0.5 * (x + 1.0) / ((x + 1.0).powi(2) + q * q).powf(1.5);
        let oracle: f64 = gauss_legendre_on(200, 0.0, 1.0)
            .into_iter()
            .map(|(q, w)| w * dr(2.0, q))
            .sum();
        assert!((c.a2 - oracle).abs() < 1e-12, "{} vs {}", c.a2, oracle);
    }

    #[test]
    fn bogomolony_closed_form() {
        let field = PotentialField::reflection(2).unwrap();
        for &(r, th, s) in &[(0.5, 1.0, 0.3), (2.0, -2.0, -1.5), (1.1, 0.2, 0.05)] {
            let res = bogomolony_residual(&pt(r, th, s), &field).unwrap();
            assert!(res < 1e-9, "{res}");
        }
    }

    #[test]
    fn metric_determinant_and_slice() {
        let field = PotentialField::reflection(3).unwrap();
        let x = pt(1.3, 0.7, 0.9);
        let g = metric_at(&x, &field).unwrap();
        let b = field.beta();
        let det = g.f * g.f * b * b * x.r * x.r;
        assert!((g.determinant() - det).abs() < 1e-12 * det);
        assert!(g.min_eigenvalue() > 0.0);
        let g0 = metric_at(&pt(1.3, 0.7, 0.0), &field).unwrap();
        let f = g0.f;
        let diag = [f, f * b * b * 1.69, f, 1.0 / f];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { diag[i] } else { 0.0 };
                assert!((g0.g[i][j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kahler_form_is_closed() {
        let field = PotentialField::reflection(2).unwrap();
        let x = pt(1.4, 0.9, 0.6);
        let res = kahler_closedness_residual(&x, &field, 1e-3).unwrap();
        assert!(res.abs() < 1e-6, "{res}");
        let w = kahler_form_at(&x, &field).unwrap();
        let f = field.value(&x).unwrap();
        assert!((w.wedge_square() - 2.0 * f * 0.5 * 1.4).abs() < 1e-14);
    }

    #[test]
    fn s_reflection_flips_the_connection() {
        let field = PotentialField::reflection(2).unwrap();
        let up = connection_at(&pt(0.8, 1.2, 0.7), &field).unwrap();
        let down = connection_at(&pt(0.8, 1.2, -0.7), &field).unwrap();
        assert!((up.a1 + down.a1).abs() < 1e-13);
        assert!((up.a2 + down.a2).abs() < 1e-13);
        assert!((up.u + down.u).abs() < 1e-13);
    }

    #[test]
    fn edge_is_rejected() {
        let field = PotentialField::new(
            ConeAngle::new(0.5).unwrap(),
            Method::Reflection { n: 2 },
        )
        .unwrap();
        let x = ConePoint { r: 0.0, theta: 0.0, s: 1.0 };
        assert_eq!(connection_at(&x, &field), Err(Error::OnEdge));
    }
}
