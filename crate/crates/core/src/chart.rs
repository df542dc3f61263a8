//! The holomorphic chart `H = (z, w)` and its inverse.
//!
//! With `ζ = r^c e^{iθ}` (`c = 1/β`), `h₀ = (1 − ζ)^{1/2}` and
//! `u = ∫₀^s f dq`,
//!
//! ```text
//! z = h₀ e^{−u} e^{it},   w = h₀ e^{u} e^{−it},
//! ```
//!
//! defined off the cut `ζ ∈ [1, ∞)`. Conversely `ζ = 1 − zw` and
//! `u = ½ log(|w|/|z|)`, so `s > 0` exactly when `|w| > |z|`.

use std::cell::RefCell;

use num_complex::Complex;
use serde::Serialize;

use crate::asymptotics::DecayFit;
use crate::cone_space::{normalize_angle, ConePoint};
use crate::error::{Error, Result};
use crate::gh_metric::{connection_at, fiber_potential_jet, ConnectionValue};
use crate::greens::{PoleLocation, PotentialField};
use crate::linalg::determinant;
use crate::numerics::quadrature::{integrate, QuadOptions};
use crate::numerics::richardson::richardson;
use crate::numerics::roots::{expand_bracket, newton_bracketed};
use crate::scalar::{lit, Scalar};

pub type C<T> = Complex<T>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartPoint<T> {
    pub z: C<T>,
    pub w: C<T>,
    /// `(r, θ, s, t)` when produced by [`forward_chart`].
    pub source: Option<([T; 3], T)>,
}

/// `ζ = r^c e^{iθ}`.
pub fn zeta<T: Scalar>(x: &ConePoint<T>, beta: T) -> C<T> {
    C::from_polar(x.r.powf(beta.recip()), x.theta)
}

fn cut_violation<T: Scalar>(zeta: C<T>) -> Error {
    Error::CutViolation {
        re: zeta.re.to_f64().unwrap_or(f64::NAN),
        im: zeta.im.to_f64().unwrap_or(f64::NAN),
    }
}

/// `h₀ = (1 − ζ)^{1/2}` on the principal branch; rejects the cut.
pub fn h0<T: Scalar>(zeta: C<T>) -> Result<C<T>> {
    if zeta.im == T::zero() && zeta.re >= T::one() {
        return Err(cut_violation(zeta));
    }
    Ok((C::new(T::one(), T::zero()) - zeta).sqrt())
}

/// `h₀⁻¹ ∂h₀/∂r = −(c/2) r^{c−1} e^{iθ} / (1 − ζ)`.
pub fn dlog_h0_dr<T: Scalar>(x: &ConePoint<T>, beta: T) -> C<T> {
    let c = beta.recip();
    let z = zeta(x, beta);
    let num = C::from_polar(c * lit(0.5) * x.r.powf(c - T::one()), x.theta);
    -num / (C::new(T::one(), T::zero()) - z)
}

/// The chart from a known fiber potential `u`.
pub fn chart_from_u<T: Scalar>(x: &ConePoint<T>, t: T, u: T, beta: T) -> Result<ChartPoint<T>> {
    let h = h0(zeta(x, beta))?;
    let z = h * C::from_polar((-u).exp(), t);
    let w = h * C::from_polar(u.exp(), -t);
    Ok(ChartPoint {
        z,
        w,
        source: Some(([x.r, x.theta, x.s], t)),
    })
}

/// `u = ∫₀^s f dq`.
pub fn fiber_potential<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<T> {
    Ok(fiber_potential_jet(x, field, 0)?.value())
}

pub fn forward_chart<T: Scalar>(
    x: &ConePoint<T>,
    t: T,
    field: &PotentialField<T>,
) -> Result<ChartPoint<T>> {
    h0(zeta(x, field.beta()))?;
    let u = fiber_potential(x, field)?;
    chart_from_u(x, t, u, field.beta())
}

#[derive(Clone, Copy, Debug)]
pub struct InvertOptions<T> {
    /// Largest `|s|` the bracket search may reach.
    pub s_max: T,
    /// Step tolerance `|Δs| ≤ tol·(1 + |s|)`.
    pub tol: T,
}

impl<T: Scalar> Default for InvertOptions<T> {
    fn default() -> Self {
        InvertOptions {
            s_max: lit(1e3),
            tol: lit(1e-12),
        }
    }
}

/// `(r, θ)` over a point with `zw` off `R_{≤0}`.
pub fn base_point<T: Scalar>(z: C<T>, w: C<T>, beta: T) -> Result<(T, T)> {
    let zw = z * w;
    let zeta = C::new(T::one(), T::zero()) - zw;
    if zw.im == T::zero() && zw.re <= T::zero() {
        return Err(cut_violation(zeta));
    }
    Ok((zeta.norm().powf(beta), normalize_angle(zeta.arg())))
}

/// Inverse of [`forward_chart`]: `(r, θ, s)` and the fiber angle `t`.
pub fn invert_chart<T: Scalar>(
    z: C<T>,
    w: C<T>,
    field: &PotentialField<T>,
    opts: &InvertOptions<T>,
) -> Result<(ConePoint<T>, T)> {
    if z == C::new(T::zero(), T::zero()) || w == C::new(T::zero(), T::zero()) {
        return Err(Error::InvalidParameter(
            "z = 0 or w = 0 lies over the rays through the pole; no chart".into(),
        ));
    }
    let beta = field.beta();
    let (r, theta) = base_point(z, w, beta)?;
    let target = (w.norm() / z.norm()).ln() * lit(0.5);
    let failure = RefCell::new(None);
    let at = |s: T| ConePoint { r, theta, s };
    let g = |s: T| match fiber_potential(&at(s), field) {
        Ok(u) => u - target,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            T::nan()
        }
    };
    let s = if target == T::zero() {
        T::zero()
    } else {
        let bracket = expand_bracket(&g, -T::one(), T::one(), lit(2.0), opts.s_max);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let (a, b) = bracket?;
        let fd = |s: T| {
            let d = field.value(&at(s)).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            });
            (g(s), d)
        };
        let s = newton_bracketed(fd, a, b, opts.tol, 200);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        s?
    };
    let x = at(s);
    let u = fiber_potential(&x, field)?;
    let h = h0(zeta(&x, beta))?;
    // e^{it} = z e^{u} / h₀
    let t = (z * u.exp() / h).arg();
    Ok((x, t))
}

/// Partial derivatives of `(z, w)` in `(r, θ, s, t)`.
///
/// `r, θ, s` by central differences of the chart with two Richardson
/// levels; `t` exactly.
pub fn chart_partials<T: Scalar>(
    x: &ConePoint<T>,
    t: T,
    field: &PotentialField<T>,
) -> Result<[[C<T>; 4]; 2]> {
    let beta = field.beta();
    let base = forward_chart(x, t, field)?;
    let mut scale = T::one().min(x.r);
    if field.pole_location() == Some(PoleLocation::Unit) {
        // u integrates past the pole, so its planar distance sets the scale
        let slice = ConePoint { s: T::zero(), ..*x };
        scale = scale.min(slice.distance_to_pole(field.angle()));
    }
    if x.r > T::one() {
        scale = scale.min(beta * x.r * x.theta.abs());
    }
    let h = scale * lit(0.01);
    let steps = [h, h * lit(0.5), h * lit(0.25)];
    let mut out = [[C::new(T::zero(), T::zero()); 4]; 2];
    for var in 0..3 {
        // θ moves a distance βr·dθ
        let unit = if var == 1 { (beta * x.r).recip() } else { T::one() };
        let mut dz = Vec::with_capacity(3);
        let mut dw = Vec::with_capacity(3);
        for &hh in &steps {
            let d = hh * unit;
            let shift = |sign: T| {
                let mut c = [x.r, x.theta, x.s];
                c[var] = c[var] + sign * d;
                forward_chart(&ConePoint { r: c[0], theta: c[1], s: c[2] }, t, field)
            };
            let (p, m) = (shift(T::one())?, shift(-T::one())?);
            let two_d = d + d;
            dz.push((p.z - m.z) / two_d);
            dw.push((p.w - m.w) / two_d);
        }
        out[0][var] = extrapolate(&dz);
        out[1][var] = extrapolate(&dw);
    }
    out[0][3] = base.z * C::i();
    out[1][3] = -base.w * C::i();
    Ok(out)
}

fn extrapolate<T: Scalar>(v: &[C<T>]) -> C<T> {
    let powers = [lit(2.0), lit(4.0)];
    let re: Vec<T> = v.iter().map(|c| c.re).collect();
    let im: Vec<T> = v.iter().map(|c| c.im).collect();
    C::new(
        richardson(&re, lit(2.0), &powers).0,
        richardson(&im, lit(2.0), &powers).0,
    )
}

/// Residuals of
///
/// ```text
/// ∂_r h + i(βr)⁻¹ ∂_θ h = (a₁ + i a₂) ∂_t h,   ∂_s h = i f ∂_t h
/// ```
///
/// for `h = z` and `h = w`, relative to `|h|`; the largest modulus.
pub fn cauchy_riemann_residual<T: Scalar>(
    x: &ConePoint<T>,
    t: T,
    field: &PotentialField<T>,
) -> Result<T> {
    let d = chart_partials(x, t, field)?;
    let base = forward_chart(x, t, field)?;
    let conn = connection_at(x, field)?;
    let f = field.value(x)?;
    let br = field.beta() * x.r;
    let a = C::new(conn.a1, conn.a2);
    let i = C::<T>::i();
    let mut worst = T::zero();
    for (dh, h) in d.iter().zip([base.z, base.w]) {
        let first = dh[0] + i * dh[1] / br - a * dh[3];
        let second = dh[2] - i * dh[3] * f;
        worst = worst.max(first.norm() / h.norm()).max(second.norm() / h.norm());
    }
    Ok(worst)
}

/// Coefficients of `dz, dw` on the `(1,0)`-frame
/// `η₁ = dr + iβr dθ`, `η₂ = ds − i f⁻¹ α`.
pub fn frame_jacobian<T: Scalar>(
    d: &[[C<T>; 4]; 2],
    f: T,
    conn: &ConnectionValue<T>,
    br: T,
) -> [[C<T>; 2]; 2] {
    let half = lit::<T>(0.5);
    let i = C::<T>::i();
    // dual vectors: V₁ = ½(∂̃_r − i(βr)⁻¹∂̃_θ), V₂ = ½(∂_s + i f ∂_t), with
    // horizontal lifts ∂̃_r = ∂_r − a₁∂_t, ∂̃_θ = ∂_θ − a₂βr ∂_t
    let row = |dh: &[C<T>; 4]| {
        let hr = dh[0] - dh[3] * conn.a1;
        let hth = dh[1] - dh[3] * (conn.a2 * br);
        [
            (hr - i * hth / br) * half,
            (dh[2] + i * dh[3] * f) * half,
        ]
    };
    [row(&d[0]), row(&d[1])]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeCheck<T> {
    /// Relative deviation of `det(∂(z,w)/∂(η₁,η₂))` from `−f c r^{c−1} e^{iθ}`.
    pub jacobian: T,
    /// Relative deviation of `ω²/(Ω∧Ω̄)` from `β²|1 − zw|^{2β−2}`.
    pub density: T,
}

impl<T: Scalar> VolumeCheck<T> {
    pub fn max(&self) -> T {
        self.jacobian.max(self.density)
    }
}

/// `β²|1 − zw|^{2β−2}`.
pub fn volume_density<T: Scalar>(zw: C<T>, beta: T) -> T {
    let m = (C::new(T::one(), T::zero()) - zw).norm();
    beta * beta * m.powf(beta + beta - lit(2.0))
}

pub fn volume_identity_residual<T: Scalar>(
    x: &ConePoint<T>,
    t: T,
    field: &PotentialField<T>,
) -> Result<VolumeCheck<T>> {
    let beta = field.beta();
    let c = beta.recip();
    let d = chart_partials(x, t, field)?;
    let conn = connection_at(x, field)?;
    let f = field.value(x)?;
    let br = beta * x.r;
    let j = frame_jacobian(&d, f, &conn, br);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let want = -C::from_polar(f * c * x.r.powf(c - T::one()), x.theta);
    let jacobian = (det - want).norm() / want.norm();

    // real Jacobian of (Re z, Im z, Re w, Im w) in (t, s, r, θ)
    let cols = [3usize, 2, 0, 1];
    let m: [[T; 4]; 4] = std::array::from_fn(|row| {
        std::array::from_fn(|col| {
            let v = d[row / 2][cols[col]];
            if row % 2 == 0 {
                v.re
            } else {
                v.im
            }
        })
    });
    // ω² = 2fβr dt∧ds∧dr∧dθ and Ω∧Ω̄ = 2 dx₁∧dy₁∧dx₂∧dy₂
    let ratio = f * br / determinant(&m);
    let base = forward_chart(x, t, field)?;
    let want = volume_density(base.z * base.w, beta);
    let density = (ratio - want).abs() / want;
    Ok(VolumeCheck { jacobian, density })
}

/// `ω_RF(Y, ·) − ds` in the coordinate basis `(dr, dθ, ds, dt)`, with
/// `Y = ∂_t` the generator of `(z, w) ↦ (e^{iτ}z, e^{−iτ}w)`.
pub fn moment_map_residual<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>) -> Result<[T; 4]> {
    let w = crate::gh_metric::kahler_form_at(x, field)?;
    let m = w.matrix();
    // ω(Y, ·) is the t-row of the antisymmetric matrix
    Ok([m[3][0], m[3][1], m[3][2] - T::one(), m[3][3]])
}

/// Hermitian coefficients of `ω = (i/2) Σ a_{jk̄} e_j ∧ ē_k` in the basis
/// `{ε, dz₂}`, `ε = η₁`, `z₂ = w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeCoefficients<T> {
    pub a: [[C<T>; 2]; 2],
}

impl<T: Scalar> ConeCoefficients<T> {
    pub fn off_diagonal(&self) -> T {
        self.a[0][1].norm()
    }

    pub fn is_positive_definite(&self) -> bool {
        let det = self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0];
        self.a[0][0].re > T::zero() && det.re > T::zero()
    }
}

/// From `ω = (if/2)(εε̄ + η₂η̄₂)` with `η₂ = γ₁ dz₂ − γ₂ ε`,
/// `γ₁ = (wf)⁻¹`, `γ₂ = f⁻¹(h₀⁻¹∂_r h₀ + a₂ + i a₁)`.
pub fn cone_coefficients<T: Scalar>(
    x: &ConePoint<T>,
    t: T,
    field: &PotentialField<T>,
) -> Result<ConeCoefficients<T>> {
    let beta = field.beta();
    let conn = connection_at(x, field)?;
    let f = field.value(x)?;
    let p = chart_from_u(x, t, conn.u, beta)?;
    let g1 = (p.w * f).inv();
    let g2 = (dlog_h0_dr(x, beta) + C::new(conn.a2, conn.a1)) / f;
    let fc = C::new(f, T::zero());
    let one = C::new(T::one(), T::zero());
    let a11 = fc * (one + g2 * g2.conj());
    let a12 = -fc * g2 * g1.conj();
    let a22 = fc * g1 * g1.conj();
    Ok(ConeCoefficients {
        a: [[a11, a12], [a12.conj(), a22]],
    })
}

/// The coefficients on `C` itself (`r = 0`): `diag(f, 1/(f|w|²))` with `f`,
/// `w` taken on the edge.
pub fn cone_limit<T: Scalar>(s: T, t: T, field: &PotentialField<T>) -> Result<ConeCoefficients<T>> {
    let edge = ConePoint { r: T::zero(), theta: T::zero(), s };
    let f = field.value(&edge)?;
    let u = fiber_potential(&edge, field)?;
    let w = C::from_polar(u.exp(), -t);
    let zero = C::new(T::zero(), T::zero());
    Ok(ConeCoefficients {
        a: [
            [C::new(f, T::zero()), zero],
            [zero, C::new((f * w.norm_sqr()).recip(), T::zero())],
        ],
    })
}

/// Log-log fit of `|a_{12̄}|` against `r` along `(r, θ, s)`, `r ∈ radii`.
pub fn cone_exponent_fit<T: Scalar>(
    theta: T,
    s: T,
    t: T,
    radii: &[T],
    field: &PotentialField<T>,
) -> Result<DecayFit<T>> {
    let values = radii
        .iter()
        .map(|&r| Ok(cone_coefficients(&ConePoint { r, theta, s }, t, field)?.off_diagonal()))
        .collect::<Result<Vec<T>>>()?;
    DecayFit::new(radii.to_vec(), values)
}

/// `ψ = (1 − (1 − zw)^β)/(β zw)`, holomorphic with `ψ(0) = 1`.
///
/// Summed as a binomial series for `|zw| < 1/4`, where the closed form
/// cancels.
pub fn psi<T: Scalar>(zw: C<T>, beta: T) -> C<T> {
    let one = C::new(T::one(), T::zero());
    if zw.norm() < lit(0.25) {
        // ψ = Σ_k c_k zw^k with c_k = Π_{j=1..k} (j − β)/(j + 1)
        let mut term = one;
        let mut sum = one;
        for k in 1..80 {
            let kk: T = lit(k as f64);
            term = term * zw * ((kk - beta) / (kk + T::one()));
            sum = sum + term;
            if term.norm() <= T::epsilon() * lit(0.5) * sum.norm() {
                break;
            }
        }
        return sum;
    }
    (one - (one - zw).powf(beta)) / (zw * beta)
}

/// Cross-check of the primary inverse near `{zw = 0}` against
///
/// ```text
/// 2s = β|w|²|ψ| e^{−∫₀^s F} − β|z|²|ψ| e^{∫₀^s F},
/// ```
///
/// where `f = 1/(2|x − p|) + F/2`. Returns `|2s − rhs|` at the `s` found by
/// [`invert_chart`].
pub fn global_s_residual<T: Scalar>(z: C<T>, w: C<T>, field: &PotentialField<T>) -> Result<T> {
    if field.pole_location() != Some(PoleLocation::Unit) {
        return Err(Error::InvalidParameter("global s needs a pole at (1, 0, 0)".into()));
    }
    let (x, _) = invert_chart(z, w, field, &InvertOptions::default())?;
    let beta = field.beta();
    let failure = RefCell::new(None);
    let smooth = |q: T| {
        field
            .smooth_part(&ConePoint { s: q, ..x })
            .unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                T::zero()
            })
    };
    let tol = lit::<T>(1e-12);
    let int_f = if x.s == T::zero() {
        T::zero()
    } else {
        let v = integrate(smooth, T::zero(), x.s, &QuadOptions::new(lit(1e-15), tol));
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        v.ok(tol)? * lit(2.0)
    };
    let ps = psi(z * w, beta).norm();
    let rhs = beta * ps * (w.norm_sqr() * (-int_f).exp() - z.norm_sqr() * int_f.exp());
    Ok((x.s + x.s - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(r: f64, theta: f64, s: f64) -> ConePoint<f64> {
        ConePoint::new(r, theta, s).unwrap()
    }

    #[test]
    fn slice_example() {
        let field = PotentialField::reflection(2).unwrap();
        let p = forward_chart(&pt(1.0, std::f64::consts::FRAC_PI_2, 0.0), 0.0, &field).unwrap();
        let zw = p.z * p.w;
        assert!((zw - C::new(1.0, -1.0)).norm() < 1e-15);
        assert!((p.z.norm() - 2f64.powf(0.25)).abs() < 1e-15);
        assert!((p.w.norm() - 2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn cut_is_rejected() {
        let field = PotentialField::reflection(2).unwrap();
        assert!(matches!(
            forward_chart(&pt(1.5, 0.0, 0.3), 0.0, &field),
            Err(Error::CutViolation { .. })
        ));
    }

    #[test]
    fn round_trip_and_equivariance() {
        let field = PotentialField::reflection(3).unwrap();
        let x = pt(0.7, -2.1, 3.5);
        let p = forward_chart(&x, 0.4, &field).unwrap();
        let q = forward_chart(&x, 0.4 + 0.3, &field).unwrap();
        assert!((q.z - p.z * C::from_polar(1.0, 0.3)).norm() < 1e-14);
        assert!((q.w - p.w * C::from_polar(1.0, -0.3)).norm() < 1e-14);
        let (y, t) = invert_chart(p.z, p.w, &field, &InvertOptions::default()).unwrap();
        assert!((y.r - x.r).abs() < 1e-12 && (y.theta - x.theta).abs() < 1e-12);
        assert!((y.s - x.s).abs() < 1e-10 && (t - 0.4).abs() < 1e-12);
    }

    #[test]
    fn euclidean_s_from_hopf() {
        // β = 1: 2s = |w|² − |z|²
        let field = PotentialField::reflection(1).unwrap();
        let (z, w) = (C::new(0.3f64, 0.5), C::new(-0.9f64, 0.2));
        let (x, _) = invert_chart(z, w, &field, &InvertOptions::default()).unwrap();
        assert!((2.0 * x.s - (w.norm_sqr() - z.norm_sqr())).abs() < 1e-11);
    }

    #[test]
    fn equal_moduli_give_the_slice() {
        let field = PotentialField::series(0.7).unwrap();
        let (x, _) = invert_chart(C::new(0.4, 0.3), C::new(0.0, 0.5), &field, &InvertOptions::default())
            .unwrap();
        assert_eq!(x.s, 0.0);
    }

    #[test]
    fn residuals_reflection() {
        let field = PotentialField::reflection(2).unwrap();
        let x = pt(0.8, 1.3, 0.4);
        assert!(cauchy_riemann_residual(&x, 0.2, &field).unwrap() < 1e-8);
        let v = volume_identity_residual(&x, 0.2, &field).unwrap();
        assert!(v.max() < 1e-7, "{v:?}");
        let m = moment_map_residual(&x, &field).unwrap();
        assert!(m.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn density_example() {
        let zw = C::new(1.0 - 1e-3, 0.0);
        let d = volume_density(zw, 0.7);
        assert!((d - 0.49 * 10f64.powf(1.8)).abs() < 1e-6 * d);
    }

    #[test]
    fn global_s_near_the_rays() {
        let field = PotentialField::reflection(2).unwrap();
        let res = global_s_residual(C::new(1e-3, 2e-3), C::new(0.8, -0.4), &field).unwrap();
        assert!(res < 1e-9, "{res}");
    }
}
