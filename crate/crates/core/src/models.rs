//! Closed-form reference geometries: flat `C²` through the Hopf map,
//! Taub-NUT in LeBrun's coordinates, Eguchi–Hanson at `β = 1/2`, and the
//! `β = 1/n` quotients.
//!
//! Sign convention: the moment map of `(e^{it}z₁, e^{−it}z₂)` for the
//! standard form `ds₁∧ds₂ + ds₃∧ds₄` is `x = (z₁z₂, (|z₂|² − |z₁|²)/2)`. With
//! this third component the Hopf connection satisfies `dα = −⋆df`, the
//! Kähler form is `α∧dx₃ + f dx₁∧dx₂`, and the trivialization
//! `z₁ = (|x|−x₃)^{1/2}e^{iθ/2}e^{it}`, `z₂ = (|x|+x₃)^{1/2}e^{iθ/2}e^{−it}`
//! lies over `x`. The opposite sign flips `dα = +⋆df`.

use num_complex::Complex;
use serde::Serialize;

use crate::chart::{chart_partials, invert_chart, volume_density, InvertOptions, C};
use crate::cone_space::{ConeAngle, ConePoint};
use crate::error::{Error, Result};
use crate::gh_metric::{kahler_form_at, metric_at};
use crate::greens::{Method, PoleLocation, PotentialField};
use crate::linalg::inverse;
use crate::numerics::richardson::richardson;
use crate::numerics::roots::brent;
use crate::scalar::{lit, Scalar};

/// A point of `C² \ {0}` with its image in `R³` and fibre angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HopfChart<T> {
    pub z1: C<T>,
    pub z2: C<T>,
    pub x: [T; 3],
    /// Angle in the trivialization over the plane cut along `x₁ ≤ 0, x₂ = 0`.
    pub t: T,
}

impl<T: Scalar> HopfChart<T> {
    pub fn from_c2(z1: C<T>, z2: C<T>) -> Self {
        let x = hopf_map(z1, z2);
        let theta = x[1].atan2(x[0]);
        let t = wrap(z1.arg() - theta * lit(0.5));
        HopfChart { z1, z2, x, t }
    }

    /// The trivialization over `x` with `x₁ + ix₂` off the cut.
    pub fn from_base(x: [T; 3], t: T) -> Result<Self> {
        if x[1] == T::zero() && x[0] <= T::zero() {
            return Err(Error::InvalidParameter("base point on the trivialization cut".into()));
        }
        let n = norm3(x);
        let half_theta = x[1].atan2(x[0]) * lit(0.5);
        let z1 = C::from_polar((n - x[2]).max(T::zero()).sqrt(), half_theta + t);
        let z2 = C::from_polar((n + x[2]).max(T::zero()).sqrt(), half_theta - t);
        Ok(HopfChart { z1, z2, x, t })
    }

    pub fn as_real(&self) -> [T; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }
}

fn wrap<T: Scalar>(a: T) -> T {
    let two_pi = lit::<T>(2.0) * T::PI();
    let mut v = a % two_pi;
    if v > T::PI() {
        v = v - two_pi;
    } else if v <= -T::PI() {
        v = v + two_pi;
    }
    v
}

fn norm3<T: Scalar>(x: [T; 3]) -> T {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// `(z₁z₂, (|z₂|² − |z₁|²)/2)`; `2|x| = |z₁|² + |z₂|²`.
pub fn hopf_map<T: Scalar>(z1: C<T>, z2: C<T>) -> [T; 3] {
    let p = z1 * z2;
    [p.re, p.im, (z2.norm_sqr() - z1.norm_sqr()) * lit(0.5)]
}

/// Gradients of the components of [`hopf_map`] in `s = (Re z₁, Im z₁, Re z₂, Im z₂)`.
fn hopf_differential<T: Scalar>(s: [T; 4]) -> [[T; 4]; 3] {
    [
        [s[2], -s[3], s[0], -s[1]],
        [s[3], s[2], s[1], s[0]],
        [-s[0], -s[1], s[2], s[3]],
    ]
}

/// `α = Re(i(z̄₂dz₂ − z̄₁dz₁))/(|z₁|² + |z₂|²)` in `s` coordinates.
pub fn hopf_connection<T: Scalar>(s: [T; 4]) -> [T; 4] {
    let n2 = s.iter().map(|v| *v * *v).sum::<T>();
    [-s[1] / n2, s[0] / n2, s[3] / n2, -s[2] / n2]
}

fn wedge<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> [[T; 4]; 4] {
    let mut m = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i] * b[j] - a[j] * b[i];
        }
    }
    m
}

fn add_scaled<T: Scalar>(acc: &mut [[T; 4]; 4], m: &[[T; 4]; 4], k: T) {
    for i in 0..4 {
        for j in 0..4 {
            acc[i][j] = acc[i][j] + k * m[i][j];
        }
    }
}

/// `−⋆df` pulled back to `s` coordinates, for `f(x)` with gradient `grad`.
fn pulled_back_star<T: Scalar>(s: [T; 4], grad: [T; 3]) -> [[T; 4]; 4] {
    let dx = hopf_differential(s);
    let mut m = [[T::zero(); 4]; 4];
    // ⋆df = f₁ dx₂∧dx₃ + f₂ dx₃∧dx₁ + f₃ dx₁∧dx₂
    add_scaled(&mut m, &wedge(&dx[1], &dx[2]), -grad[0]);
    add_scaled(&mut m, &wedge(&dx[2], &dx[0]), -grad[1]);
    add_scaled(&mut m, &wedge(&dx[0], &dx[1]), -grad[2]);
    m
}

/// Largest entry of `dα + ⋆df` for the Hopf connection and `f = 1/(2|x|)`,
/// with `dα` from Richardson-extrapolated central differences.
pub fn hopf_bogomolony_residual<T: Scalar>(z1: C<T>, z2: C<T>) -> T {
    let s = [z1.re, z1.im, z2.re, z2.im];
    let n = s.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let h = n * lit(1e-2);
    // jac[i][j] = ∂_j α_i
    let mut jac = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let d = |h: T| {
            let (mut p, mut m) = (s, s);
            p[j] = p[j] + h;
            m[j] = m[j] - h;
            let (ap, am) = (hopf_connection(p), hopf_connection(m));
            let mut out = [T::zero(); 4];
            for i in 0..4 {
                out[i] = (ap[i] - am[i]) / (h + h);
            }
            out
        };
        let samples = [d(h), d(h * lit(0.5)), d(h * lit(0.25))];
        for i in 0..4 {
            let v = [samples[0][i], samples[1][i], samples[2][i]];
            jac[i][j] = richardson(&v, lit(2.0), &[lit(2.0), lit(4.0)]).0;
        }
    }
    let x = hopf_map(z1, z2);
    let r = norm3(x);
    let k = -(lit::<T>(2.0) * r * r * r).recip();
    let star = pulled_back_star(s, [x[0] * k, x[1] * k, x[2] * k]);
    let mut m = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            // (dα)_{ab} = ∂_a α_b − ∂_b α_a
            let da = jac[b][a] - jac[a][b];
            m = m.max((da - star[a][b]).abs());
        }
    }
    m
}

/// `f H*(dx²) + f⁻¹α² − I` for `f = 1/(2|x|)`: the flat metric of `C²` as a
/// GH metric. Returns the largest entry.
pub fn hopf_euclidean_residual<T: Scalar>(z1: C<T>, z2: C<T>) -> T {
    let s = [z1.re, z1.im, z2.re, z2.im];
    let dx = hopf_differential(s);
    let f = (lit::<T>(2.0) * norm3(hopf_map(z1, z2))).recip();
    let a = hopf_connection(s);
    let mut m = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let base: T = (0..3).map(|k| dx[k][i] * dx[k][j]).sum();
            let g = f * base + a[i] * a[j] / f;
            let id = if i == j { T::one() } else { T::zero() };
            m = m.max((g - id).abs());
        }
    }
    m
}

/// Compares [`metric_at`] for the `β = 1` field with pole at `p` against the
/// flat metric pulled back through the Hopf trivialization centred at `p`:
/// the two gauges coincide. Largest entry of the difference, relative to
/// the largest entry of the metric.
pub fn euclidean_pullback_residual<T: Scalar>(x: &ConePoint<T>, t: T, field: &PotentialField<T>) -> Result<T> {
    if field.beta() != T::one() || field.pole_location() != Some(PoleLocation::Unit) {
        return Err(Error::InvalidParameter("needs the β = 1 field with pole at (1, 0, 0)".into()));
    }
    let phi = |v: [T; 4]| -> Result<[T; 4]> {
        let (st, ct) = v[1].sin_cos();
        let base = [v[0] * ct - T::one(), v[0] * st, v[2]];
        Ok(HopfChart::from_base(base, v[3])?.as_real())
    };
    let p = [x.r, x.theta, x.s, t];
    let planar = ((x.r * x.theta.cos() - T::one()).powi(2) + (x.r * x.theta.sin()).powi(2)).sqrt();
    let h = lit::<T>(0.01) * T::one().min(x.r).min(planar);
    // jac[k][j] = ∂_j Φ_k
    let mut jac = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let mut samples = [[T::zero(); 4]; 3];
        for (l, hl) in [h, h * lit(0.5), h * lit(0.25)].into_iter().enumerate() {
            let (mut a, mut b) = (p, p);
            a[j] = a[j] + hl;
            b[j] = b[j] - hl;
            let (fa, fb) = (phi(a)?, phi(b)?);
            for k in 0..4 {
                samples[l][k] = (fa[k] - fb[k]) / (hl + hl);
            }
        }
        for k in 0..4 {
            let v = [samples[0][k], samples[1][k], samples[2][k]];
            jac[k][j] = richardson(&v, lit(2.0), &[lit(2.0), lit(4.0)]).0;
        }
    }
    let g = metric_at(x, field)?.g;
    let (mut dev, mut scale) = (T::zero(), T::zero());
    for i in 0..4 {
        for j in 0..4 {
            let pulled: T = (0..4).map(|k| jac[k][i] * jac[k][j]).sum();
            dev = dev.max((pulled - g[i][j]).abs());
            scale = scale.max(g[i][j].abs());
        }
    }
    Ok(dev / scale)
}

/// `(e^{c(|z₁|²−|z₂|²)}z₁, e^{c(|z₂|²−|z₁|²)}z₂)`.
pub fn taubnut_chart<T: Scalar>(z1: C<T>, z2: C<T>, c: T) -> (C<T>, C<T>) {
    let a = z1.norm_sqr() - z2.norm_sqr();
    let e = (c * a).exp();
    (z1 * e, z2 / e)
}

/// Inverse of [`taubnut_chart`]. With `a = |z₁|² − |z₂|²` the defining
/// relations give `a = |z|²e^{−2ca} − |w|²e^{2ca}`, whose root lies in
/// `[−|w|², |z|²]` and is unique for `c ≥ 0`.
pub fn taubnut_invert<T: Scalar>(z: C<T>, w: C<T>, c: T) -> Result<(C<T>, C<T>)> {
    if !(c >= T::zero()) {
        return Err(Error::InvalidParameter(format!("Taub-NUT constant must be >= 0, got {c}")));
    }
    let (zz, ww) = (z.norm_sqr(), w.norm_sqr());
    let two_c = c + c;
    let g = |a: T| zz * (-two_c * a).exp() - ww * (two_c * a).exp() - a;
    let a = if c == T::zero() {
        zz - ww
    } else {
        let mut a = brent(g, -ww, zz, T::epsilon(), 200)?;
        // one Newton polish; g' = −2c(|z|²e^{−2ca} + |w|²e^{2ca}) − 1
        let dg = -two_c * (zz * (-two_c * a).exp() + ww * (two_c * a).exp()) - T::one();
        a = a - g(a) / dg;
        a
    };
    let e = (c * a).exp();
    Ok((z / e, w * e))
}

/// LeBrun's potential `|z₁|² + |z₂|² + c(|z₁|⁴ + |z₂|⁴)` as a function of `(z, w)`.
pub fn lebrun_potential<T: Scalar>(z: C<T>, w: C<T>, c: T) -> Result<T> {
    let (z1, z2) = taubnut_invert(z, w, c)?;
    let (a, b) = (z1.norm_sqr(), z2.norm_sqr());
    Ok(a + b + c * (a * a + b * b))
}

/// First derivative by the five-point stencil.
fn d5<T: Scalar>(f: impl Fn(T) -> Result<T>, h: T) -> Result<T> {
    let (p1, m1, p2, m2) = (f(h)?, f(-h)?, f(h + h)?, f(-h - h)?);
    Ok((m2 - p2 + lit::<T>(8.0) * (p1 - m1)) / (lit::<T>(12.0) * h))
}

/// `∂²φ/∂z_a∂z̄_b` by fourth-order central differences in the real
/// coordinates `(Re z, Im z, Re w, Im w)`, steps `h_rel·(1 + |coordinate|)`.
pub fn complex_hessian<T: Scalar>(
    phi: impl Fn(C<T>, C<T>) -> Result<T>,
    z: C<T>,
    w: C<T>,
    h_rel: T,
) -> Result<[[C<T>; 2]; 2]> {
    let p = [z.re, z.im, w.re, w.im];
    let at = |v: [T; 4]| phi(C::new(v[0], v[1]), C::new(v[2], v[3]));
    let step = |i: usize| h_rel * (T::one() + p[i].abs());
    let mut hess = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let (hi, hj) = (step(i), step(j));
            let v = if i == j {
                let f = |k: T| {
                    let mut q = p;
                    q[i] = q[i] + k;
                    at(q)
                };
                let (f0, f1, g1, f2, g2) = (f(T::zero())?, f(hi)?, f(-hi)?, f(hi + hi)?, f(-hi - hi)?);
                (-f2 - g2 + lit::<T>(16.0) * (f1 + g1) - lit::<T>(30.0) * f0) / (lit::<T>(12.0) * hi * hi)
            } else {
                d5(
                    |a: T| {
                        d5(
                            |b: T| {
                                let mut q = p;
                                q[i] = q[i] + a;
                                q[j] = q[j] + b;
                                at(q)
                            },
                            hj,
                        )
                    },
                    hi,
                )?
            };
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let q = lit::<T>(0.25);
    let mut out = [[C::new(T::zero(), T::zero()); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            out[a][b] = C::new(
                (hess[xa][xb] + hess[ya][yb]) * q,
                (hess[xa][yb] - hess[ya][xb]) * q,
            );
        }
    }
    Ok(out)
}

/// Coefficients `h_{ab̄}` of a real 2-form written as `(i/2)Σh_{ab̄}dz_a∧dz̄_b`
/// (its (1,1) part), from its matrix in `(Re z, Im z, Re w, Im w)`.
pub fn hermitian_coefficients<T: Scalar>(omega: &[[T; 4]; 4]) -> [[C<T>; 2]; 2] {
    // h = −2i ω(∂_a, ∂̄_b), ∂_a = ½(e_x − i e_y), ∂̄_b = ½(e_x + i e_y)
    let mut out = [[C::new(T::zero(), T::zero()); 2]; 2];
    let half = lit::<T>(0.5);
    for a in 0..2 {
        for b in 0..2 {
            let mut u = [C::new(T::zero(), T::zero()); 4];
            let mut v = [C::new(T::zero(), T::zero()); 4];
            u[2 * a] = C::new(half, T::zero());
            u[2 * a + 1] = C::new(T::zero(), -half);
            v[2 * b] = C::new(half, T::zero());
            v[2 * b + 1] = C::new(T::zero(), half);
            let mut acc = C::new(T::zero(), T::zero());
            for i in 0..4 {
                for j in 0..4 {
                    acc = acc + u[i] * v[j] * omega[i][j];
                }
            }
            out[a][b] = acc * C::new(T::zero(), lit(-2.0));
        }
    }
    out
}

fn max_abs_diff<T: Scalar>(a: &[[C<T>; 2]; 2], b: &[[C<T>; 2]; 2]) -> T {
    let mut m = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

fn max_abs<T: Scalar>(a: &[[C<T>; 2]; 2]) -> T {
    a.iter().flatten().fold(T::zero(), |m, v| m.max(v.norm()))
}

fn det2<T: Scalar>(a: &[[C<T>; 2]; 2]) -> C<T> {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialCheck<T> {
    /// `∂∂̄` of the potential.
    pub from_potential: [[C<T>; 2]; 2],
    /// The GH Kähler form in the chart.
    pub from_metric: [[C<T>; 2]; 2],
    pub residual: T,
}

/// Default relative step for [`complex_hessian`] in the model checks.
pub const HESSIAN_STEP: f64 = 1e-3;

/// `ω_GH = α∧dx₃ + f dx₁∧dx₂` for `f = 2c + 1/(2|x|)`, pulled back through
/// `(z, w) ↦ (z₁, z₂) ↦ x`, against `(i/2)∂∂̄` of LeBrun's potential.
pub fn lebrun_potential_check<T: Scalar>(z: C<T>, w: C<T>, c: T) -> Result<PotentialCheck<T>> {
    let field = PotentialField::taubnut(ConeAngle::new(T::one())?, c)?;
    let from_potential = complex_hessian(|a, b| lebrun_potential(a, b, c), z, w, lit(HESSIAN_STEP))?;

    let (z1, z2) = taubnut_invert(z, w, c)?;
    let s = [z1.re, z1.im, z2.re, z2.im];
    let x = hopf_map(z1, z2);
    let f = field.value(&ConePoint::from_unrolled(x, field.angle())?)?;
    let dx = hopf_differential(s);
    let mut omega_s = wedge(&hopf_connection(s), &dx[2]);
    add_scaled(&mut omega_s, &wedge(&dx[0], &dx[1]), f);

    // ∂s/∂(Re z, Im z, Re w, Im w), five-point stencils
    let p = [z.re, z.im, w.re, w.im];
    let mut jac = [[T::zero(); 4]; 4];
    for j in 0..4 {
        let h = lit::<T>(1e-3) * (T::one() + p[j].abs());
        for k in 0..4 {
            jac[k][j] = d5(
                |e: T| {
                    let mut q = p;
                    q[j] = q[j] + e;
                    let (a, b) = taubnut_invert(C::new(q[0], q[1]), C::new(q[2], q[3]), c)?;
                    Ok([a.re, a.im, b.re, b.im][k])
                },
                h,
            )?;
        }
    }
    let omega = pull_back(&omega_s, &jac);
    let from_metric = hermitian_coefficients(&omega);
    Ok(PotentialCheck {
        from_potential,
        from_metric,
        residual: max_abs_diff(&from_potential, &from_metric),
    })
}

/// `Jᵀ Ω J`.
fn pull_back<T: Scalar>(omega: &[[T; 4]; 4], jac: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    acc = acc + jac[i][a] * omega[i][j] * jac[j][b];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

/// `ω_RF` at chart point `(z, w)` as Hermitian coefficients.
pub fn kahler_coefficients<T: Scalar>(z: C<T>, w: C<T>, field: &PotentialField<T>) -> Result<[[C<T>; 2]; 2]> {
    let (x, t) = invert_chart(z, w, field, &InvertOptions::default())?;
    let omega = kahler_form_at(&x, field)?.matrix();
    let d = chart_partials(&x, t, field)?;
    // rows (Re z, Im z, Re w, Im w), columns (r, θ, s, t)
    let mut jac = [[T::zero(); 4]; 4];
    for j in 0..4 {
        jac[0][j] = d[0][j].re;
        jac[1][j] = d[0][j].im;
        jac[2][j] = d[1][j].re;
        jac[3][j] = d[1][j].im;
    }
    let inv = inverse(&jac).ok_or_else(|| Error::NonConvergent("singular chart Jacobian".into()))?;
    Ok(hermitian_coefficients(&pull_back(&omega, &inv)))
}

/// Closed-form Kähler potentials for the `β = 1/2` metric in the chart.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum EhPotential {
    /// `(|z|² + |w|² + 2|1 − zw| + 2)^{1/2}`; `ω_RF = 2·(i/2)∂∂̄φ`.
    #[default]
    Consistent,
    /// `(|z|² + |w|² + |1 − zw| + 1)^{1/2}`. Its Monge–Ampère determinant is
    /// not a multiple of `|1 − zw|^{−1}`, so no constant multiple of it is a
    /// potential for `ω_RF`; kept for comparison.
    Unweighted,
}

impl EhPotential {
    pub fn eval<T: Scalar>(self, z: C<T>, w: C<T>) -> T {
        let one = Complex::new(T::one(), T::zero());
        let k: T = match self {
            EhPotential::Consistent => lit(2.0),
            EhPotential::Unweighted => T::one(),
        };
        (z.norm_sqr() + w.norm_sqr() + k * ((one - z * w).norm() + T::one())).sqrt()
    }
}

/// [`EhPotential::Consistent`] at `(z, w)`.
pub fn eguchi_hanson_potential<T: Scalar>(z: C<T>, w: C<T>) -> T {
    EhPotential::Consistent.eval(z, w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EguchiHansonCheck<T> {
    pub potential: EhPotential,
    /// Constant with `ω_RF = κ·(i/2)∂∂̄φ`, fitted at the first point.
    pub kappa: T,
    /// Per point: largest entry of `κ∂∂̄φ − h_RF` relative to the largest
    /// entry of `h_RF`. Calibration only fixes the trace at the first point,
    /// so its residual still measures the off-diagonal and anisotropic part.
    pub residuals: Vec<T>,
    /// Per point: `|det h_RF / (β²|1−zw|^{2β−2}) − 1|`.
    pub volume_residuals: Vec<T>,
}

impl<T: Scalar> EguchiHansonCheck<T> {
    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, v| m.max(*v))
    }
}

/// Compares `ω_RF` of the `β = 1/2` field with `(i/2)∂∂̄(κφ)` at chart
/// points, with `κ` calibrated from the trace at the first point.
pub fn eguchi_hanson_potential_check<T: Scalar>(
    points: &[(C<T>, C<T>)],
    field: &PotentialField<T>,
    potential: EhPotential,
) -> Result<EguchiHansonCheck<T>> {
    if (field.beta() - lit(0.5)).abs() > lit(1e-14) || field.pole_location() != Some(PoleLocation::Unit) {
        return Err(Error::InvalidParameter("Eguchi–Hanson check needs β = 1/2 with pole at (1, 0, 0)".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let mut kappa = None;
    let mut residuals = Vec::with_capacity(points.len());
    let mut volume_residuals = Vec::with_capacity(points.len());
    for &(z, w) in points {
        let rf = kahler_coefficients(z, w, field)?;
        let pot = complex_hessian(|a, b| Ok(potential.eval(a, b)), z, w, lit(HESSIAN_STEP))?;
        let k = *kappa.get_or_insert_with(|| (rf[0][0].re + rf[1][1].re) / (pot[0][0].re + pot[1][1].re));
        let mut scaled = pot;
        for row in scaled.iter_mut() {
            for v in row.iter_mut() {
                *v = *v * k;
            }
        }
        residuals.push(max_abs_diff(&scaled, &rf) / max_abs(&rf));
        let density = volume_density(z * w, field.beta());
        volume_residuals.push((det2(&rf).re / density - T::one()).abs());
    }
    Ok(EguchiHansonCheck {
        potential,
        kappa: kappa.unwrap_or(T::zero()),
        residuals,
        volume_residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport<T> {
    pub n: u32,
    /// Per point: largest entry of `g_series − g_reflection` relative to the
    /// largest entry of `g_reflection`.
    pub deviations: Vec<T>,
    pub max_deviation: T,
}

/// Metric tensors of the `β = 1/n` field from the series and from the
/// reflection formula at the same points.
pub fn quotient_crosscheck<T: Scalar>(n: u32, points: &[ConePoint<T>]) -> Result<QuotientReport<T>> {
    let reflection = PotentialField::reflection(n)?;
    let series = PotentialField::new(*reflection.angle(), Method::Series(Default::default()))?;
    let mut deviations = Vec::with_capacity(points.len());
    for x in points {
        let (a, b) = (metric_at(x, &series)?.g, metric_at(x, &reflection)?.g);
        let (mut dev, mut scale) = (T::zero(), T::zero());
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((a[i][j] - b[i][j]).abs());
                scale = scale.max(b[i][j].abs());
            }
        }
        deviations.push(dev / scale);
    }
    let max_deviation = deviations.iter().fold(T::zero(), |m, v| m.max(*v));
    Ok(QuotientReport {
        n,
        deviations,
        max_deviation,
    })
}
