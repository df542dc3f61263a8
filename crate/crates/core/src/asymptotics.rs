//! The flat model `C_β × C_β` and decay fits.
//!
//! The model is the GH metric `g_F = f₀g_β + f₀⁻¹α₀²` with `f₀ = 1/(2β|x|)`.
//! In the gauge used throughout (`U = ∫₀^s f dq`, `α = dt + dU`-type), its
//! connection is `a₁ = 0`, `a₂ = −s/(2βr|x|)`.
//!
//! Comparisons are fibrewise over the same base point and the same `t`: the
//! `g_F`-orthonormal frame is `v₀ = f₀^{1/2}∂_t` together with the
//! `α₀`-horizontal lifts of `f₀^{−1/2}(∂_r, (βr)⁻¹∂_θ, ∂_s)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cone_space::{ConeAngle, ConePoint};
use crate::error::{Error, Result};
use crate::gh_metric::{connection_at, frame_metric, ConnectionValue};
use crate::greens::PotentialField;
use crate::linalg::symmetric_eigenvalues;
use crate::numerics::fit::{fit_loglog, logspace};
use crate::numerics::quadrature::periodic_trapezoid;
use crate::numerics::sum::neumaier_sum;
use crate::scalar::{from_usize, lit, Scalar};

/// A log-log least-squares fit `ln v = slope · ln r + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    pub slope: T,
    pub intercept: T,
    pub r2: T,
}

/// Fits below this `r²` are not accepted.
pub const MIN_R2: f64 = 0.99;

impl<T: Scalar> DecayFit<T> {
    pub fn new(radii: Vec<T>, values: Vec<T>) -> Result<Self> {
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("fit radii must increase strictly".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > T::zero())) {
            return Err(Error::InvalidParameter(format!("non-positive value {v:?} in a log-log fit")));
        }
        let fit = fit_loglog(&radii, &values)?;
        Ok(DecayFit {
            radii,
            values,
            slope: fit.slope,
            intercept: fit.intercept,
            r2: fit.r2,
        })
    }

    pub fn is_good(&self) -> bool {
        self.r2 >= lit(MIN_R2)
    }
}

/// `f₀ = 1/(2β|x|)`.
pub fn model_field_f0<T: Scalar>(x: &ConePoint<T>, angle: &ConeAngle<T>) -> Result<T> {
    let n = x.norm();
    if n == T::zero() {
        return Err(Error::AtOrigin);
    }
    Ok((lit::<T>(2.0) * angle.beta() * n).recip())
}

/// Model connection `a₁ = 0`, `a₂ = −s/(2βr|x|)`, `U₀ = asinh(s/r)/(2β)`.
pub fn model_connection<T: Scalar>(x: &ConePoint<T>, angle: &ConeAngle<T>) -> Result<ConnectionValue<T>> {
    if x.r == T::zero() {
        return Err(Error::OnEdge);
    }
    let beta = angle.beta();
    let two_b = lit::<T>(2.0) * beta;
    Ok(ConnectionValue {
        a1: T::zero(),
        a2: -x.s / (two_b * x.r * x.norm()),
        u: (x.s / x.r).asinh() / two_b,
    })
}

/// Model radius `ρ` with `βρ² = 2|x|`; the `g_F`-length of `∂_t` is `βρ`.
pub fn model_rho<T: Scalar>(x: &ConePoint<T>, angle: &ConeAngle<T>) -> T {
    (lit::<T>(2.0) * x.norm() / angle.beta()).sqrt()
}

/// Base point at model radius `rho` along a ray.
pub fn point_at_rho<T: Scalar>(ray: &Ray<T>, rho: T, angle: &ConeAngle<T>) -> ConePoint<T> {
    let n = angle.beta() * rho * rho * lit(0.5);
    let (sp, cp) = ray.polar.sin_cos();
    ConePoint {
        r: n * sp,
        theta: ray.theta,
        s: n * cp,
    }
}

/// A ray from the origin: polar angle from the `s`-axis and cone angle `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ray<T> {
    pub polar: T,
    pub theta: T,
}

impl<T: Scalar> Default for Ray<T> {
    fn default() -> Self {
        Ray {
            polar: T::FRAC_PI_4(),
            theta: T::FRAC_PI_3(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonOptions {
    /// Remove the mean `dθ`-holonomy of `α − α₀` on the circle through the
    /// point before comparing.
    pub align_gauge: bool,
    /// Trapezoid nodes on that circle.
    pub holonomy_nodes: usize,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions {
            align_gauge: true,
            holonomy_nodes: 16,
        }
    }
}

/// `(1/2π)∮(α − α₀)(∂_θ) dθ` on the circle through `x`.
pub fn holonomy_offset<T: Scalar>(x: &ConePoint<T>, field: &PotentialField<T>, nodes: usize) -> Result<T> {
    let angle = field.angle();
    let br = field.beta() * x.r;
    let a2_model = model_connection(x, angle)?.a2;
    let thetas: Vec<(T, T)> = periodic_trapezoid(nodes, lit::<T>(2.0) * T::PI())
        .map(|(t, w)| (t - T::PI(), w))
        .collect();
    let terms = thetas
        .par_iter()
        .map(|&(th, w)| {
            let c = connection_at(&ConePoint { theta: th, ..*x }, field)?;
            Ok((c.a2 - a2_model) * br * w)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(neumaier_sum(terms) / (lit::<T>(2.0) * T::PI()))
}

/// The `g_F`-orthonormal frame as coordinate vectors in `(r, θ, s, t)`.
fn model_frame<T: Scalar>(x: &ConePoint<T>, angle: &ConeAngle<T>) -> Result<[[T; 4]; 4]> {
    let f0 = model_field_f0(x, angle)?;
    let conn = model_connection(x, angle)?;
    let (sq, isq) = (f0.sqrt(), f0.sqrt().recip());
    let br = angle.beta() * x.r;
    let z = T::zero();
    Ok([
        [z, z, z, sq],
        [isq, z, z, -isq * conn.a1],
        [z, isq / br, z, -isq * conn.a2],
        [z, z, isq, z],
    ])
}

fn contract<T: Scalar>(m: &[[T; 4]; 4], frame: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    acc = acc + frame[a][i] * m[i][j] * frame[b][j];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

/// `g_RF` and `ω_RF` in the model frame at `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelComparison<T> {
    /// Gram matrix of `g_RF`; the identity for the model itself.
    pub gram: [[T; 4]; 4],
    /// Operator norm of `gram − I`.
    pub metric_deviation: T,
    /// `g_F`-norm of `ω_RF − ω_F` (sum over `a < b`).
    pub kahler_deviation: T,
    pub holonomy_offset: T,
}

pub fn compare_with_model<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    opts: &ComparisonOptions,
) -> Result<ModelComparison<T>> {
    let angle = field.angle();
    if x.norm() < lit(4.0) {
        return Err(Error::InvalidParameter(format!(
            "model comparison needs |x| ≥ 4, got {:?}",
            x.norm()
        )));
    }
    let frame = model_frame(x, angle)?;
    let f = field.value(x)?;
    let mut conn = connection_at(x, field)?;
    let offset = if opts.align_gauge {
        holonomy_offset(x, field, opts.holonomy_nodes)?
    } else {
        T::zero()
    };
    let br = field.beta() * x.r;
    conn.a2 = conn.a2 - offset / br;

    let gram = contract(&frame_metric(x, f, conn, field.beta()).g, &frame);
    let mut dev = gram;
    for (i, row) in dev.iter_mut().enumerate() {
        row[i] = row[i] - T::one();
    }
    let eig = symmetric_eigenvalues(&dev);
    let metric_deviation = eig.iter().fold(T::zero(), |m, v| m.max(v.abs()));

    // ω = α∧ds + fβr dr∧dθ, as a coordinate matrix in (r, θ, s, t)
    let omega = |f: T, c: &ConnectionValue<T>| {
        let z = T::zero();
        let (p, q, w) = (c.a1, c.a2 * br, f * br);
        [[z, w, p, z], [-w, z, q, z], [-p, -q, z, -T::one()], [z, z, T::one(), z]]
    };
    let model = omega(model_field_f0(x, angle)?, &model_connection(x, angle)?);
    let rf = omega(f, &conn);
    let mut diff = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            diff[i][j] = rf[i][j] - model[i][j];
        }
    }
    let d = contract(&diff, &frame);
    let mut k2 = T::zero();
    for a in 0..4 {
        for b in (a + 1)..4 {
            k2 = k2 + d[a][b] * d[a][b];
        }
    }
    Ok(ModelComparison {
        gram,
        metric_deviation,
        kahler_deviation: k2.sqrt(),
        holonomy_offset: offset,
    })
}

/// `|g_RF − g_F|_{g_F}` at `x`, operator norm in the model frame.
pub fn metric_difference_norm<T: Scalar>(
    x: &ConePoint<T>,
    field: &PotentialField<T>,
    opts: &ComparisonOptions,
) -> Result<T> {
    Ok(compare_with_model(x, field, opts)?.metric_deviation)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport<T> {
    pub ray: Ray<T>,
    pub metric: DecayFit<T>,
    pub kahler: DecayFit<T>,
}

/// Deviations along `ray` at `n ≥ 8` log-spaced model radii, fitted against
/// `ρ`.
pub fn fit_decay<T: Scalar>(
    field: &PotentialField<T>,
    ray: &Ray<T>,
    rho_range: (T, T),
    n: usize,
    opts: &ComparisonOptions,
) -> Result<DecayReport<T>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("decay fit needs at least 8 radii, got {n}")));
    }
    let rhos = logspace(rho_range.0, rho_range.1, n);
    let mut metric = Vec::with_capacity(n);
    let mut kahler = Vec::with_capacity(n);
    for &rho in &rhos {
        let x = point_at_rho(ray, rho, field.angle());
        let c = compare_with_model(&x, field, opts)?;
        metric.push(c.metric_deviation);
        kahler.push(c.kahler_deviation);
    }
    Ok(DecayReport {
        ray: *ray,
        metric: DecayFit::new(rhos.clone(), metric)?,
        kahler: DecayFit::new(rhos, kahler)?,
    })
}

/// The acceptance bound on the decay slope: `−min(4, 2/β)`.
pub fn expected_decay_rate<T: Scalar>(beta: T) -> T {
    -(lit::<T>(4.0).min(lit::<T>(2.0) / beta))
}

/// `k`-th cosine coefficient of `f` on the circle `(r, ·, s)`:
/// `(1/π)∫f cos kθ dθ`, halved for `k = 0`.
pub fn angular_mode<T: Scalar>(field: &PotentialField<T>, k: usize, r: T, s: T, nodes: usize) -> Result<T> {
    let kk = from_usize::<T>(k);
    let pts: Vec<(T, T)> = periodic_trapezoid(nodes, lit::<T>(2.0) * T::PI())
        .map(|(t, w)| (t - T::PI(), w))
        .collect();
    let terms = pts
        .par_iter()
        .map(|&(th, w)| Ok(field.value(&ConePoint { r, theta: th, s })? * (kk * th).cos() * w))
        .collect::<Result<Vec<T>>>()?;
    let norm = if k == 0 { lit::<T>(2.0) * T::PI() } else { T::PI() };
    Ok(neumaier_sum(terms) / norm)
}

/// Leading exponent of the `k`-th angular mode of `f` in `r`, from `n ≥ 8`
/// log-spaced radii in `r_range ⊂ (0, 1/4]` at height `s`.
pub fn angular_mode_fit<T: Scalar>(
    field: &PotentialField<T>,
    k: usize,
    r_range: (T, T),
    s: T,
    n: usize,
) -> Result<DecayFit<T>> {
    if !(r_range.0 > T::zero() && r_range.1 <= lit(0.25) && r_range.0 < r_range.1) {
        return Err(Error::InvalidParameter(format!("mode radii {r_range:?} outside (0, 1/4]")));
    }
    if n < 8 {
        return Err(Error::InvalidParameter(format!("mode fit needs at least 8 radii, got {n}")));
    }
    // enough nodes to keep aliasing of modes k ± N far below mode k
    let nodes = (4 * k + 32).next_power_of_two();
    let radii = logspace(r_range.0, r_range.1, n);
    let mut values = Vec::with_capacity(n);
    for &r in &radii {
        let a = angular_mode(field, k, r, s, nodes)?;
        let floor = lit::<T>(1e-13) * field.value(&ConePoint { r, theta: T::zero(), s })?.abs();
        if a.abs() <= floor {
            return Err(Error::NonConvergent(format!(
                "mode {k} amplitude {a:?} at r = {r:?} is below the noise floor"
            )));
        }
        values.push(a.abs());
    }
    DecayFit::new(radii, values)
}
