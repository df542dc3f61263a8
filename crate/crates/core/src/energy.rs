//! Total energy `‖Rm‖²_{L²} = (π/2) ∫ ΔΔ f⁻¹ dV_β`.
//!
//! The circle fibres have length `2πf^{−1/2}` and `|Rm|² = (1/4f)ΔΔf⁻¹`, so
//! integrating over the fibres leaves `(π/2)∫ΔΔf⁻¹`. Stokes on
//! `B_R(0) \ B_ε(p)` turns this into two boundary fluxes; the flux through a
//! thin cylinder around the edge vanishes. In the limits the outer flux is
//! `−16πβ²` (from `f₀⁻¹ = 2β|x|` and `dA_β = β dA`) and the inner one `−16π`,
//! giving `8π²(1 − β²)`.
//!
//! The direct route integrates the density over the cone with a partition of
//! unity: a ball around `p` in spherical coordinates centred at `p` (which
//! absorbs the `1/|x − p|` singularity of `ΔΔf⁻¹`), and spherical
//! coordinates about the origin elsewhere, graded towards the edge.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::curvature_block;
use crate::error::{Error, Result};
use crate::greens::{PoleLocation, PotentialField};
use crate::numerics::quadrature::{gauss_legendre_on, periodic_trapezoid, tanh_sinh_tol};
use crate::numerics::richardson::richardson;
use crate::numerics::sum::neumaier_sum;
use crate::scalar::{from_usize, lit, Scalar};

/// `8π²(1 − β²)`.
pub fn energy_target<T: Scalar>(beta: T) -> T {
    lit::<T>(8.0) * T::PI() * T::PI() * (T::one() - beta * beta)
}

/// `lim_{R→∞}` of the outward flux of `DΔf⁻¹` through `S_R(0)`: `−16πβ²`.
pub fn outer_flux_limit<T: Scalar>(beta: T) -> T {
    lit::<T>(-16.0) * T::PI() * beta * beta
}

/// `lim_{ε→0}` of the flux of `DΔf⁻¹` through `S_ε(p)`, normal pointing away
/// from `p`: `−16π`.
pub fn inner_flux_limit<T: Scalar>() -> T {
    lit::<T>(-16.0) * T::PI()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FluxOptions<T> {
    pub r_outer: T,
    pub eps_inner: T,
    /// Trapezoid nodes in `θ` on the outer sphere.
    pub theta_nodes: usize,
    /// Largest tanh-sinh level in the polar angle on the outer sphere.
    pub polar_level: usize,
    /// Gauss-Legendre × trapezoid nodes on the inner spheres.
    pub inner_nodes: (usize, usize),
    /// Absolute tolerance on each flux, relative to `16π`.
    pub tol: T,
}

impl<T: Scalar> Default for FluxOptions<T> {
    fn default() -> Self {
        FluxOptions {
            r_outer: lit(1e2),
            eps_inner: lit(1e-2),
            theta_nodes: 64,
            polar_level: 8,
            inner_nodes: (16, 32),
            tol: lit(1e-10),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyFlux<T> {
    /// `(π/2)(outer − inner)`.
    pub value: T,
    /// Outward flux through `S_R(0)`.
    pub outer: T,
    /// `outer − (−16πβ²)`: the part carried by `f⁻¹ − f₀⁻¹`.
    pub outer_correction: T,
    /// Fluxes through `S_ε(p)` at `ε, ε/2, ε/4`.
    pub inner_samples: [T; 3],
    /// Extrapolated `ε → 0` inner flux.
    pub inner: T,
    /// Size of the last Richardson correction of `inner`.
    pub inner_correction: T,
}

fn check_pole<T: Scalar>(field: &PotentialField<T>) -> Result<()> {
    if field.pole_location() != Some(PoleLocation::Unit) {
        return Err(Error::InvalidParameter("energy needs a pole at (1, 0, 0)".into()));
    }
    Ok(())
}

/// `⟨DΔf⁻¹, n⟩` at unrolled Cartesian `x`.
fn normal_derivative<T: Scalar>(field: &PotentialField<T>, x: [T; 3], n: [T; 3]) -> Result<T> {
    let g = field.jet_cartesian(x, 3)?.recip().laplacian().gradient();
    Ok(g[0] * n[0] + g[1] * n[1] + g[2] * n[2])
}

/// `∫_{S_R(0)} ⟨DΔ(f⁻¹ − f₀⁻¹), ν⟩ dA_β`.
///
/// Tanh-sinh in the polar angle (the integrand has power-type behaviour
/// where the sphere meets the edge) times the periodic trapezoid in `θ`.
pub fn outer_flux_correction<T: Scalar>(field: &PotentialField<T>, radius: T, opts: &FluxOptions<T>) -> Result<T> {
    let beta = field.beta();
    // ∂_ν Δ f₀⁻¹ = −4β/R²
    let model = lit::<T>(-4.0) * beta / (radius * radius);
    let thetas: Vec<(T, T)> = periodic_trapezoid(opts.theta_nodes, lit::<T>(2.0) * T::PI())
        .map(|(t, w)| (t - T::PI(), w))
        .collect();
    let tiny = lit::<T>(1e-10);
    let ring = |vt: T| -> Result<T> {
        let (sv, cv) = vt.sin_cos();
        if sv < tiny {
            return Ok(T::zero());
        }
        let terms = thetas
            .par_iter()
            .map(|&(th, w)| {
                let (sp, cp) = (beta * th).sin_cos();
                let n = [sv * cp, sv * sp, cv];
                let x = [radius * n[0], radius * n[1], radius * n[2]];
                Ok((normal_derivative(field, x, n)? - model) * w)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(neumaier_sum(terms) * beta * radius * radius * sv)
    };
    // tanh_sinh cannot propagate errors; remember the first one
    let failure = std::sync::Mutex::new(None);
    let abs_tol = opts.tol * lit::<T>(16.0) * T::PI();
    let res = tanh_sinh_tol(
        |vt: T, _, _| match ring(vt) {
            Ok(v) => v,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                T::zero()
            }
        },
        T::zero(),
        T::PI(),
        abs_tol,
        T::zero(),
        opts.polar_level,
    );
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    if !res.converged {
        return Err(Error::Quadrature {
            estimate: res.error.to_f64().unwrap_or(f64::NAN),
            tolerance: abs_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(res.value)
}

/// `∫_{S_ε(p)} ⟨DΔf⁻¹, ν⟩ dA`, `ν` pointing away from `p`. The sphere is
/// Euclidean in unrolled coordinates as long as `ε` is below the distance
/// from `p` to the edge.
pub fn inner_flux<T: Scalar>(field: &PotentialField<T>, eps: T, opts: &FluxOptions<T>) -> Result<T> {
    check_pole(field)?;
    if !(eps > T::zero() && eps < lit(0.5)) {
        return Err(Error::InvalidParameter(format!("inner radius {eps:?} outside (0, 0.5)")));
    }
    sphere_sum(opts.inner_nodes, |n| {
        let x = [T::one() + eps * n[0], eps * n[1], eps * n[2]];
        normal_derivative(field, x, n)
    })
    .map(|v| v * eps * eps)
}

/// `∫_{S²} g(n) dΩ` by Gauss-Legendre in `cos ϑ` and the trapezoid in the
/// azimuth.
fn sphere_sum<T: Scalar>(nodes: (usize, usize), g: impl Fn([T; 3]) -> Result<T> + Sync) -> Result<T> {
    let polar = gauss_legendre_on::<T>(nodes.0, -T::one(), T::one());
    let azimuth: Vec<_> = periodic_trapezoid(nodes.1, lit::<T>(2.0) * T::PI()).collect();
    let mut dirs = Vec::with_capacity(nodes.0 * nodes.1);
    for &(ct, wt) in &polar {
        let st = (T::one() - ct * ct).sqrt();
        for &(ph, wp) in &azimuth {
            let (sp, cp) = ph.sin_cos();
            dirs.push(([st * cp, st * sp, ct], wt * wp));
        }
    }
    let terms = dirs
        .par_iter()
        .map(|&(n, w)| Ok(g(n)? * w))
        .collect::<Result<Vec<T>>>()?;
    Ok(neumaier_sum(terms))
}

/// Energy through the two boundary fluxes.
///
/// The inner flux is sampled at `ε, ε/2, ε/4` and extrapolated with error
/// terms `ε², ε³`: near `p`, `ΔΔf⁻¹ = 2|Rm|²/|x−p| + O(1)` with `|Rm|²`
/// smooth, so the enclosed amount is `O(ε²)`.
pub fn energy_flux<T: Scalar>(field: &PotentialField<T>, opts: &FluxOptions<T>) -> Result<EnergyFlux<T>> {
    check_pole(field)?;
    if !(opts.r_outer >= lit(1e2)) {
        return Err(Error::InvalidParameter(format!("outer radius {:?} below 100", opts.r_outer)));
    }
    if !(opts.eps_inner <= lit(1e-2)) {
        return Err(Error::InvalidParameter(format!("inner radius {:?} above 1e-2", opts.eps_inner)));
    }
    let correction = outer_flux_correction(field, opts.r_outer, opts)?;
    let outer = outer_flux_limit(field.beta()) + correction;
    let e = opts.eps_inner;
    let mut inner_samples = [T::zero(); 3];
    for (k, out) in inner_samples.iter_mut().enumerate() {
        *out = inner_flux(field, e / lit(f64::powi(2.0, k as i32)), opts)?;
    }
    let (inner, inner_correction) = richardson(&inner_samples, lit(2.0), &[lit(2.0), lit(3.0)]);
    Ok(EnergyFlux {
        value: T::FRAC_PI_2() * (outer - inner),
        outer,
        outer_correction: correction,
        inner_samples,
        inner,
        inner_correction,
    })
}

/// Flux of `DΔf⁻¹` out of the cylinder `{r = ρ, |s| ≤ half_height}`
/// (lateral surface), `dA_β = βρ dθ ds`.
pub fn cylinder_flux<T: Scalar>(field: &PotentialField<T>, rho: T, half_height: T, nodes: (usize, usize)) -> Result<T> {
    let beta = field.beta();
    let heights = crate::numerics::quadrature::gauss_legendre_on::<T>(nodes.0, -half_height, half_height);
    let thetas: Vec<(T, T)> = periodic_trapezoid(nodes.1, lit::<T>(2.0) * T::PI())
        .map(|(t, w)| (t - T::PI(), w))
        .collect();
    let mut cells = Vec::with_capacity(heights.len() * thetas.len());
    for &(s, ws) in &heights {
        for &(th, wt) in &thetas {
            cells.push((s, th, ws * wt));
        }
    }
    let terms = cells
        .par_iter()
        .map(|&(s, th, w)| {
            let (sp, cp) = (beta * th).sin_cos();
            let x = [rho * cp, rho * sp, s];
            Ok(normal_derivative(field, x, [cp, sp, T::zero()])? * w)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(neumaier_sum(terms) * beta * rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureOptions<T> {
    pub r_outer: T,
    /// Radius of the ball around `p` handled in `p`-centred coordinates;
    /// clipped to stay inside the wedge.
    pub pole_radius: T,
    /// Gauss-Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Gauss-Legendre nodes in the graded polar variable on `[0, π/2]`.
    pub polar_nodes: usize,
    /// Trapezoid intervals in `θ ∈ [0, π]`.
    pub theta_nodes: usize,
    /// Nodes `(radial, polar, azimuth)` in the pole ball.
    pub ball_nodes: (usize, usize, usize),
}

impl<T: Scalar> Default for QuadratureOptions<T> {
    fn default() -> Self {
        QuadratureOptions {
            r_outer: lit(1e2),
            pole_radius: lit(0.6),
            radial_nodes: 8,
            polar_nodes: 40,
            theta_nodes: 48,
            ball_nodes: (20, 20, 40),
        }
    }
}

impl<T: Scalar> QuadratureOptions<T> {
    /// Roughly two thirds of the resolution.
    pub fn coarser(&self) -> Self {
        let c = |n: usize| (2 * n).div_ceil(3).max(4);
        QuadratureOptions {
            radial_nodes: c(self.radial_nodes),
            polar_nodes: c(self.polar_nodes),
            theta_nodes: c(self.theta_nodes),
            ball_nodes: (c(self.ball_nodes.0), c(self.ball_nodes.1), c(self.ball_nodes.2)),
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureEstimate<T> {
    pub value: T,
    /// Error estimate from the rules at two and three coarsening steps.
    pub error: T,
    /// Ratio of successive differences; below 1 once refinement is in the
    /// asymptotic regime.
    pub contraction: T,
    pub evals: usize,
}

/// Smooth cut-off: 1 at 0, 0 beyond `a`, flat to all orders at both ends.
fn bump<T: Scalar>(d: T, a: T) -> T {
    let h = |t: T| if t > T::zero() { (-t.recip()).exp() } else { T::zero() };
    let (inside, outside) = (h((a - d) / a), h(d / a));
    inside / (inside + outside)
}

/// `(π/2) ΔΔf⁻¹ = 2πf|Rm|²` at unrolled `x`. The second-order form `Σc_ij²`
/// keeps its accuracy much closer to the edge than fourth derivatives do.
fn integrand<T: Scalar>(field: &PotentialField<T>, x: [T; 3]) -> Result<T> {
    let b = curvature_block(x, field)?;
    Ok(lit::<T>(2.0) * T::PI() * b.f * b.norm_sq)
}

fn radial_breaks<T: Scalar>(r_outer: T) -> Vec<T> {
    let mut b: Vec<T> = [0.0, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0].iter().map(|&v| lit(v)).collect();
    let mut r = lit::<T>(3.0);
    while r < r_outer {
        b.push(r);
        r = r * lit(1.5);
    }
    b.push(r_outer);
    b
}

fn quadrature_once<T: Scalar>(field: &PotentialField<T>, opts: &QuadratureOptions<T>) -> Result<(T, usize)> {
    let beta = field.beta();
    let wedge = (T::PI() * beta).min(T::FRAC_PI_2()).sin();
    let delta = opts.pole_radius.min(lit::<T>(0.9) * wedge);

    // Ball around p: ∫₀^δ ρ² χ(ρ) ∫_{S²} I dΩ dρ.
    let (nb_r, nb_p, nb_a) = opts.ball_nodes;
    let mut ball = Vec::new();
    for (rho, wr) in gauss_legendre_on(nb_r, T::zero(), delta) {
        ball.push((rho, wr * rho * rho * bump(rho, delta)));
    }
    let ball_val = ball
        .iter()
        .map(|&(rho, w)| {
            sphere_sum((nb_p, nb_a), |n| integrand(field, [T::one() + rho * n[0], rho * n[1], rho * n[2]]))
                .map(|v| v * w)
        })
        .collect::<Result<Vec<T>>>()?;

    // Elsewhere: spherical coordinates about the origin, using the symmetries
    // θ → −θ and s → −s. The polar angle is split at π/8; ϑ = (π/8)τ⁴ grades
    // the first panel towards the edge.
    let grade = 4;
    let split = T::FRAC_PI_8();
    let n_edge = (opts.polar_nodes / 4).max(4);
    let mut polar = Vec::with_capacity(opts.polar_nodes);
    for (tau, wt) in gauss_legendre_on(n_edge, T::zero(), T::one()) {
        let vt = split * tau.powi(grade);
        let jac = split * from_usize::<T>(grade as usize) * tau.powi(grade - 1);
        polar.push((vt, wt * jac * vt.sin()));
    }
    for (vt, wt) in gauss_legendre_on(opts.polar_nodes.saturating_sub(n_edge).max(4), split, T::FRAC_PI_2()) {
        polar.push((vt, wt * vt.sin()));
    }
    let nt = opts.theta_nodes;
    let ht = T::PI() / from_usize::<T>(nt);
    let thetas: Vec<(T, T)> = (0..=nt)
        .map(|i| {
            let w = if i == 0 || i == nt { ht * lit(0.5) } else { ht };
            (ht * from_usize::<T>(i), w)
        })
        .collect();
    let breaks = radial_breaks(opts.r_outer);
    let mut radial = Vec::new();
    for pair in breaks.windows(2) {
        radial.extend(gauss_legendre_on(opts.radial_nodes, pair[0], pair[1]));
    }
    let mut cells = Vec::with_capacity(radial.len() * polar.len() * thetas.len());
    for &(rho, wr) in &radial {
        for &(vt, wp) in &polar {
            for &(th, wt) in &thetas {
                cells.push((rho, vt, th, wr * wp * wt * rho * rho));
            }
        }
    }
    let outer_val = cells
        .par_iter()
        .map(|&(rho, vt, th, w)| {
            let (sv, cv) = vt.sin_cos();
            let (sp, cp) = (beta * th).sin_cos();
            let x = [rho * sv * cp, rho * sv * sp, rho * cv];
            let d = ((x[0] - T::one()).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt();
            let cut = T::one() - bump(d, delta);
            // the omitted sliver carries O(r^{2/β−2}) of the total
            if cut == T::zero() || sv * rho < lit(1e-8) {
                return Ok(T::zero());
            }
            Ok(integrand(field, x)? * cut * w)
        })
        .collect::<Result<Vec<T>>>()?;
    // dV_β = β ρ² sin ϑ dρ dϑ dθ, ×4 for the two reflections
    let value = neumaier_sum(ball_val) + neumaier_sum(outer_val) * beta * lit(4.0);
    Ok((value, ball.len() * nb_p * nb_a + cells.len()))
}

/// Direct quadrature of `(π/2)∫ΔΔf⁻¹ dV_β` over `B_R(0)`. Built-in fields
/// are even in `θ` and `s`, which the rule uses. The rule is repeated at
/// two coarser resolutions; the error estimate extrapolates the differences
/// geometrically, and refinement that fails to contract is an error.
pub fn energy_quadrature<T: Scalar>(field: &PotentialField<T>, opts: &QuadratureOptions<T>) -> Result<QuadratureEstimate<T>> {
    check_pole(field)?;
    if matches!(field.method(), crate::greens::Method::Custom(_)) {
        return Err(Error::InvalidParameter("quadrature assumes θ- and s-symmetry; custom fields unsupported".into()));
    }
    let mid = opts.coarser();
    let (fine, n1) = quadrature_once(field, opts)?;
    let (q1, n2) = quadrature_once(field, &mid)?;
    let (q2, n3) = quadrature_once(field, &mid.coarser())?;
    let (e1, e2) = ((fine - q1).abs(), (q1 - q2).abs());
    let contraction = if e2 > T::zero() { e1 / e2 } else { T::zero() };
    // geometric tail of the differences, e1·ρ/(1 − ρ), plus e1 itself
    let roundoff = T::epsilon() * lit(1e3) * (fine.abs() + T::one());
    let error = if contraction < lit(0.9) {
        (e1 / (T::one() - contraction)).max(roundoff)
    } else {
        return Err(Error::NonConvergent(format!(
            "energy quadrature not converging under refinement: differences {e2:?} then {e1:?}"
        )));
    };
    Ok(QuadratureEstimate {
        value: fine,
        error,
        contraction,
        evals: n1 + n2 + n3,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub beta: T,
    pub flux_value: T,
    pub quadrature_value: Option<T>,
    pub target: T,
    /// Relative to the target, or to `8π²` when the target is 0.
    pub rel_err_flux: T,
    pub rel_err_quad: Option<T>,
}

impl<T: Scalar> EnergyReport<T> {
    pub fn new(beta: T, flux_value: T, quadrature_value: Option<T>) -> Self {
        let target = energy_target(beta);
        let scale = if target > T::zero() {
            target
        } else {
            lit::<T>(8.0) * T::PI() * T::PI()
        };
        EnergyReport {
            beta,
            flux_value,
            quadrature_value,
            target,
            rel_err_flux: (flux_value - target).abs() / scale,
            rel_err_quad: quadrature_value.map(|q| (q - target).abs() / scale),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_combine_to_target() {
        let b = 0.5f64;
        let e = std::f64::consts::FRAC_PI_2 * (outer_flux_limit(b) - inner_flux_limit::<f64>());
        assert!((e - energy_target(b)).abs() < 1e-12);
        assert!((energy_target(0.5f64) - 6.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn bump_is_a_partition() {
        assert_eq!(bump(0.0f64, 0.5), 1.0);
        assert_eq!(bump(0.6f64, 0.5), 0.0);
        let m = bump(0.25f64, 0.5);
        assert!((m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn free_space_inner_flux_is_exact() {
        let field = PotentialField::<f64>::reflection(1).unwrap();
        let v = inner_flux(&field, 1e-2, &FluxOptions::default()).unwrap();
        assert!((v - inner_flux_limit::<f64>()).abs() < 1e-10, "{v}");
    }
}
