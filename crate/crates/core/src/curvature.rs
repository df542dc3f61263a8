//! Curvature of `g = f g_β + f⁻¹α²`.
//!
//! Being hyperkähler, only the anti-self-dual Weyl block survives. In the
//! coframe built from `dx_i` it is
//!
//! ```text
//! c_ij = f_ij/f² − 3 f_i f_j/f³ + δ_ij |Df|²/f³ = −(f/2) Hess̊(f⁻²),
//! ```
//!
//! and `|Rm|² = Σ c_ij² = (1/4f) ΔΔ f⁻¹`. All derivatives are taken in the
//! unrolled Cartesian coordinates, where `g_β` is Euclidean.

use serde::Serialize;

use crate::asymptotics::DecayFit;
use crate::cone_space::ConePoint;
use crate::error::{Error, Result};
use crate::greens::{Method, PoleLocation, PotentialField};
use crate::numerics::fit::logspace;
use crate::numerics::richardson::richardson;
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureBlock<T> {
    pub c: [[T; 3]; 3],
    /// `f` at the point.
    pub f: T,
    pub norm_sq: T,
    /// Largest entrywise difference to `−(f/2) Hess̊(f⁻²)`.
    pub alt_deviation: T,
}

impl<T: Scalar> CurvatureBlock<T> {
    pub fn trace(&self) -> T {
        self.c[0][0] + self.c[1][1] + self.c[2][2]
    }

    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.c[i][j] - self.c[j][i]).abs());
            }
        }
        m
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> T {
        self.c.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `c_ij` at unrolled Cartesian coordinates `x`.
pub fn curvature_block<T: Scalar>(x: [T; 3], field: &PotentialField<T>) -> Result<CurvatureBlock<T>> {
    let f = field.jet_cartesian(x, 2)?;
    let f0 = f.value();
    let g = f.gradient();
    let h = f.hessian();
    let (f2, f3) = (f0 * f0, f0 * f0 * f0);
    let grad2 = g.iter().map(|v| *v * *v).sum::<T>();
    let three = lit::<T>(3.0);

    let inv2 = f.powi(-2).hessian();
    let tr = (inv2[0][0] + inv2[1][1] + inv2[2][2]) / three;
    let half_f = f0 * lit(-0.5);

    let mut c = [[T::zero(); 3]; 3];
    let mut dev = T::zero();
    let mut norm_sq = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { grad2 / f3 } else { T::zero() };
            c[i][j] = h[i][j] / f2 - three * g[i] * g[j] / f3 + delta;
            let trace_free = inv2[i][j] - if i == j { tr } else { T::zero() };
            dev = dev.max((c[i][j] - half_f * trace_free).abs());
            norm_sq = norm_sq + c[i][j] * c[i][j];
        }
    }
    Ok(CurvatureBlock {
        c,
        f: f0,
        norm_sq,
        alt_deviation: dev,
    })
}

/// `|Rm|² = (1/4f) ΔΔ f⁻¹`.
pub fn energy_density<T: Scalar>(x: [T; 3], field: &PotentialField<T>) -> Result<T> {
    let f = field.jet_cartesian(x, 4)?;
    let bilap = f.recip().laplacian().laplacian().value();
    Ok(bilap / (lit::<T>(4.0) * f.value()))
}

/// Log-log fit of `|Rm|² = Σc²` against `r` at fixed `(θ, s)`, `n ≥ 8`
/// log-spaced radii. The first edge mode `r^{1/β}cos θ` of `f` gives
/// `|Rm|² ~ r^{2/β − 4}`; for `β ≤ 1/2` that exponent is `≥ 0` and the
/// density is dominated by its bounded part, so the fit is only
/// informative for `β > 1/2`.
pub fn edge_density_fit<T: Scalar>(
    field: &PotentialField<T>,
    theta: T,
    s: T,
    r_range: (T, T),
    n: usize,
) -> Result<DecayFit<T>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("edge fit needs at least 8 radii, got {n}")));
    }
    let radii = logspace(r_range.0, r_range.1, n);
    let angle = *field.angle();
    let values = radii
        .iter()
        .map(|&r| {
            let x = ConePoint { r, theta, s }.unrolled(&angle);
            Ok(curvature_block(x, field)?.norm_sq)
        })
        .collect::<Result<Vec<T>>>()?;
    DecayFit::new(radii, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NutLimit<T> {
    /// Extrapolated `|Rm|` at the NUT point.
    pub value: T,
    /// Size of the last Richardson correction.
    pub correction: T,
    pub samples: [T; 3],
}

/// `|Rm|` at the NUT point over `p = (1, 0, 0)`, from `√(energy_density)` at
/// distances `ε₀·{1, ½, ¼}` above `p` extrapolated to `ε → 0`.
///
/// `ε₀ = 1e−2` unless the smooth part `2πF(p)` is large: near `p` the metric
/// looks like Taub-NUT with length scale `~1/F(p)`, and the samples must sit
/// well inside it, so `ε₀ = min(1e−2, 0.02/2πF(p))`.
pub fn nut_curvature_limit<T: Scalar>(field: &PotentialField<T>) -> Result<NutLimit<T>> {
    if field.pole_location() != Some(PoleLocation::Unit) {
        return Err(Error::InvalidParameter("NUT limit needs a pole at (1, 0, 0)".into()));
    }
    let near = ConePoint { r: T::one(), theta: T::zero(), s: lit(1e-3) };
    let smooth = field.smooth_part(&near)?.abs();
    let e0 = lit::<T>(1e-2).min(lit::<T>(0.02) / smooth);
    let eps = [e0, e0 * lit(0.5), e0 * lit(0.25)];
    let mut samples = [T::zero(); 3];
    for (out, e) in samples.iter_mut().zip(eps) {
        let d = energy_density([T::one(), T::zero(), e], field)?;
        *out = d.max(T::zero()).sqrt();
    }
    // |Rm| is smooth across the NUT, so the error expands in whole powers of ε
    let (value, correction) = richardson(&samples, lit(2.0), &[T::one(), lit(2.0)]);
    let scale = value.abs().max(samples[2].abs());
    if !value.is_finite() || correction > lit::<T>(1e-2) * scale + lit(1e-12) {
        return Err(Error::NonConvergent(format!(
            "NUT curvature extrapolation: correction {correction:?} against value {value:?}"
        )));
    }
    Ok(NutLimit {
        value,
        correction,
        samples,
    })
}

/// `n log n`, the growth scale of `|Rm|` at the NUT of the `β = 1/n` field.
pub fn nut_scale<T: Scalar>(field: &PotentialField<T>) -> Option<T> {
    match field.method() {
        Method::Reflection { n } if *n >= 2 => {
            let n: T = lit(*n as f64);
            Some(n * n.ln())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_space_is_flat() {
        let field = PotentialField::<f64>::reflection(1).unwrap();
        let b = curvature_block([0.3, -0.4, 0.8], &field).unwrap();
        assert!(b.max_abs() < 1e-12);
        assert!(energy_density([0.3, -0.4, 0.8], &field).unwrap().abs() < 1e-10);
    }

    #[test]
    fn two_formulas_agree() {
        let field = PotentialField::<f64>::reflection(2).unwrap();
        let x = [0.4, 0.7, -0.3];
        let b = curvature_block(x, &field).unwrap();
        let scale = b.max_abs();
        assert!(b.alt_deviation < 1e-9 * scale);
        assert!(b.trace().abs() < 1e-9 * scale && b.asymmetry() < 1e-12 * scale);
        let d = energy_density(x, &field).unwrap();
        assert!((d - b.norm_sq).abs() < 1e-8 * b.norm_sq, "{d} vs {}", b.norm_sq);
    }

    #[test]
    fn nut_limit_eguchi_hanson() {
        let field = PotentialField::<f64>::reflection(2).unwrap();
        let l = nut_curvature_limit(&field).unwrap();
        assert!(l.value > 0.0 && l.value.is_finite());
        let flat = nut_curvature_limit(&PotentialField::<f64>::reflection(1).unwrap()).unwrap();
        assert!(flat.value.abs() < 1e-6);
    }
}
