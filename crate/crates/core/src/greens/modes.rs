//! Angular mode sums `G = (1/4πβ) Σ_k ε_k cos(kΔθ) I_k`, `ε₀ = 1`, `ε_k = 2`.
//!
//! `I_k(r, r', R) = ∫₀^∞ e^{−λR} J_ν(λr) J_ν(λr') dλ` with `ν = k/β` is the
//! radial mode after the heat-kernel time integral has been done in closed
//! form. Two evaluations are provided: direct λ-quadrature, and the
//! Lipschitz–Hankel closed form `I_k = Q_{ν−½}(χ)/(π√(rr'))`.

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_breaks, QuadOptions};
use crate::numerics::sum::Neumaier;
use crate::scalar::{lit, Scalar};
use crate::special::bessel::bessel_j;
use crate::special::legendre::toroidal_q;

/// Smallest and largest number of modes used when the count is automatic.
pub const K_MIN: usize = 8;
pub const K_CAP: usize = 64;

/// Inputs to a mode sum: the two radii, `|s − s'|` and `θ − θ'`.
#[derive(Clone, Copy, Debug)]
pub struct ModeGeometry<T> {
    pub r: T,
    pub rp: T,
    pub ds: T,
    pub dtheta: T,
}

impl<T: Scalar> ModeGeometry<T> {
    /// `χ − 1 = ((r − r')² + R²)/(2rr')`.
    pub fn chi_m1(&self) -> T {
        let dr = self.r - self.rp;
        (dr * dr + self.ds * self.ds) / (lit::<T>(2.0) * self.r * self.rp)
    }

    /// `η = arccosh χ`; mode `k` decays like `e^{−kη/β}`.
    pub fn eta(&self) -> T {
        let cm1 = self.chi_m1();
        (cm1 + (cm1 * (cm1 + lit(2.0))).sqrt()).ln_1p()
    }
}

/// Number of modes needed for `tol`: `β ln(1/tol)/η`, clamped to
/// `[K_MIN, K_CAP]`. For `s = s'` and `r' = 1` this is `β ln(1/tol)/ln(1/min(r, 1/r))`.
pub fn auto_k_max<T: Scalar>(geom: &ModeGeometry<T>, beta: T, tol: T) -> usize {
    let eta = geom.eta();
    if !(eta > T::zero()) {
        return K_CAP;
    }
    let k = (beta * tol.recip().ln() / eta).ceil();
    k.to_usize().unwrap_or(K_CAP).clamp(K_MIN, K_CAP)
}

fn weighted_sum<T: Scalar>(
    geom: &ModeGeometry<T>,
    beta: T,
    k_max: usize,
    mut mode: impl FnMut(T) -> Result<T>,
) -> Result<T> {
    let mut acc = Neumaier::new();
    for k in 0..=k_max {
        let kt = lit::<T>(k as f64);
        let eps = if k == 0 { T::one() } else { lit(2.0) };
        let ik = mode(kt / beta)?;
        acc.add(eps * (kt * geom.dtheta).cos() * ik);
    }
    Ok(acc.value() / (lit::<T>(4.0) * T::PI() * beta))
}

/// `G` through the toroidal-harmonic closed form of each mode.
pub fn green_legendre<T: Scalar>(geom: &ModeGeometry<T>, beta: T, k_max: usize) -> Result<T> {
    let cm1 = geom.chi_m1();
    if !(cm1 > T::zero()) {
        return Err(Error::AtPole);
    }
    let pref = (T::PI() * (geom.r * geom.rp).sqrt()).recip();
    weighted_sum(geom, beta, k_max, |nu| Ok(toroidal_q(nu, cm1) * pref))
}

/// `I_k` by adaptive quadrature in `λ` over `[0, Λ]`,
/// `Λ = min(ln(1/(tol·R))/R, lambda_cap)`. Reports the tail bound as a
/// quadrature failure when the cap cuts the integral short.
pub fn radial_mode_bessel<T: Scalar>(
    nu: T,
    geom: &ModeGeometry<T>,
    tol: T,
    lambda_cap: T,
) -> Result<T> {
    let big_r = geom.ds.abs();
    if !(big_r > T::zero()) {
        return Err(Error::InvalidParameter(
            "the λ-integral needs |s − s'| > 0; use the closed form instead".into(),
        ));
    }
    let natural = (tol * big_r).recip().ln().max(T::one()) / big_r;
    let cap = natural.min(lambda_cap);
    let rmax = geom.r.max(geom.rp);
    // Split into pieces of a few oscillation periods.
    let period = lit::<T>(2.0) * T::PI() / rmax;
    let pieces = (cap / (lit::<T>(4.0) * period))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, 4000);
    let breaks: Vec<T> = (0..=pieces)
        .map(|i| cap * lit(i as f64) / lit(pieces as f64))
        .collect();
    let integrand =
        |l: T| (-l * big_r).exp() * bessel_j(nu, l * geom.r) * bessel_j(nu, l * geom.rp);
    let opts = QuadOptions {
        abs_tol: tol * lit(1e-3) / (geom.r * geom.rp).sqrt(),
        rel_tol: tol,
        max_intervals: pieces * 16 + 64,
    };
    let res = integrate_breaks(integrand, &breaks, &opts);
    let value = res.ok(tol)?;
    if cap < natural {
        // |J_ν(λr)J_ν(λr')| ≤ 2/(πλ√(rr')) for large λ.
        let tail = lit::<T>(2.0) * (-cap * big_r).exp()
            / (T::PI() * big_r * cap * (geom.r * geom.rp).sqrt());
        if tail > tol * value.abs().max(lit(1e-300)) {
            return Err(Error::Quadrature {
                estimate: tail.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(value)
}

/// `G` by λ-quadrature of every mode. For `R = 0` the closed form is used.
pub fn green_bessel<T: Scalar>(
    geom: &ModeGeometry<T>,
    beta: T,
    k_max: usize,
    tol: T,
    lambda_cap: T,
) -> Result<T> {
    if geom.ds == T::zero() {
        return green_legendre(geom, beta, k_max);
    }
    weighted_sum(geom, beta, k_max, |nu| {
        radial_mode_bessel(nu, geom, tol, lambda_cap)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_space_mode_sum_is_newtonian() {
        let g = ModeGeometry {
            r: 2.0f64,
            rp: 1.0,
            ds: 0.5,
            dtheta: 0.3,
        };
        let d = (4.0 + 1.0 - 4.0 * 0.3f64.cos() + 0.25).sqrt();
        let exact = 1.0 / (4.0 * std::f64::consts::PI * d);
        let k = auto_k_max(&g, 1.0, 1e-14);
        let leg = green_legendre(&g, 1.0, k).unwrap();
        assert!((leg - exact).abs() < 1e-13 * exact, "{leg} {exact}");
        let bes = green_bessel(&g, 1.0, k, 1e-12, 1e4).unwrap();
        assert!((bes - exact).abs() < 1e-9 * exact, "{bes} {exact}");
    }

    #[test]
    fn lipschitz_hankel_closed_form() {
        // Direct λ-quadrature of a single mode against Q_{ν−½}(χ)/(π√(rr')).
        let g = ModeGeometry {
            r: 0.6f64,
            rp: 1.0,
            ds: 0.8,
            dtheta: 0.0,
        };
        for nu in [0.0, 1.0 / 0.7, 3.0] {
            let direct = radial_mode_bessel(nu, &g, 1e-12, 1e4).unwrap();
            let closed = toroidal_q(nu, g.chi_m1()) / (std::f64::consts::PI * 0.6f64.sqrt());
            assert!((direct - closed).abs() < 1e-10 * closed, "nu={nu}");
        }
    }

    #[test]
    fn k_max_rule_matches_r_eff_form() {
        let g = ModeGeometry {
            r: 0.25f64,
            rp: 1.0,
            ds: 0.0,
            dtheta: 0.0,
        };
        let expect = (0.7 * 1e9f64.ln() / 4f64.ln()).ceil() as usize;
        assert_eq!(auto_k_max(&g, 0.7, 1e-9), expect.clamp(K_MIN, K_CAP));
    }
}
