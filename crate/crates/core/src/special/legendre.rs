//! Legendre functions of the second kind of half-odd-integer degree
//! (toroidal harmonics), `Q_{ν−1/2}(χ)` for `χ > 1`.

use crate::numerics::quadrature::{integrate_breaks, QuadOptions};
use crate::scalar::{lit, Scalar};
use crate::special::gamma::ln_gamma;

/// `Q_{ν−1/2}(χ)` with the argument passed as `χ − 1 > 0` to keep precision
/// near `χ = 1`.
///
/// Uses `Q_{ν−1/2}(cosh η) = √π Γ(ν+½)/Γ(ν+1) · e^{−(ν+½)η} · ₂F₁(½, ν+½; ν+1; e^{−2η})`
/// while the hypergeometric series converges quickly, and the Laplace
/// integral `∫₀^∞ (χ + √(χ²−1) cosh t)^{−ν−½} dt` otherwise.
pub fn toroidal_q<T: Scalar>(nu: T, chi_m1: T) -> T {
    assert!(chi_m1 > T::zero() && nu >= T::zero());
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let chi = T::one() + chi_m1;
    let sigma = (chi_m1 * (chi + T::one())).sqrt();
    let eta = (chi_m1 + sigma).ln_1p();
    let y = (-two * eta).exp();
    if y <= lit(0.9) {
        let a = half;
        let b = nu + half;
        let c = nu + T::one();
        let mut term = T::one();
        let mut sum = T::one();
        for m in 0..2000 {
            let mt = lit::<T>(m as f64);
            term = term * (a + mt) * (b + mt) / ((c + mt) * (mt + T::one())) * y;
            sum = sum + term;
            if term.abs() <= T::epsilon() * sum * half {
                break;
            }
        }
        let pref = (T::PI().ln() * half + ln_gamma(nu + half) - ln_gamma(nu + T::one())
            - (nu + half) * eta)
            .exp();
        pref * sum
    } else {
        laplace_integral(nu, chi_m1)
    }
}

/// Direct quadrature of the Laplace integral, after the shift
/// `t = τ + ln(2/σ)` which keeps the integrand's scale fixed as `χ → 1`:
/// `Q = ½ ∫_ℝ (χ + e^τ + (σ²/4) e^{−τ})^{−ν−½} dτ`.
pub fn laplace_integral<T: Scalar>(nu: T, chi_m1: T) -> T {
    let half = lit::<T>(0.5);
    let chi = T::one() + chi_m1;
    let s2q = chi_m1 * (chi + T::one()) * lit(0.25);
    let p = nu + half;
    let integrand = |tau: T| (chi + tau.exp() + s2q * (-tau).exp()).powf(-p);
    let sigma = (s2q * lit(4.0)).sqrt();
    let decay = lit::<T>(40.0) / p + (lit::<T>(2.0) * (chi + sigma)).ln();
    let mid = s2q.ln() * half;
    let lo = s2q.ln() - decay;
    let hi = decay.max(chi.ln() + decay);
    let breaks: Vec<T> = [lo, mid.min(hi), T::zero().max(mid).min(hi), hi]
        .into_iter()
        .fold(Vec::new(), |mut acc, b| {
            if acc.last().is_none_or(|&l| b > l) {
                acc.push(b);
            }
            acc
        });
    let opts = QuadOptions::new(T::zero(), lit(1e-14));
    integrate_breaks(integrand, &breaks, &opts).value * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_minus_half_equals_elementary_q0() {
        // ν = 1/2 gives Q_0(χ) = ½ ln((χ+1)/(χ−1)).
        for &cm1 in &[1e-8, 1e-3, 0.05, 0.5, 3.0, 40.0] {
            let chi = 1.0f64 + cm1;
            let q0 = 0.5 * ((chi + 1.0) / cm1).ln();
            let got = toroidal_q(0.5, cm1);
            assert!((got - q0).abs() < 1e-12 * q0.max(1.0), "cm1={cm1}: {got} vs {q0}");
        }
    }

    #[test]
    fn hypergeometric_and_integral_agree() {
        for &nu in &[0.0f64, 1.0 / 0.7, 3.0, 11.5] {
            for &cm1 in &[0.02, 0.3, 2.0] {
                let a = toroidal_q(nu, cm1);
                let b = laplace_integral(nu, cm1);
                assert!((a - b).abs() < 1e-11 * a.abs().max(1e-300), "nu={nu} cm1={cm1}: {a} {b}");
            }
        }
    }
}
