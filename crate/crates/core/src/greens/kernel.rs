//! Mode-resummed evaluation of the cone Green's function.
//!
//! Each angular mode of `G` is a toroidal harmonic with Heine's integral
//! `Q_{ν−½}(cosh η) = 2^{−½} ∫_η^∞ e^{−νu} (cosh u − cosh η)^{−½} du`, so the
//! mode sum with weights `ε_k/(4πβ)` collapses under the integral sign into a
//! Poisson kernel `K(e^{−w}, ψ) = sinh w / (cosh w − cos ψ)`. Substituting
//! `cosh u = χ + v²`:
//!
//! ```text
//! 2πG(x, x') = 1/(√2 π √(rr')) ∫₀^∞ β⁻¹ K(e^{−u/β}, θ − θ') / sinh u  dv.
//! ```
//!
//! At `β = 1` the same integral is the Newtonian `1/(2|x − x'|)`; subtracting
//! it (in the unrolled angle `βφ`) leaves the smooth part `2πF`. The bracket
//! `B(u) = β⁻¹K(e^{−u/β}, φ) − K(e^{−u}, βφ)` is odd in `u`, so `B / sinh u`
//! is an analytic function of `u² = arccosh²(χ + v²)`, itself analytic in the
//! coordinates. Evaluating it through `u²` (and never `u`) for small `u` keeps
//! every derivative well conditioned up to, but not including, the pole.

use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::quadrature::{integrate_breaks, QuadOptions};
use crate::scalar::{lit, Scalar};

const TERMS: usize = 14;

/// Power-series coefficients (in `y`) used by the small-`u` branch.
struct Series {
    /// `sinh x / x = 1 + y·Sd(y)`, `y = x²`.
    sd: [f64; TERMS],
    /// `(cosh x − 1)/(x²/2) = 1 + y·Cc(y)`.
    cc: [f64; TERMS],
    /// `(1 − cos x)/(x²/2) = 1 + y·Cd(y)`.
    cd: [f64; 2 * TERMS],
    /// `P = Sd − Cc`.
    p: [f64; TERMS],
    /// `arccosh²(1 + y) = Σ a_n yⁿ`.
    acosh2: [f64; 2 * TERMS],
}

static SERIES: LazyLock<Series> = LazyLock::new(|| {
    let fact = |n: usize| (1..=n).fold(1.0f64, |a, k| a * k as f64);
    let mut s = Series {
        sd: [0.0; TERMS],
        cc: [0.0; TERMS],
        cd: [0.0; 2 * TERMS],
        p: [0.0; TERMS],
        acosh2: [0.0; 2 * TERMS],
    };
    for i in 0..2 * TERMS {
        let k = i + 1;
        let c = 2.0 / fact(2 * k + 2);
        s.cd[i] = if k % 2 == 1 { -c } else { c };
        if i < TERMS {
            let sk = 1.0 / fact(2 * k + 1);
            s.sd[i] = sk;
            s.cc[i] = c;
            s.p[i] = sk - c;
        }
    }
    // y(2 + y) f'' + (1 + y) f' = 2 gives a_{m+1} = −m² a_m / ((m+1)(2m+1)).
    s.acosh2[1] = 2.0;
    for m in 1..2 * TERMS - 1 {
        let mf = m as f64;
        s.acosh2[m + 1] = -mf * mf * s.acosh2[m] / ((mf + 1.0) * (2.0 * mf + 1.0));
    }
    s
});

fn horner<T: Scalar>(coeffs: &[f64], y: Jet<T>) -> Jet<T> {
    let mut acc = Jet::constant(lit::<T>(coeffs[coeffs.len() - 1]));
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc * y + lit::<T>(c);
    }
    acc
}

/// `(1 − cos φ)/(φ²/2)` and the matching `Cd`, from the series for
/// `|φ| ≤ 1` and in closed form beyond.
fn angular_factors<T: Scalar>(phi: Jet<T>) -> (Jet<T>, Jet<T>) {
    let p2 = phi * phi;
    if phi.value().abs() <= T::one() {
        let cd = horner(&SERIES.cd, p2);
        (cd * p2 + T::one(), cd)
    } else {
        let h = (phi * lit::<T>(0.5)).sin();
        let ct = h * h * lit::<T>(4.0) / p2;
        (ct, (ct - T::one()) / p2)
    }
}

/// Largest `u/β` for which the small-`u` branch is used.
const NEAR_U: f64 = 0.5;

/// Everything about the bracket that does not depend on the integration
/// variable.
struct Bracket<T: Scalar> {
    beta: T,
    p2: Jet<T>,
    bp2: Jet<T>,
    ct1: Jet<T>,
    cd1: Jet<T>,
    ct2: Jet<T>,
    cd2: Jet<T>,
    sin2_1: Jet<T>,
    sin2_2: Jet<T>,
    y_near: T,
}

impl<T: Scalar> Bracket<T> {
    fn new(phi: Jet<T>, beta: T) -> Self {
        let p2 = phi * phi;
        let bp2 = p2 * (beta * beta);
        let (ct1, cd1) = angular_factors(phi);
        let (ct2, cd2) = angular_factors(phi * beta);
        let h1 = (phi * lit::<T>(0.5)).sin();
        let h2 = (phi * (beta * lit(0.5))).sin();
        let four = lit::<T>(4.0);
        Bracket {
            beta,
            p2,
            bp2,
            ct1,
            cd1,
            ct2,
            cd2,
            sin2_1: h1 * h1 * four,
            sin2_2: h2 * h2 * four,
            y_near: (beta * lit(NEAR_U)).cosh() - T::one(),
        }
    }

    /// `B(u)/sinh u` at `cosh u = 1 + y`.
    fn eval(&self, y: Jet<T>) -> Jet<T> {
        if y.value() <= self.y_near {
            self.near(y)
        } else {
            self.far(y)
        }
    }

    /// With `ℓ = u`, `E = ℓ² + β²φ²` and `Dᵢ`, `Nᵢ` as below,
    /// `B = 2ℓ (N₁/D₁ − N₂/D₂)/E`; the common leading term `2ℓ/E` of the two
    /// kernels has been removed analytically.
    fn near(&self, y: Jet<T>) -> Jet<T> {
        let s = &*SERIES;
        let b2 = self.beta * self.beta;
        let l2 = horner(&s.acosh2[1..], y) * y;
        let y1 = l2 / b2;
        let e = l2 + self.bp2;
        let cc = |v: Jet<T>| horner(&s.cc, v) * v + T::one();
        let d1 = l2 * cc(y1) + self.bp2 * self.ct1;
        let d2 = l2 * cc(l2) + self.bp2 * self.ct2;
        let n1 = l2 * l2 * horner(&s.p, y1) / b2 + self.p2 * l2 * horner(&s.sd, y1)
            - self.bp2 * self.p2 * self.cd1;
        let n2 = l2 * l2 * horner(&s.p, l2) + self.bp2 * l2 * horner(&s.sd, l2)
            - self.bp2 * self.bp2 * self.cd2;
        // sinh u / u = 1 + ℓ² Sd(ℓ²)
        let shu = horner(&s.sd, l2) * l2 + T::one();
        (n1 / d1 - n2 / d2) * lit::<T>(2.0) / (e * shu)
    }

    fn far(&self, y: Jet<T>) -> Jet<T> {
        let two = lit::<T>(2.0);
        let sinh_u = (y * (y + two)).sqrt();
        let u = (y + sinh_u).ln_1p();
        let poisson = |w: Jet<T>, sin2: Jet<T>| {
            // q = e^{−w}, 1 − q = −expm1(−w)
            let one_m_q = -(-w).exp_m1();
            let q = -one_m_q + T::one();
            one_m_q * (-one_m_q + two) / (one_m_q * one_m_q + q * sin2)
        };
        let inv_beta = self.beta.recip();
        let k_cone = poisson(u * inv_beta, self.sin2_1) * inv_beta;
        let k_flat = poisson(u, self.sin2_2);
        (k_cone - k_flat) / sinh_u
    }
}

/// `2πF = 2πG − 1/(2|x − x'|)` for a pole at radius `rp`, as a jet.
///
/// `dtheta` must already be reduced to `(−π, π]`; `ds = s − s'`. The cost
/// of resolving the integrand grows as the pole is approached; the field
/// evaluator switches to a harmonic extension there.
pub fn smooth_part_jet<T: Scalar>(
    r: Jet<T>,
    dtheta: Jet<T>,
    ds: Jet<T>,
    rp: Jet<T>,
    beta: T,
    rel_tol: T,
) -> Result<Jet<T>> {
    if !(r.value() > T::zero()) || !(rp.value() > T::zero()) {
        return Err(Error::OnEdge);
    }
    if r.value() == rp.value() && ds.value() == T::zero() && dtheta.value() == T::zero() {
        return Err(Error::AtPole);
    }
    let two = lit::<T>(2.0);
    let dr = r - rp;
    let rrp = r * rp;
    let chi_m1 = (dr * dr + ds * ds) / (rrp * two);
    let bracket = Bracket::new(dtheta, beta);

    // v = V w/(1 − w) maps [0, ∞) to [0, 1); the integrand decays like v⁻².
    let scale = chi_m1.value().sqrt().max(T::one());
    let integrand = |w: T| -> Jet<T> {
        let om = T::one() - w;
        let v = scale * w / om;
        let dv = scale / (om * om);
        bracket.eval(chi_m1 + v * v) * dv
    };
    // Resolve the small-v structure near the pole and the u ≈ β crossover.
    let to_w = |v: T| v / (v + scale);
    let mut breaks = vec![T::zero(), T::one()];
    let near_scale = (chi_m1.value() + dtheta.value() * dtheta.value() * beta * beta).sqrt();
    for v in [near_scale, near_scale * lit(10.0), beta * lit(0.5), beta * lit(2.0)] {
        let w = to_w(v);
        if w > T::zero() && w < T::one() {
            breaks.push(w);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();

    let prefactor = (lit::<T>(2.0).sqrt() * T::PI() * rrp.value().sqrt()).recip();
    // The result is added to the Newtonian jet; measure its error on that
    // jet's scale, which near the pole is set by the top-order coefficients.
    let scale_ref = newtonian_jet(r, dtheta, ds, rp, beta).norm_inf().max(T::one());
    let opts = QuadOptions {
        abs_tol: rel_tol * scale_ref / prefactor * lit(1e-2),
        rel_tol,
        max_intervals: 2000,
    };
    let res = integrate_breaks(integrand, &breaks, &opts);
    let value = res.ok(rel_tol)?;
    Ok(value * rrp.sqrt().recip() * (lit::<T>(2.0).sqrt() * T::PI()).recip())
}

/// The Newtonian part `1/(2|x̃ − x̃'|)` in unrolled coordinates.
pub fn newtonian_jet<T: Scalar>(
    r: Jet<T>,
    dtheta: Jet<T>,
    ds: Jet<T>,
    rp: Jet<T>,
    beta: T,
) -> Jet<T> {
    let h = (dtheta * (beta * lit(0.5))).sin();
    let dr = r - rp;
    let d2 = dr * dr + r * rp * h * h * lit::<T>(4.0) + ds * ds;
    d2.sqrt().recip() * lit::<T>(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Jet<f64> {
        Jet::constant(v)
    }

    #[test]
    fn series_tables() {
        let y = 0.3f64;
        let acosh2: f64 = SERIES.acosh2.iter().rev().fold(0.0, |a, &k| a * y + k);
        let exact = (1.0 + y).acosh().powi(2);
        assert!((acosh2 - exact).abs() < 1e-15, "{acosh2} {exact}");
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for &beta in &[1.0f64, 0.7, 0.3] {
            for &phi in &[0.05f64, 0.8, 2.5, -3.1] {
                let b = Bracket::new(c(phi), beta);
                let y = c(b.y_near);
                let (n, f) = (b.near(y).value(), b.far(y).value());
                assert!((n - f).abs() < 1e-13 * (1.0 + f.abs()), "beta={beta} phi={phi}: {n} {f}");
            }
        }
    }

    #[test]
    fn flat_space_has_no_smooth_part() {
        let v = smooth_part_jet(c(2.0), c(0.7), c(-0.4), c(1.0), 1.0, 1e-13).unwrap();
        assert!(v.value().abs() < 1e-16);
    }

    #[test]
    fn half_angle_matches_single_image() {
        // β = 1/2: 2πF = 1/(2|x − p₁|) with p₁ = (−1, 0, 0).
        for &(r, th, s) in &[(1.7f64, 0.9f64, 0.3f64), (1.0, 2.0, 0.0), (0.02, -1.0, 0.1), (1.03, 0.08, 0.0)] {
            let v = smooth_part_jet(c(r), c(th), c(s), c(1.0), 0.5, 1e-13).unwrap();
            let phi = 0.5 * th;
            let x = [r * phi.cos() + 1.0, r * phi.sin(), s];
            let expect = 0.5 / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            assert!((v.value() - expect).abs() < 1e-13, "{} {}", v.value(), expect);
        }
    }

    #[test]
    fn rejects_the_pole() {
        assert_eq!(
            smooth_part_jet(c(1.0), c(0.0), c(0.0), c(1.0), 0.5, 1e-13).unwrap_err(),
            Error::AtPole
        );
    }
}
