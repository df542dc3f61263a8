//! Bessel functions of the first kind, `J_ν(x)` for real `ν ≥ 0`, `x ≥ 0`.
//!
//! Three regimes:
//! - ascending power series when `x` is small against `ν`;
//! - Hankel's asymptotic expansion once `x ≥ max(25, ν²/2)`;
//! - Miller's backward recurrence in between, normalized by the Neumann sum
//!   `(x/2)^μ = Σ_k (μ + 2k) Γ(μ + k) / k! · J_{μ+2k}(x)`.

use crate::scalar::{lit, Scalar};
use crate::special::gamma::{gamma, ln_gamma};

fn use_series<T: Scalar>(nu: T, x: T) -> bool {
    x <= lit(8.0) || x * x * lit(0.25) <= nu + T::one()
}

fn use_asymptotic<T: Scalar>(nu: T, x: T) -> bool {
    x >= lit::<T>(25.0).max(nu * nu * lit(0.5))
}

pub fn bessel_j<T: Scalar>(nu: T, x: T) -> T {
    assert!(nu >= T::zero() && x >= T::zero(), "bessel_j needs nu >= 0, x >= 0");
    if x == T::zero() {
        return if nu == T::zero() { T::one() } else { T::zero() };
    }
    if use_series(nu, x) {
        series(nu, x)
    } else if use_asymptotic(nu, x) {
        hankel(nu, x)
    } else {
        miller(nu, x)
    }
}

fn series<T: Scalar>(nu: T, x: T) -> T {
    let half_x = x * lit(0.5);
    let lead = (nu * half_x.ln() - ln_gamma(nu + T::one())).exp();
    let q = -half_x * half_x;
    let mut term = T::one();
    let mut sum = T::one();
    for m in 1..500 {
        let mt = lit::<T>(m as f64);
        term = term * q / (mt * (mt + nu));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * lit(0.5) {
            break;
        }
    }
    lead * sum
}

fn hankel<T: Scalar>(nu: T, x: T) -> T {
    let mu = lit::<T>(4.0) * nu * nu;
    let eight_x = lit::<T>(8.0) * x;
    let (mut p, mut q) = (T::zero(), T::zero());
    let mut term = T::one();
    let mut prev = T::infinity();
    for k in 0..60 {
        let mag = term.abs();
        if mag > prev {
            break;
        }
        match k % 4 {
            0 => p = p + term,
            1 => q = q + term,
            2 => p = p - term,
            _ => q = q - term,
        }
        if mag <= T::epsilon() * (p.abs() + q.abs()) {
            break;
        }
        prev = mag;
        let odd = lit::<T>((2 * k + 1) as f64);
        term = term * (mu - odd * odd) / (lit::<T>((k + 1) as f64) * eight_x);
    }
    let omega = x - (nu * lit(0.5) + lit(0.25)) * T::PI();
    (lit::<T>(2.0) / (T::PI() * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

fn miller<T: Scalar>(nu: T, x: T) -> T {
    let n_target = nu.floor();
    let mu = nu - n_target;
    let target = n_target.to_usize().expect("order fits in usize");
    let start_f = x.max(nu) + lit(30.0) + lit::<T>(6.0) * x.cbrt();
    let start = start_f.to_usize().expect("start index fits in usize") + target % 2;
    let big = lit::<T>(1e250);
    let scale_down = lit::<T>(1e-250);

    // Backward recurrence J_{μ+k-1} = 2(μ+k)/x · J_{μ+k} - J_{μ+k+1}.
    let mut j_next = T::zero();
    let mut j_cur = lit::<T>(1e-300);
    let mut at_target = T::zero();
    let mut norm = T::zero();
    // Neumann-sum coefficient c_k = (μ + 2k) Γ(μ + k) / k!, built for even indices.
    let coeff = |k: usize| -> T {
        if k == 0 {
            gamma(mu + T::one())
        } else {
            let kt = lit::<T>(k as f64);
            (mu + kt + kt) * (ln_gamma(mu + kt) - ln_gamma(kt + T::one())).exp()
        }
    };
    for idx in (0..=start).rev() {
        if idx == target {
            at_target = j_cur;
        }
        if idx % 2 == 0 {
            norm = norm + coeff(idx / 2) * j_cur;
        }
        if idx == 0 {
            break;
        }
        let order = mu + lit(idx as f64);
        let j_prev = (order + order) / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > big {
            j_cur = j_cur * scale_down;
            j_next = j_next * scale_down;
            at_target = at_target * scale_down;
            norm = norm * scale_down;
        }
    }
    let half_x_mu = (mu * (x * lit(0.5)).ln()).exp();
    at_target * half_x_mu / norm
}
