//! Gamma and log-gamma by the Lanczos approximation (g = 7, n = 9).

use crate::scalar::{lit, Scalar};

const G: f64 = 7.0;
const P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Scalar>(x: T) -> T {
    let mut a = lit::<T>(P[0]);
    for (i, &p) in P.iter().enumerate().skip(1) {
        a = a + lit::<T>(p) / (x + lit(i as f64));
    }
    a
}

/// Γ(x) for real `x`, using reflection below 1/2.
pub fn gamma<T: Scalar>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let t = x + lit(G) + half;
    (T::PI() + T::PI()).sqrt() * t.powf(x + half) * (-t).exp() * lanczos_sum(x)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    assert!(x > T::zero(), "ln_gamma needs a positive argument");
    let half = lit::<T>(0.5);
    if x < half {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma(x + T::one()) - x.ln();
    }
    let x = x - T::one();
    let t = x + lit(G) + half;
    half * (T::PI() + T::PI()).ln() + (x + half) * t.ln() - t + lanczos_sum(x).ln()
}
