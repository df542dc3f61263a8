//! One-dimensional quadrature: adaptive Gauss–Kronrod, Gauss–Legendre,
//! tanh-sinh and the trapezoid rule.
//!
//! The integrators are generic over the integrand's value type so that jets
//! (and hence all their derivatives) can be integrated in a single pass.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{from_usize, lit, Scalar};

/// Values a quadrature rule can accumulate.
pub trait Integrand<T: Scalar>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    /// Size used for error control.
    fn norm(&self) -> T;
}

impl<T: Scalar> Integrand<T> for T {
    fn norm(&self) -> T {
        self.abs()
    }
}

impl<T: Scalar> Integrand<T> for Jet<T> {
    fn norm(&self) -> T {
        self.norm_inf()
    }
}

impl<T: Scalar, const N: usize> Integrand<T> for Vector<T, N> {
    fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Fixed-size vector of scalars that can be integrated component-wise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<T, const N: usize>(pub [T; N]);

impl<T: Scalar, const N: usize> Add for Vector<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<T: Scalar, const N: usize> Sub for Vector<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<T: Scalar, const N: usize> Mul<T> for Vector<T, N> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Vector(std::array::from_fn(|i| self.0[i] * rhs))
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525600972,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> QuadOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            max_intervals: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<V, T> {
    pub value: V,
    pub error: T,
    pub evals: usize,
    pub converged: bool,
}

impl<V, T: Scalar> QuadResult<V, T> {
    /// The value if the tolerance was met, otherwise the achieved estimate
    /// as an error.
    pub fn ok(self, tolerance: T) -> Result<V> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                estimate: self.error.to_f64().unwrap_or(f64::NAN),
                tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

fn gk21<T: Scalar, V: Integrand<T>>(f: &impl Fn(T) -> V, a: T, b: T) -> (V, T) {
    let half = lit::<T>(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c);
    let mut kron = fc * lit(WGK[10]);
    let mut gauss: Option<V> = None;
    for j in 0..10 {
        let dx = h * lit(XGK[j]);
        let pair = f(c - dx) + f(c + dx);
        kron = kron + pair * lit(WGK[j]);
        if j % 2 == 1 {
            let g = pair * lit(WG[j / 2]);
            gauss = Some(match gauss {
                Some(acc) => acc + g,
                None => g,
            });
        }
    }
    let gauss = gauss.expect("ten-point Gauss rule");
    let value = kron * h;
    let err = ((kron - gauss) * h).norm();
    (value, err)
}

/// Adaptive 21-point Gauss–Kronrod quadrature on `[a, b]`, bisecting the
/// interval with the largest error estimate until
/// `error ≤ max(abs_tol, rel_tol · |value|)`.
pub fn integrate<T, V, F>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> QuadResult<V, T>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T) -> V,
{
    integrate_breaks(f, &[a, b], opts)
}

/// As [`integrate`], starting from the partition given by `breaks`.
pub fn integrate_breaks<T, V, F>(f: F, breaks: &[T], opts: &QuadOptions<T>) -> QuadResult<V, T>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T) -> V,
{
    assert!(breaks.len() >= 2);
    let mut cells: Vec<(T, T, V, T)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk21(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    let mut evals = 21 * cells.len();
    let half = lit::<T>(0.5);
    loop {
        let total = cells
            .iter()
            .skip(1)
            .fold(cells[0].2, |acc, c| acc + c.2);
        let err = cells.iter().fold(T::zero(), |acc, c| acc + c.3);
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("nonempty partition");
        let (a, b, _, _) = cells[worst];
        let m = (a + b) * half;
        let resolvable = m > a && m < b;
        if err <= target || cells.len() >= opts.max_intervals || !resolvable || !err.is_finite() {
            return QuadResult {
                value: total,
                error: err,
                evals,
                converged: err <= target,
            };
        }
        let (v1, e1) = gk21(&f, a, m);
        let (v2, e2) = gk21(&f, m, b);
        evals += 42;
        cells[worst] = (a, m, v1, e1);
        cells.push((m, b, v2, e2));
    }
}

/// Integral over `[a, ∞)` through the map `x = a + τ / (1 − τ)`.
pub fn integrate_semi_infinite<T, V, F>(f: F, a: T, opts: &QuadOptions<T>) -> QuadResult<V, T>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T) -> V,
{
    let g = |tau: T| {
        let one = T::one();
        let d = one - tau;
        f(a + tau / d) * (one / (d * d))
    };
    // The open Kronrod rule never samples τ = 1.
    integrate(g, T::zero(), T::one(), opts)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nt = from_usize::<T>(n);
    for i in 0..n.div_ceil(2) {
        let mut z = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nt + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), z);
            for k in 2..=n {
                let kt = from_usize::<T>(k);
                let p2 = ((kt + kt - T::one()) * z * p1 - (kt - T::one()) * p0) / kt;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { T::one() } else { p0 };
            dp = nt * (z * pn - pm) / (z * z - T::one());
            let dz = pn / dp;
            z = z - dz;
            if dz.abs() <= T::epsilon() {
                break;
            }
        }
        if n == 1 {
            dp = T::one();
            z = T::zero();
        }
        let wi = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = lit(2.0);
    }
    (x, w)
}

/// A Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on<T: Scalar>(n: usize, a: T, b: T) -> Vec<(T, T)> {
    let (x, w) = gauss_legendre::<T>(n);
    let half = lit::<T>(0.5);
    let (c, h) = ((a + b) * half, (b - a) * half);
    x.into_iter().zip(w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

/// Tanh-sinh (double-exponential) quadrature on `[a, b]`, robust to
/// integrable endpoint singularities. The integrand receives the abscissa
/// together with its distances to `a` and `b`, computed without cancellation.
pub fn tanh_sinh<T, V, F>(f: F, a: T, b: T, rel_tol: T, max_level: usize) -> QuadResult<V, T>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T, T, T) -> V,
{
    tanh_sinh_tol(f, a, b, T::zero(), rel_tol, max_level)
}

/// [`tanh_sinh`] that also stops once the level-to-level change is below
/// `abs_tol`, for integrals that may vanish.
pub fn tanh_sinh_tol<T, V, F>(f: F, a: T, b: T, abs_tol: T, rel_tol: T, max_level: usize) -> QuadResult<V, T>
where
    T: Scalar,
    V: Integrand<T>,
    F: Fn(T, T, T) -> V,
{
    let half = lit::<T>(0.5);
    let half_pi = T::FRAC_PI_2();
    let hw = (b - a) * half;
    // Far enough that x^{-1/2}-type endpoint singularities lose nothing.
    let t_max = lit::<T>(4.5);
    // Node at parameter t: returns (x, dist_a, dist_b, weight).
    let node = |t: T| {
        let u = half_pi * t.sinh();
        let ch = u.cosh();
        let weight = half_pi * t.cosh() / (ch * ch);
        // 1 - tanh|u| = e^{-|u|} / cosh u
        let tail = (-u.abs()).exp() / ch;
        let (da, db) = if u >= T::zero() {
            (hw * (lit::<T>(2.0) - tail), hw * tail)
        } else {
            (hw * tail, hw * (lit::<T>(2.0) - tail))
        };
        (a + da, da, db, weight)
    };
    let eval = |t: T| {
        let (x, da, db, wt) = node(t);
        f(x, da, db) * (wt * hw)
    };
    let mut h = T::one();
    let mut sum = eval(T::zero());
    let mut k = 1usize;
    while from_usize::<T>(k) * h <= t_max {
        let t = from_usize::<T>(k) * h;
        sum = sum + eval(t) + eval(-t);
        k += 1;
    }
    let mut evals = 2 * k - 1;
    let mut estimate = sum * h;
    let mut err = estimate.norm();
    for _ in 1..=max_level {
        h = h * half;
        let mut j = 1usize;
        let mut add: Option<V> = None;
        loop {
            let t = from_usize::<T>(j) * h;
            if t > t_max {
                break;
            }
            let pair = eval(t) + eval(-t);
            add = Some(match add {
                Some(s) => s + pair,
                None => pair,
            });
            evals += 2;
            j += 2;
        }
        if let Some(add) = add {
            sum = sum + add;
        }
        let next = sum * h;
        err = (next - estimate).norm();
        estimate = next;
        if err <= abs_tol.max(rel_tol * estimate.norm()) {
            return QuadResult {
                value: estimate,
                error: err,
                evals,
                converged: true,
            };
        }
    }
    QuadResult {
        value: estimate,
        error: err,
        evals,
        converged: false,
    }
}

/// Composite trapezoid nodes for a periodic integrand on `[0, period)`.
pub fn periodic_trapezoid<T: Scalar>(n: usize, period: T) -> impl Iterator<Item = (T, T)> {
    let h = period / from_usize::<T>(n);
    (0..n).map(move |i| (h * from_usize::<T>(i), h))
}
