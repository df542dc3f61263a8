//! Truncated multivariate Taylor arithmetic in three variables.
//!
//! A [`Jet`] carries the Taylor coefficients of a function of three variables
//! at a point, up to total degree [`MAX_ORDER`]. Arithmetic and elementary
//! functions propagate the coefficients exactly, so evaluating a formula on
//! jets yields every mixed partial derivative of that formula without finite
//! differences. Coefficients are stored in Taylor normalization
//! (`∂^α f / α!`); [`Jet::partial`] converts back.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::sync::LazyLock;

use crate::scalar::{lit, Scalar};

pub const MAX_ORDER: u8 = 4;
pub const NCOEF: usize = 35;

/// First coefficient index of each total degree; `DEG_START[d + 1]` is one past
/// the last index of degree `d`.
const DEG_START: [usize; 6] = [0, 1, 4, 10, 20, 35];

struct Tables {
    exps: [[u8; 3]; NCOEF],
    index: [[[u8; 5]; 5]; 5],
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`, sorted by degree of `k`.
    triples: Vec<(u8, u8, u8)>,
    prefix: [usize; 5],
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut exps = [[0u8; 3]; NCOEF];
    let mut index = [[[u8::MAX; 5]; 5]; 5];
    let mut n = 0;
    for d in 0..=MAX_ORDER {
        for a in (0..=d).rev() {
            for b in (0..=(d - a)).rev() {
                let c = d - a - b;
                exps[n] = [a, b, c];
                index[a as usize][b as usize][c as usize] = n as u8;
                n += 1;
            }
        }
    }
    debug_assert_eq!(n, NCOEF);
    let deg = |e: [u8; 3]| e[0] + e[1] + e[2];
    let mut triples = Vec::new();
    for i in 0..NCOEF {
        for j in 0..NCOEF {
            let (ei, ej) = (exps[i], exps[j]);
            if deg(ei) + deg(ej) <= MAX_ORDER {
                let k = index[(ei[0] + ej[0]) as usize][(ei[1] + ej[1]) as usize]
                    [(ei[2] + ej[2]) as usize];
                triples.push((i as u8, j as u8, k));
            }
        }
    }
    triples.sort_by_key(|&(_, _, k)| deg(exps[k as usize]));
    let mut prefix = [0usize; 5];
    for (m, p) in prefix.iter_mut().enumerate() {
        *p = triples
            .iter()
            .filter(|&&(_, _, k)| deg(exps[k as usize]) as usize <= m)
            .count();
    }
    Tables {
        exps,
        index,
        triples,
        prefix,
    }
});

const FACTORIAL: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Truncated Taylor polynomial in `(v0, v1, v2)` of total degree `order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    c: [T; NCOEF],
    order: u8,
}

impl<T: Scalar> Jet<T> {
    /// A constant; its order is maximal so it never truncates a product.
    pub fn constant(v: T) -> Self {
        Self::constant_with_order(v, MAX_ORDER)
    }

    fn constant_with_order(v: T, order: u8) -> Self {
        let mut c = [T::zero(); NCOEF];
        c[0] = v;
        Jet { c, order }
    }

    /// The coordinate function `v_var` expanded around `v`, truncated at `order`.
    pub fn variable(v: T, var: usize, order: u8) -> Self {
        assert!(var < 3 && order <= MAX_ORDER);
        let mut c = [T::zero(); NCOEF];
        c[0] = v;
        if order >= 1 {
            c[1 + var] = T::one();
        }
        Jet { c, order }
    }

    /// Three seeded coordinate jets at `point`.
    pub fn seed(point: [T; 3], order: u8) -> [Self; 3] {
        [
            Self::variable(point[0], 0, order),
            Self::variable(point[1], 1, order),
            Self::variable(point[2], 2, order),
        ]
    }

    /// Builds a jet of `order` from its Taylor coefficients.
    pub fn from_coeffs(order: u8, mut coeff: impl FnMut([usize; 3]) -> T) -> Self {
        assert!(order <= MAX_ORDER);
        let tb = &*TABLES;
        let mut c = [T::zero(); NCOEF];
        for (ck, e) in c.iter_mut().zip(tb.exps.iter()).take(DEG_START[order as usize + 1]) {
            *ck = coeff([e[0] as usize, e[1] as usize, e[2] as usize]);
        }
        Jet { c, order }
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    fn active(&self) -> usize {
        DEG_START[self.order as usize + 1]
    }

    /// Taylor coefficient of `v0^a v1^b v2^c`; zero beyond the jet order.
    pub fn coeff(&self, e: [usize; 3]) -> T {
        if e.iter().sum::<usize>() > self.order as usize {
            return T::zero();
        }
        self.c[TABLES.index[e[0]][e[1]][e[2]] as usize]
    }

    /// Mixed partial derivative `∂^(a+b+c) / ∂v0^a ∂v1^b ∂v2^c`.
    ///
    /// Panics if the requested degree exceeds the jet order.
    pub fn partial(&self, e: [usize; 3]) -> T {
        assert!(
            e.iter().sum::<usize>() <= self.order as usize,
            "partial of degree {:?} requested from a jet of order {}",
            e,
            self.order
        );
        let scale = FACTORIAL[e[0]] * FACTORIAL[e[1]] * FACTORIAL[e[2]];
        self.coeff(e) * lit(scale)
    }

    pub fn gradient(&self) -> [T; 3] {
        [
            self.partial([1, 0, 0]),
            self.partial([0, 1, 0]),
            self.partial([0, 0, 1]),
        ]
    }

    pub fn hessian(&self) -> [[T; 3]; 3] {
        let mut h = [[T::zero(); 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                let mut e = [0usize; 3];
                e[i] += 1;
                e[j] += 1;
                *hij = self.partial(e);
            }
        }
        h
    }

    /// Sum of pure second derivatives; the Laplacian when the variables are
    /// Euclidean coordinates. The result has order `self.order - 2`.
    pub fn laplacian(&self) -> Self {
        assert!(self.order >= 2, "laplacian needs a jet of order >= 2");
        let order = self.order - 2;
        let tb = &*TABLES;
        let mut c = [T::zero(); NCOEF];
        for (k, ck) in c.iter_mut().enumerate().take(DEG_START[order as usize + 1]) {
            let e = tb.exps[k];
            let mut acc = T::zero();
            for v in 0..3 {
                let mut up = e;
                up[v] += 2;
                let idx = tb.index[up[0] as usize][up[1] as usize][up[2] as usize] as usize;
                let m = up[v] as f64;
                acc = acc + self.c[idx] * lit(m * (m - 1.0));
            }
            *ck = acc;
        }
        Jet { c, order }
    }

    /// Partial derivative along one variable, as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(self.order >= 1);
        let order = self.order - 1;
        let tb = &*TABLES;
        let mut c = [T::zero(); NCOEF];
        for (k, ck) in c.iter_mut().enumerate().take(DEG_START[order as usize + 1]) {
            let mut up = tb.exps[k];
            up[var] += 1;
            let idx = tb.index[up[0] as usize][up[1] as usize][up[2] as usize] as usize;
            *ck = self.c[idx] * lit(up[var] as f64);
        }
        Jet { c, order }
    }

    /// Drops coefficients above `order`.
    pub fn truncate(mut self, order: u8) -> Self {
        if order < self.order {
            for ck in self.c.iter_mut().skip(DEG_START[order as usize + 1]) {
                *ck = T::zero();
            }
            self.order = order;
        }
        self
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> T {
        self.c[..self.active()]
            .iter()
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.c[..self.active()].iter().all(|x| x.is_finite())
    }

    /// Composes with a univariate function given its Taylor coefficients
    /// `g^(m)(x0) / m!` at the value of `self`.
    fn compose(&self, t: [T; 5]) -> Self {
        let o = self.order as usize;
        let mut d = *self;
        d.c[0] = T::zero();
        let mut acc = Self::constant_with_order(t[o], self.order);
        for m in (0..o).rev() {
            acc = acc * d;
            acc.c[0] = acc.c[0] + t[m];
        }
        acc
    }

    pub fn recip(&self) -> Self {
        let x = self.value();
        let r = x.recip();
        let mut t = [T::zero(); 5];
        let mut p = r;
        for (m, tm) in t.iter_mut().enumerate() {
            *tm = if m % 2 == 0 { p } else { -p };
            p = p * r;
        }
        self.compose(t)
    }

    pub fn powf(&self, p: T) -> Self {
        let x = self.value();
        let mut t = [T::zero(); 5];
        let mut binom = T::one();
        let mut xp = x.powf(p);
        let xr = x.recip();
        for (m, tm) in t.iter_mut().enumerate() {
            *tm = binom * xp;
            binom = binom * (p - lit(m as f64)) / lit(m as f64 + 1.0);
            xp = xp * xr;
        }
        self.compose(t)
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::constant_with_order(T::one(), self.order),
            1 => *self,
            2 => *self * *self,
            -1 => self.recip(),
            _ => self.powf(lit(n as f64)),
        }
    }

    pub fn sqrt(&self) -> Self {
        let x = self.value();
        let s = x.sqrt();
        let xr = x.recip();
        let mut t = [T::zero(); 5];
        let mut binom = T::one();
        let mut xp = s;
        let half = lit::<T>(0.5);
        for (m, tm) in t.iter_mut().enumerate() {
            *tm = binom * xp;
            binom = binom * (half - lit(m as f64)) / lit(m as f64 + 1.0);
            xp = xp * xr;
        }
        self.compose(t)
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(std::array::from_fn(|m| e / lit(FACTORIAL[m])))
    }

    pub fn exp_m1(&self) -> Self {
        let x = self.value();
        let e = x.exp();
        let mut t: [T; 5] = std::array::from_fn(|m| e / lit(FACTORIAL[m]));
        t[0] = x.exp_m1();
        self.compose(t)
    }

    fn log_series(base: T, value: T) -> [T; 5] {
        let r = base.recip();
        let mut t = [T::zero(); 5];
        t[0] = value;
        let mut p = r;
        for (m, tm) in t.iter_mut().enumerate().skip(1) {
            let sign = if m % 2 == 1 { T::one() } else { -T::one() };
            *tm = sign * p / lit(m as f64);
            p = p * r;
        }
        t
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        self.compose(Self::log_series(x, x.ln()))
    }

    pub fn ln_1p(&self) -> Self {
        let x = self.value();
        self.compose(Self::log_series(T::one() + x, x.ln_1p()))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let d = [s, c, -s, -c, s];
        self.compose(std::array::from_fn(|m| d[m] / lit(FACTORIAL[m])))
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let d = [c, -s, -c, s, c];
        self.compose(std::array::from_fn(|m| d[m] / lit(FACTORIAL[m])))
    }

    pub fn atan(&self) -> Self {
        let u = self.value();
        let w = (T::one() + u * u).recip();
        let d = [
            u.atan(),
            w,
            lit::<T>(-2.0) * u * w * w,
            (lit::<T>(6.0) * u * u - lit(2.0)) * w * w * w,
            lit::<T>(24.0) * u * (T::one() - u * u) * w * w * w * w,
        ];
        self.compose(std::array::from_fn(|m| d[m] / lit(FACTORIAL[m])))
    }

    /// Four-quadrant arctangent of `self / x`.
    pub fn atan2(&self, x: &Self) -> Self {
        let (yv, xv) = (self.value(), x.value());
        let mut out = if xv.abs() >= yv.abs() {
            (*self / *x).atan()
        } else {
            -(*x / *self).atan()
        };
        out.c[0] = yv.atan2(xv);
        out
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut c = [T::zero(); NCOEF];
        for (k, ck) in c.iter_mut().enumerate().take(DEG_START[order as usize + 1]) {
            *ck = self.c[k] + rhs.c[k];
        }
        Jet { c, order }
    }
}

impl<T: Scalar> AddAssign for Jet<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut c = [T::zero(); NCOEF];
        for (k, ck) in c.iter_mut().enumerate().take(DEG_START[order as usize + 1]) {
            *ck = self.c[k] - rhs.c[k];
        }
        Jet { c, order }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        let n = self.active();
        for ck in self.c.iter_mut().take(n) {
            *ck = -*ck;
        }
        self
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let order = self.order.min(rhs.order);
        let tb = &*TABLES;
        let mut c = [T::zero(); NCOEF];
        for &(i, j, k) in &tb.triples[..tb.prefix[order as usize]] {
            let k = k as usize;
            c[k] = c[k] + self.c[i as usize] * rhs.c[j as usize];
        }
        Jet { c, order }
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> Add<T> for Jet<T> {
    type Output = Self;
    fn add(mut self, rhs: T) -> Self {
        self.c[0] = self.c[0] + rhs;
        self
    }
}

impl<T: Scalar> Sub<T> for Jet<T> {
    type Output = Self;
    fn sub(mut self, rhs: T) -> Self {
        self.c[0] = self.c[0] - rhs;
        self
    }
}

impl<T: Scalar> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(mut self, rhs: T) -> Self {
        let n = self.active();
        for ck in self.c.iter_mut().take(n) {
            *ck = *ck * rhs;
        }
        self
    }
}

impl<T: Scalar> Div<T> for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: T) -> Self {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn tables_are_consistent() {
        let tb = &*TABLES;
        assert_eq!(tb.prefix[4], tb.triples.len());
        assert_eq!(tb.prefix[0], 1);
        // degree <= 1 products: 1*1, 1*x_i, x_i*1
        assert_eq!(tb.prefix[1], 7);
    }

    #[test]
    fn polynomial_partials_are_exact() {
        // f = x^2 y + 3 y z^3
        let [x, y, z] = Jet::seed([1.5, -0.5, 2.0], 4);
        let f = x * x * y + y * z * z * z * 3.0;
        assert!(close(f.value(), 1.5 * 1.5 * -0.5 + 3.0 * -0.5 * 8.0, 1e-15));
        assert!(close(f.partial([1, 0, 0]), 2.0 * 1.5 * -0.5, 1e-15));
        assert!(close(f.partial([2, 1, 0]), 2.0, 1e-15));
        assert!(close(f.partial([0, 1, 3]), 18.0, 1e-15));
        assert!(close(f.partial([0, 0, 2]), 18.0 * -0.5 * 2.0, 1e-15));
        assert_eq!(f.partial([0, 0, 4]), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x = Jet::variable(0.7_f64, 0, 4);
        let checks: [(Jet<f64>, [f64; 5]); 5] = [
            (x.exp(), [0.7f64.exp(); 5]),
            (
                x.ln(),
                [
                    0.7f64.ln(),
                    1.0 / 0.7,
                    -1.0 / 0.49,
                    2.0 / 0.343,
                    -6.0 / 0.2401,
                ],
            ),
            (
                x.sin(),
                [
                    0.7f64.sin(),
                    0.7f64.cos(),
                    -0.7f64.sin(),
                    -0.7f64.cos(),
                    0.7f64.sin(),
                ],
            ),
            (
                x.sqrt(),
                [
                    0.7f64.sqrt(),
                    0.5 * 0.7f64.powf(-0.5),
                    -0.25 * 0.7f64.powf(-1.5),
                    0.375 * 0.7f64.powf(-2.5),
                    -0.9375 * 0.7f64.powf(-3.5),
                ],
            ),
            (
                x.recip(),
                [
                    1.0 / 0.7,
                    -1.0 / 0.49,
                    2.0 / 0.343,
                    -6.0 / 0.2401,
                    24.0 / 0.16807,
                ],
            ),
        ];
        for (jet, expect) in checks {
            for (m, e) in expect.iter().enumerate() {
                assert!(close(jet.partial([m, 0, 0]), *e, 1e-13), "m={m}");
            }
        }
    }

    #[test]
    fn atan2_has_radial_independence() {
        // θ = atan2(y, x) satisfies x θ_x + y θ_y = 0 and Δθ = 0.
        let [x, y, _] = Jet::seed([-0.3_f64, 0.8, 0.0], 4);
        let th = y.atan2(&x);
        assert!(close(th.value(), 0.8f64.atan2(-0.3), 1e-15));
        let g = th.gradient();
        assert!((-0.3 * g[0] + 0.8 * g[1]).abs() < 1e-14);
        assert!(th.laplacian().value().abs() < 1e-12);
        assert!(th.laplacian().gradient()[0].abs() < 1e-11);
    }

    #[test]
    fn expm1_and_ln1p_are_inverse() {
        let x = Jet::variable(1e-9_f64, 1, 4);
        let y = x.exp_m1().ln_1p();
        for e in [[0, 1, 0], [0, 2, 0], [0, 3, 0], [0, 4, 0]] {
            let expect = if e[1] == 1 { 1.0 } else { 0.0 };
            assert!((y.partial(e) - expect).abs() < 1e-12);
        }
        assert!((y.value() - 1e-9).abs() < 1e-24);
    }

    #[test]
    fn truncated_orders_propagate() {
        let a = Jet::variable(2.0_f64, 0, 2);
        let b = Jet::variable(3.0_f64, 1, 4);
        let p = a * b;
        assert_eq!(p.order(), 2);
        assert_eq!(p.partial([1, 1, 0]), 1.0);
        let c = Jet::constant(5.0) + a;
        assert_eq!(c.order(), 2);
    }
}
