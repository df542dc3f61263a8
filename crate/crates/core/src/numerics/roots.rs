//! Scalar root finding for monotone functions.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Expands `[a, b]` geometrically about zero until `f` changes sign.
///
/// Intended for increasing functions with `f(-∞) < 0 < f(+∞)`; the bracket
/// grows by `factor` on whichever side still has the wrong sign.
pub fn expand_bracket<T: Scalar>(
    f: &impl Fn(T) -> T,
    mut a: T,
    mut b: T,
    factor: T,
    limit: T,
) -> Result<(T, T)> {
    let (mut fa, mut fb) = (f(a), f(b));
    loop {
        if fa <= T::zero() && fb >= T::zero() {
            return Ok((a, b));
        }
        if a.abs() > limit || b.abs() > limit {
            return Err(Error::BracketNotFound {
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
        if fa > T::zero() {
            b = a;
            fb = fa;
            a = a * factor;
            fa = f(a);
        } else {
            a = b;
            fa = fb;
            b = b * factor;
            fb = f(b);
        }
    }
}

/// Newton iteration safeguarded by bisection inside an increasing bracket.
///
/// `fd` returns the value and derivative. Stops when the step is below
/// `tol · (1 + |x|)`.
pub fn newton_bracketed<T: Scalar>(
    fd: impl Fn(T) -> (T, T),
    mut a: T,
    mut b: T,
    tol: T,
    max_iter: usize,
) -> Result<T> {
    let half = lit::<T>(0.5);
    let mut x = (a + b) * half;
    for _ in 0..max_iter {
        let (fx, dfx) = fd(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx < T::zero() {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - fx / dfx;
        if !(next > a && next < b) || !next.is_finite() {
            next = (a + b) * half;
        }
        let step = (next - x).abs();
        x = next;
        if step <= tol * (T::one() + x.abs()) || (b - a) <= tol * (T::one() + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::NonConvergent(format!(
        "Newton iteration stalled in [{a:?}, {b:?}]"
    )))
}

/// Brent's method on a sign-changing bracket.
pub fn brent<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa * fb > T::zero() {
        return Err(Error::InvalidParameter("Brent bracket has no sign change".into()));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    let two = lit::<T>(2.0);
    for _ in 0..max_iter {
        if fb == T::zero() || (b - a).abs() <= tol * (T::one() + b.abs()) {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (lit::<T>(3.0) * a + b) / lit(4.0);
        let between = (s > lo.min(b)) && (s < lo.max(b));
        let tiny = tol * (T::one() + b.abs());
        if !between
            || (bisected && (s - b).abs() >= (b - c).abs() / two)
            || (!bisected && (s - b).abs() >= (c - d).abs() / two)
            || (bisected && (b - c).abs() < tiny)
            || (!bisected && (c - d).abs() < tiny)
        {
            s = (a + b) / two;
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < T::zero() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::NonConvergent("Brent iteration limit reached".into()))
}
