//! Least-squares line fits, mostly on log-log data.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination.
    pub r2: T,
}

pub fn fit_line<T: Scalar>(x: &[T], y: &[T]) -> Result<LineFit<T>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs two equally long samples of length >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = from_usize::<T>(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() {
        return Err(Error::InvalidParameter("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == T::zero() {
        T::one()
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Fits `ln y = slope · ln x + intercept`. All samples must be positive.
pub fn fit_loglog<T: Scalar>(x: &[T], y: &[T]) -> Result<LineFit<T>> {
    if x.iter().chain(y).any(|v| !(*v > T::zero())) {
        return Err(Error::InvalidParameter(
            "log-log fit requires positive samples".into(),
        ));
    }
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// `n` logarithmically spaced points from `a` to `b` inclusive.
pub fn logspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && a > T::zero() && b > T::zero());
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / from_usize::<T>(n - 1);
    // endpoints exact, so requested ranges appear verbatim in outputs
    let mut v: Vec<T> = (0..n).map(|i| (la + step * from_usize(i)).exp()).collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = logspace(1.0, 1e3, 9);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-2.5)).collect();
        let fit = fit_loglog(&x, &y).unwrap();
        assert!((fit.slope + 2.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }
}
