//! Richardson extrapolation and finite differences.

use crate::scalar::{lit, Scalar};

/// Extrapolates `values[i] ≈ A(h / ratio^i)` to `h → 0`, assuming the error
/// expands in the given powers of `h` (one power eliminated per level).
///
/// Returns the extrapolated value and the size of the last correction.
pub fn richardson<T: Scalar>(values: &[T], ratio: T, powers: &[T]) -> (T, T) {
    assert!(!values.is_empty());
    let mut row = values.to_vec();
    let mut correction = T::zero();
    for &p in powers.iter().take(values.len() - 1) {
        let factor = ratio.powf(p);
        let next: Vec<T> = row
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / (factor - T::one()))
            .collect();
        correction = (next[next.len() - 1] - row[row.len() - 1]).abs();
        row = next;
    }
    (row[row.len() - 1], correction)
}

/// Step used by the finite-difference fallbacks.
pub fn fd_step<T: Scalar>(x: T) -> T {
    lit::<T>(1e-5).max(lit::<T>(1e-5) * x.abs())
}

/// Central first derivative with one Richardson level (fourth order).
pub fn central_diff<T: Scalar>(f: impl Fn(T) -> T, x: T, h: T) -> T {
    let d = |h: T| (f(x + h) - f(x - h)) / (h + h);
    let (d1, d2) = (d(h), d(h * lit(0.5)));
    d2 + (d2 - d1) / lit(3.0)
}

/// Central second derivative with one Richardson level (fourth order).
pub fn central_diff2<T: Scalar>(f: impl Fn(T) -> T, x: T, h: T) -> T {
    let fx = f(x);
    let d = |h: T| (f(x + h) - fx - fx + f(x - h)) / (h * h);
    let (d1, d2) = (d(h), d(h * lit(0.5)));
    d2 + (d2 - d1) / lit(3.0)
}
