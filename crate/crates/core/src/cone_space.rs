//! The cone `C_β × R` with metric `g_β = dr² + β²r² dθ² + ds²`.
//!
//! Points are stored in `(r, θ, s)` with `θ ∈ (−π, π]` of period `2π`. The
//! unrolled flat coordinates `(r cos βθ, r sin βθ, s)` identify the cone with
//! a wedge of opening `2πβ` in `R³`; they are used whenever a Euclidean
//! formula (distances, Cartesian derivatives) is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::richardson::{central_diff2, fd_step};
use crate::scalar::{lit, Scalar};

/// Cone angle parameter `β ∈ (0, 1]` together with `c = 1/β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeAngle<T> {
    beta: T,
    c: T,
}

impl<T: Scalar> ConeAngle<T> {
    pub fn new(beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "cone angle beta must lie in (0, 1], got {beta}"
            )));
        }
        Ok(ConeAngle {
            beta,
            c: beta.recip(),
        })
    }

    /// `β = 1/n`, with `c = n` exactly.
    pub fn from_n(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let c = lit::<T>(n as f64);
        Ok(ConeAngle { beta: c.recip(), c })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// `Some(n)` when `β = 1/n` for a positive integer `n`.
    pub fn reciprocal_integer(&self) -> Option<u32> {
        let n = self.c.round();
        if (self.c - n).abs() <= lit::<T>(1e-12) * self.c && n >= T::one() {
            n.to_u32()
        } else {
            None
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn normalize_angle<T: Scalar>(theta: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    if theta > -pi && theta <= pi {
        return theta;
    }
    let mut t = theta - two_pi * ((theta + pi) / two_pi).floor();
    // t ∈ [−π, π)
    if t <= -pi {
        t = t + two_pi;
    }
    t
}

/// A point `(r, θ, s)` of the cone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint<T> {
    pub r: T,
    pub theta: T,
    pub s: T,
}

impl<T: Scalar> ConePoint<T> {
    /// Builds a point, wrapping `θ` into `(−π, π]`. Rejects `r < 0`.
    pub fn new(r: T, theta: T, s: T) -> Result<Self> {
        if !(r >= T::zero()) || !theta.is_finite() || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "invalid cone point (r, theta, s) = ({r}, {theta}, {s})"
            )));
        }
        Ok(ConePoint {
            r,
            theta: normalize_angle(theta),
            s,
        })
    }

    /// The pole `p = (1, 0, 0)` of the potential.
    pub fn pole() -> Self {
        ConePoint {
            r: T::one(),
            theta: T::zero(),
            s: T::zero(),
        }
    }

    /// `|x| = √(r² + s²)`, the distance to the origin.
    pub fn norm(&self) -> T {
        self.r.hypot(self.s)
    }

    /// Flat coordinates `(r cos βθ, r sin βθ, s)` in the unrolled wedge.
    pub fn unrolled(&self, angle: &ConeAngle<T>) -> [T; 3] {
        let (sn, cs) = (angle.beta() * self.theta).sin_cos();
        [self.r * cs, self.r * sn, self.s]
    }

    /// Inverse of [`ConePoint::unrolled`]; rejects points outside the wedge
    /// `|arg| ≤ βπ`.
    pub fn from_unrolled(x: [T; 3], angle: &ConeAngle<T>) -> Result<Self> {
        let r = x[0].hypot(x[1]);
        let phi = x[1].atan2(x[0]);
        let limit = angle.beta() * T::PI();
        if phi.abs() > limit * (T::one() + T::epsilon() * lit(4.0)) {
            return Err(Error::InvalidParameter(format!(
                "unrolled point has argument {phi} outside the wedge of half-angle {limit}"
            )));
        }
        let theta = (phi / angle.beta()).max(-T::PI()).min(T::PI());
        ConePoint::new(r, theta, x[2])
    }

    /// Euclidean distance to the pole in unrolled coordinates.
    pub fn distance_to_pole(&self, angle: &ConeAngle<T>) -> T {
        cone_distance(self, &Self::pole(), angle)
    }
}

/// Distance between two points of the cone.
///
/// The shortest path is the chord in the unrolled picture when the angular
/// separation `β|Δθ|` (with `Δθ` reduced to `(−π, π]`) is at most `π`, and
/// otherwise runs through the edge.
pub fn cone_distance<T: Scalar>(x: &ConePoint<T>, y: &ConePoint<T>, angle: &ConeAngle<T>) -> T {
    let dtheta = normalize_angle(x.theta - y.theta);
    let ds = x.s - y.s;
    let opening = angle.beta() * dtheta.abs();
    let planar_sq = if opening <= T::PI() {
        // r_x² + r_y² − 2 r_x r_y cos φ = (r_x − r_y)² + 4 r_x r_y sin²(φ/2)
        let h = (opening * lit(0.5)).sin();
        let dr = x.r - y.r;
        dr * dr + lit::<T>(4.0) * x.r * y.r * h * h
    } else {
        let sum = x.r + y.r;
        sum * sum
    };
    (planar_sq + ds * ds).sqrt()
}

/// Components of a 1-form in the orthonormal coframe `(dr, βr dθ, ds)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoTriple<T> {
    pub dr: T,
    pub dtheta: T,
    pub ds: T,
}

/// Components of a 2-form in the basis `(βr dθ∧ds, ds∧dr, βr dr∧dθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoForm<T> {
    pub theta_s: T,
    pub s_r: T,
    pub r_theta: T,
}

/// The Hodge star of `g_β` on 1-forms at `x`.
///
/// In the orthonormal frames the star maps components identically:
/// `⋆dr = βr dθ∧ds`, `⋆(βr dθ) = ds∧dr`, `⋆ds = βr dr∧dθ`.
pub fn hodge_star_1form<T: Scalar>(omega: &CoTriple<T>, x: &ConePoint<T>) -> Result<TwoForm<T>> {
    if x.r <= T::zero() {
        return Err(Error::OnEdge);
    }
    Ok(TwoForm {
        theta_s: omega.dr,
        s_r: omega.dtheta,
        r_theta: omega.ds,
    })
}

/// The Hodge star on 2-forms, the inverse of [`hodge_star_1form`].
pub fn hodge_star_2form<T: Scalar>(eta: &TwoForm<T>, x: &ConePoint<T>) -> Result<CoTriple<T>> {
    if x.r <= T::zero() {
        return Err(Error::OnEdge);
    }
    Ok(CoTriple {
        dr: eta.theta_s,
        dtheta: eta.s_r,
        ds: eta.r_theta,
    })
}

/// `Δ_β u = u_rr + u_r / r + u_θθ / (β² r²) + u_ss` from a jet of `u` seeded
/// in `(r, θ, s)` at `x`.
pub fn laplacian_beta<T: Scalar>(u: &Jet<T>, x: &ConePoint<T>, angle: &ConeAngle<T>) -> Result<T> {
    if x.r <= T::zero() {
        return Err(Error::OnEdge);
    }
    let br = angle.beta() * x.r;
    Ok(u.partial([2, 0, 0])
        + u.partial([1, 0, 0]) / x.r
        + u.partial([0, 2, 0]) / (br * br)
        + u.partial([0, 0, 2]))
}

/// [`laplacian_beta`] by fourth-order central differences of a value
/// evaluator, for fields without analytic derivatives.
pub fn laplacian_beta_fd<T: Scalar>(
    u: impl Fn(T, T, T) -> T,
    x: &ConePoint<T>,
    angle: &ConeAngle<T>,
) -> Result<T> {
    if x.r <= T::zero() {
        return Err(Error::OnEdge);
    }
    let (r, th, s) = (x.r, x.theta, x.s);
    let hr = fd_step(r);
    let u_rr = central_diff2(|v| u(v, th, s), r, hr);
    let u_r = crate::numerics::richardson::central_diff(|v| u(v, th, s), r, hr);
    let u_tt = central_diff2(|v| u(r, v, s), th, fd_step(th));
    let u_ss = central_diff2(|v| u(r, th, v), s, fd_step(s));
    let br = angle.beta() * r;
    Ok(u_rr + u_r / r + u_tt / (br * br) + u_ss)
}
