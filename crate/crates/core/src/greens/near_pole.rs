//! The smooth part `2πF` close to the pole, by harmonic extension.
//!
//! `F` is harmonic in the unrolled ball of radius 1 around `p` (the edge is
//! the nearest obstruction), so inside a sphere `S` of radius `ρ` it is
//! reproduced by the Poisson integral
//!
//! ```text
//! F(x) = ρ (ρ² − |x − p|²)/(4π) ∫_{S²} F(p + ρn) / |x − p − ρn|³ dΩ(n).
//! ```
//!
//! The sphere values are computed once per field; afterwards a near-pole jet
//! costs one pass over the nodes and no adaptive quadrature.

use rayon::prelude::*;

use crate::error::Result;
use crate::jet::Jet;
use crate::numerics::quadrature::{gauss_legendre, periodic_trapezoid};
use crate::scalar::{lit, Scalar};

use super::kernel::smooth_part_jet;

/// Radius of the sphere carrying the data.
pub const SPHERE_RADIUS: f64 = 0.25;
/// Points closer than this to the pole use the extension.
pub const NEAR_RADIUS: f64 = 0.1;

const POLAR_NODES: usize = 32;
const AZIMUTH_NODES: usize = 64;

/// Quadrature nodes on the sphere with the smooth part folded into the
/// weights.
#[derive(Clone, Debug)]
pub struct SphereData<T> {
    rho: T,
    /// `(n, w·F(p + ρn))` with `Σ w = 4π`.
    nodes: Vec<([T; 3], T)>,
}

impl<T: Scalar> SphereData<T> {
    pub fn compute(beta: T, rel_tol: T) -> Result<Self> {
        let rho = lit::<T>(SPHERE_RADIUS);
        let (xs, ws) = gauss_legendre::<T>(POLAR_NODES);
        let azimuth: Vec<_> = periodic_trapezoid(AZIMUTH_NODES, lit::<T>(2.0) * T::PI()).collect();
        let mut dirs = Vec::with_capacity(POLAR_NODES * AZIMUTH_NODES);
        for (&ct, &wt) in xs.iter().zip(&ws) {
            let st = (T::one() - ct * ct).sqrt();
            for &(ph, wp) in &azimuth {
                let (sp, cp) = ph.sin_cos();
                dirs.push(([st * cp, st * sp, ct], wt * wp));
            }
        }
        let c = |v: T| Jet::constant(v).truncate(0);
        let nodes = dirs
            .into_par_iter()
            .map(|(n, w)| {
                let (x, y, z) = (T::one() + rho * n[0], rho * n[1], rho * n[2]);
                let r = (x * x + y * y).sqrt();
                let theta = y.atan2(x) / beta;
                let f = smooth_part_jet(c(r), c(theta), c(z), c(T::one()), beta, rel_tol)?;
                Ok((n, w * f.value()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SphereData { rho, nodes })
    }

    /// `2πF` at `p + δ`, `δ` in unrolled Cartesian components.
    pub fn eval(&self, delta: [Jet<T>; 3]) -> Jet<T> {
        let rho = self.rho;
        let d2 = delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2];
        // |δ − ρn|² = |δ|² + ρ² − 2ρ n·δ
        let base = d2 + rho * rho;
        let mut acc = Jet::constant(T::zero()).truncate(delta[0].order());
        for (n, wf) in &self.nodes {
            let dot = delta[0] * n[0] + delta[1] * n[1] + delta[2] * n[2];
            let q = base - dot * (rho + rho);
            acc += q.powf(lit(-1.5)) * *wf;
        }
        acc * (-d2 + rho * rho) * (rho / (lit::<T>(4.0) * T::PI()))
    }
}
